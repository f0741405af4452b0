//! Command-line front end.
//!
//! Experiment settings come from a flat `key = value` file (`--config`) and
//! are overridden by flags of the same name. Exit codes: 0 success, 1 usage
//! or input error, 2 guard violation, 3 invariant failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmatrix::BitMatrix;
use crate::bounds::{self, format_sig, RateReport, SweepRanges};
use crate::channel::{
    noise_concentrated, noise_uniform, noise_worst_exhaustive, ChannelParams, LiftedTransfer,
    NoiseMatrix, Probability, MAX_ADVERSARY_CANDIDATES,
};
use crate::codes::{
    self, coherent_guarantee, gv_construct_coherent, gv_construct_noncoherent,
    noncoherent_guarantee, Codebook, Decoder, Mode,
};
use crate::combin::{binomial_u64, Colex};
use crate::error::{Error, Result};
use crate::gf2m::Field;
use crate::network::{
    cauchy_transfer, mds_family, random_mds_transfer, sample_until_mds, Network, TransferPair,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_GUARD: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

/// Codebooks larger than this skip the quadratic minimum-distance report.
pub const MAX_DISTANCE_CHECK: usize = 20_000;

#[derive(Parser, Debug)]
#[command(name = "binec", version, about = "Worst-case bit-flip error correction for coded networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the GF(2^m) to binary-matrix maps
    VerifyField {
        #[arg(long)]
        m: u32,
        /// Random pairs checked when the field is too large to enumerate
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the rate bounds at one point as CSV
    Bounds {
        #[arg(long)]
        p: String,
        #[arg(long = "C", alias = "c")]
        c: usize,
        #[arg(long = "E", alias = "e")]
        e: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the rate bounds over a Cartesian grid as CSV
    Sweep {
        /// Comma-separated values, or `start:stop:count` for a geometric grid
        #[arg(long)]
        p: String,
        #[arg(long = "C", alias = "c")]
        c: String,
        #[arg(long = "E", alias = "e")]
        e: String,
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a codebook and write it to a file
    Build {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transmit and decode codewords from a codebook file
    Simulate {
        #[command(flatten)]
        exp: ExperimentArgs,
        #[arg(long)]
        codebook: Option<PathBuf>,
        /// Per-trial CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw coding coefficients for a network until its impulse response is MDS
    MdsCheck {
        #[command(flatten)]
        exp: ExperimentArgs,
    },
}

#[derive(Args, Debug, Default)]
struct ExperimentArgs {
    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// Network file, or `synthetic`
    #[arg(long)]
    network: Option<String>,
    #[arg(long = "C", alias = "c")]
    c: Option<usize>,
    #[arg(long = "E", alias = "e")]
    e: Option<usize>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<String>,
    /// `uniform`, `concentrated:<edge>,<edge>...`, `exhaustive` or `adversary`
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    /// Noise weight the adversary may use; defaults to the channel budget
    #[arg(long)]
    adversary_budget: Option<u64>,
    #[arg(long)]
    retries: Option<u32>,
    /// File of `that` lines overriding the default non-coherent family
    #[arg(long)]
    family: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NetworkSource {
    Synthetic,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NoiseMode {
    Uniform,
    Concentrated(Vec<usize>),
    Exhaustive,
    Adversary,
}

impl std::str::FromStr for NoiseMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(NoiseMode::Uniform),
            "exhaustive" => Ok(NoiseMode::Exhaustive),
            "adversary" => Ok(NoiseMode::Adversary),
            _ => {
                let edges = s
                    .strip_prefix("concentrated:")
                    .ok_or_else(|| Error::Invalid(format!("unknown noise mode {s:?}")))?;
                let edges = edges
                    .split(',')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::Invalid(format!("bad edge index {t:?}")))
                    })
                    .collect::<Result<_>>()?;
                Ok(NoiseMode::Concentrated(edges))
            }
        }
    }
}

/// Resolved experiment settings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub network: NetworkSource,
    pub c: Option<usize>,
    pub e: Option<usize>,
    pub m: u32,
    pub n: usize,
    pub p: Probability,
    pub seed: u64,
    pub mode: Mode,
    pub noise: NoiseMode,
    pub trials: u64,
    pub adversary_budget: Option<u64>,
    pub retries: u32,
    pub family: Option<PathBuf>,
    pub codebook: Option<PathBuf>,
}

const CONFIG_KEYS: &[&str] = &[
    "network",
    "C",
    "E",
    "m",
    "n",
    "p",
    "seed",
    "mode",
    "noise",
    "trials",
    "adversary_budget",
    "retries",
    "family",
    "codebook",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Parse { line: k + 1, msg };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, found {line:?}")))?;
        let key = match key.trim() {
            "c" => "C",
            "e" => "E",
            other => other,
        };
        if !CONFIG_KEYS.contains(&key) {
            return Err(err(format!("unknown key {key:?}")));
        }
        if map.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(err(format!("duplicate key {key:?}")));
        }
    }
    Ok(map)
}

impl ExperimentArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        self.resolve_with(&[])
    }

    /// Like `resolve`, filling keys absent from both the file and the flags.
    fn resolve_with(&self, defaults: &[(&str, &str)]) -> Result<ExperimentConfig> {
        let (mut map, base) = match &self.config {
            Some(path) => (
                parse_config_text(&std::fs::read_to_string(path)?)?,
                path.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (BTreeMap::new(), PathBuf::new()),
        };
        // paths from the file are relative to it; flag paths to the working directory
        let mut file_relative: Vec<&str> = vec!["network", "family", "codebook"];
        let overrides: [(&str, Option<String>); 12] = [
            ("network", self.network.clone()),
            ("C", self.c.map(|v| v.to_string())),
            ("E", self.e.map(|v| v.to_string())),
            ("m", self.m.map(|v| v.to_string())),
            ("n", self.n.map(|v| v.to_string())),
            ("p", self.p.clone()),
            ("seed", self.seed.map(|v| v.to_string())),
            ("mode", self.mode.clone()),
            ("noise", self.noise.clone()),
            ("trials", self.trials.map(|v| v.to_string())),
            ("adversary_budget", self.adversary_budget.map(|v| v.to_string())),
            ("retries", self.retries.map(|v| v.to_string())),
        ];
        for (k, v) in overrides {
            if let Some(v) = v {
                file_relative.retain(|&f| f != k);
                map.insert(k.to_string(), v);
            }
        }
        if let Some(f) = &self.family {
            file_relative.retain(|&x| x != "family");
            map.insert("family".into(), f.clone());
        }
        for (k, v) in defaults {
            map.entry(k.to_string()).or_insert_with(|| v.to_string());
        }
        let path_of = |key: &str, v: &str| -> PathBuf {
            if file_relative.contains(&key) {
                base.join(v)
            } else {
                PathBuf::from(v)
            }
        };
        let num = |key: &str| -> Result<Option<u64>> {
            map.get(key)
                .map(|v| v.parse::<u64>().map_err(|_| Error::Invalid(format!("{key} = {v:?} is not a number"))))
                .transpose()
        };
        let need = |key: &str| -> Result<u64> {
            num(key)?.ok_or_else(|| Error::Invalid(format!("missing required setting {key}")))
        };
        let network = match map.get("network").map(String::as_str) {
            None | Some("synthetic") => NetworkSource::Synthetic,
            Some(path) => NetworkSource::File(path_of("network", path)),
        };
        let p: Probability = map
            .get("p")
            .ok_or_else(|| Error::Invalid("missing required setting p".into()))?
            .parse()?;
        Ok(ExperimentConfig {
            network,
            c: num("C")?.map(|v| v as usize),
            e: num("E")?.map(|v| v as usize),
            m: u32::try_from(need("m")?).map_err(|_| Error::Invalid("m out of range".into()))?,
            n: need("n")? as usize,
            p,
            seed: num("seed")?.unwrap_or(0),
            mode: map.get("mode").map(|s| s.parse()).transpose()?.unwrap_or(Mode::Coherent),
            noise: map.get("noise").map(|s| s.parse()).transpose()?.unwrap_or(NoiseMode::Uniform),
            trials: num("trials")?.unwrap_or(0),
            adversary_budget: num("adversary_budget")?,
            retries: num("retries")?.map(|v| v as u32).unwrap_or(100),
            family: map.get("family").map(|v| path_of("family", v)),
            codebook: map.get("codebook").map(|v| path_of("codebook", v)),
        })
    }
}

/// The channel realized by a configuration: its parameters and transfer matrices.
pub struct Realized {
    pub field: Field,
    pub params: ChannelParams,
    pub tp: TransferPair,
}

impl ExperimentConfig {
    /// Synthetic channels use a Cauchy impulse response when the field is
    /// large enough and a seeded random MDS one otherwise; network files get
    /// seeded random coding coefficients.
    pub fn realize(&self) -> Result<Realized> {
        let field = Field::new(self.m)?;
        let tp = match &self.network {
            NetworkSource::Synthetic => {
                let (c, e) = match (self.c, self.e) {
                    (Some(c), Some(e)) => (c, e),
                    _ => return Err(Error::Invalid("a synthetic network needs C and E".into())),
                };
                if (c + e) as u64 <= field.order() as u64 {
                    cauchy_transfer(&field, c, e)?
                } else {
                    random_mds_transfer(&field, c, e, self.seed, self.retries)?
                }
            }
            NetworkSource::File(path) => {
                let net = Network::parse(&std::fs::read_to_string(path)?)?;
                let cap = net.validate()?;
                for (name, given, actual) in [("C", self.c, cap.c), ("E", self.e, cap.e)] {
                    if given.is_some_and(|g| g != actual) {
                        return Err(Error::Invalid(format!(
                            "{name} = {} does not match the network's {actual}",
                            given.unwrap_or_default()
                        )));
                    }
                }
                sample_until_mds(&net, &field, self.seed, self.retries)?.1
            }
        };
        let params = ChannelParams::new(tp.c(), tp.e(), self.m, self.n, self.p)?;
        Ok(Realized { field, params, tp })
    }

    fn family(&self, r: &Realized) -> Result<Vec<TransferPair>> {
        match &self.family {
            Some(path) => codes::parse_family(&std::fs::read_to_string(path)?, &r.params),
            None => mds_family(&r.field, r.params.c, r.params.e, r.tp.source_edges()),
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Guard(_) | Error::RetriesExhausted { .. } | Error::BudgetExceedsTargets { .. } => EXIT_GUARD,
        _ => EXIT_USAGE,
    }
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let to_out = !e.use_stderr();
            let text = e.render().to_string();
            let _ = if to_out { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return if to_out { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let mut buf = String::new();
    let result = dispatch(cli.command, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(command: Command, out: &mut String) -> Result<i32> {
    match command {
        Command::VerifyField { m, samples, seed } => cmd_verify_field(m, samples, seed, out),
        Command::Bounds { p, c, e, m, n } => {
            let p: Probability = p.parse()?;
            let report = RateReport::compute(p.to_f64(), c, e, m, n)?;
            out.push_str(&bounds::to_csv(&[report]));
            Ok(EXIT_OK)
        }
        Command::Sweep { p, c, e, m, n, out: path } => {
            let ranges = SweepRanges {
                ps: parse_p_list(&p)?,
                cs: parse_list(&c)?,
                es: parse_list(&e)?,
                ms: parse_list(&m)?,
                ns: n.as_deref().map(parse_list).transpose()?.unwrap_or_default(),
            };
            let csv = bounds::to_csv(&bounds::sweep(&ranges)?);
            match path {
                Some(path) => {
                    std::fs::write(&path, &csv)?;
                    let _ = writeln!(out, "rows {}", csv.lines().count() - 1);
                }
                None => out.push_str(&csv),
            }
            Ok(EXIT_OK)
        }
        Command::Build { exp, out: path } => {
            let cfg = exp.resolve()?;
            let path = path
                .or_else(|| cfg.codebook.clone())
                .ok_or_else(|| Error::Invalid("build needs --out or a codebook setting".into()))?;
            cmd_build(&cfg, &path, out)
        }
        Command::Simulate { exp, codebook, out: csv } => {
            let cfg = exp.resolve()?;
            let path = codebook
                .or_else(|| cfg.codebook.clone())
                .ok_or_else(|| Error::Invalid("simulate needs --codebook or a codebook setting".into()))?;
            cmd_simulate(&cfg, &path, csv.as_deref(), out)
        }
        Command::MdsCheck { exp } => cmd_mds_check(&exp.resolve_with(&[("n", "1"), ("p", "0")])?, out),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse().map_err(|_| Error::Invalid(format!("bad list entry {t:?}"))))
        .collect()
}

/// Comma-separated probabilities, or `start:stop:count` spaced geometrically.
fn parse_p_list(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if let [start, stop, count] = parts.as_slice() {
        let start = start.parse::<Probability>()?.to_f64();
        let stop = stop.parse::<Probability>()?.to_f64();
        let count: usize = count
            .trim()
            .parse()
            .map_err(|_| Error::Invalid(format!("bad grid size {count:?}")))?;
        if start <= 0.0 || stop < start {
            return Err(Error::Invalid("geometric grid needs 0 < start <= stop".into()));
        }
        return Ok(match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => (0..count)
                .map(|i| start * (stop / start).powf(i as f64 / (count - 1) as f64))
                .collect(),
        });
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| Ok(t.parse::<Probability>()?.to_f64()))
        .collect()
}

fn cmd_verify_field(m: u32, samples: u64, seed: u64, out: &mut String) -> Result<i32> {
    let field = Field::new(m)?;
    let check = field.self_check(samples, seed);
    let _ = writeln!(
        out,
        "field GF(2^{m}) modulus {:#x} {} pairs {} violations {}",
        field.modulus(),
        if check.exhaustive { "exhaustive" } else { "sampled" },
        check.pairs,
        check.violations
    );
    Ok(if check.violations == 0 { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_build(cfg: &ExperimentConfig, path: &Path, out: &mut String) -> Result<i32> {
    let r = cfg.realize()?;
    let (cb, guarantee, family) = match cfg.mode {
        Mode::Coherent => (
            gv_construct_coherent(&r.tp, &r.field, &r.params, cfg.seed)?,
            coherent_guarantee(&r.tp, &r.field, &r.params)?,
            vec![r.tp.clone()],
        ),
        Mode::Noncoherent => {
            let family = cfg.family(&r)?;
            (
                gv_construct_noncoherent(&family, &r.field, &r.params, cfg.seed)?,
                noncoherent_guarantee(&family, &r.field, &r.params)?,
                family,
            )
        }
    };
    cb.write(path)?;
    let p = &r.params;
    let pf = p.p.to_f64();
    let gv_finite = bounds::gv_rate(pf, p.e, p.c, Some(p.n), Some(p.m), cfg.mode == Mode::Noncoherent)?;
    let _ = writeln!(out, "mode {}", cb.mode());
    let _ = writeln!(out, "params C={} E={} m={} n={} p={}", p.c, p.e, p.m, p.n, p.p);
    let _ = writeln!(out, "budget {}", p.budget());
    let _ = writeln!(out, "radius {}", cb.radius());
    if cfg.mode == Mode::Noncoherent {
        let _ = writeln!(out, "family {}", family.len());
    }
    let _ = writeln!(out, "size {}", cb.len());
    let _ = writeln!(out, "rate {}", format_sig(cb.rate()));
    let _ = writeln!(out, "size_guarantee {guarantee}");
    let _ = writeln!(out, "gv_finite_rate {}", format_sig(gv_finite));
    let mut ok = BigUint::from(cb.len()) >= guarantee && cb.rate() >= gv_finite;
    if cb.len() <= MAX_DISTANCE_CHECK {
        let d = codes::min_distance(&cb, &family)?;
        let _ = writeln!(out, "min_distance {d}");
        ok &= d > crate::metric::Distance::Finite(cb.radius());
    } else {
        let _ = writeln!(out, "min_distance skipped");
    }
    let _ = writeln!(out, "codebook {}", path.display());
    Ok(if ok { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_simulate(cfg: &ExperimentConfig, path: &Path, csv: Option<&Path>, out: &mut String) -> Result<i32> {
    let r = cfg.realize()?;
    let cb = Codebook::read(path)?;
    if cb.params() != &r.params {
        let q = cb.params();
        return Err(Error::Invalid(format!(
            "codebook was built for C={} E={} m={} n={} p={}, configuration gives C={} E={} m={} n={} p={}",
            q.c, q.e, q.m, q.n, q.p, r.params.c, r.params.e, r.params.m, r.params.n, r.params.p
        )));
    }
    if cb.mode() != cfg.mode {
        return Err(Error::Invalid(format!("codebook is {}, configuration asks for {}", cb.mode(), cfg.mode)));
    }
    let budget = r.params.budget();
    let decoder = Decoder::new(&cb, Some(&r.tp))?;
    let lifted = LiftedTransfer::new(&r.tp, &r.field);
    let mut rows = String::from("trial,message,weight,decoded,distance,unique,ok\n");
    let mut trials = 0u64;
    let mut failures = 0u64;
    let mut failures_within = 0u64;
    let mut record = |message: usize, z: &NoiseMatrix, rows: &mut String| -> Result<()> {
        let x = cb.encode(message)?;
        let y = lifted.transmit(&x, z.matrix())?;
        let d = decoder.decode(&y)?;
        let ok = d.message == message;
        let _ = writeln!(rows, "{trials},{message},{},{},{},{},{ok}", z.weight(), d.message, d.distance, d.unique);
        trials += 1;
        if !ok {
            failures += 1;
            failures_within += (z.weight() <= budget) as u64;
        }
        Ok(())
    };
    let mut witnesses = String::new();
    match &cfg.noise {
        NoiseMode::Uniform | NoiseMode::Concentrated(_) => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            for _ in 0..cfg.trials {
                let message = rng.random_range(0..cb.len());
                let noise_seed: u64 = rng.random();
                let z = match &cfg.noise {
                    NoiseMode::Concentrated(edges) => noise_concentrated(&r.params, edges, noise_seed)?,
                    _ => noise_uniform(&r.params, noise_seed),
                };
                record(message, &z, &mut rows)?;
            }
        }
        NoiseMode::Exhaustive => {
            let total = r.params.noise_bits();
            let patterns: u64 = (0..=budget).map(|w| binomial_u64(total, w)).fold(0, u64::saturating_add);
            let work = patterns.saturating_mul(cb.len() as u64);
            if work > MAX_ADVERSARY_CANDIDATES {
                return Err(Error::Guard(format!(
                    "{patterns} noise patterns x {} codewords exceeds {MAX_ADVERSARY_CANDIDATES} trials",
                    cb.len()
                )));
            }
            let (rows_z, n) = (r.params.e * r.params.m as usize, r.params.n);
            for message in 0..cb.len() {
                for w in 0..=budget as usize {
                    for support in Colex::new(total as usize, w) {
                        let mut z = BitMatrix::zeros(rows_z, n);
                        for pos in support {
                            z.set(pos / n, pos % n, true);
                        }
                        record(message, &NoiseMatrix::new(z, budget)?, &mut rows)?;
                    }
                }
            }
        }
        NoiseMode::Adversary => {
            let strength = cfg.adversary_budget.unwrap_or(budget);
            let count = if cfg.trials == 0 { cb.len() } else { (cfg.trials as usize).min(cb.len()) };
            for message in 0..count {
                let x = cb.encode(message)?;
                match noise_worst_exhaustive(&cb, &r.tp, &r.field, &x, strength)? {
                    Some(z) => {
                        let _ = writeln!(witnesses, "witness message {message} weight {}", z.weight());
                        for line in z.to_sparse_text().lines() {
                            let _ = writeln!(witnesses, "  {line}");
                        }
                        record(message, &z, &mut rows)?;
                    }
                    None => record(message, &NoiseMatrix::zero(&r.params), &mut rows)?,
                }
            }
        }
    }
    if let Some(csv) = csv {
        std::fs::write(csv, &rows)?;
    }
    let _ = writeln!(out, "trials {trials}");
    let _ = writeln!(out, "failures {failures}");
    let _ = writeln!(out, "failures_within_budget {failures_within}");
    out.push_str(&witnesses);
    Ok(if failures_within == 0 { EXIT_OK } else { EXIT_INVARIANT })
}

fn cmd_mds_check(cfg: &ExperimentConfig, out: &mut String) -> Result<i32> {
    let r = cfg.realize()?;
    let mds = r.tp.is_mds(&r.field);
    let _ = writeln!(out, "C {} E {} m {}", r.params.c, r.params.e, r.params.m);
    let _ = writeln!(out, "source_edges {:?}", r.tp.source_edges());
    let _ = writeln!(out, "T_hat\n{}", r.tp.that());
    let _ = writeln!(out, "mds {mds}");
    Ok(if mds { EXIT_OK } else { EXIT_INVARIANT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("binec").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_parsing() {
        let map = parse_config_text("# exp\nC = 2\ne=3\np = 1/18 # budget 1\n\n").unwrap();
        assert_eq!(map["C"], "2");
        assert_eq!(map["E"], "3");
        assert_eq!(map["p"], "1/18");
        assert!(parse_config_text("bogus = 1").is_err());
        assert!(parse_config_text("C = 1\nC = 2").is_err());
        assert!(parse_config_text("C 1").is_err());
    }

    #[test]
    fn noise_modes() {
        assert_eq!("uniform".parse::<NoiseMode>().unwrap(), NoiseMode::Uniform);
        assert_eq!(
            "concentrated:1,3".parse::<NoiseMode>().unwrap(),
            NoiseMode::Concentrated(vec![1, 3])
        );
        assert!("gaussian".parse::<NoiseMode>().is_err());
    }

    #[test]
    fn p_grids() {
        assert_eq!(parse_p_list("0.1,1/4").unwrap(), vec![0.1, 0.25]);
        let g = parse_p_list("1e-5:1e-3:3").unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 1e-4).abs() < 1e-15);
        assert!(parse_p_list("0:1e-3:3").is_err());
    }

    #[test]
    fn verify_field_codes() {
        let (code, out, _) = run_str(&["verify-field", "--m", "2"]);
        assert_eq!(code, 0);
        assert!(out.contains("violations 0"));
        assert_eq!(run_str(&["verify-field", "--m", "17"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["verify-field"]).0, EXIT_USAGE);
        assert_eq!(run_str(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn bounds_row() {
        let (code, out, _) = run_str(&["bounds", "--p", "0.01", "--C", "5", "--E", "10", "--m", "2"]);
        assert_eq!(code, 0);
        let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
        assert_eq!(row[0], "0.01");
        assert_eq!(row[4], "NA");
        assert_eq!(row[14], "true");
    }

    #[test]
    fn synthetic_needs_dimensions() {
        let args = ExperimentArgs {
            m: Some(1),
            n: Some(2),
            p: Some("0".into()),
            ..Default::default()
        };
        assert!(args.resolve().unwrap().realize().is_err());
    }
}
