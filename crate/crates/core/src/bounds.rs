//! Closed-form rate bounds.
//!
//! Rates are per bit of the `Cm x n` codeword unless noted. The benchmark
//! rates of [`benchmark_rates`] are totals over `C` parallel paths.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::metric::sphere_count_lower;

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Probability(format!("entropy argument {p} outside [0, 1]")));
    }
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

fn check_dims(c: usize, e: usize) -> Result<()> {
    if c == 0 || c > e {
        return Err(Error::Invalid(format!("need 1 <= C <= E, got C={c}, E={e}")));
    }
    Ok(())
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

/// `p < C / (2Em)`, the condition for the packing bound.
pub fn hamming_regime(p: f64, c: usize, e: usize, m: u32) -> bool {
    p * ((2 * e * m as usize) as f64) < (c as f64)
}

/// `1 - H(p) E/C`, or with `n` the finite form `1 - H(p) E/C + log2(Em+1)/(Cmn)`.
/// Passing `m` enforces `p < C/(2Em)`; the finite form needs both `m` and `n`.
pub fn hamming_bound(p: f64, e: usize, c: usize, m: Option<u32>, n: Option<usize>) -> Result<f64> {
    check_dims(c, e)?;
    let base = 1.0 - entropy(p)? * e as f64 / c as f64;
    if let Some(m) = m {
        if !hamming_regime(p, c, e, m) {
            return Err(Error::Regime(format!("p = {p} is not below C/(2Em) = {}", c as f64 / (2 * e * m as usize) as f64)));
        }
    }
    match (m, n) {
        (_, None) => Ok(clamp01(base)),
        (Some(m), Some(n)) => {
            let em = (e * m as usize) as f64;
            Ok(clamp01(base + (em + 1.0).log2() / (c * m as usize * n) as f64))
        }
        (None, Some(_)) => Err(Error::Invalid("the finite-n Hamming bound needs m".into())),
    }
}

/// `floor(2^{Cmn} / binom(Em, floor(pEm))^n)`, the exact packing count bound.
/// Needs `2 floor(pEm) <= C`, which makes the counted noise images distinct.
pub fn hamming_size_bound(params: &ChannelParams) -> Result<BigUint> {
    let (c, e, m) = (params.c, params.e, params.m);
    let k = params.column_budget();
    if 2 * k > c as u64 {
        return Err(Error::Regime(format!("2 floor(pEm) = {} exceeds C = {c}", 2 * k)));
    }
    let count = sphere_count_lower(e, m, params.n, params.p)?;
    Ok((BigUint::from(1u8) << params.codeword_bits()) / count)
}

/// `1 - H(2p) E/C`. With both `n` and `m` the finite form subtracts
/// `log2(2pEmn + 1)/n`, plus `E/n` in non-coherent mode. Clamped to `[0, 1]`.
pub fn gv_rate(
    p: f64,
    e: usize,
    c: usize,
    n: Option<usize>,
    m: Option<u32>,
    noncoherent: bool,
) -> Result<f64> {
    check_dims(c, e)?;
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::Probability(format!("2p must lie in [0, 1], got p = {p}")));
    }
    let base = 1.0 - entropy(2.0 * p)? * e as f64 / c as f64;
    let (Some(n), Some(m)) = (n, m) else {
        return Ok(clamp01(base));
    };
    let emn = (e * m as usize * n) as f64;
    let mut penalty = (2.0 * p * emn + 1.0).log2();
    if noncoherent {
        penalty += e as f64;
    }
    Ok(clamp01(base - penalty / n as f64))
}

/// Total rates of the parallel-path comparison schemes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Benchmarks {
    /// `C (1 - H(4Cp))`: an end-to-end code over the whole cut.
    pub r1: f64,
    /// `max_k (C - 2k)(1 - H(4Cp/k))`: `k` paths sacrificed to erasure protection.
    pub r2: f64,
    /// Maximizing `k`; `None` when `C <= 2` leaves no admissible `k`.
    pub k_star: Option<usize>,
    /// `C (1 - 2H(2p))`.
    pub r_ours: f64,
}

/// `scale * (1 - H(x))`, zero once `x >= 1/2`.
fn clamped_term(scale: f64, x: f64) -> f64 {
    if x >= 0.5 {
        return 0.0;
    }
    (scale * (1.0 - entropy(x).expect("x in [0, 1/2)"))).max(0.0)
}

pub fn benchmark_rates(c: usize, p: f64) -> Result<Benchmarks> {
    if c == 0 {
        return Err(Error::Invalid("C must be at least 1".into()));
    }
    if p.is_nan() || p < 0.0 {
        return Err(Error::Probability(format!("p must be non-negative, got {p}")));
    }
    let cf = c as f64;
    let r1 = clamped_term(cf, 4.0 * cf * p);
    let mut r2 = 0.0;
    let mut k_star = None;
    for k in 1..c.div_ceil(2) {
        let r = clamped_term((c - 2 * k) as f64, 4.0 * cf * p / k as f64);
        if k_star.is_none() || r > r2 {
            r2 = r;
            k_star = Some(k);
        }
    }
    let r_ours = if 2.0 * p >= 0.5 {
        0.0
    } else {
        (cf * (1.0 - 2.0 * entropy(2.0 * p)?)).max(0.0)
    };
    Ok(Benchmarks { r1, r2, k_star, r_ours })
}

/// `p < min(C/(2Em), 2^{-(m+1)})`, strictly.
pub fn regime_check(p: f64, c: usize, e: usize, m: u32) -> bool {
    hamming_regime(p, c, e, m) && p < 0.5f64.powi(m as i32 + 1)
}

/// One row of a bound sweep. Fields that are undefined at the point are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateReport {
    pub p: f64,
    pub c: usize,
    pub e: usize,
    pub m: u32,
    pub n: Option<usize>,
    pub hamming_asym: Option<f64>,
    pub hamming_finite: Option<f64>,
    pub gv_asym: Option<f64>,
    pub gv_finite_coh: Option<f64>,
    pub gv_finite_noncoh: Option<f64>,
    pub benchmarks: Benchmarks,
    pub regime_ok: bool,
}

impl RateReport {
    pub fn compute(p: f64, c: usize, e: usize, m: u32, n: Option<usize>) -> Result<Self> {
        check_dims(c, e)?;
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Probability(format!("p = {p} outside [0, 1)")));
        }
        let in_regime = hamming_regime(p, c, e, m);
        let hamming_asym = in_regime.then(|| hamming_bound(p, e, c, Some(m), None)).transpose()?;
        let hamming_finite = match n {
            Some(n) if in_regime => Some(hamming_bound(p, e, c, Some(m), Some(n))?),
            _ => None,
        };
        let gv_ok = p <= 0.5;
        let gv_asym = gv_ok.then(|| gv_rate(p, e, c, None, None, false)).transpose()?;
        let gv_finite_coh = match n {
            Some(n) if gv_ok => Some(gv_rate(p, e, c, Some(n), Some(m), false)?),
            _ => None,
        };
        let gv_finite_noncoh = match n {
            Some(n) if gv_ok => Some(gv_rate(p, e, c, Some(n), Some(m), true)?),
            _ => None,
        };
        Ok(RateReport {
            p,
            c,
            e,
            m,
            n,
            hamming_asym,
            hamming_finite,
            gv_asym,
            gv_finite_coh,
            gv_finite_noncoh,
            benchmarks: benchmark_rates(c, p)?,
            regime_ok: regime_check(p, c, e, m),
        })
    }
}

/// Parameter lists for [`sweep`]. An empty `ns` sweeps the asymptotic forms only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepRanges {
    pub ps: Vec<f64>,
    pub cs: Vec<usize>,
    pub es: Vec<usize>,
    pub ms: Vec<u32>,
    pub ns: Vec<usize>,
}

/// Cartesian product in `p, C, E, m, n` order; points with `C > E` are skipped.
pub fn sweep(ranges: &SweepRanges) -> Result<Vec<RateReport>> {
    let ns: Vec<Option<usize>> = if ranges.ns.is_empty() {
        vec![None]
    } else {
        ranges.ns.iter().copied().map(Some).collect()
    };
    let mut out = Vec::new();
    for &p in &ranges.ps {
        for &c in &ranges.cs {
            for &e in &ranges.es {
                if c == 0 || c > e {
                    continue;
                }
                for &m in &ranges.ms {
                    for &n in &ns {
                        out.push(RateReport::compute(p, c, e, m, n)?);
                    }
                }
            }
        }
    }
    Ok(out)
}

pub const CSV_HEADER: &str =
    "p,C,E,m,n,hamming_asym,hamming_finite,gv_asym,gv_finite_coh,gv_finite_noncoh,R1,R2,k_star,R_ours,regime_ok";

/// Formats like C's `%.6g`.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{x:.*}", (5 - exp) as usize))
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_else(|| "NA".into())
}

pub fn to_csv(rows: &[RateReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in rows {
        let b = &r.benchmarks;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            format_sig(r.p),
            r.c,
            r.e,
            r.m,
            opt(r.n, |n| n.to_string()),
            opt(r.hamming_asym, format_sig),
            opt(r.hamming_finite, format_sig),
            opt(r.gv_asym, format_sig),
            opt(r.gv_finite_coh, format_sig),
            opt(r.gv_finite_noncoh, format_sig),
            format_sig(b.r1),
            format_sig(b.r2),
            opt(b.k_star, |k| k.to_string()),
            format_sig(b.r_ours),
            r.regime_ok,
        );
    }
    s
}
