//! Text serialization of codebooks.
//!
//! ```text
//! binec-codebook v1
//! params C=2 E=3 m=1 n=6 p=1/18
//! mode noncoherent
//! radius 2
//! seed 7
//! codewords 2
//! a3f
//! 0c1
//! family 1
//! that 0,1 101011
//! ```
//!
//! Codewords are hex strings of the row-major bits. Each `that` line lists the
//! source-edge columns and then every entry of `T̂` row-major, `ceil(m/4)` hex
//! digits per entry. The family section appears only in non-coherent mode.

use std::fmt::Write as _;
use std::path::Path;

use super::{Codebook, Mode};
use crate::bitmatrix::BitMatrix;
use crate::channel::{ChannelParams, Probability};
use crate::error::{Error, Result};
use crate::gf2m::{Field, FieldMatrix};
use crate::network::TransferPair;

const MAGIC: &str = "binec-codebook v1";

impl Codebook {
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(s, "params C={} E={} m={} n={} p={}", p.c, p.e, p.m, p.n, p.p);
        let _ = writeln!(s, "mode {}", self.mode);
        let _ = writeln!(s, "radius {}", self.radius);
        let _ = writeln!(s, "seed {}", self.seed);
        let _ = writeln!(s, "codewords {}", self.codewords.len());
        for x in self.codewords() {
            let _ = writeln!(s, "{}", x.to_hex());
        }
        if self.mode == Mode::Noncoherent {
            let _ = writeln!(s, "family {}", self.family.len());
            s.push_str(&family_to_text(&self.family, p.m));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let (ln, magic) = next("header")?;
        if magic != MAGIC {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected {MAGIC:?}"),
            });
        }
        let (ln, line) = next("params")?;
        let params = parse_params(ln, line)?;
        let entry = next("mode")?;
        let mode: Mode = keyed(entry, "mode")?
            .parse()
            .map_err(|e: Error| Error::Parse { line: entry.0, msg: e.to_string() })?;
        let radius = keyed_num(next("radius")?, "radius")?;
        let seed = keyed_num(next("seed")?, "seed")?;
        let count = keyed_num(next("codewords")?, "codewords")? as usize;
        let a = params.c * params.m as usize;
        let mut codewords = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = next("codeword")?;
            codewords.push(
                BitMatrix::from_hex(a, params.n, line.trim())
                    .map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?,
            );
        }
        let mut family = Vec::new();
        if mode == Mode::Noncoherent {
            let field = params.field();
            let members = keyed_num(next("family")?, "family")? as usize;
            for _ in 0..members {
                let (ln, line) = next("that")?;
                family.push(
                    parse_that(line, &field, &params)
                        .map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?,
                );
            }
        }
        for (ln, line) in lines {
            if !line.trim().is_empty() {
                return Err(Error::Parse {
                    line: ln,
                    msg: "trailing content".into(),
                });
            }
        }
        Codebook::from_parts(params, mode, radius, seed, &codewords, family)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Codebook::from_text(&std::fs::read_to_string(path)?)
    }
}

fn keyed<'a>((ln, line): (usize, &'a str), key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .map(str::trim)
        .ok_or_else(|| Error::Parse {
            line: ln,
            msg: format!("expected `{key} <value>`"),
        })
}

fn keyed_num(entry: (usize, &str), key: &str) -> Result<u64> {
    let ln = entry.0;
    keyed(entry, key)?.parse().map_err(|_| Error::Parse {
        line: ln,
        msg: format!("{key} is not a number"),
    })
}

fn parse_params(ln: usize, line: &str) -> Result<ChannelParams> {
    let err = |msg: String| Error::Parse { line: ln, msg };
    let rest = line
        .strip_prefix("params ")
        .ok_or_else(|| err("expected params line".into()))?;
    let mut vals: [Option<&str>; 5] = [None; 5];
    for kv in rest.split_whitespace() {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found {kv:?}")))?;
        let slot = match k {
            "C" => 0,
            "E" => 1,
            "m" => 2,
            "n" => 3,
            "p" => 4,
            _ => return Err(err(format!("unknown parameter {k:?}"))),
        };
        vals[slot] = Some(v);
    }
    let get = |i: usize, name: &str| vals[i].ok_or_else(|| err(format!("missing {name}")));
    let num = |i: usize, name: &str| -> Result<usize> {
        get(i, name)?
            .parse()
            .map_err(|_| err(format!("{name} is not a number")))
    };
    let p: Probability = get(4, "p")?.parse()?;
    ChannelParams::new(num(0, "C")?, num(1, "E")?, num(2, "m")? as u32, num(3, "n")?, p)
}

/// One `that <source edges> <entries>` line per member.
pub fn family_to_text(family: &[TransferPair], m: u32) -> String {
    let digits = (m as usize).div_ceil(4);
    let mut s = String::new();
    for tp in family {
        let cols: Vec<String> = tp.source_edges().iter().map(|c| c.to_string()).collect();
        let entries: String = tp.that().values().iter().map(|v| format!("{v:0digits$x}")).collect();
        let _ = writeln!(s, "that {} {entries}", cols.join(","));
    }
    s
}

/// Parses `that` lines; blank lines and `#` comments are skipped.
pub fn parse_family(text: &str, params: &ChannelParams) -> Result<Vec<TransferPair>> {
    let field = params.field();
    let mut family = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        family.push(
            parse_that(line, &field, params).map_err(|e| Error::Parse { line: k + 1, msg: e.to_string() })?,
        );
    }
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok(family)
}

fn parse_that(line: &str, field: &Field, params: &ChannelParams) -> Result<TransferPair> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some("that") {
        return Err(Error::Format("expected a `that` line".into()));
    }
    let cols = parts
        .next()
        .ok_or_else(|| Error::Format("missing source edges".into()))?;
    let source_edges: Vec<usize> = cols
        .split(',')
        .map(|c| c.parse().map_err(|_| Error::Format(format!("bad column {c:?}"))))
        .collect::<Result<_>>()?;
    let hex = parts
        .next()
        .ok_or_else(|| Error::Format("missing entries".into()))?;
    if parts.next().is_some() {
        return Err(Error::Format("trailing fields".into()));
    }
    let digits = (params.m as usize).div_ceil(4);
    let cells = params.c * params.e;
    if hex.len() != cells * digits || !hex.is_ascii() {
        return Err(Error::Format(format!(
            "expected {} hex digits, found {}",
            cells * digits,
            hex.len()
        )));
    }
    let values: Vec<u32> = (0..cells)
        .map(|k| {
            u32::from_str_radix(&hex[k * digits..(k + 1) * digits], 16)
                .map_err(|_| Error::Format("invalid hex entry".into()))
        })
        .collect::<Result<_>>()?;
    let that = FieldMatrix::from_values(field, params.c, params.e, &values)?;
    TransferPair::from_impulse(that, source_edges)
}
