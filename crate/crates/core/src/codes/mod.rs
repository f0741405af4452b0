//! Greedy transform-metric codebooks and minimum-distance decoding.
//!
//! Codewords are `Cm x n` binary matrices. Internally each is packed
//! column-major into a `u64` (see [`BitMatrix::to_column_index`]), so the
//! survivor set of the greedy construction is a bitset over `2^{Cmn}` indices.
//!
//! The coherent construction works in the receiver's `Y`-space: every pick
//! `Y'` removes the radius-`2b` transform ball around it, where `b` is the
//! noise budget, and the codeword is `lift(T)^{-1} Y'`.
//!
//! The non-coherent construction must separate codewords under every member
//! of a family of impulse responses at once. After picking `X'` it removes
//! every `X''` for which some pair of members `(i, j)` can produce the same
//! received matrix, i.e. `T_j X'' + T_i X'` lies in `Ball_i(b) + Ball_j(b)`.
//! For `i = j` this set is `Ball_i(2b)`, so a singleton family reproduces the
//! coherent construction exactly.

mod file;
mod survivors;

pub use file::{family_to_text, parse_family};

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmatrix::BitMatrix;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::gf2m::Field;
use crate::metric::{CosetLeaderTable, Distance};
use crate::network::TransferPair;
use survivors::Survivors;

/// Largest `Cmn` for which the survivor bitset is materialized.
pub const MAX_CODEWORD_BITS: usize = 28;

/// Largest total number of elimination patterns kept in memory by the
/// non-coherent construction.
pub const MAX_ELIMINATION_PATTERNS: u64 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Coherent,
    Noncoherent,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Coherent => "coherent",
            Mode::Noncoherent => "noncoherent",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(Mode::Coherent),
            "noncoherent" | "non-coherent" => Ok(Mode::Noncoherent),
            other => Err(Error::Invalid(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codebook {
    params: ChannelParams,
    mode: Mode,
    radius: u64,
    seed: u64,
    codewords: Vec<u64>,
    family: Vec<TransferPair>,
}

impl Codebook {
    /// Assembles a codebook from explicit codewords; no distance property is checked.
    pub fn from_parts(
        params: ChannelParams,
        mode: Mode,
        radius: u64,
        seed: u64,
        codewords: &[BitMatrix],
        family: Vec<TransferPair>,
    ) -> Result<Self> {
        check_bits(&params)?;
        let a = params.c * params.m as usize;
        let mut packed = Vec::with_capacity(codewords.len());
        for x in codewords {
            if x.shape() != (a, params.n) {
                return Err(Error::shape(
                    format!("{a}x{}", params.n),
                    format!("{}x{}", x.rows(), x.cols()),
                ));
            }
            packed.push(x.to_column_index());
        }
        if packed.iter().collect::<HashSet<_>>().len() != packed.len() {
            return Err(Error::Invalid("duplicate codeword".into()));
        }
        match mode {
            Mode::Coherent if !family.is_empty() => {
                return Err(Error::Invalid("coherent codebooks carry no family".into()))
            }
            Mode::Noncoherent if family.is_empty() => return Err(Error::EmptyFamily),
            _ => {}
        }
        for tp in &family {
            params.check_transfer(tp)?;
        }
        Ok(Codebook {
            params,
            mode,
            radius,
            seed,
            codewords: packed,
            family,
        })
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn radius(&self) -> u64 {
        self.radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// Family the decoder searches over; empty for coherent codebooks.
    pub fn family(&self) -> &[TransferPair] {
        &self.family
    }

    /// Codewords packed column-major, in message order.
    pub fn packed_codewords(&self) -> &[u64] {
        &self.codewords
    }

    pub fn codewords(&self) -> impl Iterator<Item = BitMatrix> + '_ {
        let a = self.rows();
        self.codewords
            .iter()
            .map(move |&idx| BitMatrix::from_column_index(a, self.params.n, idx))
    }

    pub fn encode(&self, message: usize) -> Result<BitMatrix> {
        let idx = *self.codewords.get(message).ok_or(Error::OutOfRange {
            index: message,
            len: self.codewords.len(),
        })?;
        Ok(BitMatrix::from_column_index(self.rows(), self.params.n, idx))
    }

    /// Message index of `x`, if it is a codeword.
    pub fn position(&self, x: &BitMatrix) -> Option<usize> {
        if x.shape() != (self.rows(), self.params.n) {
            return None;
        }
        let idx = x.to_column_index();
        self.codewords.iter().position(|&c| c == idx)
    }

    /// `log2(|codebook|) / (Cmn)`.
    pub fn rate(&self) -> f64 {
        if self.codewords.is_empty() {
            return 0.0;
        }
        (self.codewords.len() as f64).log2() / self.params.codeword_bits() as f64
    }

    fn rows(&self) -> usize {
        self.params.c * self.params.m as usize
    }
}

fn check_bits(params: &ChannelParams) -> Result<()> {
    let bits = params.codeword_bits();
    if bits > MAX_CODEWORD_BITS {
        return Err(Error::Guard(format!(
            "Cmn = {bits} exceeds {MAX_CODEWORD_BITS}; the survivor set would need 2^{bits} flags"
        )));
    }
    Ok(())
}

/// Applies `mat` to each `a`-bit column of a packed `a x n` matrix.
#[inline]
fn map_columns(mat: &BitMatrix, idx: u64, a: usize, n: usize) -> u64 {
    let mask = (1u64 << a) - 1;
    let mut out = 0u64;
    for j in 0..n {
        out |= mat.apply_packed((idx >> (j * a)) & mask) << (j * a);
    }
    out
}

/// Lifted matrices of one family member.
struct Lifted {
    t: BitMatrix,
    t_inv: BitMatrix,
    table: CosetLeaderTable,
}

impl Lifted {
    fn new(tp: &TransferPair, field: &Field, params: &ChannelParams) -> Result<Self> {
        params.check_transfer(tp)?;
        if !tp.is_mds(field) {
            return Err(Error::Invalid("impulse response is not MDS".into()));
        }
        let t = field.lift_matrix(tp.t());
        let t_inv = t.inverse().ok_or(Error::Singular)?;
        let table = CosetLeaderTable::build(&field.lift_matrix(tp.that()))?;
        Ok(Lifted { t, t_inv, table })
    }
}

fn check_field(field: &Field, params: &ChannelParams) -> Result<()> {
    if field.m() != params.m {
        return Err(Error::Invalid(format!(
            "field GF(2^{}) does not match m={}",
            field.m(),
            params.m
        )));
    }
    Ok(())
}

/// Picks uniformly random survivors until none are left. `eliminate` removes
/// the neighbourhood of a pick; the pick itself is always removed.
fn greedy(bits: usize, seed: u64, mut eliminate: impl FnMut(u64, &mut Survivors)) -> Vec<u64> {
    let mut survivors = Survivors::full(1u64 << bits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = Vec::new();
    while survivors.count() > 0 {
        let k = rng.random_range(0..survivors.count());
        let y = survivors.select(k);
        picks.push(y);
        survivors.remove(y);
        eliminate(y, &mut survivors);
    }
    picks
}

pub fn gv_construct_coherent(
    tp: &TransferPair,
    field: &Field,
    params: &ChannelParams,
    seed: u64,
) -> Result<Codebook> {
    check_field(field, params)?;
    check_bits(params)?;
    let lifted = Lifted::new(tp, field, params)?;
    let radius = 2 * params.budget();
    let offsets = lifted.table.ball_offsets(params.n, radius)?;
    let a = params.c * params.m as usize;
    let picks = greedy(params.codeword_bits(), seed, |y, s| {
        for &d in &offsets {
            s.remove(y ^ d);
        }
    });
    let codewords = picks
        .into_iter()
        .map(|y| map_columns(&lifted.t_inv, y, a, params.n))
        .collect();
    Ok(Codebook {
        params: *params,
        mode: Mode::Coherent,
        radius,
        seed,
        codewords,
        family: Vec::new(),
    })
}

/// `ceil(2^{Cmn} / |Ball(2b)|)`, the size the coherent construction always reaches.
pub fn coherent_guarantee(tp: &TransferPair, field: &Field, params: &ChannelParams) -> Result<BigUint> {
    check_field(field, params)?;
    let lifted = Lifted::new(tp, field, params)?;
    let volume = lifted.table.profile().volume(2 * params.budget(), params.n);
    Ok((BigUint::from(1u8) << params.codeword_bits()).div_ceil(&volume))
}

/// Per ordered member pair `(i, j)`: the map `A_ij` taking the reference
/// image `T_0 X'` to `T_0 T_j^{-1} T_i X'`, and the patterns
/// `T_0 T_j^{-1} d` for `d` in `Ball_i(b) + Ball_j(b)`.
struct PairElimination {
    map: BitMatrix,
    patterns: Vec<u64>,
}

fn pair_eliminations(
    family: &[TransferPair],
    field: &Field,
    params: &ChannelParams,
) -> Result<Vec<PairElimination>> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    check_field(field, params)?;
    check_bits(params)?;
    let members: Vec<Lifted> = family
        .iter()
        .map(|tp| Lifted::new(tp, field, params))
        .collect::<Result<_>>()?;
    let (a, n) = (params.c * params.m as usize, params.n);
    let budget = params.budget();
    let t0 = &members[0].t;
    let t0_inv = &members[0].t_inv;
    let balls: Vec<Vec<u64>> = members
        .iter()
        .map(|mem| mem.table.ball_offsets(n, budget))
        .collect::<Result<_>>()?;

    let mut total = 0u64;
    let mut charge = |k: u64| -> Result<()> {
        total += k;
        if total > MAX_ELIMINATION_PATTERNS {
            return Err(Error::Guard(format!(
                "non-coherent elimination needs more than {MAX_ELIMINATION_PATTERNS} patterns"
            )));
        }
        Ok(())
    };
    let mut sums: Vec<Vec<Vec<u64>>> = vec![vec![Vec::new(); members.len()]; members.len()];
    for i in 0..members.len() {
        let diag = members[i].table.ball_offsets(n, 2 * budget)?;
        charge(diag.len() as u64)?;
        sums[i][i] = diag;
        for j in i + 1..members.len() {
            charge((balls[i].len() * balls[j].len()) as u64)?;
            let mut set: Vec<u64> = balls[i]
                .iter()
                .flat_map(|&u| balls[j].iter().map(move |&v| u ^ v))
                .collect();
            set.sort_unstable();
            set.dedup();
            charge(set.len() as u64)?;
            sums[j][i] = set.clone();
            sums[i][j] = set;
        }
    }

    let mut out = Vec::with_capacity(members.len() * members.len());
    for (i, mi) in members.iter().enumerate() {
        for (j, mj) in members.iter().enumerate() {
            let back = t0.mul_mat(&mj.t_inv);
            let map = back.mul_mat(&mi.t).mul_mat(t0_inv);
            let patterns = sums[i][j].iter().map(|&d| map_columns(&back, d, a, n)).collect();
            out.push(PairElimination { map, patterns });
        }
    }
    Ok(out)
}

pub fn gv_construct_noncoherent(
    family: &[TransferPair],
    field: &Field,
    params: &ChannelParams,
    seed: u64,
) -> Result<Codebook> {
    let pairs = pair_eliminations(family, field, params)?;
    let (a, n) = (params.c * params.m as usize, params.n);
    let picks = greedy(params.codeword_bits(), seed, |y, s| {
        for pair in &pairs {
            let base = map_columns(&pair.map, y, a, n);
            for &d in &pair.patterns {
                s.remove(base ^ d);
            }
        }
    });
    let t0_inv = field.lift_matrix(family[0].t()).inverse().ok_or(Error::Singular)?;
    let codewords = picks.into_iter().map(|y| map_columns(&t0_inv, y, a, n)).collect();
    Ok(Codebook {
        params: *params,
        mode: Mode::Noncoherent,
        radius: 2 * params.budget(),
        seed,
        codewords,
        family: family.to_vec(),
    })
}

/// `ceil(2^{Cmn} / sum_{i,j} |Ball_i(b) + Ball_j(b)|)`, the size the
/// non-coherent construction always reaches.
pub fn noncoherent_guarantee(
    family: &[TransferPair],
    field: &Field,
    params: &ChannelParams,
) -> Result<BigUint> {
    let pairs = pair_eliminations(family, field, params)?;
    let removed: u64 = pairs.iter().map(|p| p.patterns.len() as u64).sum();
    Ok((BigUint::from(1u8) << params.codeword_bits()).div_ceil(&BigUint::from(removed)))
}

/// Outcome of decoding one received matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Decision {
    pub message: usize,
    pub distance: Distance,
    /// No other message attains the same distance.
    pub unique: bool,
    /// Family member at which the minimum was attained (0 when coherent).
    pub member: usize,
}

struct DecoderMember {
    table: CosetLeaderTable,
    images: Vec<u64>,
}

/// Precomputed codeword images for repeated decoding.
pub struct Decoder {
    rows: usize,
    n: usize,
    members: Vec<DecoderMember>,
}

impl Decoder {
    /// Coherent codebooks need `tp`; non-coherent ones use their own family and ignore it.
    pub fn new(cb: &Codebook, tp: Option<&TransferPair>) -> Result<Self> {
        if cb.is_empty() {
            return Err(Error::Invalid("empty codebook".into()));
        }
        let field = cb.params.field();
        let family: Vec<&TransferPair> = match cb.mode {
            Mode::Coherent => {
                let tp = tp.ok_or_else(|| {
                    Error::Invalid("coherent decoding needs the transfer matrices".into())
                })?;
                cb.params.check_transfer(tp)?;
                vec![tp]
            }
            Mode::Noncoherent => cb.family.iter().collect(),
        };
        let (a, n) = (cb.rows(), cb.params.n);
        let members = family
            .into_iter()
            .map(|tp| {
                let t = field.lift_matrix(tp.t());
                let table = CosetLeaderTable::build(&field.lift_matrix(tp.that()))?;
                let images = cb.codewords.iter().map(|&x| map_columns(&t, x, a, n)).collect();
                Ok(DecoderMember { table, images })
            })
            .collect::<Result<_>>()?;
        Ok(Decoder { rows: a, n, members })
    }

    pub fn decode(&self, y: &BitMatrix) -> Result<Decision> {
        if y.shape() != (self.rows, self.n) {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.n),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        let y = y.to_column_index();
        let count = self.members[0].images.len();
        let mut best: Option<Decision> = None;
        let mut ties = 0usize;
        for message in 0..count {
            let (distance, member) = self
                .members
                .iter()
                .enumerate()
                .map(|(k, mem)| (mem.table.packed_distance(mem.images[message], y, self.n), k))
                .min()
                .expect("family is nonempty");
            match &best {
                Some(b) if distance > b.distance => {}
                Some(b) if distance == b.distance => ties += 1,
                _ => {
                    best = Some(Decision {
                        message,
                        distance,
                        unique: true,
                        member,
                    });
                    ties = 0;
                }
            }
        }
        let mut best = best.expect("codebook is nonempty");
        best.unique = ties == 0;
        Ok(best)
    }
}

pub fn decode_coherent(cb: &Codebook, tp: &TransferPair, field: &Field, y: &BitMatrix) -> Result<Decision> {
    check_field(field, &cb.params)?;
    if cb.mode != Mode::Coherent {
        return Err(Error::Invalid("codebook is not coherent".into()));
    }
    Decoder::new(cb, Some(tp))?.decode(y)
}

pub fn decode_noncoherent(cb: &Codebook, field: &Field, y: &BitMatrix) -> Result<Decision> {
    check_field(field, &cb.params)?;
    if cb.mode != Mode::Noncoherent {
        return Err(Error::Invalid("codebook is not non-coherent".into()));
    }
    Decoder::new(cb, None)?.decode(y)
}

/// Least transform distance between the images of two distinct codewords
/// under any single family member; [`Distance::Infinite`] for fewer than two codewords.
pub fn min_distance(cb: &Codebook, family: &[TransferPair]) -> Result<Distance> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let field = cb.params.field();
    let (a, n) = (cb.rows(), cb.params.n);
    let mut best = Distance::Infinite;
    for tp in family {
        cb.params.check_transfer(tp)?;
        let t = field.lift_matrix(tp.t());
        let table = CosetLeaderTable::build(&field.lift_matrix(tp.that()))?;
        let images: Vec<u64> = cb.codewords.iter().map(|&x| map_columns(&t, x, a, n)).collect();
        for (i, &u) in images.iter().enumerate() {
            for &v in &images[i + 1..] {
                best = best.min(table.packed_distance(u, v, n));
                if best == Distance::Finite(0) {
                    return Ok(best);
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests;
