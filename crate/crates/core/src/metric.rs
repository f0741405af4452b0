//! The transform metric.
//!
//! For an `a x c` binary matrix `B`, `δ(v)` is the least number of columns of
//! `B` whose XOR equals `v`, and the distance between two `a x n` matrices is
//! the sum of `δ` over their column differences. A column outside the span of
//! `B` has `δ = ∞`. Over GF(2) a repeated column cancels, so the breadth-first
//! minimum over column additions is automatically a minimum over column
//! subsets.

use std::fmt;
use std::ops::Add;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::bitmatrix::BitMatrix;
use crate::channel::Probability;
use crate::combin::binomial;
use crate::error::{Error, Result};

/// Largest syndrome length `a` for which a full table of `2^a` weights is built.
pub const MAX_SYNDROME_BITS: usize = 24;

/// Largest number of difference patterns [`CosetLeaderTable::ball_offsets`] materializes.
pub const MAX_BALL_OFFSETS: u64 = 1 << 27;

const UNREACHABLE: u8 = u8::MAX;
const BLOB_MAGIC: &[u8; 4] = b"BNCT";
const BLOB_VERSION: u8 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u64),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<u64> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl Add for Distance {
    type Output = Distance;
    fn add(self, rhs: Distance) -> Distance {
        match (self, rhs) {
            (Distance::Finite(a), Distance::Finite(b)) => Distance::Finite(a + b),
            _ => Distance::Infinite,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}

/// `δ(v)` for every length-`a` syndrome `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetLeaderTable {
    basis: BitMatrix,
    weights: Vec<u8>,
}

impl CosetLeaderTable {
    pub fn build(basis: &BitMatrix) -> Result<Self> {
        let a = basis.rows();
        if a > MAX_SYNDROME_BITS {
            return Err(Error::Guard(format!(
                "syndrome length {a} exceeds {MAX_SYNDROME_BITS}; a full coset table is infeasible"
            )));
        }
        let mut columns = basis.columns();
        columns.sort_unstable();
        columns.dedup();
        columns.retain(|&c| c != 0);

        let mut weights = vec![UNREACHABLE; 1usize << a];
        weights[0] = 0;
        let mut frontier = vec![0u64];
        let mut depth = 0u8;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &v in &frontier {
                for &c in &columns {
                    let w = (v ^ c) as usize;
                    if weights[w] == UNREACHABLE {
                        weights[w] = depth;
                        next.push(w as u64);
                    }
                }
            }
            frontier = next;
        }
        Ok(CosetLeaderTable {
            basis: basis.clone(),
            weights,
        })
    }

    /// Syndrome length.
    pub fn a(&self) -> usize {
        self.basis.rows()
    }

    /// Number of columns of `B`.
    pub fn c(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    /// `δ` of a packed syndrome (bit `i` = row `i`).
    #[inline]
    pub fn weight(&self, v: u64) -> Distance {
        match self.weights[v as usize] {
            UNREACHABLE => Distance::Infinite,
            w => Distance::Finite(w as u64),
        }
    }

    pub fn delta(&self, v: &[bool]) -> Result<Distance> {
        if v.len() != self.a() {
            return Err(Error::LengthMismatch {
                expected: self.a(),
                found: v.len(),
            });
        }
        let packed = v
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i));
        Ok(self.weight(packed))
    }

    /// Sum of `δ` over the column differences of `m1` and `m2`.
    pub fn transform_distance(&self, m1: &BitMatrix, m2: &BitMatrix) -> Result<Distance> {
        if m1.shape() != m2.shape() || m1.rows() != self.a() {
            return Err(Error::shape(
                format!("two {}xn matrices", self.a()),
                format!("{}x{} and {}x{}", m1.rows(), m1.cols(), m2.rows(), m2.cols()),
            ));
        }
        Ok((0..m1.cols())
            .map(|j| self.weight(m1.column(j) ^ m2.column(j)))
            .fold(Distance::Finite(0), Add::add))
    }

    /// Distance between two matrices packed column-major, `n` columns of `a` bits.
    #[inline]
    pub fn packed_distance(&self, x: u64, y: u64, n: usize) -> Distance {
        let a = self.a();
        let mask = (1u64 << a) - 1;
        let diff = x ^ y;
        let mut total = 0u64;
        for j in 0..n {
            match self.weights[((diff >> (j * a)) & mask) as usize] {
                UNREACHABLE => return Distance::Infinite,
                w => total += w as u64,
            }
        }
        Distance::Finite(total)
    }

    pub fn profile(&self) -> BallVolumeProfile {
        let mut counts = Vec::new();
        for &w in &self.weights {
            if w == UNREACHABLE {
                continue;
            }
            if counts.len() <= w as usize {
                counts.resize(w as usize + 1, 0u64);
            }
            counts[w as usize] += 1;
        }
        BallVolumeProfile { counts }
    }

    /// Syndromes grouped by `δ`; unreachable ones are omitted.
    pub fn syndromes_by_weight(&self) -> Vec<Vec<u64>> {
        let mut groups: Vec<Vec<u64>> = Vec::new();
        for (v, &w) in self.weights.iter().enumerate() {
            if w == UNREACHABLE {
                continue;
            }
            if groups.len() <= w as usize {
                groups.resize(w as usize + 1, Vec::new());
            }
            groups[w as usize].push(v as u64);
        }
        groups
    }

    /// Every difference pattern of `n` columns with total weight at most
    /// `radius`, packed column-major. The count equals
    /// [`BallVolumeProfile::volume`] for the same arguments.
    pub fn ball_offsets(&self, n: usize, radius: u64) -> Result<Vec<u64>> {
        if self.a() * n > 64 {
            return Err(Error::Guard(format!(
                "{}x{n} matrices do not fit a 64-bit index",
                self.a()
            )));
        }
        let volume = self.profile().volume(radius, n);
        if volume > BigUint::from(MAX_BALL_OFFSETS) {
            return Err(Error::Guard(format!(
                "ball of radius {radius} holds {volume} patterns, more than {MAX_BALL_OFFSETS}"
            )));
        }
        let groups = self.syndromes_by_weight();
        let mut out = Vec::with_capacity(u64::try_from(&volume).unwrap_or(0) as usize);
        let a = self.a();
        fn rec(
            groups: &[Vec<u64>],
            a: usize,
            n: usize,
            col: usize,
            left: u64,
            acc: u64,
            out: &mut Vec<u64>,
        ) {
            if col == n {
                out.push(acc);
                return;
            }
            for (w, members) in groups.iter().enumerate() {
                if w as u64 > left {
                    break;
                }
                for &v in members {
                    rec(groups, a, n, col + 1, left - w as u64, acc | (v << (col * a)), out);
                }
            }
        }
        rec(&groups, a, n, 0, radius, 0, &mut out);
        Ok(out)
    }

    /// Serializes to: magic `BNCT`, version byte, `a` and `c` as little-endian
    /// `u32`, the bits of `B` row-major packed LSB-first, then `2^a` weight
    /// bytes with 255 marking syndromes outside the span.
    pub fn to_blob(&self) -> Vec<u8> {
        let (a, c) = self.basis.shape();
        let mut out = Vec::with_capacity(13 + (a * c).div_ceil(8) + self.weights.len());
        out.extend_from_slice(BLOB_MAGIC);
        out.push(BLOB_VERSION);
        out.extend_from_slice(&(a as u32).to_le_bytes());
        out.extend_from_slice(&(c as u32).to_le_bytes());
        let bits = self.basis.to_bits();
        for chunk in bits.chunks(8) {
            out.push(chunk.iter().enumerate().fold(0u8, |acc, (k, &b)| acc | (b << k)));
        }
        out.extend_from_slice(&self.weights);
        out
    }

    pub fn from_blob(blob: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Format(format!("coset table blob: {msg}"));
        if blob.len() < 13 || &blob[..4] != BLOB_MAGIC {
            return Err(bad("missing magic"));
        }
        if blob[4] != BLOB_VERSION {
            return Err(bad("unsupported version"));
        }
        let a = u32::from_le_bytes(blob[5..9].try_into().unwrap()) as usize;
        let c = u32::from_le_bytes(blob[9..13].try_into().unwrap()) as usize;
        if a > MAX_SYNDROME_BITS {
            return Err(bad("syndrome length exceeds guard"));
        }
        let bit_bytes = (a * c).div_ceil(8);
        let expected = 13 + bit_bytes + (1usize << a);
        if blob.len() != expected {
            return Err(bad("wrong length"));
        }
        let packed = &blob[13..13 + bit_bytes];
        let bits: Vec<u8> = (0..a * c).map(|k| (packed[k / 8] >> (k % 8)) & 1).collect();
        let basis = BitMatrix::from_bits(a, c, &bits)?;
        let weights = blob[13 + bit_bytes..].to_vec();
        if weights[0] != 0 || weights.iter().any(|&w| w != UNREACHABLE && w as usize > c) {
            return Err(bad("inconsistent weights"));
        }
        Ok(CosetLeaderTable { basis, weights })
    }
}

/// Number of syndromes at each finite weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallVolumeProfile {
    counts: Vec<u64>,
}

impl BallVolumeProfile {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn reachable(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of `n`-column difference patterns with total weight at most `radius`.
    pub fn volume(&self, radius: u64, n: usize) -> BigUint {
        let r = radius as usize;
        let mut poly = vec![BigUint::zero(); r + 1];
        poly[0] = BigUint::one();
        for _ in 0..n {
            let mut next = vec![BigUint::zero(); r + 1];
            for (d, acc) in poly.iter().enumerate() {
                if acc.is_zero() {
                    continue;
                }
                for (w, &cnt) in self.counts.iter().enumerate() {
                    if d + w > r {
                        break;
                    }
                    if cnt > 0 {
                        next[d + w] += acc * cnt;
                    }
                }
            }
            poly = next;
        }
        poly.into_iter().sum()
    }
}

pub fn ball_volume_exact(table: &CosetLeaderTable, radius: u64, n: usize) -> BigUint {
    table.profile().volume(radius, n)
}

/// `binom(Em, floor(pEm))^n`, the count of noise patterns with exactly
/// `floor(pEm)` ones in every column.
pub fn sphere_count_lower(e: usize, m: u32, n: usize, p: Probability) -> Result<BigUint> {
    let rows = (e * m as usize) as u64;
    let k = p.floor_times(rows);
    if k > rows {
        return Err(Error::Probability(format!("{p} puts more than {rows} ones in a column")));
    }
    Ok(num_traits::pow(binomial(rows, k), n))
}

/// `(2b + 1) * binom(Emn, 2b)` with `b = floor(pEmn)`, bounding the number of
/// noise patterns of weight at most `2b`.
pub fn sphere_count_upper(e: usize, m: u32, n: usize, p: Probability) -> Result<BigUint> {
    let total = (e * m as usize * n) as u64;
    let two_b = 2 * p.floor_times(total);
    if two_b > total {
        return Err(Error::Probability(format!(
            "radius {two_b} exceeds the {total} noise positions"
        )));
    }
    Ok(BigUint::from(two_b + 1) * binomial(total, two_b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> BitMatrix {
        BitMatrix::from_fn(rows, cols, |_, _| rng.random_bool(0.5))
    }

    /// Minimum subset size over all 2^c column subsets, by enumeration.
    fn brute_delta(b: &BitMatrix, v: u64) -> Distance {
        let cols = b.columns();
        let mut best = Distance::Infinite;
        for mask in 0u32..(1 << cols.len()) {
            let sum = cols
                .iter()
                .enumerate()
                .filter(|(k, _)| (mask >> k) & 1 == 1)
                .fold(0u64, |acc, (_, &c)| acc ^ c);
            if sum == v {
                best = best.min(Distance::Finite(mask.count_ones() as u64));
            }
        }
        best
    }

    #[test]
    fn identity_gives_popcount() {
        let t = CosetLeaderTable::build(&BitMatrix::identity(5)).unwrap();
        for v in 0u64..32 {
            assert_eq!(t.weight(v), Distance::Finite(v.count_ones() as u64));
        }
    }

    #[test]
    fn worked_example() {
        let b = BitMatrix::from_rows(&[[1u8, 0, 1], [0, 1, 1]]).unwrap();
        let t = CosetLeaderTable::build(&b).unwrap();
        // syndrome bit 0 = row 0
        assert_eq!(t.weight(0b00), Distance::Finite(0));
        assert_eq!(t.weight(0b01), Distance::Finite(1));
        assert_eq!(t.weight(0b10), Distance::Finite(1));
        assert_eq!(t.weight(0b11), Distance::Finite(1));
    }

    #[test]
    fn duplicate_columns_and_off_span() {
        let b = BitMatrix::from_rows(&[[1u8, 1, 0], [0, 0, 0], [1, 1, 1]]).unwrap();
        let t = CosetLeaderTable::build(&b).unwrap();
        assert_eq!(t.weight(b.column(0)), Distance::Finite(1));
        // row 1 is never touched
        assert_eq!(t.delta(&[false, true, false]).unwrap(), Distance::Infinite);
        assert!(t.delta(&[true]).is_err());
        let m = BitMatrix::zeros(3, 2);
        let mut off = m.clone();
        off.set(1, 0, true);
        assert_eq!(t.transform_distance(&m, &off).unwrap(), Distance::Infinite);
        assert_eq!(t.transform_distance(&m, &m).unwrap(), Distance::Finite(0));
        assert!(t.transform_distance(&m, &BitMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn guard_on_syndrome_length() {
        assert!(matches!(
            CosetLeaderTable::build(&BitMatrix::identity(25)),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn distance_matches_brute_force_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let b = random_matrix(&mut rng, 4, 6);
            let t = CosetLeaderTable::build(&b).unwrap();
            let m1 = random_matrix(&mut rng, 4, 3);
            let m2 = random_matrix(&mut rng, 4, 3);
            let expect = (0..3)
                .map(|j| brute_delta(&b, m1.column(j) ^ m2.column(j)))
                .fold(Distance::Finite(0), Add::add);
            assert_eq!(t.transform_distance(&m1, &m2).unwrap(), expect);
            assert_eq!(
                t.packed_distance(m1.to_column_index(), m2.to_column_index(), 3),
                expect
            );
        }
    }

    #[test]
    fn volume_hamming_case() {
        let t = CosetLeaderTable::build(&BitMatrix::identity(3)).unwrap();
        for n in 1..4 {
            for r in 0..6u64 {
                let expect: BigUint = (0..=r).map(|i| binomial(3 * n as u64, i)).sum();
                assert_eq!(ball_volume_exact(&t, r, n), expect);
            }
        }
        assert_eq!(ball_volume_exact(&t, 0, 5), BigUint::one());
    }

    #[test]
    fn volume_matches_exhaustive_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let b = random_matrix(&mut rng, 3, 4);
            let t = CosetLeaderTable::build(&b).unwrap();
            let n = 3;
            for r in 0..5u64 {
                let count = (0u64..1 << 9)
                    .filter(|&d| t.packed_distance(0, d, n) <= Distance::Finite(r))
                    .count();
                assert_eq!(ball_volume_exact(&t, r, n), BigUint::from(count));
                let offsets = t.ball_offsets(n, r).unwrap();
                assert_eq!(offsets.len(), count);
            }
        }
    }

    #[test]
    fn sphere_counts() {
        let p = |s: &str| s.parse::<Probability>().unwrap();
        assert_eq!(sphere_count_upper(3, 1, 6, p("1/18")).unwrap(), BigUint::from(459u32));
        assert_eq!(sphere_count_lower(3, 1, 2, p("1/3")).unwrap(), BigUint::from(9u32));
        assert_eq!(sphere_count_lower(4, 2, 3, p("0")).unwrap(), BigUint::one());
        assert_eq!(sphere_count_upper(4, 2, 3, p("0")).unwrap(), BigUint::one());
        assert!(sphere_count_upper(2, 1, 2, p("3/4")).is_err());
    }

    #[test]
    fn blob_roundtrip() {
        let b = BitMatrix::from_rows(&[[1u8, 0, 1, 1], [0, 1, 1, 0], [0, 0, 0, 1]]).unwrap();
        let t = CosetLeaderTable::build(&b).unwrap();
        let blob = t.to_blob();
        assert_eq!(CosetLeaderTable::from_blob(&blob).unwrap(), t);
        let mut broken = blob.clone();
        broken[0] = b'X';
        assert!(CosetLeaderTable::from_blob(&broken).is_err());
        assert!(CosetLeaderTable::from_blob(&blob[..blob.len() - 1]).is_err());
    }
}
