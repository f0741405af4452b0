//! The worst-case bit-flip channel `Y = T X + T̂ Z`.
//!
//! `Z` is an `Em x n` binary matrix whose row block `m*i .. m*(i+1)` holds the
//! flips applied to the packet on edge `i`. Its weight is bounded by the
//! budget `floor(p E m n)`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitmatrix::BitMatrix;
use crate::codes::{Codebook, Decoder};
use crate::combin::{binomial_u64, Colex};
use crate::error::{Error, Result};
use crate::gf2m::Field;
use crate::network::TransferPair;

/// Largest `binom(Emn, budget)` the exhaustive adversary will enumerate.
pub const MAX_ADVERSARY_CANDIDATES: u64 = 10_000_000;

/// Exact rational in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Probability {
    num: u64,
    den: u64,
}

impl Probability {
    pub const ZERO: Probability = Probability { num: 0, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Probability("zero denominator".into()));
        }
        if num >= den {
            return Err(Error::Probability(format!("{num}/{den} is not below 1")));
        }
        let g = num.gcd(&den);
        Ok(Probability {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// `floor(p * k)`.
    pub fn floor_times(&self, k: u64) -> u64 {
        ((self.num as u128 * k as u128) / self.den as u128) as u64
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Probability {
    type Err = Error;

    /// Accepts `a/b`, plain decimals (`0.01`) and scientific notation (`1e-4`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Probability(format!("cannot parse {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a = a.trim().parse().map_err(|_| bad())?;
            let b = b.trim().parse().map_err(|_| bad())?;
            return Probability::new(a, b);
        }
        let (mantissa, exp) = match s.split_once(['e', 'E']) {
            Some((m, e)) => (m, e.parse::<i32>().map_err(|_| bad())?),
            None => (s, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: u128 = digits.parse().map_err(|_| bad())?;
        let scale = frac_part.len() as i32 - exp;
        let mut den: u128 = 1;
        if scale >= 0 {
            den = 10u128.checked_pow(scale as u32).ok_or_else(bad)?;
        } else {
            num = num.checked_mul(10u128.checked_pow((-scale) as u32).ok_or_else(bad)?).ok_or_else(bad)?;
        }
        let g = num.gcd(&den);
        let (num, den) = (num / g, den / g);
        Probability::new(
            u64::try_from(num).map_err(|_| bad())?,
            u64::try_from(den).map_err(|_| bad())?,
        )
    }
}

/// Dimensions of the channel and its bit-flip fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ChannelParams {
    pub c: usize,
    pub e: usize,
    pub m: u32,
    pub n: usize,
    pub p: Probability,
}

impl ChannelParams {
    pub fn new(c: usize, e: usize, m: u32, n: usize, p: Probability) -> Result<Self> {
        if c == 0 || c > e {
            return Err(Error::Invalid(format!("need 1 <= C <= E, got C={c}, E={e}")));
        }
        if n == 0 {
            return Err(Error::Invalid("block length n must be at least 1".into()));
        }
        Field::new(m)?;
        Ok(ChannelParams { c, e, m, n, p })
    }

    /// `floor(p E m n)`.
    pub fn budget(&self) -> u64 {
        self.p.floor_times(self.noise_bits())
    }

    /// `floor(p E m)`, the per-column share used by the sphere-packing count.
    pub fn column_budget(&self) -> u64 {
        self.p.floor_times((self.e * self.m as usize) as u64)
    }

    /// Number of bits in `Z`, `E m n`.
    pub fn noise_bits(&self) -> u64 {
        (self.e * self.m as usize * self.n) as u64
    }

    /// Bits in a codeword, `C m n`.
    pub fn codeword_bits(&self) -> usize {
        self.c * self.m as usize * self.n
    }

    pub fn field(&self) -> Field {
        Field::new(self.m).expect("validated at construction")
    }

    pub fn check_transfer(&self, tp: &TransferPair) -> Result<()> {
        if tp.c() != self.c || tp.e() != self.e {
            return Err(Error::shape(
                format!("C={} E={}", self.c, self.e),
                format!("C={} E={}", tp.c(), tp.e()),
            ));
        }
        Ok(())
    }
}

/// A noise pattern together with the budget it was drawn under.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoiseMatrix {
    z: BitMatrix,
    budget: u64,
}

impl NoiseMatrix {
    pub fn new(z: BitMatrix, budget: u64) -> Result<Self> {
        let w = z.count_ones();
        if w > budget {
            return Err(Error::Invalid(format!("noise weight {w} exceeds budget {budget}")));
        }
        Ok(NoiseMatrix { z, budget })
    }

    pub fn zero(params: &ChannelParams) -> Self {
        NoiseMatrix {
            z: BitMatrix::zeros(params.e * params.m as usize, params.n),
            budget: params.budget(),
        }
    }

    pub fn matrix(&self) -> &BitMatrix {
        &self.z
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn weight(&self) -> u64 {
        self.z.count_ones()
    }

    /// One `(row, col)` line per flipped bit, row-major order.
    pub fn to_sparse_text(&self) -> String {
        let mut s = String::new();
        for i in 0..self.z.rows() {
            for j in 0..self.z.cols() {
                if self.z.get(i, j) {
                    s.push_str(&format!("({i}, {j})\n"));
                }
            }
        }
        s
    }

    pub fn from_sparse_text(rows: usize, cols: usize, budget: u64, text: &str) -> Result<Self> {
        let mut z = BitMatrix::zeros(rows, cols);
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = || Error::Parse {
                line: k + 1,
                msg: format!("expected (row, col), found {line:?}"),
            };
            let inner = line.strip_prefix('(').and_then(|l| l.strip_suffix(')')).ok_or_else(err)?;
            let (r, c) = inner.split_once(',').ok_or_else(err)?;
            let r: usize = r.trim().parse().map_err(|_| err())?;
            let c: usize = c.trim().parse().map_err(|_| err())?;
            if r >= rows || c >= cols {
                return Err(err());
            }
            z.set(r, c, true);
        }
        NoiseMatrix::new(z, budget)
    }
}

/// Exactly `floor(pEmn)` flips at uniformly random distinct positions.
pub fn noise_uniform(params: &ChannelParams, seed: u64) -> NoiseMatrix {
    noise_uniform_with_budget(params, params.budget(), seed).expect("budget never exceeds Emn")
}

/// Exactly `budget` flips at uniformly random distinct positions.
pub fn noise_uniform_with_budget(params: &ChannelParams, budget: u64, seed: u64) -> Result<NoiseMatrix> {
    let rows = params.e * params.m as usize;
    let total = rows * params.n;
    if budget > total as u64 {
        return Err(Error::Invalid(format!("budget {budget} exceeds the {total} noise bits")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = BitMatrix::zeros(rows, params.n);
    for pos in sample(&mut rng, total, budget as usize) {
        z.set(pos / params.n, pos % params.n, true);
    }
    Ok(NoiseMatrix { z, budget })
}

/// Exactly `budget` flips confined to the packets of `target_edges`.
pub fn noise_concentrated(
    params: &ChannelParams,
    target_edges: &[usize],
    seed: u64,
) -> Result<NoiseMatrix> {
    let m = params.m as usize;
    let mut targets = target_edges.to_vec();
    targets.sort_unstable();
    targets.dedup();
    if let Some(&bad) = targets.iter().find(|&&t| t >= params.e) {
        return Err(Error::OutOfRange {
            index: bad,
            len: params.e,
        });
    }
    let budget = params.budget();
    let capacity = (targets.len() * m * params.n) as u64;
    if budget > capacity {
        return Err(Error::BudgetExceedsTargets { budget, capacity });
    }
    let positions: Vec<(usize, usize)> = targets
        .iter()
        .flat_map(|&t| (t * m..(t + 1) * m).flat_map(|r| (0..params.n).map(move |c| (r, c))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = BitMatrix::zeros(params.e * m, params.n);
    for k in sample(&mut rng, positions.len(), budget as usize) {
        let (r, c) = positions[k];
        z.set(r, c, true);
    }
    Ok(NoiseMatrix { z, budget })
}

/// `lift(T) X + lift(T̂) Z` over GF(2).
pub fn transmit(tp: &TransferPair, field: &Field, x: &BitMatrix, z: &NoiseMatrix) -> Result<BitMatrix> {
    LiftedTransfer::new(tp, field).transmit(x, z.matrix())
}

/// Binary images of `T` and `T̂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedTransfer {
    pub t: BitMatrix,
    pub that: BitMatrix,
}

impl LiftedTransfer {
    pub fn new(tp: &TransferPair, field: &Field) -> Self {
        LiftedTransfer {
            t: field.lift_matrix(tp.t()),
            that: field.lift_matrix(tp.that()),
        }
    }

    pub fn transmit(&self, x: &BitMatrix, z: &BitMatrix) -> Result<BitMatrix> {
        if x.rows() != self.t.cols() || z.rows() != self.that.cols() || x.cols() != z.cols() {
            return Err(Error::shape(
                format!("X {}xn and Z {}xn", self.t.cols(), self.that.cols()),
                format!("X {}x{}, Z {}x{}", x.rows(), x.cols(), z.rows(), z.cols()),
            ));
        }
        let mut y = self.t.try_mul(x)?;
        y ^= &self.that.try_mul(z)?;
        Ok(y)
    }
}

/// Searches every noise pattern of weight at most `budget`, lightest first and
/// colexicographic by support within a weight, for one that makes the
/// codebook's decoder return a message other than the one `x` encodes.
pub fn noise_worst_exhaustive(
    cb: &Codebook,
    tp: &TransferPair,
    field: &Field,
    x: &BitMatrix,
    budget: u64,
) -> Result<Option<NoiseMatrix>> {
    let params = cb.params();
    params.check_transfer(tp)?;
    let total = params.noise_bits();
    if budget > total {
        return Err(Error::Invalid(format!("budget {budget} exceeds the {total} noise bits")));
    }
    let candidates = binomial_u64(total, budget);
    if candidates > MAX_ADVERSARY_CANDIDATES {
        return Err(Error::Guard(format!(
            "binom({total}, {budget}) = {candidates} noise patterns exceeds {MAX_ADVERSARY_CANDIDATES}"
        )));
    }
    let message = cb
        .position(x)
        .ok_or_else(|| Error::Invalid("X is not a codeword of this codebook".into()))?;
    let decoder = Decoder::new(cb, Some(tp))?;
    let lifted = LiftedTransfer::new(tp, field);
    let clean = lifted.transmit(x, &BitMatrix::zeros(params.e * params.m as usize, params.n))?;
    let n = params.n;
    // each position's contribution to Y, precomputed
    let impulses: Vec<BitMatrix> = (0..total as usize)
        .map(|pos| {
            let mut z = BitMatrix::zeros(params.e * params.m as usize, n);
            z.set(pos / n, pos % n, true);
            lifted.that.mul_mat(&z)
        })
        .collect();
    for w in 0..=budget as usize {
        for support in Colex::new(total as usize, w) {
            let mut y = clean.clone();
            for &pos in &support {
                y ^= &impulses[pos];
            }
            if decoder.decode(&y)?.message != message {
                let mut z = BitMatrix::zeros(params.e * params.m as usize, n);
                for &pos in &support {
                    z.set(pos / n, pos % n, true);
                }
                return Ok(Some(NoiseMatrix { z, budget }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2m::FieldMatrix;
    use crate::network::{assign_coefficients, compute_transfer, Network};
    use rand::Rng;

    fn params(c: usize, e: usize, m: u32, n: usize, p: &str) -> ChannelParams {
        ChannelParams::new(c, e, m, n, p.parse().unwrap()).unwrap()
    }

    #[test]
    fn probability_parsing() {
        let p: Probability = "1/18".parse().unwrap();
        assert_eq!((p.numer(), p.denom()), (1, 18));
        let p: Probability = "0.01".parse().unwrap();
        assert_eq!((p.numer(), p.denom()), (1, 100));
        let p: Probability = "1e-4".parse().unwrap();
        assert_eq!((p.numer(), p.denom()), (1, 10_000));
        let p: Probability = "2.5E-1".parse().unwrap();
        assert_eq!((p.numer(), p.denom()), (1, 4));
        assert_eq!("0".parse::<Probability>().unwrap(), Probability::ZERO);
        for bad in ["1", "3/2", "x", "1/0", "", ".", "-0.1"] {
            assert!(bad.parse::<Probability>().is_err(), "{bad}");
        }
    }

    #[test]
    fn budget_is_floored() {
        assert_eq!(params(2, 3, 1, 6, "1/18").budget(), 1);
        assert_eq!(params(2, 3, 1, 6, "1/19").budget(), 0);
        assert_eq!(params(2, 3, 2, 1, "1/6").column_budget(), 1);
    }

    #[test]
    fn uniform_noise_counts() {
        assert!(noise_uniform(&params(2, 4, 2, 5, "0"), 1).matrix().is_zero());
        for seed in 0..100 {
            let pr = params(2, 4, 2, 5, "3/10");
            let z = noise_uniform(&pr, seed);
            assert_eq!(z.weight(), pr.budget());
            assert_eq!(z.matrix().shape(), (8, 5));
        }
        let a = noise_uniform(&params(2, 4, 2, 5, "1/4"), 9);
        let b = noise_uniform(&params(2, 4, 2, 5, "1/4"), 9);
        assert_eq!(a, b);
    }

    #[test]
    fn full_budget_is_all_ones() {
        let pr = params(1, 2, 1, 3, "5/6");
        assert_eq!(noise_uniform(&pr, 0).weight(), 5);
        let full = noise_uniform_with_budget(&pr, 6, 0).unwrap();
        assert_eq!(full.matrix(), &BitMatrix::ones(2, 3));
        assert!(noise_uniform_with_budget(&pr, 7, 0).is_err());
        let zc = noise_concentrated(&params(1, 1, 2, 2, "3/4"), &[0], 0).unwrap();
        assert_eq!(zc.weight(), 3);
    }

    #[test]
    fn concentrated_noise_stays_in_block() {
        let pr = params(2, 4, 3, 5, "1/8");
        for seed in 0..50 {
            let z = noise_concentrated(&pr, &[2], seed).unwrap();
            assert_eq!(z.weight(), pr.budget());
            for i in 0..12 {
                for j in 0..5 {
                    if z.matrix().get(i, j) {
                        assert!((6..9).contains(&i));
                    }
                }
            }
        }
        let empty = noise_concentrated(&params(2, 4, 3, 5, "0"), &[], 0).unwrap();
        assert!(empty.matrix().is_zero());
        assert!(matches!(
            noise_concentrated(&params(2, 4, 3, 5, "1/2"), &[1], 0),
            Err(Error::BudgetExceedsTargets { budget: 30, capacity: 15 })
        ));
        assert!(noise_concentrated(&pr, &[4], 0).is_err());
    }

    #[test]
    fn sparse_text_roundtrip() {
        let z = noise_uniform(&params(2, 3, 2, 4, "1/4"), 3);
        let text = z.to_sparse_text();
        assert_eq!(NoiseMatrix::from_sparse_text(6, 4, z.budget(), &text).unwrap(), z);
        assert!(NoiseMatrix::from_sparse_text(6, 4, 0, &text).is_err());
    }

    #[test]
    fn transmit_cases_and_domains_agree() {
        let f = Field::new(3).unwrap();
        let cn = assign_coefficients(&Network::diamond(), &f, 4).unwrap();
        let tp = compute_transfer(&cn).unwrap();
        let pr = params(2, 4, 3, 5, "1/10");
        let lifted = LiftedTransfer::new(&tp, &f);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..30 {
            let xs = FieldMatrix::random(&f, 2, 5, &mut rng);
            let x = f.symbols_to_binary(&xs);
            let z = noise_uniform(&pr, seed);
            let y = transmit(&tp, &f, &x, &z).unwrap();
            // field-domain route
            let zs = f.binary_to_symbols(z.matrix()).unwrap();
            let ys = tp.t().mul(&f, &xs).unwrap().add(&tp.that().mul(&f, &zs).unwrap()).unwrap();
            assert_eq!(f.binary_to_symbols(&y).unwrap(), ys);
            // Z = 0 and X = 0
            assert_eq!(transmit(&tp, &f, &x, &NoiseMatrix::zero(&pr)).unwrap(), &lifted.t * &x);
            let x0 = BitMatrix::zeros(6, 5);
            assert_eq!(transmit(&tp, &f, &x0, &z).unwrap(), &lifted.that * z.matrix());
            // additivity in X
            let x2 = BitMatrix::from_fn(6, 5, |_, _| rng.random_bool(0.5));
            let lhs = transmit(&tp, &f, &(&x ^ &x2), &z).unwrap();
            let rhs = &transmit(&tp, &f, &x, &z).unwrap() ^ &transmit(&tp, &f, &x2, &NoiseMatrix::zero(&pr)).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(transmit(&tp, &f, &BitMatrix::zeros(5, 5), &NoiseMatrix::zero(&pr)).is_err());
    }
}
