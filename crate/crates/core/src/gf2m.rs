//! Arithmetic in GF(2^m) for `1 <= m <= 16`, and the maps that carry field
//! symbols and coefficients into binary vectors and matrices.
//!
//! Elements use the polynomial basis: bit `j` of a [`FieldElem`] is the
//! coefficient of `x^j`. Multiplication by a fixed element `a` is the linear
//! map whose `m x m` binary matrix has column `j` equal to the bits of
//! `a * x^j`; this is the homomorphism returned by [`Field::elem_to_matrix`].

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmatrix::BitMatrix;
use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 16;

/// Low-weight irreducible polynomials, indexed by degree.
const MODULI: [u32; 17] = [
    0,
    0b11,            // x + 1
    0b111,           // x^2 + x + 1
    0b1011,          // x^3 + x + 1
    0b1_0011,        // x^4 + x + 1
    0b10_0101,       // x^5 + x^2 + 1
    0b100_0011,      // x^6 + x + 1
    0b1000_0011,     // x^7 + x + 1
    0x11d,           // x^8 + x^4 + x^3 + x^2 + 1
    0x211,           // x^9 + x^4 + 1
    0x409,           // x^10 + x^3 + 1
    0x805,           // x^11 + x^2 + 1
    0x1009,          // x^12 + x^3 + 1
    0x201b,          // x^13 + x^4 + x^3 + x + 1
    0x4021,          // x^14 + x^5 + 1
    0x8003,          // x^15 + x + 1
    0x1002d,         // x^16 + x^5 + x^3 + x^2 + 1
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    m: u32,
    modulus: u32,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Field {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 || m > MAX_DEGREE {
            return Err(Error::FieldDegree(m));
        }
        Ok(Field {
            m,
            modulus: MODULI[m as usize],
        })
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of elements, `2^m`.
    #[inline]
    pub fn order(&self) -> u32 {
        1 << self.m
    }

    pub fn elem(&self, value: u32) -> Result<FieldElem> {
        if value >= self.order() {
            return Err(Error::NotInField { value, m: self.m });
        }
        Ok(FieldElem(value))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order()).map(FieldElem)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.random_range(0..self.order()))
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        FieldElem(a.0 ^ b.0)
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let mut x = a.0;
        let mut y = b.0;
        let mut acc = 0u32;
        let top = 1u32 << self.m;
        while y != 0 {
            if y & 1 == 1 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x & top != 0 {
                x ^= self.modulus;
            }
        }
        FieldElem(acc)
    }

    pub fn pow(&self, a: FieldElem, mut e: u32) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(2^m - 2)`.
    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Multiplication-by-`a` as an `m x m` binary matrix.
    pub fn elem_to_matrix(&self, a: FieldElem) -> BitMatrix {
        let m = self.m as usize;
        let cols: Vec<u64> = (0..m)
            .map(|j| self.mul(a, FieldElem(1 << j)).0 as u64)
            .collect();
        BitMatrix::from_columns(m, &cols)
    }

    pub fn symbol_to_bits(&self, a: FieldElem) -> Vec<bool> {
        (0..self.m).map(|j| (a.0 >> j) & 1 == 1).collect()
    }

    pub fn bits_to_symbol(&self, v: &[bool]) -> Result<FieldElem> {
        if v.len() != self.m as usize {
            return Err(Error::LengthMismatch {
                expected: self.m as usize,
                found: v.len(),
            });
        }
        Ok(FieldElem(
            v.iter()
                .enumerate()
                .fold(0, |acc, (j, &b)| acc | ((b as u32) << j)),
        ))
    }

    /// Replaces every entry by its `m x m` multiplication matrix.
    pub fn lift_matrix(&self, a: &FieldMatrix) -> BitMatrix {
        let m = self.m as usize;
        let mut out = BitMatrix::zeros(a.rows() * m, a.cols() * m);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                let e = a.get(i, j);
                if e.is_zero() {
                    continue;
                }
                for bj in 0..m {
                    let col = self.mul(e, FieldElem(1 << bj)).0;
                    for bi in 0..m {
                        if (col >> bi) & 1 == 1 {
                            out.set(i * m + bi, j * m + bj, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Binary image of a symbol matrix: entry `(i, k)` becomes rows
    /// `i*m .. (i+1)*m` of column `k`.
    pub fn symbols_to_binary(&self, a: &FieldMatrix) -> BitMatrix {
        let m = self.m as usize;
        let mut out = BitMatrix::zeros(a.rows() * m, a.cols());
        for i in 0..a.rows() {
            for k in 0..a.cols() {
                let v = a.get(i, k).0;
                for b in 0..m {
                    if (v >> b) & 1 == 1 {
                        out.set(i * m + b, k, true);
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`Field::symbols_to_binary`]; the row count must be a multiple of `m`.
    pub fn binary_to_symbols(&self, b: &BitMatrix) -> Result<FieldMatrix> {
        let m = self.m as usize;
        if !b.rows().is_multiple_of(m) {
            return Err(Error::shape(
                format!("row count divisible by m={m}"),
                b.rows(),
            ));
        }
        let rows = b.rows() / m;
        let mut out = FieldMatrix::zeros(rows, b.cols());
        for i in 0..rows {
            for k in 0..b.cols() {
                let v = (0..m).fold(0u32, |acc, bit| acc | ((b.get(i * m + bit, k) as u32) << bit));
                out.set(i, k, FieldElem(v));
            }
        }
        Ok(out)
    }
}

/// Largest degree for which [`Field::self_check`] visits every element pair.
pub const MAX_EXHAUSTIVE_DEGREE: u32 = 8;

/// Outcome of [`Field::self_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldCheck {
    pub m: u32,
    pub exhaustive: bool,
    pub pairs: u64,
    pub violations: u64,
}

impl Field {
    /// Checks that the element-to-matrix map is a ring homomorphism, that it
    /// agrees with multiplication on bit vectors, that the bit-vector map is a
    /// bijection, and that inverses invert. Every pair is visited up to
    /// [`MAX_EXHAUSTIVE_DEGREE`]; larger fields use `samples` seeded random pairs.
    pub fn self_check(&self, samples: u64, seed: u64) -> FieldCheck {
        let mut violations = 0u64;
        let mut pairs = 0u64;
        let mut check_pair = |a: FieldElem, b: FieldElem| {
            let (ma, mb) = (self.elem_to_matrix(a), self.elem_to_matrix(b));
            let ok = self.elem_to_matrix(self.add(a, b)) == &ma ^ &mb
                && self.elem_to_matrix(self.mul(a, b)) == &ma * &mb
                && ma.apply(&self.symbol_to_bits(b)).ok() == Some(self.symbol_to_bits(self.mul(a, b)))
                && self.mul(a, b) == self.mul(b, a);
            pairs += 1;
            violations += (!ok) as u64;
        };
        let exhaustive = self.m <= MAX_EXHAUSTIVE_DEGREE;
        if exhaustive {
            for a in self.elements() {
                for b in self.elements() {
                    check_pair(a, b);
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b) = (self.random(&mut rng), self.random(&mut rng));
                check_pair(a, b);
            }
        }
        let singles: Vec<FieldElem> = if exhaustive {
            self.elements().collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            (0..samples).map(|_| self.random(&mut rng)).collect()
        };
        for a in singles {
            let roundtrip = self.bits_to_symbol(&self.symbol_to_bits(a)).ok() == Some(a);
            let inverse = a.is_zero() || self.inv(a).is_ok_and(|i| self.mul(a, i) == FieldElem::ONE);
            violations += (!(roundtrip && inverse)) as u64;
        }
        FieldCheck {
            m: self.m,
            exhaustive,
            pairs,
            violations,
        }
    }
}

/// Dense matrix over GF(2^m). Arithmetic takes the [`Field`] explicitly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldMatrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElem>,
}

impl FieldMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FieldMatrix {
            rows,
            cols,
            data: vec![FieldElem::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElem::ONE);
        }
        m
    }

    /// Row-major raw values, validated against `field`.
    pub fn from_values(field: &Field, rows: usize, cols: usize, values: &[u32]) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        let data = values
            .iter()
            .map(|&v| field.elem(v))
            .collect::<Result<Vec<_>>>()?;
        Ok(FieldMatrix { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> FieldElem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        FieldMatrix { rows, cols, data }
    }

    pub fn random<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(rows, cols, |_, _| field.random(rng))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn values(&self) -> Vec<u32> {
        self.data.iter().map(|e| e.0).collect()
    }

    pub fn add(&self, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(FieldMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| FieldElem(a.0 ^ b.0))
                .collect(),
        })
    }

    pub fn mul(&self, field: &Field, rhs: &FieldMatrix) -> Result<FieldMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                format!("{} rows on the right", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = FieldMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, field.add(cur, field.mul(a, rhs.get(k, j))));
                }
            }
        }
        Ok(out)
    }

    /// Submatrix formed by the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> FieldMatrix {
        FieldMatrix::from_fn(self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    /// Row-reduces a copy and returns the rank.
    pub fn rank(&self, field: &Field) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            if rank == a.rows {
                break;
            }
            let Some(p) = (rank..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(rank, p);
            a.eliminate_below_and_above(field, rank, col);
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self, field: &Field) -> bool {
        self.rows == self.cols && self.rank(field) == self.rows
    }

    pub fn inverse(&self, field: &Field) -> Result<FieldMatrix> {
        if self.rows != self.cols {
            return Err(Error::shape("square matrix", format!("{}x{}", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = FieldMatrix::identity(n);
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(Error::Singular)?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let s = field.inv(a.get(col, col))?;
            a.scale_row(field, col, s);
            inv.scale_row(field, col, s);
            for r in 0..n {
                let f = a.get(r, col);
                if r != col && !f.is_zero() {
                    a.axpy_row(field, r, col, f);
                    inv.axpy_row(field, r, col, f);
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, field: &Field, r: usize, s: FieldElem) {
        for j in 0..self.cols {
            let v = field.mul(self.get(r, j), s);
            self.set(r, j, v);
        }
    }

    /// row[dst] += f * row[src]
    fn axpy_row(&mut self, field: &Field, dst: usize, src: usize, f: FieldElem) {
        for j in 0..self.cols {
            let v = field.add(self.get(dst, j), field.mul(f, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    fn eliminate_below_and_above(&mut self, field: &Field, pivot_row: usize, col: usize) {
        let inv = field.inv(self.get(pivot_row, col)).expect("nonzero pivot");
        self.scale_row(field, pivot_row, inv);
        for r in 0..self.rows {
            let f = self.get(r, col);
            if r != pivot_row && !f.is_zero() {
                self.axpy_row(field, r, pivot_row, f);
            }
        }
    }
}

impl fmt::Display for FieldMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
