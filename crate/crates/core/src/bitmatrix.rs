//! Dense matrices over GF(2).
//!
//! Storage is row-major with each row padded to a whole number of `u64`
//! words. Bit `j` of row `i` lives in word `j / 64` of that row at bit
//! position `j % 64`. Unused high bits of the last word are always zero.
//!
//! The hex form ([`BitMatrix::to_hex`]) concatenates the entries row by row,
//! pads with zeros to a multiple of four and writes each group of four bits
//! as one hex digit, the first bit being the most significant.

use std::fmt;
use std::ops::{BitXor, BitXorAssign, Mul};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD);
        BitMatrix {
            rows,
            cols,
            stride,
            words: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| true)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries; every row must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    other => {
                        return Err(Error::Invalid(format!("bit value {other} at ({i}, {j})")))
                    }
                }
            }
        }
        Ok(m)
    }

    /// Builds an `rows x cols` matrix whose column `j` is the low `rows` bits of `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[u64]) -> Self {
        assert!(rows <= WORD, "column packing supports at most 64 rows");
        let mut m = Self::zeros(rows, columns.len());
        for (j, &c) in columns.iter().enumerate() {
            m.set_column(j, c);
        }
        m
    }

    /// Row-major 0/1 entries, `rows * cols` long.
    pub fn from_bits(rows: usize, cols: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: bits.len(),
            });
        }
        let chunks: Vec<&[u8]> = if cols == 0 {
            vec![&[][..]; rows]
        } else {
            bits.chunks(cols).collect()
        };
        let mut m = Self::from_rows(&chunks)?;
        m.rows = rows;
        m.cols = cols;
        Ok(m)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.rows * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.push(self.get(i, j) as u8);
            }
        }
        out
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        (self.words[i * self.stride + j / WORD] >> (j % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.words[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        debug_assert!(i < self.rows && j < self.cols);
        self.words[i * self.stride + j / WORD] ^= 1u64 << (j % WORD);
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.stride..(i + 1) * self.stride]
    }

    fn xor_row_into(&mut self, dst: usize, src: &[u64]) {
        let s = self.stride;
        for (d, w) in self.words[dst * s..(dst + 1) * s].iter_mut().zip(src) {
            *d ^= *w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.stride {
            self.words.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    /// Column `j` packed into a word, bit `i` holding entry `(i, j)`.
    pub fn column(&self, j: usize) -> u64 {
        assert!(self.rows <= WORD, "column packing supports at most 64 rows");
        let mut c = 0u64;
        for i in 0..self.rows {
            c |= (self.get(i, j) as u64) << i;
        }
        c
    }

    pub fn set_column(&mut self, j: usize, bits: u64) {
        for i in 0..self.rows {
            self.set(i, j, (bits >> i) & 1 == 1);
        }
    }

    pub fn columns(&self) -> Vec<u64> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// GF(2) product; panics on incompatible shapes (see [`BitMatrix::try_mul`]).
    pub fn mul_mat(&self, rhs: &BitMatrix) -> BitMatrix {
        self.try_mul(rhs).expect("incompatible shapes")
    }

    pub fn try_mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::shape(
                format!("{} rows on the right", self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let src = rhs.row_words(k).to_vec();
                    out.xor_row_into(i, &src);
                }
            }
        }
        Ok(out)
    }

    pub fn try_xor(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::shape(
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        let mut out = self.clone();
        out ^= rhs;
        Ok(out)
    }

    /// Matrix-vector product with a packed column vector (`cols <= 64`, `rows <= 64`).
    #[inline]
    pub fn apply_packed(&self, v: u64) -> u64 {
        debug_assert!(self.rows <= WORD && self.cols <= WORD);
        let mut out = 0u64;
        for i in 0..self.rows {
            let w = self.words[i * self.stride] & v;
            out |= ((w.count_ones() & 1) as u64) << i;
        }
        out
    }

    /// Matrix-vector product with a vector of bits.
    pub fn apply(&self, v: &[bool]) -> Result<Vec<bool>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                v.iter()
                    .enumerate()
                    .fold(false, |acc, (j, &b)| acc ^ (b && self.get(i, j)))
            })
            .collect())
    }

    /// Rank over GF(2).
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, p);
            let pivot = m.row_words(rank).to_vec();
            for r in 0..m.rows {
                if r != rank && m.get(r, col) {
                    m.xor_row_into(r, &pivot);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&r| a.get(r, col))?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let pa = a.row_words(col).to_vec();
            let pi = inv.row_words(col).to_vec();
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row_into(r, &pa);
                    inv.xor_row_into(r, &pi);
                }
            }
        }
        Some(inv)
    }

    /// Copy of rows `start..start + len`.
    pub fn row_block(&self, start: usize, len: usize) -> BitMatrix {
        assert!(start + len <= self.rows);
        BitMatrix {
            rows: len,
            cols: self.cols,
            stride: self.stride,
            words: self.words[start * self.stride..(start + len) * self.stride].to_vec(),
        }
    }

    /// Packs the matrix column by column: column `j` occupies bits `j*rows .. (j+1)*rows`.
    pub fn to_column_index(&self) -> u64 {
        assert!(self.rows * self.cols <= WORD);
        let mut idx = 0u64;
        for j in 0..self.cols {
            idx |= self.column(j) << (j * self.rows);
        }
        idx
    }

    pub fn from_column_index(rows: usize, cols: usize, idx: u64) -> Self {
        assert!(rows * cols <= WORD);
        let mask = if rows == WORD { u64::MAX } else { (1u64 << rows) - 1 };
        let columns: Vec<u64> = (0..cols).map(|j| (idx >> (j * rows)) & mask).collect();
        Self::from_columns(rows, &columns)
    }

    pub fn to_hex(&self) -> String {
        let bits = self.to_bits();
        bits.chunks(4)
            .map(|c| {
                let v = c.iter().enumerate().fold(0u32, |acc, (k, &b)| acc | ((b as u32) << (3 - k)));
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(rows: usize, cols: usize, hex: &str) -> Result<Self> {
        let total = rows * cols;
        let digits = total.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Format(format!(
                "expected {digits} hex digits for a {rows}x{cols} matrix, found {}",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Format(format!("invalid hex digit {ch:?}")))?;
            for k in 0..4 {
                bits.push(((v >> (3 - k)) & 1) as u8);
            }
        }
        if bits[total..].iter().any(|&b| b != 0) {
            return Err(Error::Format("nonzero padding bits".into()));
        }
        bits.truncate(total);
        Self::from_bits(rows, cols, &bits)
    }
}

impl BitXorAssign<&BitMatrix> for BitMatrix {
    fn bitxor_assign(&mut self, rhs: &BitMatrix) {
        assert_eq!(self.shape(), rhs.shape(), "shape mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= *b;
        }
    }
}

impl BitXor for &BitMatrix {
    type Output = BitMatrix;
    fn bitxor(self, rhs: &BitMatrix) -> BitMatrix {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl Mul for &BitMatrix {
    type Output = BitMatrix;
    fn mul(self, rhs: &BitMatrix) -> BitMatrix {
        self.mul_mat(rhs)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {row}")?;
        }
        Ok(())
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}
