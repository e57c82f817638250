//! Dense bit-packed matrices and vectors over GF(2).
//!
//! Rows are stored as runs of `u64` words, least significant bit first within
//! a word. Packing is never observable: every operation is defined entrywise.

use std::fmt;

use crate::error::{Error, Result};
use crate::keystream::SplitMix64;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b & 1 == 1);
        }
        v
    }

    /// The low `len` bits of `word`, bit `i` of the word being entry `i`.
    ///
    /// # Panics
    ///
    /// Panics if `len > 64`.
    pub fn from_word(len: usize, word: u64) -> Self {
        assert!(len <= WORD);
        let mask = if len == WORD {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            len,
            words: if len == 0 { vec![] } else { vec![word & mask] },
        }
    }

    /// Entries packed into one word; only valid for `len <= 64`.
    pub fn to_word(&self) -> u64 {
        assert!(self.len <= WORD);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(
            i < self.len,
            "index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "BitVector({s})")
    }
}

/// A dense `rows x cols` matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    /// # Panics
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(
            rows >= 1 && cols >= 1,
            "BitMatrix needs at least one row and column"
        );
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, true);
        }
        m
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

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if rows.is_empty() || cols == 0 {
            return Err(Error::DimensionMismatch("empty matrix literal".into()));
        }
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix literal".into()));
        }
        Ok(Self::from_fn(rows.len(), cols, |i, j| {
            rows[i].as_ref()[j] & 1 == 1
        }))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        if src == dst {
            self.row_words_mut(dst).fill(0);
            return;
        }
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..(src + 1) * s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s], &mut lo[dst * s..(dst + 1) * s])
        };
        for (d, w) in b.iter_mut().zip(a) {
            *d ^= *w;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Matrix product over GF(2).
    pub fn multiply(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for (wi, &word) in self.row_words(i).iter().enumerate() {
                let mut w = word;
                while w != 0 {
                    let k = wi * WORD + w.trailing_zeros() as usize;
                    w &= w - 1;
                    let src = other.row_words(k);
                    for (d, s) in out.data[i * out.stride..(i + 1) * out.stride]
                        .iter_mut()
                        .zip(src)
                    {
                        *d ^= *s;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn multiply_vec(&self, v: &BitVector) -> Result<BitVector> {
        if self.cols != v.len {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows, self.cols, v.len
            )));
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let parity = self
                .row_words(i)
                .iter()
                .zip(&v.words)
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            if parity == 1 {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Entrywise XOR.
    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = self.clone();
        for (d, s) in out.data.iter_mut().zip(&other.data) {
            *d ^= *s;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.set(j, i, true);
                }
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(pivot) = (rank..m.rows).find(|&r| m.get(r, col)) else {
                continue;
            };
            m.swap_rows(rank, pivot);
            for r in rank + 1..m.rows {
                if m.get(r, col) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    pub fn is_nonsingular(&self) -> Result<bool> {
        self.require_square()?;
        Ok(self.rank() == self.rows)
    }

    /// Gauss–Jordan inversion; the pivot is the first row with a 1 in the column.
    pub fn invert(&self) -> Result<BitMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| a.get(r, col))
                .ok_or(Error::SingularMatrix)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            for r in 0..n {
                if r != col && a.get(r, col) {
                    a.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Ok(inv)
    }

    /// `self^k`; `k = 0` gives the identity.
    pub fn pow(&self, k: u32) -> Result<BitMatrix> {
        self.require_square()?;
        let mut out = BitMatrix::identity(self.rows);
        for _ in 0..k {
            out = out.multiply(self)?;
        }
        Ok(out)
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

/// A seeded nonsingular `dim x dim` matrix built as `L * U * P`.
///
/// Draw order from `SplitMix64::new(seed)`: the strictly-lower entries of `L`
/// row by row (one `next_bit` each), then the strictly-upper entries of `U`
/// row by row, then a Fisher–Yates permutation `p` of `0..dim`; `P` has its
/// 1 in row `i` at column `p[i]`.
///
/// # Panics
///
/// Panics if `dim == 0`.
pub fn random_nonsingular(dim: usize, seed: u64) -> BitMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut lower = BitMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            lower.set(i, j, rng.next_bit());
        }
    }
    let mut upper = BitMatrix::identity(dim);
    for i in 0..dim {
        for j in i + 1..dim {
            upper.set(i, j, rng.next_bit());
        }
    }
    let perm = rng.permutation(dim);
    let p = BitMatrix::from_fn(dim, dim, |i, j| perm[i] == j);
    lower
        .multiply(&upper)
        .and_then(|lu| lu.multiply(&p))
        .expect("square factors of equal size")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_multiply(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
        BitMatrix::from_fn(a.rows(), b.cols(), |i, j| {
            (0..a.cols()).fold(false, |acc, k| acc ^ (a.get(i, k) & b.get(k, j)))
        })
    }

    fn seeded(rows: usize, cols: usize, seed: u64) -> BitMatrix {
        let mut g = SplitMix64::new(seed);
        BitMatrix::from_fn(rows, cols, |_, _| g.next_bit())
    }

    #[test]
    fn identity_is_neutral() {
        let a = seeded(6, 6, 1);
        assert_eq!(BitMatrix::identity(6).multiply(&a).unwrap(), a);
        assert_eq!(a.multiply(&BitMatrix::identity(6)).unwrap(), a);
    }

    #[test]
    fn multiply_matches_triple_loop_across_word_boundaries() {
        for (k, &(r, m, c)) in [(8, 8, 8), (3, 70, 5), (65, 64, 130), (1, 1, 1)]
            .iter()
            .enumerate()
        {
            let a = seeded(r, m, k as u64);
            let b = seeded(m, c, 100 + k as u64);
            assert_eq!(a.multiply(&b).unwrap(), naive_multiply(&a, &b));
        }
    }

    #[test]
    fn multiply_vec_matches_dot_products() {
        let a = seeded(9, 70, 5);
        let mut g = SplitMix64::new(6);
        let bits: Vec<u8> = (0..70).map(|_| g.next_bit() as u8).collect();
        let v = BitVector::from_bits(&bits);
        let out = a.multiply_vec(&v).unwrap();
        for i in 0..9 {
            let dot = (0..70).fold(0u8, |acc, k| acc ^ (a.get(i, k) as u8 & bits[k]));
            assert_eq!(out.get(i) as u8, dot);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = seeded(2, 3, 1);
        assert!(matches!(a.multiply(&a), Err(Error::DimensionMismatch(_))));
        assert!(matches!(
            a.multiply_vec(&BitVector::zeros(2)),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            a.add(&seeded(3, 2, 1)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn add_is_self_inverse() {
        let a = seeded(7, 9, 3);
        assert!(a.add(&a).unwrap().is_zero());
        assert_eq!(a.add(&BitMatrix::zeros(7, 9)).unwrap(), a);
    }

    #[test]
    fn transpose_is_an_involution() {
        let a = seeded(5, 67, 4);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(BitMatrix::identity(4).transpose(), BitMatrix::identity(4));
    }

    #[test]
    fn hybrid_example_matrix_is_invertible() {
        let m = BitMatrix::from_rows(&[[1, 0, 1, 1], [0, 1, 1, 0], [0, 0, 0, 1], [1, 1, 1, 0]])
            .unwrap();
        assert!(m.is_nonsingular().unwrap());
        let inv = m.invert().unwrap();
        assert_eq!(m.multiply(&inv).unwrap(), BitMatrix::identity(4));
        assert_eq!(inv.multiply(&m).unwrap(), BitMatrix::identity(4));
    }

    #[test]
    fn singular_and_non_square_are_rejected() {
        let mut m = BitMatrix::identity(4);
        m.set(2, 2, false);
        assert!(matches!(m.invert(), Err(Error::SingularMatrix)));
        assert!(!BitMatrix::zeros(3, 3).is_nonsingular().unwrap());
        assert!(matches!(
            seeded(2, 3, 0).invert(),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert_eq!(
            BitMatrix::identity(1).invert().unwrap(),
            BitMatrix::identity(1)
        );
    }

    #[test]
    fn random_nonsingular_properties() {
        assert_eq!(random_nonsingular(1, 77), BitMatrix::identity(1));
        assert_eq!(random_nonsingular(25, 5), random_nonsingular(25, 5));
        assert_ne!(random_nonsingular(25, 5), random_nonsingular(25, 6));
        for seed in 0..20 {
            assert_eq!(random_nonsingular(25, seed).rank(), 25);
        }
    }

    #[test]
    fn products_of_elementary_matrices_are_nonsingular() {
        let mut g = SplitMix64::new(11);
        for _ in 0..20 {
            let n = 2 + g.below(10) as usize;
            let mut m = BitMatrix::identity(n);
            for _ in 0..30 {
                let (a, b) = (g.below(n as u64) as usize, g.below(n as u64) as usize);
                if a != b {
                    m.xor_row_into(a, b);
                } else {
                    m.swap_rows(a, (a + 1) % n);
                }
            }
            assert!(m.is_nonsingular().unwrap());
        }
    }

    #[test]
    fn bit_vector_word_round_trip() {
        let v = BitVector::from_word(25, 0xFFFF_FFFF);
        assert_eq!(v.count_ones(), 25);
        assert_eq!(v.to_word(), (1 << 25) - 1);
    }
}
