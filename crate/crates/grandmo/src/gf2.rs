//! Packed binary linear algebra over GF(2).
//!
//! Vectors and matrices are stored as little-endian `u64` words so that XOR,
//! AND and population count run word-at-a-time. Bit positions are 1-based at
//! the public interface (position 1 is the first coordinate) and 0-based only
//! inside the packed representation.

use crate::error::{Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

/// A fixed-length bit vector over GF(2).
///
/// Bits outside `len` are kept at zero in the packed payload, so whole-word
/// comparisons and popcounts are valid without masking.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitVector length must be positive");
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector with a single one at `pos` (1-based).
    pub fn indicator(len: usize, pos: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(pos, true);
        v
    }

    /// Parses a string of `0`/`1` characters, position 1 leftmost.
    pub fn from_bit_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty bit string".into()));
        }
        let mut v = Self::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i + 1, true),
                _ => {
                    return Err(Error::InvalidParameter(format!(
                        "invalid bit character {ch:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Vector of `len` uniformly random bits.
    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            let last = self.words.len() - 1;
            self.words[last] &= (1u64 << tail) - 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false // length is always >= 1
    }

    #[inline]
    fn check_pos(&self, pos: usize) {
        assert!(
            pos >= 1 && pos <= self.len,
            "bit position {pos} outside [1, {}]",
            self.len
        );
    }

    /// Reads the bit at `pos` (1-based).
    #[inline]
    pub fn get(&self, pos: usize) -> bool {
        self.check_pos(pos);
        let i = pos - 1;
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    /// Writes the bit at `pos` (1-based).
    #[inline]
    pub fn set(&mut self, pos: usize, value: bool) {
        self.check_pos(pos);
        let i = pos - 1;
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    /// Flips the bit at `pos` (1-based).
    #[inline]
    pub fn flip(&mut self, pos: usize) {
        self.check_pos(pos);
        let i = pos - 1;
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// XOR-accumulates `other` into `self`; lengths must match.
    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor_assign length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Returns `self ⊕ other`.
    pub fn xor(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Overwrites `self` with `other` without reallocating; lengths must match.
    pub fn copy_from(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "copy_from length mismatch");
        self.words.copy_from_slice(&other.words);
    }

    /// Iterator over the 1-based positions of set bits, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    None
                } else {
                    let b = rem.trailing_zeros() as usize;
                    rem &= rem - 1;
                    Some(wi * WORD_BITS + b + 1)
                }
            })
        })
    }

    /// Parity of `self · other` (dot product over GF(2)); lengths must match.
    pub fn dot(&self, other: &Self) -> bool {
        assert_eq!(self.len, other.len, "dot length mismatch");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// The packed payload; word 0 holds positions 1..=64 with position 1 in
    /// the least significant bit.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Hexadecimal rendering of the packed value (fixed width, one nibble per
    /// four bits, most significant nibble first).
    pub fn to_hex(&self) -> String {
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for i in (0..nibbles).rev() {
            let word = self.words[i * 4 / WORD_BITS];
            let nib = (word >> ((i * 4) % WORD_BITS)) & 0xf;
            out.push(char::from_digit(nib as u32, 16).unwrap());
        }
        out
    }
}

impl std::fmt::Display for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for pos in 1..=self.len {
            f.write_str(if self.get(pos) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for BitVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitVector({})", self)
    }
}

/// A dense binary matrix, rows packed like [`BitVector`]s.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "BitMatrix dimensions must be positive");
        let row_words = words_for(cols);
        Self {
            rows,
            cols,
            row_words,
            words: vec![0; rows * row_words],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 1..=n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows(rows: &[BitVector]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_slice_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_slice(&self, row0: usize) -> &[u64] {
        &self.words[row0 * self.row_words..(row0 + 1) * self.row_words]
    }

    #[inline]
    fn row_slice_mut(&mut self, row0: usize) -> &mut [u64] {
        &mut self.words[row0 * self.row_words..(row0 + 1) * self.row_words]
    }

    #[inline]
    fn check_index(&self, row: usize, col: usize) {
        assert!(
            row >= 1 && row <= self.rows && col >= 1 && col <= self.cols,
            "index ({row}, {col}) outside ({}, {})",
            self.rows,
            self.cols
        );
    }

    /// Reads entry (`row`, `col`), both 1-based.
    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.check_index(row, col);
        let c = col - 1;
        (self.row_slice(row - 1)[c / WORD_BITS] >> (c % WORD_BITS)) & 1 == 1
    }

    /// Writes entry (`row`, `col`), both 1-based.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.check_index(row, col);
        let c = col - 1;
        let mask = 1u64 << (c % WORD_BITS);
        let slot = &mut self.row_slice_mut(row - 1)[c / WORD_BITS];
        if value {
            *slot |= mask;
        } else {
            *slot &= !mask;
        }
    }

    /// Copy of row `row` (1-based) as a vector.
    pub fn row(&self, row: usize) -> BitVector {
        assert!(row >= 1 && row <= self.rows, "row {row} outside [1, {}]", self.rows);
        let mut v = BitVector::zeros(self.cols);
        v.words.copy_from_slice(self.row_slice(row - 1));
        v
    }

    /// Copy of column `col` (1-based) as a vector of length `rows`.
    pub fn column(&self, col: usize) -> BitVector {
        assert!(col >= 1 && col <= self.cols, "col {col} outside [1, {}]", self.cols);
        let mut v = BitVector::zeros(self.rows);
        for r in 1..=self.rows {
            if self.get(r, col) {
                v.set(r, true);
            }
        }
        v
    }

    fn xor_row_into(&mut self, src0: usize, dst0: usize) {
        let (a, b) = if src0 < dst0 {
            let (lo, hi) = self.words.split_at_mut(dst0 * self.row_words);
            (
                &lo[src0 * self.row_words..(src0 + 1) * self.row_words],
                &mut hi[..self.row_words],
            )
        } else {
            let (lo, hi) = self.words.split_at_mut(src0 * self.row_words);
            (
                &hi[..self.row_words],
                &mut lo[dst0 * self.row_words..(dst0 + 1) * self.row_words],
            )
        };
        for (d, s) in b.iter_mut().zip(a) {
            *d ^= s;
        }
    }

    fn swap_rows(&mut self, a0: usize, b0: usize) {
        if a0 == b0 {
            return;
        }
        for w in 0..self.row_words {
            self.words.swap(a0 * self.row_words + w, b0 * self.row_words + w);
        }
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Horizontal concatenation `[self | right]`; row counts must match.
    pub fn hconcat(&self, right: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, right.rows, "hconcat row mismatch");
        let mut m = BitMatrix::zeros(self.rows, self.cols + right.cols);
        for r in 1..=self.rows {
            for c in 1..=self.cols {
                if self.get(r, c) {
                    m.set(r, c, true);
                }
            }
            for c in 1..=right.cols {
                if right.get(r, c) {
                    m.set(r, self.cols + c, true);
                }
            }
        }
        m
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix({}x{})", self.rows, self.cols)?;
        for r in 1..=self.rows {
            writeln!(f, "  {}", self.row(r))?;
        }
        Ok(())
    }
}

/// `M · v` over GF(2).
pub fn mat_vec_mul(m: &BitMatrix, v: &BitVector) -> Result<BitVector> {
    if v.len() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{} but vector has length {}",
            m.rows(),
            m.cols(),
            v.len()
        )));
    }
    let mut out = BitVector::zeros(m.rows());
    for r in 0..m.rows() {
        let mut acc = 0u64;
        for (a, b) in m.row_slice(r).iter().zip(v.words()) {
            acc ^= a & b;
        }
        if acc.count_ones() & 1 == 1 {
            out.set(r + 1, true);
        }
    }
    Ok(out)
}

/// Row-vector product `v · M` over GF(2) (XOR of the rows of `M` selected by `v`).
pub fn vec_mat_mul(v: &BitVector, m: &BitMatrix) -> Result<BitVector> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector has length {} but matrix is {}x{}",
            v.len(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = BitVector::zeros(m.cols());
    for pos in v.ones() {
        let row = m.row_slice(pos - 1);
        for (o, w) in out.words.iter_mut().zip(row) {
            *o ^= w;
        }
    }
    Ok(out)
}

/// `A · B` over GF(2).
pub fn mat_mat_mul(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} times {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mut out = BitMatrix::zeros(a.rows(), b.cols());
    for r in 1..=a.rows() {
        let prod = vec_mat_mul(&a.row(r), b)?;
        out.row_slice_mut(r - 1).copy_from_slice(prod.words());
    }
    Ok(out)
}

/// Syndrome `H · y` of a length-`n` word; all-zero exactly on codewords.
pub fn syndrome(h: &BitMatrix, y: &BitVector) -> Result<BitVector> {
    mat_vec_mul(h, y)
}

/// Result of Gauss-Jordan elimination over GF(2).
pub struct RowReduction {
    /// The matrix in reduced row-echelon form.
    pub reduced: BitMatrix,
    pub rank: usize,
    /// 1-based pivot columns, ascending.
    pub pivot_cols: Vec<usize>,
}

/// Reduced row-echelon form of `m`.
pub fn row_reduce(m: &BitMatrix) -> RowReduction {
    let mut a = m.clone();
    let mut pivot_cols = Vec::new();
    let mut pivot_row = 0usize; // 0-based row the next pivot lands in
    for col in 1..=a.cols() {
        let hit = (pivot_row..a.rows()).find(|&r| a.get(r + 1, col));
        let Some(r) = hit else { continue };
        a.swap_rows(r, pivot_row);
        for other in 0..a.rows() {
            if other != pivot_row && a.get(other + 1, col) {
                a.xor_row_into(pivot_row, other);
            }
        }
        pivot_cols.push(col);
        pivot_row += 1;
        if pivot_row == a.rows() {
            break;
        }
    }
    RowReduction {
        rank: pivot_cols.len(),
        reduced: a,
        pivot_cols,
    }
}

/// Right inverse of a full-row-rank `k×n` matrix `G`: an `n×k` matrix with
/// `G · G⁻¹ = I_k`, so `(u·G)·G⁻¹ = u` for every message `u`.
pub fn right_inverse(g: &BitMatrix) -> Result<BitMatrix> {
    let k = g.rows();
    let n = g.cols();
    // Reduce [G | I_k]; the right block accumulates the row operations E with
    // E·G in RREF. Selecting pivot coordinates then inverts E back out.
    let aug = g.hconcat(&BitMatrix::identity(k));
    let red = row_reduce(&aug);
    let pivots: Vec<usize> = red.pivot_cols.iter().copied().filter(|&c| c <= n).collect();
    if pivots.len() < k {
        return Err(Error::Construction(format!(
            "matrix has row rank {} < {k}; no right inverse",
            pivots.len()
        )));
    }
    let mut inv = BitMatrix::zeros(n, k);
    for (j, &p) in pivots.iter().enumerate() {
        for c in 1..=k {
            if red.reduced.get(j + 1, n + c) {
                inv.set(p, c, true);
            }
        }
    }
    Ok(inv)
}
