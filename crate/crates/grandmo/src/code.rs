//! Construction of linear block codes: random linear codes, (shortened) BCH
//! codes, and codes loaded from a plain-text parity-check file.
//!
//! Every constructor yields the same bundle: the parity-check matrix `H`, a
//! generator `G`, its right inverse `G⁻¹` for message recovery, and (when the
//! construction defines one) a minimum-distance parameter `d`. The invariants
//! `H·Gᵀ = 0`, `G·G⁻¹ = I_k` and `rank(H) = n-k` are verified at
//! construction time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::galois::bch_generator;
use crate::gf2::{mat_mat_mul, mat_vec_mul, row_reduce, vec_mat_mul, BitMatrix, BitVector};

/// An (n, k) binary linear block code.
#[derive(Clone)]
pub struct LinearCode {
    n: usize,
    k: usize,
    h: BitMatrix,
    g: BitMatrix,
    g_inv: BitMatrix,
    d: Option<u32>,
}

impl LinearCode {
    /// Random linear code: `G = [I_k | P]` with `P` uniformly random,
    /// `H = [Pᵀ | I_{n-k}]`. Deterministic for a given seed.
    pub fn random_linear(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k < n, got n={n} k={k}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = n - k;
        let mut p = BitMatrix::zeros(k, r);
        for row in 1..=k {
            for col in 1..=r {
                p.set(row, col, rng.gen_bool(0.5));
            }
        }
        Self::from_systematic_parity_block(&p, None)
    }

    /// Narrow-sense binary BCH code of length `2^field_degree - 1` and
    /// designed distance `2t + 1`, optionally shortened by removing the
    /// leading `shorten_by` message positions.
    pub fn bch(field_degree: u32, t: u32, shorten_by: usize) -> Result<Self> {
        Self::bch_code(field_degree, t, shorten_by, false)
    }

    /// Even-weight subcode of the narrow-sense BCH code: the generator gains
    /// an `(x + 1)` factor, the designed distance becomes `2t + 2` and `n - k`
    /// grows by one. This is the parent of the (79, 64) double-error-correcting
    /// code (shorten the (127, 112) code by 48).
    pub fn bch_even_weight(field_degree: u32, t: u32, shorten_by: usize) -> Result<Self> {
        Self::bch_code(field_degree, t, shorten_by, true)
    }

    fn bch_code(field_degree: u32, t: u32, shorten_by: usize, even: bool) -> Result<Self> {
        let gen = bch_generator(field_degree, t, even)?;
        let n = (1usize << field_degree) - 1;
        let deg = gen.len() - 1;
        let k = n - deg;
        if shorten_by >= k {
            return Err(Error::InvalidParameter(format!(
                "shorten_by = {shorten_by} must be below k = {k}"
            )));
        }
        // Generator matrix rows are the cyclic shifts x^i * g(x). The leading
        // k x k block is unit lower-triangular (g_0 = 1), so row reduction
        // yields the systematic form [I_k | P] with pivots exactly 1..k.
        let mut g_full = BitMatrix::zeros(k, n);
        for row in 1..=k {
            for (i, &c) in gen.iter().enumerate() {
                if c {
                    g_full.set(row, row + i, true);
                }
            }
        }
        let red = row_reduce(&g_full);
        debug_assert_eq!(red.rank, k);
        debug_assert!(red.pivot_cols.iter().enumerate().all(|(i, &c)| c == i + 1));
        // Shortening drops the leading message coordinates: rows 1..=shorten_by
        // and columns 1..=shorten_by of the systematic form.
        let ks = k - shorten_by;
        let r = n - k;
        let mut p = BitMatrix::zeros(ks, r);
        for row in 1..=ks {
            for col in 1..=r {
                p.set(row, col, red.reduced.get(shorten_by + row, k + col));
            }
        }
        let d = if even { 2 * t + 2 } else { 2 * t + 1 };
        Self::from_systematic_parity_block(&p, Some(d))
    }

    /// Assembles the code for a systematic parity block: `G = [I_k | P]`,
    /// `H = [Pᵀ | I_{n-k}]`, `G⁻¹ = [I_k ; 0]`.
    fn from_systematic_parity_block(p: &BitMatrix, d: Option<u32>) -> Result<Self> {
        let k = p.rows();
        let r = p.cols();
        let n = k + r;
        let mut g = BitMatrix::zeros(k, n);
        let mut h = BitMatrix::zeros(r, n);
        let mut g_inv = BitMatrix::zeros(n, k);
        for row in 1..=k {
            g.set(row, row, true);
            g_inv.set(row, row, true);
            for col in 1..=r {
                if p.get(row, col) {
                    g.set(row, k + col, true);
                    h.set(col, row, true);
                }
            }
        }
        for row in 1..=r {
            h.set(row, k + row, true);
        }
        let code = Self { n, k, h, g, g_inv, d };
        code.verify_invariants()?;
        Ok(code)
    }

    /// Builds the code bundle from an arbitrary full-rank parity-check matrix.
    /// `G` is completed from the kernel of `H` via row reduction; `d` is not
    /// derivable from `H` alone and may be supplied by the caller.
    pub fn from_parity_check(h: BitMatrix, d: Option<u32>) -> Result<Self> {
        let r = h.rows();
        let n = h.cols();
        if r >= n {
            return Err(Error::InvalidParameter(format!(
                "parity-check matrix {r}x{n} leaves no message bits"
            )));
        }
        let red = row_reduce(&h);
        if red.rank < r {
            return Err(Error::Construction(format!(
                "parity-check matrix has rank {} < {r} rows",
                red.rank
            )));
        }
        let k = n - r;
        let pivots = &red.pivot_cols;
        let mut is_pivot = vec![false; n + 1];
        for &p in pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (1..=n).filter(|&c| !is_pivot[c]).collect();
        // Kernel basis: one generator row per free column f, with the pivot
        // coordinates filled from column f of the reduced matrix.
        let mut g = BitMatrix::zeros(k, n);
        let mut g_inv = BitMatrix::zeros(n, k);
        for (row, &f) in free.iter().enumerate() {
            g.set(row + 1, f, true);
            g_inv.set(f, row + 1, true);
            for (j, &pcol) in pivots.iter().enumerate() {
                if red.reduced.get(j + 1, f) {
                    g.set(row + 1, pcol, true);
                }
            }
        }
        let code = Self { n, k, h, g, g_inv, d };
        code.verify_invariants()?;
        Ok(code)
    }

    fn verify_invariants(&self) -> Result<()> {
        for row in 1..=self.k {
            if !mat_vec_mul(&self.h, &self.g.row(row))?.is_zero() {
                return Err(Error::Construction(format!(
                    "H·Gᵀ is nonzero at generator row {row}"
                )));
            }
        }
        if mat_mat_mul(&self.g, &self.g_inv)? != BitMatrix::identity(self.k) {
            return Err(Error::Construction("G·G⁻¹ is not the identity".into()));
        }
        if row_reduce(&self.h).rank != self.n - self.k {
            return Err(Error::Construction("parity-check matrix is rank deficient".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity bits, n - k.
    pub fn parity_bits(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Minimum-distance parameter when the construction defines one
    /// (designed distance for BCH; unknown for random linear codes).
    pub fn min_distance(&self) -> Option<u32> {
        self.d
    }

    pub fn parity_check(&self) -> &BitMatrix {
        &self.h
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.g
    }

    pub fn generator_inverse(&self) -> &BitMatrix {
        &self.g_inv
    }

    /// c = u·G.
    pub fn encode(&self, u: &BitVector) -> Result<BitVector> {
        if u.len() != self.k {
            return Err(Error::DimensionMismatch(format!(
                "message length {} != k = {}",
                u.len(),
                self.k
            )));
        }
        vec_mat_mul(u, &self.g)
    }

    /// u = c·G⁻¹ (exact when c is a codeword).
    pub fn message_of(&self, c: &BitVector) -> Result<BitVector> {
        if c.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "word length {} != n = {}",
                c.len(),
                self.n
            )));
        }
        vec_mat_mul(c, &self.g_inv)
    }

    /// H·y, all-zero exactly on codewords.
    pub fn syndrome(&self, y: &BitVector) -> Result<BitVector> {
        mat_vec_mul(&self.h, y)
    }

    /// Serializes the parity-check matrix in the H-file format: a header line
    /// `n k`, then n-k rows of `0`/`1` characters with column 1 leftmost.
    pub fn to_h_file(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.k);
        for row in 1..=self.parity_bits() {
            out.push_str(&self.h.row(row).to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the H-file format. Lines starting with `#` before the header are
    /// skipped (generated files carry a provenance comment); a trailing blank
    /// line is tolerated.
    pub fn from_h_file(text: &str, d: Option<u32>) -> Result<Self> {
        let mut lines = text.lines().enumerate().skip_while(|(_, l)| l.starts_with('#'));
        let (header_no, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?;
        let mut it = header.split_whitespace();
        let parse_dim = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Parse {
                line: header_no + 1,
                msg: format!("missing {what} in header"),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line: header_no + 1,
                msg: format!("invalid {what} in header"),
            })
        };
        let n = parse_dim(it.next(), "n")?;
        let k = parse_dim(it.next(), "k")?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: header_no + 1,
                msg: "header must be exactly `n k`".into(),
            });
        }
        if k < 1 || k >= n {
            return Err(Error::Parse {
                line: header_no + 1,
                msg: format!("need 1 <= k < n, got n={n} k={k}"),
            });
        }
        let r = n - k;
        let mut h = BitMatrix::zeros(r, n);
        let mut row = 0usize;
        for (line_no, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            row += 1;
            if row > r {
                return Err(Error::Parse {
                    line: line_no + 1,
                    msg: format!("more than n-k = {r} matrix rows"),
                });
            }
            if line.len() != n {
                return Err(Error::Parse {
                    line: line_no + 1,
                    msg: format!("row has {} characters, expected n = {n}", line.len()),
                });
            }
            for (col, ch) in line.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => h.set(row, col + 1, true),
                    _ => {
                        return Err(Error::Parse {
                            line: line_no + 1,
                            msg: format!("invalid character {ch:?} in matrix row"),
                        })
                    }
                }
            }
        }
        if row != r {
            return Err(Error::Parse {
                line: 0,
                msg: format!("found {row} matrix rows, expected n-k = {r}"),
            });
        }
        Self::from_parity_check(h, d)
    }
}

impl std::fmt::Debug for LinearCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "LinearCode(n={}, k={}, d={:?})", self.n, self.k, self.d)
    }
}
