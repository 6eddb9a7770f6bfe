//! GF(2^m) log/antilog arithmetic, only what BCH generator-polynomial
//! construction needs.

use crate::error::{Error, Result};

/// Primitive polynomial per field degree, bit i = coefficient of x^i.
/// Standard-table choices; any primitive polynomial yields a code with the
/// same (n, k, d).
fn primitive_poly(m: u32) -> Result<u32> {
    Ok(match m {
        3 => 0b1011,          // x^3 + x + 1
        4 => 0b1_0011,        // x^4 + x + 1
        5 => 0b10_0101,       // x^5 + x^2 + 1
        6 => 0b100_0011,      // x^6 + x + 1
        7 => 0b1000_1001,     // x^7 + x^3 + 1
        8 => 0b1_0001_1101,   // x^8 + x^4 + x^3 + x^2 + 1
        9 => 0b10_0001_0001,  // x^9 + x^4 + 1
        10 => 0b100_0000_1001, // x^10 + x^3 + 1
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unsupported field degree {m}; expected 3..=10"
            )))
        }
    })
}

pub(crate) struct Gf2m {
    order: usize, // 2^m - 1
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Gf2m {
    pub(crate) fn new(m: u32) -> Result<Self> {
        let poly = primitive_poly(m)?;
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; order];
        let mut log = vec![0u16; order + 1];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        Ok(Self { order, exp, log })
    }

    pub(crate) fn order(&self) -> usize {
        self.order
    }

    /// alpha^i, exponent taken mod 2^m - 1.
    pub(crate) fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }

    pub(crate) fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        self.exp[s % self.order]
    }
}

/// Cyclotomic coset of `i` modulo 2^m - 1.
fn cyclotomic_coset(i: usize, order: usize) -> Vec<usize> {
    let mut coset = vec![i % order];
    let mut j = (i * 2) % order;
    while j != coset[0] {
        coset.push(j);
        j = (j * 2) % order;
    }
    coset
}

/// Generator polynomial of the narrow-sense binary BCH code of designed
/// distance 2t+1: lcm of the minimal polynomials of alpha, alpha^2, ...,
/// alpha^{2t}. With `even_weight` the factor (x + 1) is appended, expurgating
/// the code to even-weight codewords (designed distance 2t+2).
///
/// Coefficients returned ascending in degree, as bits.
pub(crate) fn bch_generator(m: u32, t: u32, even_weight: bool) -> Result<Vec<bool>> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be at least 1".into()));
    }
    let field = Gf2m::new(m)?;
    let order = field.order();
    if 2 * t as usize >= order {
        return Err(Error::InvalidParameter(format!(
            "t = {t} too large for field order {order}"
        )));
    }

    // Distinct cyclotomic cosets covering exponents 1..=2t. Even exponents
    // share the coset of their odd part, so odd representatives suffice.
    let mut seen = vec![false; order];
    let mut gen: Vec<u16> = vec![1]; // product accumulator over GF(2^m)
    for i in (1..=2 * t as usize).step_by(2) {
        if seen[i % order] {
            continue;
        }
        let coset = cyclotomic_coset(i, order);
        for &j in &coset {
            seen[j] = true;
        }
        // Minimal polynomial: product of (x - alpha^j) over the coset.
        let mut min_poly: Vec<u16> = vec![1];
        for &j in &coset {
            min_poly = poly_mul_linear(&field, &min_poly, field.alpha_pow(j));
        }
        gen = poly_mul(&field, &gen, &min_poly);
    }
    if even_weight {
        gen = poly_mul_linear(&field, &gen, 1); // times (x + alpha^0) = (x + 1)
    }
    gen.iter()
        .map(|&c| match c {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::Construction(
                "generator polynomial has a coefficient outside GF(2)".into(),
            )),
        })
        .collect()
}

/// p(x) * (x + r) over GF(2^m).
fn poly_mul_linear(f: &Gf2m, p: &[u16], r: u16) -> Vec<u16> {
    let mut out = vec![0u16; p.len() + 1];
    for (i, &c) in p.iter().enumerate() {
        out[i + 1] ^= c;
        out[i] ^= f.mul(c, r);
    }
    out
}

fn poly_mul(f: &Gf2m, a: &[u16], b: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; a.len() + b.len() - 1];
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            out[i + j] ^= f.mul(ca, cb);
        }
    }
    out
}
