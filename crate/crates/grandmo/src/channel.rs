//! Two-state Markov (Gilbert) burst channel.
//!
//! The chain has a good state G (noiseless) and a bad state B (bit flipped),
//! with transition probabilities b (G→B) and g (B→G). Burst lengths are
//! geometric with mean 1/g and variance (1-g)/g²; the stationary flip
//! probability is p = b/(b+g). For a code of rate R on a channel at a given
//! Eb/N0, p = Q(√(2·R·Eb/N0)).

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Gaussian tail probability Q(x) = P(N(0,1) > x) = erfc(x/√2)/2.
pub fn qfunc(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Channel parameters. `p` is derived, never stored independently.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GilbertElliott {
    b: f64,
    g: f64,
}

impl GilbertElliott {
    /// Builds the channel from its two transition probabilities.
    pub fn from_transition_probs(b: f64, g: f64) -> Result<Self> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transition probability b = {b} outside (0, 1)"
            )));
        }
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "transition probability g = {g} outside (0, 1]"
            )));
        }
        Ok(Self { b, g })
    }

    /// Derives the channel for a given recovery probability `g`, SNR point and
    /// code rate: p = Q(√(2·R·Eb/N0)) and b solves p = b/(b+g).
    pub fn from_snr(g: f64, ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(g > 0.0 && g <= 1.0) {
            return Err(Error::InvalidParameter(format!("g = {g} outside (0, 1]")));
        }
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::InvalidParameter(format!("rate = {rate} outside (0, 1]")));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidParameter(format!("Eb/N0 = {ebn0_db} dB not finite")));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let p = qfunc((2.0 * rate * ebn0).sqrt());
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "stationary flip probability p = {p} outside the burst regime (0, 0.5)"
            )));
        }
        let b = p * g / (1.0 - p);
        if b >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "derived b = {b} is not a probability"
            )));
        }
        Self::from_transition_probs(b, g)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    /// Stationary flip probability b/(b+g).
    pub fn p(&self) -> f64 {
        self.b / (self.b + self.g)
    }

    /// Mean burst length 1/g.
    pub fn mean_burst_len(&self) -> f64 {
        1.0 / self.g
    }

    /// Samples `n` channel steps. The initial state is drawn from the
    /// stationary distribution (P(B) = p) so per-frame statistics match p
    /// exactly; bit i is 1 iff the chain is in B at step i.
    pub fn sample_noise(&self, n: usize, rng: &mut impl Rng) -> BitVector {
        let mut noise = BitVector::zeros(n);
        let mut bad = rng.gen_bool(self.p());
        for i in 1..=n {
            if bad {
                noise.set(i, true);
            }
            bad = if bad {
                !rng.gen_bool(self.g)
            } else {
                rng.gen_bool(self.b)
            };
        }
        noise
    }

    /// The burst/extension trade-off constant for this channel, clamped to
    /// `[1, cap]`. At g = 1 bursts have length exactly one and the constant
    /// degenerates to its limit, 1.
    pub fn delta_l(&self, cap: u32) -> Result<u32> {
        if self.g >= 1.0 {
            return Ok(1);
        }
        delta_l(self.b, self.g, cap)
    }
}

/// ⌊log(b/g) / log((1-g)/(1-b))⌋ clamped to `[1, cap]`.
///
/// One extra burst in a test error pattern costs this many burst-length units
/// of likelihood. `b = g` makes the expression 0/0; callers must then choose
/// the constant themselves.
pub fn delta_l(b: f64, g: f64, cap: u32) -> Result<u32> {
    if !(b > 0.0 && b < 1.0 && g > 0.0 && g < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta_l needs b, g in (0, 1); got b={b} g={g}"
        )));
    }
    if b == g {
        return Err(Error::InvalidParameter(
            "delta_l is undefined for b = g (0/0); set the constant explicitly".into(),
        ));
    }
    if cap < 1 {
        return Err(Error::InvalidParameter("delta_l cap must be at least 1".into()));
    }
    let num = (b / g).ln();
    let den = ((1.0 - g) / (1.0 - b)).ln();
    if den == 0.0 || !num.is_finite() || !den.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta_l degenerate for b={b} g={g}"
        )));
    }
    let raw = (num / den).floor();
    let clamped = if raw < 1.0 {
        1
    } else if raw >= cap as f64 {
        cap
    } else {
        raw as u32
    };
    Ok(clamped)
}
