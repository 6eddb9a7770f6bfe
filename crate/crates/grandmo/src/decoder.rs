//! Hard-input decoders.
//!
//! All GRAND variants share one engine: precompute the syndrome of every
//! prefix burst `1..=j`, so the syndrome of any burst `i..=j` is the XOR of
//! two prefixes and each codebook membership query costs O(m) word
//! operations. Codes with up to 64 parity bits take a single-word fast path;
//! wider codes fall back to vector syndromes.
//!
//! The bounded-distance decoder answers exactly like an algebraic decoder
//! that corrects up to `t` errors: it returns the unique codeword within
//! Hamming distance `t` when one exists, via a precomputed syndrome table.

use std::collections::HashMap;

use crate::code::LinearCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::pattern::{hamming_order, BurstPattern, QueryOrderSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    Decoded,
    Abandoned,
}

/// Outcome of one decoding attempt.
///
/// `queries` counts every codebook membership test including the zero-pattern
/// check. `time_steps` counts hardware-style steps: for the constrained order
/// the step group of the hit (or the full schedule on abandonment), for the
/// serial orders one step per query.
#[derive(Clone, Debug)]
pub struct DecodeResult {
    pub status: DecodeStatus,
    pub codeword: Option<BitVector>,
    pub message: Option<BitVector>,
    pub error_pattern: Option<BurstPattern>,
    pub queries: u64,
    pub time_steps: u64,
}

impl DecodeResult {
    pub fn is_decoded(&self) -> bool {
        self.status == DecodeStatus::Decoded
    }
}

/// Prefix-burst syndromes `s_{1..j}` for j = 0..=n (index 0 is the zero
/// syndrome). The syndrome of a burst `i..=j` is `prefix[j] ^ prefix[i-1]`.
pub(crate) enum PrefixTable {
    Narrow(Vec<u64>),
    Wide(Vec<BitVector>),
}

impl PrefixTable {
    pub(crate) fn build(code: &LinearCode) -> Self {
        let n = code.n();
        let nk = code.parity_bits();
        if nk <= 64 {
            let mut prefix = Vec::with_capacity(n + 1);
            let mut acc = 0u64;
            prefix.push(acc);
            for j in 1..=n {
                acc ^= code.parity_check().column(j).words()[0];
                prefix.push(acc);
            }
            PrefixTable::Narrow(prefix)
        } else {
            let mut prefix = Vec::with_capacity(n + 1);
            let mut acc = BitVector::zeros(nk);
            prefix.push(acc.clone());
            for j in 1..=n {
                acc.xor_assign(&code.parity_check().column(j));
                prefix.push(acc.clone());
            }
            PrefixTable::Wide(prefix)
        }
    }

    pub(crate) fn narrow_pattern_syndrome(prefix: &[u64], pattern: &BurstPattern) -> u64 {
        let mut s = 0u64;
        for &(start, len) in pattern.runs() {
            s ^= prefix[(start + len - 1) as usize] ^ prefix[(start - 1) as usize];
        }
        s
    }
}

/// A reusable GRAND decoder: the prefix table is built once and shared across
/// received vectors.
pub struct GrandDecoder<'c> {
    code: &'c LinearCode,
    spec: QueryOrderSpec,
    prefix: PrefixTable,
}

impl<'c> GrandDecoder<'c> {
    pub fn new(code: &'c LinearCode, spec: QueryOrderSpec) -> Result<Self> {
        spec.validate(code.n())?;
        Ok(Self { code, spec, prefix: PrefixTable::build(code) })
    }

    pub fn spec(&self) -> &QueryOrderSpec {
        &self.spec
    }

    pub fn decode(&self, r: &BitVector) -> Result<DecodeResult> {
        if r.len() != self.code.n() {
            return Err(Error::DimensionMismatch(format!(
                "received vector has length {}, code length is {}",
                r.len(),
                self.code.n()
            )));
        }
        let s_c = self.code.syndrome(r)?;
        let gen = self.spec.queries(self.code.n())?;
        let (hit, queries, last_step) = match &self.prefix {
            PrefixTable::Narrow(prefix) => {
                let target = s_c.words()[0];
                let mut queries = 0u64;
                let mut last_step = 0u64;
                let mut hit = None;
                for q in gen {
                    queries += 1;
                    last_step = q.time_step;
                    if PrefixTable::narrow_pattern_syndrome(prefix, &q.pattern) == target {
                        hit = Some((q.pattern, q.time_step));
                        break;
                    }
                }
                (hit, queries, last_step)
            }
            PrefixTable::Wide(prefix) => {
                let nk = self.code.parity_bits();
                let mut scratch = BitVector::zeros(nk);
                let mut queries = 0u64;
                let mut last_step = 0u64;
                let mut hit = None;
                for q in gen {
                    queries += 1;
                    last_step = q.time_step;
                    scratch.copy_from(&s_c);
                    for &(start, len) in q.pattern.runs() {
                        scratch.xor_assign(&prefix[(start + len - 1) as usize]);
                        scratch.xor_assign(&prefix[(start - 1) as usize]);
                    }
                    if scratch.is_zero() {
                        hit = Some((q.pattern, q.time_step));
                        break;
                    }
                }
                (hit, queries, last_step)
            }
        };
        Ok(match hit {
            Some((pattern, step)) => self.finish(r, pattern, queries, step)?,
            None => DecodeResult {
                status: DecodeStatus::Abandoned,
                codeword: None,
                message: None,
                error_pattern: None,
                queries,
                time_steps: last_step,
            },
        })
    }

    fn finish(
        &self,
        r: &BitVector,
        pattern: BurstPattern,
        queries: u64,
        time_steps: u64,
    ) -> Result<DecodeResult> {
        let codeword = r.xor(&pattern.to_bitvector());
        debug_assert!(self.code.syndrome(&codeword)?.is_zero());
        let message = self.code.message_of(&codeword)?;
        Ok(DecodeResult {
            status: DecodeStatus::Decoded,
            codeword: Some(codeword),
            message: Some(message),
            error_pattern: Some(pattern),
            queries,
            time_steps,
        })
    }
}

/// GRAND-MO: applies the given query order until a test error pattern lands
/// the received word in the codebook, or the order is exhausted (ABANDONED).
pub fn grand_mo_decode(
    code: &LinearCode,
    r: &BitVector,
    spec: &QueryOrderSpec,
) -> Result<DecodeResult> {
    GrandDecoder::new(code, *spec)?.decode(r)
}

/// GRANDAB: GRAND with the Hamming-weight order, abandoning beyond weight `ab`.
pub fn grandab_decode(code: &LinearCode, r: &BitVector, ab: u32) -> Result<DecodeResult> {
    grand_mo_decode(code, r, &QueryOrderSpec::Hamming { ab })
}

/// Bounded-distance decoder backed by a syndrome → coset-leader table over
/// all patterns of weight ≤ t.
pub struct BddDecoder<'c> {
    code: &'c LinearCode,
    table: HashMap<u64, BurstPattern>,
}

impl<'c> BddDecoder<'c> {
    pub fn new(code: &'c LinearCode, t: u32) -> Result<Self> {
        let nk = code.parity_bits();
        if nk > 24 {
            return Err(Error::InvalidParameter(format!(
                "syndrome table needs n-k <= 24, code has {nk}"
            )));
        }
        let d = code.min_distance().ok_or_else(|| {
            Error::InvalidParameter(
                "bounded-distance decoding needs a code with a known minimum distance".into(),
            )
        })?;
        if t < 1 || 2 * t + 1 > d {
            return Err(Error::InvalidParameter(format!(
                "t = {t} exceeds the unique-decoding radius of a distance-{d} code"
            )));
        }
        let prefix = match PrefixTable::build(code) {
            PrefixTable::Narrow(p) => p,
            PrefixTable::Wide(_) => unreachable!("nk <= 24 is single-word"),
        };
        let mut table = HashMap::new();
        for q in hamming_order(code.n(), t)? {
            let s = PrefixTable::narrow_pattern_syndrome(&prefix, &q.pattern);
            if table.insert(s, q.pattern).is_some() {
                return Err(Error::Construction(format!(
                    "weight <= {t} cosets collide; code distance below 2t+1"
                )));
            }
        }
        Ok(Self { code, table })
    }

    pub fn decode(&self, r: &BitVector) -> Result<DecodeResult> {
        if r.len() != self.code.n() {
            return Err(Error::DimensionMismatch(format!(
                "received vector has length {}, code length is {}",
                r.len(),
                self.code.n()
            )));
        }
        let s_c = self.code.syndrome(r)?.words()[0];
        match self.table.get(&s_c) {
            Some(pattern) => {
                let codeword = r.xor(&pattern.to_bitvector());
                let message = self.code.message_of(&codeword)?;
                Ok(DecodeResult {
                    status: DecodeStatus::Decoded,
                    codeword: Some(codeword),
                    message: Some(message),
                    error_pattern: Some(pattern.clone()),
                    queries: 1,
                    time_steps: 1,
                })
            }
            None => Ok(DecodeResult {
                status: DecodeStatus::Abandoned,
                codeword: None,
                message: None,
                error_pattern: None,
                queries: 1,
                time_steps: 1,
            }),
        }
    }
}

/// One-shot bounded-distance decode; builds the table each call. Use
/// [`BddDecoder`] when decoding many words.
pub fn bdd_decode(code: &LinearCode, r: &BitVector, t: u32) -> Result<DecodeResult> {
    BddDecoder::new(code, t)?.decode(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::syndrome;
    use crate::pattern::query_count;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn encode_bits(code: &LinearCode, bits: u64) -> BitVector {
        let mut u = BitVector::zeros(code.k());
        for i in 0..code.k() {
            if bits >> i & 1 == 1 {
                u.set(i + 1, true);
            }
        }
        code.encode(&u).unwrap()
    }

    #[test]
    fn codeword_decodes_in_one_query() {
        let code = LinearCode::random_linear(16, 9, 4).unwrap();
        let c = encode_bits(&code, 0b101011011);
        for spec in [
            QueryOrderSpec::Markov { delta_l: 2, dmax: 3 },
            QueryOrderSpec::Constrained { l1: 4, l2: 2 },
            QueryOrderSpec::Hamming { ab: 2 },
        ] {
            let res = grand_mo_decode(&code, &c, &spec).unwrap();
            assert!(res.is_decoded());
            assert_eq!(res.queries, 1);
            assert_eq!(res.time_steps, 1);
            assert!(res.error_pattern.unwrap().is_zero());
            assert_eq!(res.codeword.unwrap(), c);
        }
    }

    /// Brute-force oracle: materialize the whole query sequence and scan it
    /// with freshly computed syndromes.
    fn scan_oracle(
        code: &LinearCode,
        r: &BitVector,
        spec: &QueryOrderSpec,
    ) -> (Option<(BurstPattern, u64)>, u64, u64) {
        let s_c = code.syndrome(r).unwrap();
        let mut queries = 0;
        let mut last = 0;
        for q in spec.queries(code.n()).unwrap() {
            queries += 1;
            last = q.time_step;
            let s = syndrome(code.parity_check(), &q.pattern.to_bitvector()).unwrap();
            if s == s_c {
                return (Some((q.pattern, q.time_step)), queries, last);
            }
        }
        (None, queries, last)
    }

    #[test]
    fn exhaustive_8_4_matches_scan_oracle_and_coset_minimum() {
        let code = LinearCode::random_linear(8, 4, 1).unwrap();
        let spec = QueryOrderSpec::Markov { delta_l: 2, dmax: 2 };
        let codewords: Vec<BitVector> = (0..16).map(|b| encode_bits(&code, b)).collect();
        for bits in 0..256u64 {
            let mut r = BitVector::zeros(8);
            for i in 0..8 {
                if bits >> i & 1 == 1 {
                    r.set(i + 1, true);
                }
            }
            let res = grand_mo_decode(&code, &r, &spec).unwrap();
            let (want_hit, want_q, _) = scan_oracle(&code, &r, &spec);
            assert_eq!(res.queries, want_q);
            match (res.status, want_hit) {
                (DecodeStatus::Decoded, Some((pat, step))) => {
                    assert_eq!(res.error_pattern.as_ref().unwrap().runs(), pat.runs());
                    assert_eq!(res.time_steps, step);
                    // The returned pattern is the minimum-cost coset member
                    // among the emitted ones.
                    let e = res.error_pattern.unwrap();
                    for cw in &codewords {
                        let alt = BurstPattern::from_bitvector(&r.xor(cw));
                        if alt.run_count() <= 2 && !alt.is_zero() {
                            assert!(
                                alt.cost(2) >= e.cost(2),
                                "r={r}: {alt:?} cheaper than {e:?}"
                            );
                        }
                    }
                }
                (DecodeStatus::Abandoned, None) => {}
                other => panic!("r={r}: decoder/oracle disagree: {other:?}"),
            }
        }
    }

    #[test]
    fn burst_error_recovered_when_cheapest() {
        let code = LinearCode::random_linear(32, 20, 9).unwrap();
        let c = encode_bits(&code, 0xbeef5);
        let planted = BurstPattern::from_runs(32, &[(5, 2)]).unwrap();
        let r = c.xor(&planted.to_bitvector());
        let res =
            grand_mo_decode(&code, &r, &QueryOrderSpec::Markov { delta_l: 3, dmax: 3 }).unwrap();
        assert!(res.is_decoded());
        // A length-2 burst costs 2; the only cheaper candidates are single
        // bits and they miss this coset for this seed.
        assert_eq!(res.error_pattern.unwrap().runs(), planted.runs());
        assert_eq!(res.message.unwrap(), code.message_of(&c).unwrap());
    }

    #[test]
    fn abandoned_queries_hit_worst_case_exactly() {
        let code = LinearCode::random_linear(16, 8, 2).unwrap();
        let specs = [
            QueryOrderSpec::Hamming { ab: 2 },
            QueryOrderSpec::Constrained { l1: 2, l2: 1 },
            QueryOrderSpec::Markov { delta_l: 4, dmax: 1 },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for spec in specs {
            let wc = 1 + query_count(&spec, 16).unwrap() as u64;
            let mut abandoned = 0;
            for _ in 0..300 {
                let r = BitVector::random(16, &mut rng);
                let res = grand_mo_decode(&code, &r, &spec).unwrap();
                if res.status == DecodeStatus::Abandoned {
                    abandoned += 1;
                    assert_eq!(res.queries, wc, "{spec}");
                }
            }
            assert!(abandoned > 0, "{spec}: no abandonment sampled");
        }
        // Pinned binomial case: n=16, ab=2 abandons after 1 + 16 + 120 queries.
        assert_eq!(
            1 + query_count(&QueryOrderSpec::Hamming { ab: 2 }, 16).unwrap(),
            137
        );
    }

    #[test]
    fn decoding_is_coset_invariant() {
        let code = LinearCode::random_linear(24, 14, 3).unwrap();
        let spec = QueryOrderSpec::Markov { delta_l: 2, dmax: 2 };
        let dec = GrandDecoder::new(&code, spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let r = BitVector::random(24, &mut rng);
            let c = encode_bits(&code, rng.gen_range(0..1 << 14));
            let a = dec.decode(&r).unwrap();
            let b = dec.decode(&r.xor(&c)).unwrap();
            assert_eq!(a.status, b.status);
            assert_eq!(a.queries, b.queries);
            if let (Some(ea), Some(eb)) = (&a.error_pattern, &b.error_pattern) {
                assert_eq!(ea.runs(), eb.runs());
            }
        }
    }

    #[test]
    fn wide_parity_path_agrees_with_scan_oracle() {
        // 80 parity bits forces the multi-word syndrome path.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let code = loop {
            let mut h = crate::gf2::BitMatrix::zeros(80, 100);
            for row in 1..=80 {
                for col in 1..=100 {
                    h.set(row, col, rng.gen_bool(0.5));
                }
            }
            if let Ok(code) = LinearCode::from_parity_check(h, None) {
                break code;
            }
        };
        let spec = QueryOrderSpec::Constrained { l1: 3, l2: 2 };
        for _ in 0..20 {
            let r = BitVector::random(100, &mut rng);
            let res = grand_mo_decode(&code, &r, &spec).unwrap();
            let (want, want_q, _) = scan_oracle(&code, &r, &spec);
            assert_eq!(res.queries, want_q);
            match (res.status, want) {
                (DecodeStatus::Decoded, Some((pat, _))) => {
                    assert_eq!(res.error_pattern.unwrap().runs(), pat.runs())
                }
                (DecodeStatus::Abandoned, None) => {}
                other => panic!("disagree: {other:?}"),
            }
        }
    }

    #[test]
    fn grandab_unique_single_error() {
        let code = LinearCode::bch(4, 1, 0).unwrap(); // d = 3
        let c = encode_bits(&code, 0x2da);
        let r = c.xor(&BitVector::indicator(15, 3));
        let res = grandab_decode(&code, &r, 3).unwrap();
        assert!(res.is_decoded());
        assert_eq!(res.error_pattern.unwrap().runs(), &[(3, 1)]);
    }

    #[test]
    fn grandab_never_returns_the_true_weight_4_pattern() {
        let code = LinearCode::random_linear(128, 104, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..20 {
            let c = encode_bits(&code, rng.gen());
            let mut e = BitVector::zeros(128);
            while e.weight() < 4 {
                e.set(rng.gen_range(1..=128), true);
            }
            let res = grandab_decode(&code, &c.xor(&e), 3).unwrap();
            match res.status {
                DecodeStatus::Abandoned => {}
                DecodeStatus::Decoded => {
                    assert!(res.error_pattern.unwrap().weight() <= 3);
                    assert_ne!(res.codeword.unwrap(), c, "weight cap cannot reach the true coset leader");
                }
            }
        }
    }

    #[test]
    fn bdd_corrects_up_to_designed_radius() {
        let code = LinearCode::bch(7, 3, 0).unwrap();
        let dec = BddDecoder::new(&code, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let c = encode_bits(&code, 0x123456789abcdu64);
        // Exhaustive weight-1, sampled weight-2/3.
        for i in 1..=127 {
            let res = dec.decode(&c.xor(&BitVector::indicator(127, i))).unwrap();
            assert_eq!(res.error_pattern.unwrap().runs(), &[(i as u32, 1)]);
        }
        for w in [2usize, 3] {
            for _ in 0..300 {
                let mut e = BitVector::zeros(127);
                while e.weight() < w {
                    e.set(rng.gen_range(1..=127), true);
                }
                let res = dec.decode(&c.xor(&e)).unwrap();
                assert!(res.is_decoded());
                assert_eq!(res.codeword.unwrap(), c);
            }
        }
        // r already a codeword.
        let res = dec.decode(&c).unwrap();
        assert!(res.error_pattern.unwrap().is_zero());
        // Weight 4 is beyond the radius: abandoned or a wrong codeword.
        for _ in 0..100 {
            let mut e = BitVector::zeros(127);
            while e.weight() < 4 {
                e.set(rng.gen_range(1..=127), true);
            }
            let res = dec.decode(&c.xor(&e)).unwrap();
            if let Some(cw) = res.codeword {
                assert_ne!(cw, c);
            }
        }
    }

    #[test]
    fn bdd_agrees_with_grand_under_hamming_order() {
        let code = LinearCode::bch(4, 1, 0).unwrap();
        let bdd = BddDecoder::new(&code, 1).unwrap();
        let grand = GrandDecoder::new(&code, QueryOrderSpec::Hamming { ab: 1 }).unwrap();
        for bits in 0..(1u64 << 15) {
            let mut r = BitVector::zeros(15);
            for i in 0..15 {
                if bits >> i & 1 == 1 {
                    r.set(i + 1, true);
                }
            }
            let a = bdd.decode(&r).unwrap();
            let b = grand.decode(&r).unwrap();
            assert_eq!(a.status, b.status, "r={r}");
            if a.is_decoded() {
                assert_eq!(a.codeword, b.codeword);
                assert_eq!(a.message, b.message);
            }
        }
    }

    #[test]
    fn bdd_rejects_unusable_configurations() {
        let rlc = LinearCode::random_linear(16, 8, 1).unwrap();
        assert!(BddDecoder::new(&rlc, 2).is_err()); // unknown distance
        let bch = LinearCode::bch(4, 1, 0).unwrap();
        assert!(BddDecoder::new(&bch, 2).is_err()); // beyond (d-1)/2
    }
}
