//! Functional model of the syndrome shift-register decoder datapath.
//!
//! The architecture stores one (n-k)-bit syndrome per register row, row l
//! holding the prefix-burst syndrome s_{1..l} = H·𝟙₁ᵀ ⊕ … ⊕ H·𝟙_lᵀ. XOR
//! banks combine register rows with the received syndrome so that every test
//! error pattern of a time step is checked in parallel:
//!
//! - cycle 0 checks the received word itself,
//! - cycle 1 checks every single burst of length ≤ l1,
//! - each later cycle anchors a first burst (length a ≤ l2 at start p, the
//!   register file conceptually shifted up by p + a) and checks all
//!   placements of a second burst of length ≤ l1 to its right, with the
//!   controller providing s_comp = s_c ⊕ s_{p..p+a-1}.
//!
//! The model is functional per time step: pattern sets, syndromes, and the
//! priority-encoder choice (lowest second-burst start, then shortest length)
//! are exact; gate-level structure is not represented. Cycle counts on an
//! exhausted search equal L·(2n-L-3)/2 + 2 with L = l2.

use std::sync::Arc;

use crate::code::LinearCode;
use crate::decoder::{DecodeResult, DecodeStatus, PrefixTable};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::pattern::{constrained_schedule, step_patterns, worst_case_steps, BurstPattern, StepKind};

/// Decoder instance parameters: code dimensions, burst limits, clock.
#[derive(Clone, Copy, Debug)]
pub struct HwConfig {
    pub n: usize,
    pub k: usize,
    pub l1: u32,
    pub l2: u32,
    pub clock_hz: f64,
}

impl HwConfig {
    pub fn new(n: usize, k: usize, l1: u32, l2: u32, clock_hz: f64) -> Result<Self> {
        if k < 1 || k >= n {
            return Err(Error::InvalidParameter(format!("need 1 <= k < n, got n={n} k={k}")));
        }
        if !(clock_hz > 0.0) {
            return Err(Error::InvalidParameter(format!("clock {clock_hz} Hz not positive")));
        }
        crate::pattern::QueryOrderSpec::Constrained { l1, l2 }.validate(n)?;
        Ok(Self { n, k, l1, l2, clock_hz })
    }

    pub fn for_code(code: &LinearCode, l1: u32, l2: u32, clock_hz: f64) -> Result<Self> {
        Self::new(code.n(), code.k(), l1, l2, clock_hz)
    }

    /// Cycles to exhaust the whole schedule.
    pub fn worst_case_steps(&self) -> u64 {
        worst_case_steps(self.n, self.l2 as usize)
    }
}

/// Phase of the datapath controller at one cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HwPhase {
    SyndromeCheck,
    SingleBursts,
    TwoBursts { first_len: u32, first_start: u32 },
}

impl HwPhase {
    fn kind(self) -> StepKind {
        match self {
            HwPhase::SyndromeCheck => StepKind::Zero,
            HwPhase::SingleBursts => StepKind::Singles,
            HwPhase::TwoBursts { first_len, first_start } => {
                StepKind::Pair { first_len, first_start }
            }
        }
    }
}

impl std::fmt::Display for HwPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HwPhase::SyndromeCheck => f.write_str("syndrome_check"),
            HwPhase::SingleBursts => f.write_str("single_bursts"),
            HwPhase::TwoBursts { .. } => f.write_str("two_bursts"),
        }
    }
}

/// Datapath state before executing one cycle.
///
/// The register file itself is immutable here (`prefix[l]` = s_{1..l});
/// `shift_offset` records how far the physical file has been shifted up, so
/// the row feeding a nominal gate position j holds `prefix[j + shift_offset]`.
#[derive(Clone)]
pub struct DatapathState {
    prefix: Arc<Vec<BitVector>>,
    cfg: HwConfig,
    phase: HwPhase,
    cycle: u64,
}

impl DatapathState {
    /// Initializes the registers from the code's parity-check matrix; the
    /// state sits at cycle 0, the syndrome check.
    pub fn new(code: &LinearCode, cfg: &HwConfig) -> Result<Self> {
        if code.n() != cfg.n || code.k() != cfg.k {
            return Err(Error::DimensionMismatch(format!(
                "code is ({}, {}) but the datapath is configured for ({}, {})",
                code.n(),
                code.k(),
                cfg.n,
                cfg.k
            )));
        }
        let prefix = match PrefixTable::build(code) {
            PrefixTable::Narrow(words) => {
                let nk = code.parity_bits();
                words
                    .iter()
                    .map(|&w| {
                        let mut v = BitVector::zeros(nk);
                        for bit in 0..nk {
                            if w >> bit & 1 == 1 {
                                v.set(bit + 1, true);
                            }
                        }
                        v
                    })
                    .collect()
            }
            PrefixTable::Wide(vecs) => vecs,
        };
        Ok(Self { prefix: Arc::new(prefix), cfg: *cfg, phase: HwPhase::SyndromeCheck, cycle: 0 })
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn phase(&self) -> HwPhase {
        self.phase
    }

    /// How far the register file has been shifted up in this phase.
    pub fn shift_offset(&self) -> u32 {
        match self.phase {
            HwPhase::TwoBursts { first_len, first_start } => first_start + first_len,
            _ => 0,
        }
    }

    /// Syndrome of the burst `start..start+len-1` read out of the registers.
    fn burst_syndrome(&self, start: u32, len: u32) -> BitVector {
        self.prefix[(start + len - 1) as usize].xor(&self.prefix[(start - 1) as usize])
    }

    /// s_comp for this phase: the received syndrome combined with the
    /// anchored first burst, exactly what the controller drives into the
    /// XOR bank.
    pub fn s_comp(&self, s_c: &BitVector) -> BitVector {
        match self.phase {
            HwPhase::SyndromeCheck | HwPhase::SingleBursts => s_c.clone(),
            HwPhase::TwoBursts { first_len, first_start } => {
                s_c.xor(&self.burst_syndrome(first_start, first_len))
            }
        }
    }

    fn successor_phase(&self) -> Option<HwPhase> {
        let n = self.cfg.n as u32;
        let l2 = self.cfg.l2;
        match self.phase {
            HwPhase::SyndromeCheck => Some(HwPhase::SingleBursts),
            HwPhase::SingleBursts => {
                (l2 >= 1).then_some(HwPhase::TwoBursts { first_len: 1, first_start: 1 })
            }
            HwPhase::TwoBursts { first_len: a, first_start: p } => {
                if p + 1 <= n - a - 1 {
                    Some(HwPhase::TwoBursts { first_len: a, first_start: p + 1 })
                } else if a + 1 <= l2 {
                    Some(HwPhase::TwoBursts { first_len: a + 1, first_start: 1 })
                } else {
                    None
                }
            }
        }
    }
}

/// Record of one executed cycle.
pub struct HwStep {
    pub cycle: u64,
    pub phase: HwPhase,
    /// Controller output for the cycle (received syndrome ⊕ anchored burst).
    pub s_comp: BitVector,
    /// Every test error pattern checked this cycle, in priority order.
    pub checked: Vec<BurstPattern>,
    /// First pattern (priority order) whose test syndrome NOR-reduces to hit.
    pub hit: Option<BurstPattern>,
    /// State for the following cycle; `None` once the schedule is exhausted.
    pub next: Option<DatapathState>,
}

/// Executes one cycle of the datapath against the received syndrome `s_c`.
pub fn hw_step(state: DatapathState, s_c: &BitVector) -> Result<HwStep> {
    if s_c.len() != state.cfg.n - state.cfg.k {
        return Err(Error::DimensionMismatch(format!(
            "syndrome has {} bits, the code has n-k = {}",
            s_c.len(),
            state.cfg.n - state.cfg.k
        )));
    }
    let s_comp = state.s_comp(s_c);
    let kind = state.phase.kind();
    let mut checked = Vec::new();
    let mut hit = None;
    let mut scratch = BitVector::zeros(s_c.len());
    for pattern in step_patterns(state.cfg.n as u32, state.cfg.l1, kind) {
        if hit.is_none() {
            scratch.copy_from(&s_comp);
            match kind {
                StepKind::Zero => {}
                StepKind::Singles => {
                    let (start, len) = pattern.runs()[0];
                    scratch.xor_assign(&state.prefix[(start + len - 1) as usize]);
                    scratch.xor_assign(&state.prefix[(start - 1) as usize]);
                }
                StepKind::Pair { .. } => {
                    let (start, len) = pattern.runs()[1];
                    scratch.xor_assign(&state.prefix[(start + len - 1) as usize]);
                    scratch.xor_assign(&state.prefix[(start - 1) as usize]);
                }
            }
            if scratch.is_zero() {
                hit = Some(pattern.clone());
            }
        }
        checked.push(pattern);
    }
    let next = state.successor_phase().map(|phase| DatapathState {
        prefix: Arc::clone(&state.prefix),
        cfg: state.cfg,
        phase,
        cycle: state.cycle + 1,
    });
    Ok(HwStep { cycle: state.cycle, phase: state.phase, s_comp, checked, hit, next })
}

/// Runs the datapath to completion on a received word. Identical decisions to
/// the software decoder under the constrained order; `time_steps` is the
/// cycle of the hit plus one, or the exhausted schedule length.
pub fn hw_decode(code: &LinearCode, r: &BitVector, cfg: &HwConfig) -> Result<DecodeResult> {
    if r.len() != cfg.n {
        return Err(Error::DimensionMismatch(format!(
            "received vector has length {}, the datapath expects {}",
            r.len(),
            cfg.n
        )));
    }
    let state = DatapathState::new(code, cfg)?;
    let s_c = code.syndrome(r)?;
    let n = cfg.n as u32;
    let mut queries = 0u64;
    let mut cycles = 0u64;
    let mut scratch = BitVector::zeros(s_c.len());
    for kind in constrained_schedule(n, cfg.l2) {
        let phase = match kind {
            StepKind::Zero => HwPhase::SyndromeCheck,
            StepKind::Singles => HwPhase::SingleBursts,
            StepKind::Pair { first_len, first_start } => HwPhase::TwoBursts { first_len, first_start },
        };
        let probe = DatapathState { prefix: Arc::clone(&state.prefix), cfg: *cfg, phase, cycle: cycles };
        let s_comp = probe.s_comp(&s_c);
        cycles += 1;
        for pattern in step_patterns(n, cfg.l1, kind) {
            queries += 1;
            scratch.copy_from(&s_comp);
            let second = match kind {
                StepKind::Zero => None,
                StepKind::Singles => Some(pattern.runs()[0]),
                StepKind::Pair { .. } => Some(pattern.runs()[1]),
            };
            if let Some((start, len)) = second {
                scratch.xor_assign(&state.prefix[(start + len - 1) as usize]);
                scratch.xor_assign(&state.prefix[(start - 1) as usize]);
            }
            if scratch.is_zero() {
                let codeword = r.xor(&pattern.to_bitvector());
                let message = code.message_of(&codeword)?;
                return Ok(DecodeResult {
                    status: DecodeStatus::Decoded,
                    codeword: Some(codeword),
                    message: Some(message),
                    error_pattern: Some(pattern),
                    queries,
                    time_steps: cycles,
                });
            }
        }
    }
    Ok(DecodeResult {
        status: DecodeStatus::Abandoned,
        codeword: None,
        message: None,
        error_pattern: None,
        queries,
        time_steps: cycles,
    })
}

/// Latency and information-throughput arithmetic for a decoder instance.
#[derive(Clone, Copy, Debug)]
pub struct TimingReport {
    pub wc_latency_s: f64,
    pub avg_latency_s: f64,
    pub wc_throughput_bps: f64,
    pub avg_throughput_bps: f64,
}

/// Latency is steps over clock; information throughput is k over latency.
/// `avg_steps` comes from measurement (mean decode steps of a campaign),
/// `wc_steps` from the schedule bound.
pub fn timing_report(cfg: &HwConfig, avg_steps: f64, wc_steps: u64) -> TimingReport {
    let wc_latency_s = wc_steps as f64 / cfg.clock_hz;
    let avg_latency_s = avg_steps / cfg.clock_hz;
    TimingReport {
        wc_latency_s,
        avg_latency_s,
        wc_throughput_bps: cfg.k as f64 / wc_latency_s,
        avg_throughput_bps: cfg.k as f64 / avg_latency_s,
    }
}

/// Test helper and exhaustion driver: a degenerate code whose syndrome is the
/// first `n-k` received bits, plus a received word whose syndrome has three
/// runs of ones. No pattern of at most two bursts can reproduce three runs
/// inside the syndrome window, so decoding is guaranteed to exhaust the
/// schedule. Needs `n - k >= 5`.
pub fn exhaustion_fixture(n: usize, k: usize) -> Result<(LinearCode, BitVector)> {
    let nk = n.checked_sub(k).filter(|&w| w >= 5).ok_or_else(|| {
        Error::InvalidParameter("exhaustion fixture needs n - k >= 5".into())
    })?;
    let mut h = crate::gf2::BitMatrix::zeros(nk, n);
    for i in 1..=nk {
        h.set(i, i, true);
    }
    let code = LinearCode::from_parity_check(h, None)?;
    let mut r = BitVector::zeros(n);
    for pos in [1usize, 3, 5] {
        r.set(pos, true);
    }
    Ok((code, r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::grand_mo_decode;
    use crate::gf2::syndrome;
    use crate::pattern::{query_count, QueryOrderSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn drive(code: &LinearCode, r: &BitVector, cfg: &HwConfig) -> Vec<HwStep> {
        let s_c = code.syndrome(r).unwrap();
        let mut steps = Vec::new();
        let mut state = Some(DatapathState::new(code, cfg).unwrap());
        while let Some(st) = state {
            let step = hw_step(st, &s_c).unwrap();
            let done = step.hit.is_some() || step.next.is_none();
            state = if done { None } else { step.next.clone() };
            steps.push(step);
        }
        steps
    }

    #[test]
    fn prefix_identity_matches_fresh_syndromes() {
        let code = LinearCode::random_linear(20, 12, 5).unwrap();
        let cfg = HwConfig::for_code(&code, 4, 3, 1e9).unwrap();
        let state = DatapathState::new(&code, &cfg).unwrap();
        for i in 1..=20u32 {
            for j in i..=20u32 {
                let pat = BurstPattern::from_runs(20, &[(i, j - i + 1)]).unwrap();
                let want = syndrome(code.parity_check(), &pat.to_bitvector()).unwrap();
                assert_eq!(state.burst_syndrome(i, j - i + 1), want, "burst {i}..{j}");
            }
        }
    }

    #[test]
    fn zero_syndrome_hits_at_cycle_zero() {
        let code = LinearCode::random_linear(16, 9, 2).unwrap();
        let cfg = HwConfig::for_code(&code, 4, 2, 5e8).unwrap();
        let c = code.encode(&crate::gf2::BitVector::zeros(9)).unwrap();
        let steps = drive(&code, &c, &cfg);
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].cycle, 0);
        assert_eq!(steps[0].phase, HwPhase::SyndromeCheck);
        assert!(steps[0].hit.as_ref().unwrap().is_zero());
        let res = hw_decode(&code, &c, &cfg).unwrap();
        assert_eq!(res.time_steps, 1);
        assert_eq!(res.queries, 1);
    }

    #[test]
    fn single_burst_hits_in_cycle_one() {
        let code = LinearCode::bch(7, 3, 0).unwrap();
        let cfg = HwConfig::for_code(&code, 4, 2, 5e8).unwrap();
        let mut u = BitVector::zeros(106);
        u.set(9, true);
        let c = code.encode(&u).unwrap();
        let planted = BurstPattern::from_runs(127, &[(5, 3)]).unwrap();
        let r = c.xor(&planted.to_bitvector());
        let steps = drive(&code, &r, &cfg);
        assert_eq!(steps.len(), 2);
        assert_eq!(steps[1].phase, HwPhase::SingleBursts);
        // Designed distance 7 leaves a weight-3 burst alone in its coset among
        // all weight <= 3 candidates, so the hit is exact.
        assert_eq!(steps[1].hit.as_ref().unwrap().runs(), planted.runs());
    }

    #[test]
    fn checked_set_sizes_and_shift_offsets() {
        let code = LinearCode::bch_even_weight(7, 2, 48).unwrap();
        let cfg = HwConfig::for_code(&code, 16, 2, 1e9).unwrap();
        let (_, r) = {
            // Any non-codeword works; pick a word with a nonzero syndrome.
            let mut r = BitVector::zeros(79);
            r.set(1, true);
            ((), r)
        };
        let s_c = code.syndrome(&r).unwrap();
        let state = DatapathState::new(&code, &cfg).unwrap();
        let step0 = hw_step(state, &s_c).unwrap();
        assert_eq!(step0.checked.len(), 1);
        let step1 = hw_step(step0.next.unwrap(), &s_c).unwrap();
        assert_eq!(step1.phase, HwPhase::SingleBursts);
        // All single bursts of length <= 16 in 79 bits, one time step.
        assert_eq!(step1.checked.len(), 1144);
        let step2 = hw_step(step1.next.unwrap(), &s_c).unwrap();
        match step2.phase {
            HwPhase::TwoBursts { first_len, first_start } => {
                assert_eq!((first_len, first_start), (1, 1));
            }
            other => panic!("unexpected phase {other:?}"),
        }
        assert_eq!(step2.next.as_ref().unwrap().shift_offset(), 3); // p=2, a=1
    }

    #[test]
    fn step_sets_partition_the_constrained_universe() {
        for (n, k, l1, l2, seed) in [(12usize, 6usize, 4u32, 3u32, 1u64), (20, 11, 5, 5, 2)] {
            let code = LinearCode::random_linear(n, k, seed).unwrap();
            let cfg = HwConfig::for_code(&code, l1, l2, 1e9).unwrap();
            let (fix_code, fix_r) = exhaustion_fixture(n, 1).unwrap();
            // Drive the fixture code (same n) to exhaustion to collect every
            // checked set; then compare against the generator universe.
            let fix_cfg = HwConfig::for_code(&fix_code, l1, l2, 1e9).unwrap();
            let steps = drive(&fix_code, &fix_r, &fix_cfg);
            assert_eq!(steps.len() as u64, cfg.worst_case_steps());
            let mut seen: HashSet<Vec<(u32, u32)>> = HashSet::new();
            for step in &steps {
                for p in &step.checked {
                    assert!(seen.insert(p.runs().to_vec()), "pattern repeated across steps: {p:?}");
                }
            }
            let universe: HashSet<Vec<(u32, u32)>> = QueryOrderSpec::Constrained { l1, l2 }
                .queries(n)
                .unwrap()
                .map(|q| q.pattern.runs().to_vec())
                .collect();
            assert_eq!(seen, universe, "n={n} l1={l1} l2={l2}");
        }
    }

    #[test]
    fn exhaustion_cycle_counts_match_closed_form() {
        // Full-fidelity runs (every syndrome actually checked) across small
        // and mid sizes, including the minimal handcrafted cases below n-k=5.
        for n in [7usize, 9, 12, 16, 20] {
            for l2 in 2..=(n - 2).min(8) {
                let (code, r) = exhaustion_fixture(n, 1).unwrap();
                let cfg = HwConfig::for_code(&code, l2 as u32, l2 as u32, 1e9).unwrap();
                let res = hw_decode(&code, &r, &cfg).unwrap();
                assert_eq!(res.status, DecodeStatus::Abandoned, "n={n} L={l2}");
                assert_eq!(res.time_steps, worst_case_steps(n, l2), "n={n} L={l2}");
                assert_eq!(
                    res.queries,
                    query_count(&QueryOrderSpec::Constrained { l1: l2 as u32, l2: l2 as u32 }, n)
                        .unwrap() as u64
                        + 1
                );
            }
        }
        // n = 4 and n = 5: kernels chosen so both preimages of the target
        // syndrome are single bursts longer than l1.
        for (n, r_bits, l) in [(4usize, 0b0111u32, 2u32), (5, 0b01111, 3)] {
            let mut h = crate::gf2::BitMatrix::zeros(n - 1, n);
            for i in 1..=n - 1 {
                h.set(i, i, true);
            }
            h.set(1, n, true); // kernel = span{ e1 + en }
            let code = LinearCode::from_parity_check(h, None).unwrap();
            let mut r = BitVector::zeros(n);
            for i in 0..n {
                if r_bits >> i & 1 == 1 {
                    r.set(i + 1, true);
                }
            }
            let cfg = HwConfig::for_code(&code, l, l, 1e9).unwrap();
            let res = hw_decode(&code, &r, &cfg).unwrap();
            assert_eq!(res.status, DecodeStatus::Abandoned, "n={n}");
            assert_eq!(res.time_steps, worst_case_steps(n, l as usize));
        }
    }

    #[test]
    fn hw_decode_matches_software_decoder() {
        let code = LinearCode::random_linear(32, 22, 11).unwrap();
        let cfg = HwConfig::for_code(&code, 6, 4, 1e9).unwrap();
        let spec = QueryOrderSpec::Constrained { l1: 6, l2: 4 };
        let ch = crate::channel::GilbertElliott::from_transition_probs(0.02, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let mut u = BitVector::zeros(22);
            for i in 1..=22 {
                u.set(i, rng.gen_bool(0.5));
            }
            let c = code.encode(&u).unwrap();
            let r = c.xor(&ch.sample_noise(32, &mut rng));
            let hw = hw_decode(&code, &r, &cfg).unwrap();
            let sw = grand_mo_decode(&code, &r, &spec).unwrap();
            assert_eq!(hw.status, sw.status);
            assert_eq!(hw.codeword, sw.codeword);
            assert_eq!(hw.message, sw.message);
            assert_eq!(
                hw.error_pattern.as_ref().map(|p| p.runs().to_vec()),
                sw.error_pattern.as_ref().map(|p| p.runs().to_vec())
            );
            assert_eq!(hw.queries, sw.queries);
            assert_eq!(hw.time_steps, sw.time_steps);
        }
    }

    #[test]
    fn timing_arithmetic_reproduces_reference_rows() {
        // 128-bit instance at 500 MHz.
        let cfg = HwConfig::new(128, 104, 32, 32, 500e6).unwrap();
        assert_eq!(cfg.worst_case_steps(), 3538);
        let rep = timing_report(&cfg, 1.0, cfg.worst_case_steps());
        assert!((rep.wc_latency_s * 1e9 - 7076.0).abs() < 1e-6);
        assert!((rep.wc_throughput_bps / 1e6 - 14.697).abs() < 0.005);
        assert!((rep.avg_latency_s * 1e9 - 2.0).abs() < 1e-12);
        assert!((rep.avg_throughput_bps / 1e9 - 52.0).abs() < 1e-9);
        // 79-bit instance at 1 GHz.
        let cfg79 = HwConfig::new(79, 64, 16, 0, 1e9).unwrap();
        assert_eq!(cfg79.worst_case_steps(), 2);
        let rep79 = timing_report(&cfg79, 1.0, 2);
        assert!((rep79.wc_latency_s * 1e9 - 2.0).abs() < 1e-12);
        assert!((rep79.wc_throughput_bps / 1e9 - 32.0).abs() < 1e-9);
        assert!((rep79.avg_throughput_bps / 1e9 - 64.0).abs() < 1e-9);
    }
}
