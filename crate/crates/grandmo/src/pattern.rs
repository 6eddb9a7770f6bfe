//! Test-error-pattern generation.
//!
//! A pattern is an ordered set of disjoint, non-touching runs of flipped bits
//! (`m` bursts of total Hamming weight `l`). Three query orders are provided:
//!
//! - **Markov order**: patterns grouped by cost `c = l + (m-1)·Δl` ascending,
//!   the likelihood ranking on the two-state burst channel. Within a cost
//!   class, subclasses run through increasing `m`; within a subclass,
//!   run-length compositions and then start positions advance
//!   lexicographically. The sequence ends after the `(m, l) = (dmax, dmax)`
//!   subclass.
//! - **Constrained order**: the hardware schedule. One time step checks the
//!   received word itself, one checks every single burst of length ≤ l1, and
//!   every remaining step anchors a first burst (length ≤ l2, swept left to
//!   right) and checks all placements of a second burst of length ≤ l1 to its
//!   right in parallel.
//! - **Hamming order**: weight classes 1..=ab, supports ascending — the
//!   GRANDAB baseline.
//!
//! Generators are lazy: state is O(m) per stream and nothing is materialized.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

type Runs = SmallVec<[(u32, u32); 4]>;

/// An error pattern stored as maximal runs of ones: `(start, length)` pairs
/// with 1-based starts, strictly left to right, never touching.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BurstPattern {
    n: u32,
    runs: Runs,
}

impl BurstPattern {
    /// The all-zero pattern (no runs).
    pub fn zero(n: usize) -> Self {
        Self { n: n as u32, runs: Runs::new() }
    }

    /// Builds a pattern from runs, validating the run invariants.
    pub fn from_runs(n: usize, runs: &[(u32, u32)]) -> Result<Self> {
        let mut prev_end = 0u32;
        for &(start, len) in runs {
            if len == 0 || start == 0 {
                return Err(Error::InvalidParameter("runs need start >= 1, length >= 1".into()));
            }
            if start <= prev_end + 1 && prev_end > 0 {
                return Err(Error::InvalidParameter(
                    "runs must be separated by at least one zero".into(),
                ));
            }
            if start < prev_end {
                return Err(Error::InvalidParameter("runs must be ordered left to right".into()));
            }
            let end = start + len - 1;
            if end > n as u32 {
                return Err(Error::InvalidParameter(format!(
                    "run {start}:{len} exceeds length {n}"
                )));
            }
            prev_end = end;
        }
        Ok(Self { n: n as u32, runs: runs.iter().copied().collect() })
    }

    fn from_runs_unchecked(n: u32, runs: Runs) -> Self {
        debug_assert!(Self::from_runs(n as usize, &runs).is_ok());
        Self { n, runs }
    }

    /// Pattern with ones exactly at the given ascending 1-based positions.
    pub fn from_support(n: usize, support: &[u32]) -> Result<Self> {
        let mut runs = Runs::new();
        for &pos in support {
            if pos == 0 || pos > n as u32 {
                return Err(Error::InvalidParameter(format!("position {pos} outside [1, {n}]")));
            }
            match runs.last_mut() {
                Some((start, len)) if *start + *len == pos => *len += 1,
                Some((start, len)) if pos < *start + *len => {
                    return Err(Error::InvalidParameter("support must be strictly ascending".into()))
                }
                _ => runs.push((pos, 1)),
            }
        }
        Ok(Self { n: n as u32, runs })
    }

    /// Extracts the maximal runs of ones of a bit vector.
    pub fn from_bitvector(v: &BitVector) -> Self {
        let mut runs = Runs::new();
        for pos in v.ones() {
            match runs.last_mut() {
                Some((start, len)) if *start + *len == pos as u32 => *len += 1,
                _ => runs.push((pos as u32, 1)),
            }
        }
        Self { n: v.len() as u32, runs }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn runs(&self) -> &[(u32, u32)] {
        &self.runs
    }

    /// Number of bursts, m.
    pub fn run_count(&self) -> usize {
        self.runs.len()
    }

    /// Hamming weight, l.
    pub fn weight(&self) -> usize {
        self.runs.iter().map(|&(_, len)| len as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.runs.is_empty()
    }

    /// Markov-order cost `l + (m-1)·Δl`; 0 for the zero pattern.
    pub fn cost(&self, delta_l: u32) -> u64 {
        if self.runs.is_empty() {
            0
        } else {
            self.weight() as u64 + (self.run_count() as u64 - 1) * delta_l as u64
        }
    }

    pub fn to_bitvector(&self) -> BitVector {
        let mut v = BitVector::zeros(self.n as usize);
        for &(start, len) in &self.runs {
            for pos in start..start + len {
                v.set(pos as usize, true);
            }
        }
        v
    }
}

impl std::fmt::Display for BurstPattern {
    /// Runs as `start:length` pairs, comma separated; `-` for the zero pattern.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.runs.is_empty() {
            return f.write_str("-");
        }
        for (i, (start, len)) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{start}:{len}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for BurstPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BurstPattern[{self}]")
    }
}

/// Which query order a decoder applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QueryOrderSpec {
    /// Cost-class order for a burst channel with trade-off constant `delta_l`,
    /// abandoning after the `(dmax, dmax)` subclass.
    Markov { delta_l: u32, dmax: u32 },
    /// Hardware order: at most two bursts, first (swept) burst ≤ l2, second
    /// burst ≤ l1. `l2 = 0` restricts to single bursts.
    Constrained { l1: u32, l2: u32 },
    /// Hamming-weight order up to weight `ab`.
    Hamming { ab: u32 },
}

impl QueryOrderSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match *self {
            QueryOrderSpec::Markov { delta_l, dmax } => {
                if delta_l < 1 || dmax < 1 {
                    return Err(Error::InvalidParameter(
                        "markov order needs delta_l >= 1 and dmax >= 1".into(),
                    ));
                }
            }
            QueryOrderSpec::Constrained { l1, l2 } => {
                if l1 < 1 || l1 as usize > n {
                    return Err(Error::InvalidParameter(format!(
                        "constrained order needs 1 <= l1 <= n, got l1={l1} n={n}"
                    )));
                }
                if l2 > l1 {
                    return Err(Error::InvalidParameter(format!(
                        "constrained order needs l2 <= l1, got l1={l1} l2={l2}"
                    )));
                }
                if l2 >= 1 && l2 as usize > n - 2 {
                    return Err(Error::InvalidParameter(format!(
                        "constrained order needs l2 <= n-2, got l2={l2} n={n}"
                    )));
                }
            }
            QueryOrderSpec::Hamming { ab } => {
                if ab < 1 || ab as usize > n {
                    return Err(Error::InvalidParameter(format!(
                        "hamming order needs 1 <= ab <= n, got ab={ab} n={n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// The full query stream for a length-`n` code, zero pattern first.
    pub fn queries(&self, n: usize) -> Result<QueryOrder> {
        self.validate(n)?;
        Ok(match *self {
            QueryOrderSpec::Markov { delta_l, dmax } => {
                QueryOrder::Markov(MarkovGen::new(n as u32, delta_l, dmax))
            }
            QueryOrderSpec::Constrained { l1, l2 } => {
                QueryOrder::Constrained(ConstrainedGen::new(n as u32, l1, l2))
            }
            QueryOrderSpec::Hamming { ab } => QueryOrder::Hamming(HammingGen::new(n as u32, ab)),
        })
    }
}

impl std::fmt::Display for QueryOrderSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            QueryOrderSpec::Markov { delta_l, dmax } => write!(f, "markov(dl={delta_l},dmax={dmax})"),
            QueryOrderSpec::Constrained { l1, l2 } => write!(f, "constrained(l1={l1},l2={l2})"),
            QueryOrderSpec::Hamming { ab } => write!(f, "hamming(ab={ab})"),
        }
    }
}

/// One emitted query: the pattern and the 1-based time step it belongs to.
/// Markov and Hamming orders are serial (one pattern per step); the
/// constrained order checks whole groups per step.
#[derive(Clone, Debug)]
pub struct Query {
    pub time_step: u64,
    pub pattern: BurstPattern,
}

/// Markov query order over `n` bits; see module docs for the ordering rule.
pub fn markov_order(n: usize, delta_l: u32, dmax: u32) -> Result<QueryOrder> {
    QueryOrderSpec::Markov { delta_l, dmax }.queries(n)
}

/// Hardware-constrained query order; see module docs.
pub fn constrained_order(n: usize, l1: u32, l2: u32) -> Result<QueryOrder> {
    QueryOrderSpec::Constrained { l1, l2 }.queries(n)
}

/// Hamming-weight query order up to weight `ab`.
pub fn hamming_order(n: usize, ab: u32) -> Result<QueryOrder> {
    QueryOrderSpec::Hamming { ab }.queries(n)
}

pub enum QueryOrder {
    Markov(MarkovGen),
    Constrained(ConstrainedGen),
    Hamming(HammingGen),
}

impl Iterator for QueryOrder {
    type Item = Query;

    fn next(&mut self) -> Option<Query> {
        match self {
            QueryOrder::Markov(g) => g.next(),
            QueryOrder::Constrained(g) => g.next(),
            QueryOrder::Hamming(g) => g.next(),
        }
    }
}

/// Iterator over all patterns with exactly `m` runs of total length `l` in
/// `n` bits: run-length compositions lexicographic, start tuples
/// lexicographic within a composition.
struct RunsIter {
    n: u32,
    l: u32,
    comp: Vec<u32>,
    starts: Vec<u32>,
    state: IterState,
}

#[derive(PartialEq)]
enum IterState {
    Fresh,
    Mid,
    Done,
}

impl RunsIter {
    fn new(n: u32, m: u32, l: u32) -> Self {
        let feasible = m >= 1 && l >= m && l + m - 1 <= n;
        let mut comp = vec![1u32; m as usize];
        let mut starts = vec![0u32; m as usize];
        if feasible {
            *comp.last_mut().unwrap() = l - (m - 1);
            Self::pack_starts(&comp, &mut starts, 0, 1);
        }
        Self {
            n,
            l,
            comp,
            starts,
            state: if feasible { IterState::Fresh } else { IterState::Done },
        }
    }

    /// Minimal (leftmost) packing of runs `from..` given `starts[from] = at`.
    fn pack_starts(comp: &[u32], starts: &mut [u32], from: usize, at: u32) {
        starts[from] = at;
        for j in from + 1..comp.len() {
            starts[j] = starts[j - 1] + comp[j - 1] + 1;
        }
    }

    fn current(&self) -> BurstPattern {
        let runs: Runs = self.starts.iter().zip(&self.comp).map(|(&s, &c)| (s, c)).collect();
        BurstPattern::from_runs_unchecked(self.n, runs)
    }

    fn advance_starts(&mut self) -> bool {
        let m = self.comp.len();
        for i in (0..m).rev() {
            // Incrementing start i keeps the minimal suffix packing in range?
            let suffix: u32 = self.comp[i..].iter().sum();
            let gaps = (m - 1 - i) as u32;
            if self.starts[i] + suffix + gaps <= self.n {
                let at = self.starts[i] + 1;
                Self::pack_starts(&self.comp, &mut self.starts, i, at);
                return true;
            }
        }
        false
    }

    fn advance_comp(&mut self) -> bool {
        let m = self.comp.len();
        if m < 2 {
            return false;
        }
        for i in (0..m - 1).rev() {
            let prefix: u32 = self.comp[..=i].iter().sum::<u32>() + 1;
            let rem = self.l.saturating_sub(prefix);
            let parts_after = (m - 1 - i) as u32;
            if rem >= parts_after {
                self.comp[i] += 1;
                for j in i + 1..m - 1 {
                    self.comp[j] = 1;
                }
                self.comp[m - 1] = rem - (parts_after - 1);
                Self::pack_starts(&self.comp, &mut self.starts, 0, 1);
                return true;
            }
        }
        false
    }
}

impl Iterator for RunsIter {
    type Item = BurstPattern;

    fn next(&mut self) -> Option<BurstPattern> {
        match self.state {
            IterState::Done => None,
            IterState::Fresh => {
                self.state = IterState::Mid;
                Some(self.current())
            }
            IterState::Mid => {
                if self.advance_starts() || self.advance_comp() {
                    Some(self.current())
                } else {
                    self.state = IterState::Done;
                    None
                }
            }
        }
    }
}

pub struct MarkovGen {
    n: u32,
    delta_l: u32,
    dmax: u32,
    c_end: u64,
    cursor: Option<(u64, u32, RunsIter)>, // (class cost, m, subclass stream)
    emitted_zero: bool,
    step: u64,
}

impl MarkovGen {
    fn new(n: u32, delta_l: u32, dmax: u32) -> Self {
        Self {
            n,
            delta_l,
            dmax,
            c_end: dmax as u64 + (dmax as u64 - 1) * delta_l as u64,
            cursor: None,
            emitted_zero: false,
            step: 0,
        }
    }

    /// Positions the cursor on the next non-empty subclass at or after
    /// (class c, run count m).
    fn seek(&mut self, mut c: u64, mut m: u32) {
        while c <= self.c_end {
            while m <= self.dmax {
                let burst_cost = (m as u64 - 1) * self.delta_l as u64;
                if burst_cost + m as u64 <= c {
                    let l = c - burst_cost;
                    if l <= self.n as u64 {
                        let runs = RunsIter::new(self.n, m, l as u32);
                        if runs.state != IterState::Done {
                            self.cursor = Some((c, m, runs));
                            return;
                        }
                    }
                }
                m += 1;
            }
            c += 1;
            m = 1;
        }
        self.cursor = None;
    }
}

impl Iterator for MarkovGen {
    type Item = Query;

    fn next(&mut self) -> Option<Query> {
        if !self.emitted_zero {
            self.emitted_zero = true;
            self.step = 1;
            self.seek(1, 1);
            return Some(Query { time_step: 1, pattern: BurstPattern::zero(self.n as usize) });
        }
        loop {
            let (c, m, runs) = self.cursor.as_mut()?;
            if let Some(pattern) = runs.next() {
                self.step += 1;
                return Some(Query { time_step: self.step, pattern });
            }
            let (c, m) = (*c, *m);
            self.seek(c, m + 1);
        }
    }
}

/// Phase of one constrained-order (and datapath) time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum StepKind {
    Zero,
    Singles,
    Pair { first_len: u32, first_start: u32 },
}

/// The time-step schedule of the constrained order: zero check, the
/// single-burst step, then one step per anchored first burst (length a =
/// 1..=l2 outer, start p = 1..=n-a-1 inner).
pub(crate) fn constrained_schedule(n: u32, l2: u32) -> impl Iterator<Item = StepKind> {
    let pairs = (1..=l2).flat_map(move |a| {
        (1..=n.saturating_sub(a + 1)).map(move |p| StepKind::Pair { first_len: a, first_start: p })
    });
    [StepKind::Zero, StepKind::Singles].into_iter().chain(pairs)
}

/// Streams the patterns checked within one constrained-order time step, in
/// priority order: ascending start of the varying burst, then ascending
/// length.
pub(crate) fn step_patterns(
    n: u32,
    l1: u32,
    kind: StepKind,
) -> Box<dyn Iterator<Item = BurstPattern>> {
    match kind {
        StepKind::Zero => Box::new(std::iter::once(BurstPattern::zero(n as usize))),
        StepKind::Singles => Box::new((1..=n).flat_map(move |p| {
            (1..=l1.min(n - p + 1)).map(move |len| {
                BurstPattern::from_runs_unchecked(n, Runs::from_slice(&[(p, len)]))
            })
        })),
        StepKind::Pair { first_len: a, first_start: p } => {
            Box::new((p + a + 1..=n).flat_map(move |q| {
                (1..=l1.min(n - q + 1)).map(move |b| {
                    BurstPattern::from_runs_unchecked(n, Runs::from_slice(&[(p, a), (q, b)]))
                })
            }))
        }
    }
}

pub struct ConstrainedGen {
    n: u32,
    l1: u32,
    schedule: Box<dyn Iterator<Item = StepKind>>,
    current: Option<Box<dyn Iterator<Item = BurstPattern>>>,
    step: u64,
}

impl ConstrainedGen {
    fn new(n: u32, l1: u32, l2: u32) -> Self {
        Self {
            n,
            l1,
            schedule: Box::new(constrained_schedule(n, l2)),
            current: None,
            step: 0,
        }
    }
}

impl Iterator for ConstrainedGen {
    type Item = Query;

    fn next(&mut self) -> Option<Query> {
        loop {
            if let Some(cur) = self.current.as_mut() {
                if let Some(pattern) = cur.next() {
                    return Some(Query { time_step: self.step, pattern });
                }
            }
            let kind = self.schedule.next()?;
            self.step += 1;
            self.current = Some(step_patterns(self.n, self.l1, kind));
        }
    }
}

pub struct HammingGen {
    n: u32,
    ab: u32,
    support: Vec<u32>,
    state: IterState,
    emitted_zero: bool,
    step: u64,
}

impl HammingGen {
    fn new(n: u32, ab: u32) -> Self {
        Self { n, ab, support: Vec::new(), state: IterState::Fresh, emitted_zero: false, step: 0 }
    }

    fn advance(&mut self) -> bool {
        let w = self.support.len();
        for i in (0..w).rev() {
            if self.support[i] < self.n - (w - 1 - i) as u32 {
                self.support[i] += 1;
                for j in i + 1..w {
                    self.support[j] = self.support[j - 1] + 1;
                }
                return true;
            }
        }
        // Weight class exhausted; open the next one.
        if (w as u32) < self.ab {
            self.support = (1..=w as u32 + 1).collect();
            return true;
        }
        false
    }
}

impl Iterator for HammingGen {
    type Item = Query;

    fn next(&mut self) -> Option<Query> {
        if !self.emitted_zero {
            self.emitted_zero = true;
            self.step = 1;
            return Some(Query { time_step: 1, pattern: BurstPattern::zero(self.n as usize) });
        }
        if self.state == IterState::Done {
            return None;
        }
        if !self.advance() {
            self.state = IterState::Done;
            return None;
        }
        self.step += 1;
        let pattern = BurstPattern::from_support(self.n as usize, &self.support)
            .expect("combination supports are always valid");
        Some(Query { time_step: self.step, pattern })
    }
}

/// Binomial coefficient in u128, saturating on overflow; 0 when k > n.
fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = match acc.checked_mul((n - k + i) as u128) {
            Some(v) => v / i as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// Number of length-`n` binary vectors with exactly `m` maximal runs of ones:
/// C(n+1, 2m). Zero when 2m > n+1.
pub fn count_runs_patterns(n: usize, m: usize) -> u128 {
    binomial(n as u64 + 1, 2 * m as u64)
}

/// Worst-case time steps of the constrained schedule, `L·(2n-L-3)/2 + 2`
/// with `L = l2`. Requires `0 <= L <= n-2`.
pub fn worst_case_steps(n: usize, l2: usize) -> u64 {
    assert!(n >= 2 && l2 <= n - 2, "worst_case_steps needs 0 <= L <= n-2");
    let (n, l2) = (n as u64, l2 as u64);
    l2 * (2 * n - l2 - 3) / 2 + 2
}

/// Worst-case number of nonzero patterns a generator emits (the zero-pattern
/// check is excluded).
pub fn query_count(spec: &QueryOrderSpec, n: usize) -> Result<u128> {
    spec.validate(n)?;
    let nb = n as u64;
    Ok(match *spec {
        QueryOrderSpec::Markov { delta_l, dmax } => {
            let c_end = dmax as u64 + (dmax as u64 - 1) * delta_l as u64;
            let mut total: u128 = 0;
            for c in 1..=c_end {
                for m in 1..=dmax as u64 {
                    let burst_cost = (m - 1) * delta_l as u64;
                    if burst_cost + m > c {
                        continue;
                    }
                    let l = c - burst_cost;
                    if l > nb {
                        continue;
                    }
                    total = total
                        .saturating_add(binomial(l - 1, m - 1).saturating_mul(binomial(nb - l + 1, m)));
                }
            }
            total
        }
        QueryOrderSpec::Constrained { l1, l2 } => {
            let l1 = l1 as u64;
            let singles: u128 = (1..=l1.min(nb)).map(|len| (nb + 1 - len) as u128).sum();
            // Sum over second-burst start u of min(l1, n-u+1).
            let tail_total = |u: u64| -> u128 {
                if u > nb {
                    return 0;
                }
                let full_until = nb.saturating_sub(l1) + 1; // last start with a full-length burst
                let full = if u <= full_until { (full_until - u + 1) as u128 * l1 as u128 } else { 0 };
                let t0 = u.max(full_until + 1);
                let short = nb + 1 - t0; // starts with boundary-truncated length range
                full + (short * (short + 1) / 2) as u128
            };
            let mut pairs: u128 = 0;
            for a in 1..=l2 as u64 {
                for p in 1..=nb.saturating_sub(a + 1) {
                    pairs += tail_total(p + a + 1);
                }
            }
            singles + pairs
        }
        QueryOrderSpec::Hamming { ab } => {
            (1..=ab as u64).map(|w| binomial(nb, w)).fold(0u128, |a, b| a.saturating_add(b))
        }
    })
}
