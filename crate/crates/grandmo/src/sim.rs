//! Monte Carlo frame-error-rate campaigns.
//!
//! A campaign point fixes a code, a decoder, and a channel (g, Eb/N0); frames
//! are drawn until the stopping rule fires. Every frame gets its own counter
//! RNG stream derived from (point seed, frame index), so results are
//! bit-identical no matter how many workers run or how frames are scheduled.
//! Frames are processed in fixed-size chunks: each chunk is decoded in
//! parallel, then folded in frame order so the stopping rule truncates at
//! exactly the same frame a sequential run would.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::GilbertElliott;
use crate::code::LinearCode;
use crate::decoder::{BddDecoder, DecodeResult, GrandDecoder};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::pattern::QueryOrderSpec;

const FRAME_CHUNK: u64 = 1024;

/// Stop a point after this many frame errors or this many frames, whichever
/// comes first. Default: 100 errors / 10^6 frames (FER resolution ~1e-4).
#[derive(Clone, Copy, Debug)]
pub struct StoppingRule {
    pub max_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self { max_frame_errors: 100, max_frames: 1_000_000 }
    }
}

impl StoppingRule {
    pub fn fixed_frames(frames: u64) -> Self {
        Self { max_frame_errors: u64::MAX, max_frames: frames }
    }
}

/// Markov-order trade-off constant: derived from the channel per point, or
/// pinned by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaL {
    Auto,
    Fixed(u32),
}

/// Decoder requested for a campaign. The Markov order may leave `dmax` unset,
/// defaulting to ⌊d/2⌋ when the code knows its distance and to 3 otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderSpec {
    GrandMoMarkov { delta_l: DeltaL, dmax: Option<u32> },
    GrandMoConstrained { l1: u32, l2: u32 },
    GrandAb { ab: u32 },
    Bdd { t: u32 },
}

impl DecoderSpec {
    pub fn decoder_name(&self) -> &'static str {
        match self {
            DecoderSpec::GrandMoMarkov { .. } | DecoderSpec::GrandMoConstrained { .. } => "grandmo",
            DecoderSpec::GrandAb { .. } => "grandab",
            DecoderSpec::Bdd { .. } => "bdd",
        }
    }

    /// Canonical order label for output rows.
    pub fn order_label(&self) -> String {
        match *self {
            DecoderSpec::GrandMoMarkov { delta_l, dmax } => {
                let dl = match delta_l {
                    DeltaL::Auto => "auto".to_string(),
                    DeltaL::Fixed(v) => v.to_string(),
                };
                let dmax = dmax.map(|d| d.to_string()).unwrap_or_else(|| "auto".into());
                format!("markov(dl={dl},dmax={dmax})")
            }
            DecoderSpec::GrandMoConstrained { l1, l2 } => format!("constrained(l1={l1},l2={l2})"),
            DecoderSpec::GrandAb { ab } => format!("hamming(ab={ab})"),
            DecoderSpec::Bdd { t } => format!("bdd(t={t})"),
        }
    }

    fn default_dmax(code: &LinearCode) -> u32 {
        code.min_distance().map(|d| (d / 2).max(1)).unwrap_or(3)
    }

    fn resolve<'c>(&self, code: &'c LinearCode, channel: &GilbertElliott) -> Result<Resolved<'c>> {
        Ok(match *self {
            DecoderSpec::GrandMoMarkov { delta_l, dmax } => {
                let dl = match delta_l {
                    DeltaL::Auto => channel.delta_l(code.n() as u32)?,
                    DeltaL::Fixed(v) => v,
                };
                let dmax = dmax.unwrap_or_else(|| Self::default_dmax(code));
                Resolved::Grand(GrandDecoder::new(
                    code,
                    QueryOrderSpec::Markov { delta_l: dl, dmax },
                )?)
            }
            DecoderSpec::GrandMoConstrained { l1, l2 } => {
                Resolved::Grand(GrandDecoder::new(code, QueryOrderSpec::Constrained { l1, l2 })?)
            }
            DecoderSpec::GrandAb { ab } => {
                Resolved::Grand(GrandDecoder::new(code, QueryOrderSpec::Hamming { ab })?)
            }
            DecoderSpec::Bdd { t } => Resolved::Bdd(BddDecoder::new(code, t)?),
        })
    }
}

enum Resolved<'c> {
    Grand(GrandDecoder<'c>),
    Bdd(BddDecoder<'c>),
}

impl Resolved<'_> {
    fn decode(&self, r: &BitVector) -> Result<DecodeResult> {
        match self {
            Resolved::Grand(d) => d.decode(r),
            Resolved::Bdd(d) => d.decode(r),
        }
    }
}

/// Aggregated result of one campaign point.
#[derive(Clone, Debug)]
pub struct FerRecord {
    pub n: usize,
    pub k: usize,
    pub decoder: String,
    pub order: String,
    pub g: f64,
    pub ebn0_db: f64,
    pub p: f64,
    pub b: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub avg_queries: f64,
    pub max_queries: u64,
    pub avg_steps: f64,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "n,k,decoder,order,g,ebn0_db,p,b,frames,frame_errors,fer,avg_queries,max_queries,avg_steps,seed";

impl FerRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.decoder,
            self.order,
            format_sig(self.g),
            format_sig(self.ebn0_db),
            format_sig(self.p),
            format_sig(self.b),
            self.frames,
            self.frame_errors,
            format_sig(self.fer),
            format_sig(self.avg_queries),
            self.max_queries,
            format_sig(self.avg_steps),
            self.seed
        )
    }
}

/// Renders a float with six significant digits, plain where reasonable and
/// scientific otherwise. Pure function of the value, so output files are
/// byte-stable.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        if trimmed == "-0" { "0".into() } else { trimmed.to_string() }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').unwrap();
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}

struct FrameStat {
    error: bool,
    queries: u64,
    steps: u64,
}

fn frame_rng(point_seed: u64, frame: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    let mut state = point_seed;
    for chunk in seed.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(frame);
    rng
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A frame is in error when the decoder abandons or returns a message other
/// than the transmitted one (miscorrection, classified with ground truth).
pub(crate) fn frame_is_error(result: &DecodeResult, sent: &BitVector) -> bool {
    match &result.message {
        Some(msg) => msg != sent,
        None => true,
    }
}

fn run_frame(
    code: &LinearCode,
    channel: &GilbertElliott,
    decoder: &Resolved<'_>,
    point_seed: u64,
    frame: u64,
) -> FrameStat {
    let mut rng = frame_rng(point_seed, frame);
    let u = BitVector::random(code.k(), &mut rng);
    let c = code.encode(&u).expect("message length fixed by construction");
    let noise = channel.sample_noise(code.n(), &mut rng);
    let r = c.xor(&noise);
    let res = decoder.decode(&r).expect("dimensions fixed by construction");
    FrameStat { error: frame_is_error(&res, &u), queries: res.queries, steps: res.time_steps }
}

/// Runs one campaign point to its stopping rule. Deterministic for a given
/// seed regardless of worker count.
pub fn run_point(
    code: &LinearCode,
    spec: &DecoderSpec,
    g: f64,
    ebn0_db: f64,
    stop: &StoppingRule,
    seed: u64,
) -> Result<FerRecord> {
    if stop.max_frames == 0 {
        return Err(Error::InvalidParameter("stopping rule allows zero frames".into()));
    }
    let channel = GilbertElliott::from_snr(g, ebn0_db, code.rate())?;
    let decoder = spec.resolve(code, &channel)?;

    let mut frames = 0u64;
    let mut errors = 0u64;
    let mut total_queries = 0u128;
    let mut total_steps = 0u128;
    let mut max_queries = 0u64;
    'outer: while frames < stop.max_frames {
        let chunk = FRAME_CHUNK.min(stop.max_frames - frames);
        let stats: Vec<FrameStat> = (frames..frames + chunk)
            .into_par_iter()
            .map(|f| run_frame(code, &channel, &decoder, seed, f))
            .collect();
        for stat in stats {
            frames += 1;
            total_queries += stat.queries as u128;
            total_steps += stat.steps as u128;
            max_queries = max_queries.max(stat.queries);
            if stat.error {
                errors += 1;
                if errors >= stop.max_frame_errors {
                    break 'outer;
                }
            }
        }
    }

    Ok(FerRecord {
        n: code.n(),
        k: code.k(),
        decoder: spec.decoder_name().to_string(),
        order: spec.order_label(),
        g,
        ebn0_db,
        p: channel.p(),
        b: channel.b(),
        frames,
        frame_errors: errors,
        fer: errors as f64 / frames as f64,
        avg_queries: total_queries as f64 / frames as f64,
        max_queries,
        avg_steps: total_steps as f64 / frames as f64,
        seed,
    })
}

/// One grid point's outcome; failures (for example channel parameters outside
/// the burst regime) are recorded and do not stop the remaining points.
pub struct PointOutcome {
    pub decoder: String,
    pub order: String,
    pub g: f64,
    pub ebn0_db: f64,
    pub result: Result<FerRecord>,
}

/// Runs the cross product decoders × g values × Eb/N0 grid. Points are
/// ordered by (decoder, ascending g, ascending Eb/N0) and each point draws a
/// seed from the campaign seed and its position, so any sub-grid re-run
/// reproduces the same rows.
pub fn run_grid(
    code: &LinearCode,
    decoders: &[DecoderSpec],
    g_values: &[f64],
    ebn0_grid: &[f64],
    stop: &StoppingRule,
    seed: u64,
    workers: Option<usize>,
) -> Vec<PointOutcome> {
    let mut gs = g_values.to_vec();
    gs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ebn0s = ebn0_grid.to_vec();
    ebn0s.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let run = || {
        let mut out = Vec::new();
        let mut index = 0u64;
        for spec in decoders {
            for &g in &gs {
                for &ebn0 in &ebn0s {
                    let point_seed = splitmix64(seed ^ splitmix64(index.wrapping_add(1)));
                    index += 1;
                    out.push(PointOutcome {
                        decoder: spec.decoder_name().to_string(),
                        order: spec.order_label(),
                        g,
                        ebn0_db: ebn0,
                        result: run_point(code, spec, g, ebn0, stop, point_seed),
                    });
                }
            }
        }
        out
    };

    match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .expect("worker pool")
            .install(run),
        None => run(),
    }
}

/// Formats grid outcomes as CSV. `provenance` lines are emitted first,
/// `#`-prefixed; failed points become `#`-prefixed diagnostics in place of
/// their row.
pub fn grid_to_csv(outcomes: &[PointOutcome], provenance: &[String]) -> String {
    let mut out = String::new();
    for line in provenance {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for point in outcomes {
        match &point.result {
            Ok(rec) => {
                out.push_str(&rec.csv_row());
                out.push('\n');
            }
            Err(e) => {
                out.push_str(&format!(
                    "# point decoder={} order={} g={} ebn0_db={} failed: {}\n",
                    point.decoder,
                    point.order,
                    format_sig(point.g),
                    format_sig(point.ebn0_db),
                    e
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::DecodeStatus;

    fn small_code() -> LinearCode {
        LinearCode::random_linear(32, 24, 7).unwrap()
    }

    #[test]
    fn classification_uses_ground_truth() {
        let sent = BitVector::from_bit_str("1010").unwrap();
        let decoded_right = DecodeResult {
            status: DecodeStatus::Decoded,
            codeword: None,
            message: Some(sent.clone()),
            error_pattern: None,
            queries: 1,
            time_steps: 1,
        };
        assert!(!frame_is_error(&decoded_right, &sent));
        let mut wrong = decoded_right.clone();
        wrong.message = Some(BitVector::from_bit_str("1011").unwrap());
        assert!(frame_is_error(&wrong, &sent), "miscorrection must count as a frame error");
        let abandoned = DecodeResult {
            status: DecodeStatus::Abandoned,
            codeword: None,
            message: None,
            error_pattern: None,
            queries: 5,
            time_steps: 5,
        };
        assert!(frame_is_error(&abandoned, &sent));
    }

    #[test]
    fn noiseless_regime_decodes_every_frame_in_one_query() {
        let code = small_code();
        let rec = run_point(
            &code,
            &DecoderSpec::GrandMoConstrained { l1: 8, l2: 4 },
            0.5,
            20.0, // p ~ 4e-14: no flips in 2000 frames
            &StoppingRule::fixed_frames(2000),
            1,
        )
        .unwrap();
        assert_eq!(rec.frames, 2000);
        assert_eq!(rec.frame_errors, 0);
        assert_eq!(rec.fer, 0.0);
        assert_eq!(rec.avg_queries, 1.0);
        assert_eq!(rec.avg_steps, 1.0);
        assert_eq!(rec.max_queries, 1);
    }

    #[test]
    fn identical_seed_is_byte_identical_across_worker_counts() {
        let code = small_code();
        let decoders = [
            DecoderSpec::GrandMoConstrained { l1: 8, l2: 4 },
            DecoderSpec::GrandAb { ab: 2 },
        ];
        // Error-capped stopping exercises mid-chunk truncation.
        let stop = StoppingRule { max_frame_errors: 40, max_frames: 30_000 };
        let csv: Vec<String> = [Some(1), Some(4), Some(3)]
            .into_iter()
            .map(|workers| {
                let out = run_grid(&code, &decoders, &[0.4], &[5.0, 7.0], &stop, 99, workers);
                grid_to_csv(&out, &[])
            })
            .collect();
        assert_eq!(csv[0], csv[1]);
        assert_eq!(csv[0], csv[2]);
        // And a different seed actually changes the output.
        let other = grid_to_csv(
            &run_grid(&code, &decoders, &[0.4], &[5.0, 7.0], &stop, 100, Some(2)),
            &[],
        );
        assert_ne!(csv[0], other);
    }

    #[test]
    fn stopping_rule_truncates_at_the_error_budget() {
        let code = small_code();
        let stop = StoppingRule { max_frame_errors: 10, max_frames: 100_000 };
        let rec = run_point(
            &code,
            &DecoderSpec::GrandAb { ab: 1 },
            0.4,
            3.0,
            &stop,
            5,
        )
        .unwrap();
        assert_eq!(rec.frame_errors, 10);
        assert!(rec.frames < 100_000);
        assert!((rec.fer - 10.0 / rec.frames as f64).abs() < 1e-15);
    }

    #[test]
    fn fer_is_monotone_in_snr_with_ci_slack() {
        let code = small_code();
        let stop = StoppingRule::fixed_frames(4000);
        let out = run_grid(
            &code,
            &[DecoderSpec::GrandMoConstrained { l1: 8, l2: 4 }],
            &[0.4],
            &[2.0, 4.0, 6.0, 8.0],
            &stop,
            11,
            None,
        );
        let recs: Vec<&FerRecord> = out.iter().map(|o| o.result.as_ref().unwrap()).collect();
        for pair in recs.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            // Allow 3 sigma of binomial noise on the higher-SNR point.
            let sigma = (hi.fer.max(1e-9) * (1.0 - hi.fer) / hi.frames as f64).sqrt();
            assert!(
                hi.fer <= lo.fer + 3.0 * sigma,
                "FER rose with SNR: {} -> {}",
                lo.fer,
                hi.fer
            );
        }
        // High-SNR point decodes almost always on the first query.
        assert!(recs.last().unwrap().avg_queries <= 1.1);
    }

    #[test]
    fn grid_reports_failed_points_and_keeps_going() {
        let code = small_code();
        // g = 0 is outside the channel's parameter range.
        let out = run_grid(
            &code,
            &[DecoderSpec::GrandAb { ab: 1 }],
            &[0.0, 0.5],
            &[8.0],
            &StoppingRule::fixed_frames(10),
            3,
            None,
        );
        assert_eq!(out.len(), 2);
        assert!(out[0].result.is_err());
        assert!(out[1].result.is_ok());
        let csv = grid_to_csv(&out, &["provenance".into()]);
        assert!(csv.starts_with("# provenance\n"));
        assert!(csv.contains("failed:"));
        assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 2); // header + 1 row
    }

    #[test]
    fn format_sig_six_significant_digits() {
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(0.2), "0.2");
        assert_eq!(format_sig(8.0), "8");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333");
        assert_eq!(format_sig(123456.789), "123457");
        assert_eq!(format_sig(0.0001234567), "0.000123457");
        assert_eq!(format_sig(1.234567e-7), "1.23457e-7");
        assert_eq!(format_sig(9.87654321e12), "9.87654e12");
        assert_eq!(format_sig(-0.25), "-0.25");
    }

    #[test]
    fn empty_grid_is_empty_output() {
        let code = small_code();
        let out = run_grid(
            &code,
            &[],
            &[0.4],
            &[8.0],
            &StoppingRule::default(),
            1,
            None,
        );
        assert!(out.is_empty());
        let csv = grid_to_csv(&out, &[]);
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }
}
