//! BPSK over AWGN, channel LLRs, Monte Carlo BER estimation and
//! genie-aided bound curves.
//!
//! Every frame draws its data and noise from its own ChaCha8 stream: the key
//! is derived from the run seed and the Eb/N0 value, the stream id is the
//! frame index. Results therefore do not depend on the worker count or on
//! which other SNR points are in the sweep.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bits::BinaryVector;
use crate::bmst::{BmstConfig, BmstEncoder};
use crate::coset::{HtCodeSpec, HtSisoDecoder, MapDecoder};
use crate::decoder::{SlidingWindowDecoder, WindowConfig};
use crate::error::{arg, Error, Result};
use crate::message::{SoftMessage, LLR_CLAMP};
use crate::weight::{db_to_linear, linear_to_db, BerCurve};

/// Maps bit 0 to `+1` and bit 1 to `-1`.
pub fn modulate(bits: &BinaryVector) -> Vec<f64> {
    bits.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

/// Channel LLR `2y / sigma^2` of one received sample.
#[inline]
pub fn channel_llr_value(y: f64, sigma2: f64) -> f64 {
    2.0 * y / sigma2
}

/// Posterior message on the transmitted bit given sample `y`.
pub fn channel_llr(y: f64, sigma2: f64) -> Result<SoftMessage> {
    if !(sigma2 > 0.0) {
        return arg(format!("noise variance must be positive, got {sigma2}"));
    }
    Ok(SoftMessage::from_llr(channel_llr_value(y, sigma2)))
}

/// Operating point of the AWGN channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    pub ebn0_db: f64,
    /// Overall code rate used to convert Eb/N0 into the noise level.
    pub rate: f64,
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return arg(format!("rate {rate} outside (0, 1]"));
        }
        if ebn0_db.is_nan() {
            return arg("Eb/N0 is NaN");
        }
        Ok(Self { ebn0_db, rate, seed })
    }

    /// Per-dimension noise variance `1 / (2 R Eb/N0)` for unit-energy
    /// symbols; zero at infinite Eb/N0.
    pub fn sigma2(&self) -> f64 {
        noise_variance(self.ebn0_db, self.rate)
    }
}

pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    if ebn0_db == f64::INFINITY {
        return 0.0;
    }
    1.0 / (2.0 * rate * db_to_linear(ebn0_db))
}

/// Adds seeded Gaussian noise to `symbols` and returns clamped LLRs. A zero
/// variance yields saturated LLRs.
pub fn awgn_llrs<R: Rng + ?Sized>(symbols: &[f64], sigma2: f64, rng: &mut R, out: &mut Vec<f64>) {
    out.clear();
    if sigma2 == 0.0 {
        out.extend(symbols.iter().map(|&s| s.signum() * LLR_CLAMP));
        return;
    }
    let sigma = sigma2.sqrt();
    out.extend(symbols.iter().map(|&s| {
        let z: f64 = rng.sample(StandardNormal);
        channel_llr_value(s + sigma * z, sigma2).clamp(-LLR_CLAMP, LLR_CLAMP)
    }));
}

/// Decoder applied to a single HT-coset code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HtDecoderKind {
    /// Iterative butterfly SISO with the given number of iterations.
    Siso { iterations: usize },
    /// Exhaustive bitwise MAP.
    Map,
}

/// A system under test.
#[derive(Debug, Clone, PartialEq)]
pub enum System {
    HtCoset { spec: HtCodeSpec, decoder: HtDecoderKind },
    Bmst { config: BmstConfig, window: WindowConfig },
}

impl System {
    /// Overall code rate (termination included).
    pub fn rate(&self) -> f64 {
        match self {
            System::HtCoset { spec, .. } => spec.rate(),
            System::Bmst { config, .. } => config.rate(),
        }
    }

    pub fn info_bits_per_frame(&self) -> usize {
        match self {
            System::HtCoset { spec, .. } => spec.k(),
            System::Bmst { config, .. } => config.basic.k() * config.blocks,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            System::HtCoset { spec, decoder } => match decoder {
                HtDecoderKind::Siso { iterations } if *iterations < 1 => {
                    arg("SISO needs at least one iteration")
                }
                HtDecoderKind::Map => MapDecoder::new(spec).map(|_| ()),
                _ => Ok(()),
            },
            System::Bmst { config, window } => {
                config.validate()?;
                window.validate()
            }
        }
    }
}

/// Per-thread decoding state.
enum Worker {
    Siso {
        spec: HtCodeSpec,
        dec: HtSisoDecoder,
        iterations: usize,
    },
    Map {
        spec: HtCodeSpec,
        dec: MapDecoder,
    },
    Bmst {
        encoder_template: BmstEncoder,
        dec: SlidingWindowDecoder,
    },
}

impl Worker {
    fn new(system: &System) -> Result<Self> {
        Ok(match system {
            System::HtCoset { spec, decoder } => match decoder {
                HtDecoderKind::Siso { iterations } => Worker::Siso {
                    spec: spec.clone(),
                    dec: HtSisoDecoder::new(spec.clone()),
                    iterations: *iterations,
                },
                HtDecoderKind::Map => Worker::Map {
                    spec: spec.clone(),
                    dec: MapDecoder::new(spec)?,
                },
            },
            System::Bmst { config, window } => Worker::Bmst {
                encoder_template: BmstEncoder::new(config.clone())?,
                dec: SlidingWindowDecoder::new(config.clone(), *window)?,
            },
        })
    }

    /// Runs one frame and returns its information-bit error count.
    fn run_frame(&mut self, rng: &mut ChaCha8Rng, sigma2: f64, all_zero: bool) -> Result<u64> {
        let mut llr = Vec::new();
        match self {
            Worker::Siso { spec, dec, iterations } => {
                let u = random_bits(rng, spec.k(), all_zero);
                let v = spec.encode(&u)?;
                awgn_llrs(&modulate(&v), sigma2, rng, &mut llr);
                let prior_v: Vec<SoftMessage> = llr.iter().map(|&l| SoftMessage::from_llr(l)).collect();
                let prior_u = vec![SoftMessage::UNIFORM; spec.k()];
                let mut ext_u = vec![SoftMessage::UNIFORM; spec.k()];
                let mut ext_v = vec![SoftMessage::UNIFORM; spec.n()];
                dec.decode_into(&prior_v, &prior_u, *iterations, &mut ext_u, &mut ext_v);
                Ok(count_errors(&u, ext_u.iter().map(SoftMessage::decide)))
            }
            Worker::Map { spec, dec } => {
                let u = random_bits(rng, spec.k(), all_zero);
                let v = spec.encode(&u)?;
                awgn_llrs(&modulate(&v), sigma2, rng, &mut llr);
                let prior_v: Vec<SoftMessage> = llr.iter().map(|&l| SoftMessage::from_llr(l)).collect();
                let post = dec.posteriors(&prior_v);
                Ok(count_errors(&u, post.iter().map(SoftMessage::decide)))
            }
            Worker::Bmst { encoder_template, dec } => {
                let cfg = encoder_template.config();
                let k = cfg.basic.k();
                let data: Vec<BinaryVector> =
                    (0..cfg.blocks).map(|_| random_bits(rng, k, all_zero)).collect();
                let mut enc = encoder_template.clone();
                let mut coded = data.iter().map(|u| enc.push(u)).collect::<Result<Vec<_>>>()?;
                coded.extend(enc.finish()?);
                let channel: Vec<Vec<f64>> = coded
                    .iter()
                    .map(|c| {
                        let mut out = Vec::new();
                        awgn_llrs(&modulate(c), sigma2, rng, &mut out);
                        out
                    })
                    .collect();
                let decided = dec.decode_llr(&channel)?;
                Ok(data
                    .iter()
                    .zip(&decided)
                    .map(|(a, b)| a.distance(b) as u64)
                    .sum())
            }
        }
    }
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize, all_zero: bool) -> BinaryVector {
    if all_zero {
        return BinaryVector::zeros(len);
    }
    BinaryVector::from_bools((0..len).map(|_| rng.random::<bool>()))
}

fn count_errors(u: &BinaryVector, decided: impl Iterator<Item = bool>) -> u64 {
    u.iter().zip(decided).filter(|(a, b)| a != b).count() as u64
}

/// Why a Monte Carlo point stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxFrames,
    MaxErrors,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub info_bits_per_frame: usize,
    pub ber: f64,
    pub stopped_by: StopReason,
}

impl SimResult {
    pub fn info_bits(&self) -> u64 {
        self.frames * self.info_bits_per_frame as u64
    }

    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        let bits = self.info_bits() as f64;
        if bits == 0.0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / bits).sqrt()
    }
}

/// Monte Carlo limits and reproducibility controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub max_frames: u64,
    pub max_errors: u64,
    pub seed: u64,
    /// Transmit all-zero data instead of random data.
    pub all_zero: bool,
    /// Worker threads; results are identical for every value.
    pub jobs: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_frames: 10_000,
            max_errors: 100,
            seed: 0,
            all_zero: false,
            jobs: 1,
        }
    }
}

/// Frames decoded between stopping-rule checks.
const BATCH: u64 = 64;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn frame_rng(point_key: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(point_key);
    rng.set_stream(frame);
    rng
}

/// Estimates the information BER of `system` at each Eb/N0 in `ebn0_list`.
///
/// Each point runs frames until `max_errors` bit errors or `max_frames`
/// frames, whichever comes first, counting frames in order so that the
/// stopping frame does not depend on `jobs`.
pub fn simulate_ber(system: &System, ebn0_list: &[f64], opts: &SimOptions) -> Result<Vec<SimResult>> {
    system.validate()?;
    if opts.max_frames == 0 || opts.max_errors == 0 {
        return arg("frame and error limits must be positive");
    }
    let jobs = opts.jobs.max(1);
    let pool = if jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Capability(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let mut serial_worker = Worker::new(system)?;
    let rate = system.rate();
    let bits_per_frame = system.info_bits_per_frame();

    let mut results = Vec::with_capacity(ebn0_list.len());
    for &ebn0_db in ebn0_list {
        if ebn0_db.is_nan() {
            return arg("Eb/N0 is NaN");
        }
        let sigma2 = noise_variance(ebn0_db, rate);
        let key = splitmix64(opts.seed ^ splitmix64(ebn0_db.to_bits()));
        let (mut frames, mut errors) = (0u64, 0u64);
        let mut stopped_by = StopReason::MaxFrames;
        'point: while frames < opts.max_frames {
            let start = frames;
            let end = (start + BATCH).min(opts.max_frames);
            let batch: Vec<u64> = match &pool {
                Some(pool) => pool.install(|| {
                    (start..end)
                        .into_par_iter()
                        .map_init(
                            || Worker::new(system).expect("validated system"),
                            |w, f| w.run_frame(&mut frame_rng(key, f), sigma2, opts.all_zero),
                        )
                        .collect::<Result<Vec<_>>>()
                })?,
                None => (start..end)
                    .map(|f| serial_worker.run_frame(&mut frame_rng(key, f), sigma2, opts.all_zero))
                    .collect::<Result<Vec<_>>>()?,
            };
            for e in batch {
                frames += 1;
                errors += e;
                if errors >= opts.max_errors {
                    stopped_by = StopReason::MaxErrors;
                    break 'point;
                }
            }
        }
        results.push(SimResult {
            ebn0_db,
            frames,
            bit_errors: errors,
            info_bits_per_frame: bits_per_frame,
            ber: errors as f64 / (frames * bits_per_frame as u64) as f64,
            stopped_by,
        });
    }
    Ok(results)
}

/// Curve from simulation results, in Eb/N0 order.
pub fn results_curve(results: &[SimResult]) -> Result<BerCurve> {
    let mut pts: Vec<(f64, f64)> = results.iter().map(|r| (r.ebn0_db, r.ber)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    BerCurve::new(pts)
}

/// Eb/N0 shift `10 log10(1 + m_K)` of the genie-aided bound.
pub fn genie_shift_db(active_memory: usize) -> f64 {
    linear_to_db(1.0 + active_memory as f64)
}

/// The basic-code curve moved left by `10 log10(1 + m_K)` dB.
pub fn genie_bound(basic_curve: &BerCurve, active_memory: usize) -> Result<BerCurve> {
    if basic_curve.is_empty() {
        return arg("basic-code curve is empty");
    }
    let shift = genie_shift_db(active_memory);
    BerCurve::new(
        basic_curve
            .points()
            .iter()
            .map(|&(x, b)| (x - shift, b))
            .collect(),
    )
}

/// Header line of curve CSV files.
pub const CURVE_CSV_HEADER: &str = "ebn0_db,ber,frames,bit_errors";

/// CSV rows for `results`, preceded by `comments` as `# ` lines.
pub fn curve_csv(results: &[SimResult], comments: &[String]) -> String {
    let mut s = String::new();
    for c in comments {
        s.push_str("# ");
        s.push_str(c);
        s.push('\n');
    }
    s.push_str(CURVE_CSV_HEADER);
    s.push('\n');
    for r in results {
        s.push_str(&format!("{:.4},{:.6e},{},{}\n", r.ebn0_db, r.ber, r.frames, r.bit_errors));
    }
    s
}

/// One data row of a curve CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub ebn0_db: f64,
    pub ber: f64,
    pub frames: u64,
    pub bit_errors: u64,
}

/// Parses curve CSV text, skipping `#` comments and blank lines.
pub fn parse_curve_csv(text: &str) -> Result<Vec<CurveRow>> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some(h) if h == CURVE_CSV_HEADER => {}
        other => return arg(format!("expected CSV header {CURVE_CSV_HEADER:?}, found {other:?}")),
    }
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return arg(format!("malformed curve row {l:?}"));
            }
            let bad = || Error::Argument(format!("malformed curve row {l:?}"));
            Ok(CurveRow {
                ebn0_db: f[0].parse().map_err(|_| bad())?,
                ber: f[1].parse().map_err(|_| bad())?,
                frames: f[2].parse().map_err(|_| bad())?,
                bit_errors: f[3].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
