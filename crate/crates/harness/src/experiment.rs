//! Trial pipeline, parameter sweeps and paired MRS-vs-random comparison.
//!
//! One trial runs: payload -> codec -> segments of length `s` -> per segment
//! `v` channel reads -> select `w` reads -> consensus -> reassemble -> lossy
//! payload decode -> metrics.
//!
//! Seeds: the reads of segment `seg` in trial `t` at grid cell `(gi, wi)` use
//! `derive_seed_path(master, [gi, wi, CHANNEL_STREAM, t, seg])`, then
//! `derive_seed(.., read_index)` per read, with no dependence on the
//! selection mode, so both modes screen identical read sets. Random
//! selection draws from `derive_seed_path(master, [gi, wi, mode_id, t, seg])`.

use std::time::Instant;

use dnasim_core::bio;
use dnasim_core::channel::{derive_seed_path, generate_reads, ChannelSpec, ReadSet};
use dnasim_core::codec::{consensus_decode, symbol_errors};
use dnasim_core::dna::{segment, Base, DnaSequence};
use dnasim_core::metrics::{self, edit_distance, RasterImage};
use dnasim_core::mrs::{self, ScreeningResult};
use dnasim_core::netpbm;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, PayloadSource, SelectionMode, RANDOM_IMAGE_WIDTH};
use crate::error::{HarnessError, Result};

/// Seed-path slot reserved for channel streams (mode ids are 0 and 1).
pub const CHANNEL_STREAM: u64 = 0xC4A7;

/// Payload, its encoded strand and the strand's constraint statistics.
#[derive(Debug, Clone)]
pub struct PreparedPayload {
    pub bytes: Vec<u8>,
    pub image: RasterImage,
    pub strand: DnaSequence,
    pub segments: Vec<DnaSequence>,
    pub gc_fraction: f64,
    pub max_run: usize,
    pub penalty: f64,
}

impl PreparedPayload {
    pub fn load(config: &ExperimentConfig) -> Result<Self> {
        let image = match &config.payload {
            PayloadSource::Image(path) => netpbm::read_file(path)
                .map_err(|source| HarnessError::Io {
                    path: path.clone(),
                    source,
                })??,
            &PayloadSource::Random { len, seed } => {
                let mut bytes = vec![0u8; len];
                ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut bytes);
                RasterImage::new(RANDOM_IMAGE_WIDTH, len / RANDOM_IMAGE_WIDTH, 1, bytes)?
            }
        };
        Self::from_image(config, image)
    }

    pub fn from_image(config: &ExperimentConfig, image: RasterImage) -> Result<Self> {
        let bytes = image.pixels().to_vec();
        let strand = config.codec.variant.encode(&bytes);
        let report = bio::analyze::<f64>(&strand, &config.constraint)?;
        Ok(PreparedPayload {
            segments: segment(&strand, config.s()),
            gc_fraction: report.gc_fraction,
            max_run: report.max_run(),
            penalty: report.penalty,
            bytes,
            image,
            strand,
        })
    }

    /// Stored bases per source pixel value.
    pub fn nt_per_pixel(&self) -> f64 {
        self.strand.len() as f64 / self.bytes.len() as f64
    }
}

/// Everything produced while screening one segment.
#[derive(Debug, Clone)]
pub struct SegmentOutcome {
    pub reads: ReadSet,
    pub selection: ScreeningResult,
    pub consensus: DnaSequence,
}

/// Generate `v` reads of `seg` under `channel` (whose `master_seed` keys the
/// reads), select `w` of them and take the positional consensus.
///
/// A trailing segment no longer than `kmer` is rescored with `K = len - 1`.
pub fn screen_segment(
    seg: &[Base],
    channel: &ChannelSpec,
    v: usize,
    w: usize,
    kmer: usize,
    mode: SelectionMode,
    select_seed: u64,
) -> dnasim_core::Result<SegmentOutcome> {
    let reads = generate_reads(seg, channel, v);
    let selection = match mode {
        SelectionMode::Mrs => {
            let kmer = if seg.len() > kmer { kmer } else { seg.len().saturating_sub(1).max(1) };
            mrs::select(&reads, w, kmer)?
        }
        SelectionMode::Random => mrs::select_random(&reads, w, select_seed)?,
    };
    let rows = mrs::to_decoder_input(&selection, &reads, seg.len());
    let consensus = consensus_decode(&rows);
    Ok(SegmentOutcome {
        reads,
        selection,
        consensus,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialKey {
    pub gamma_index: usize,
    pub w_index: usize,
    pub mode: SelectionMode,
    pub trial: usize,
}

impl TrialKey {
    pub fn channel_seed(&self, master: u64, segment: usize) -> u64 {
        derive_seed_path(
            master,
            &[
                self.gamma_index as u64,
                self.w_index as u64,
                CHANNEL_STREAM,
                self.trial as u64,
                segment as u64,
            ],
        )
    }

    pub fn select_seed(&self, master: u64, segment: usize) -> u64 {
        derive_seed_path(
            master,
            &[
                self.gamma_index as u64,
                self.w_index as u64,
                self.mode.id(),
                self.trial as u64,
                segment as u64,
            ],
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub gamma: f64,
    pub w: usize,
    pub mode: SelectionMode,
    pub trial: usize,
    pub ber: f64,
    pub mean_selected_edit_distance: f64,
    /// 0 when every read is selected.
    pub mean_unselected_edit_distance: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub gc_fraction: f64,
    pub max_run: usize,
    pub penalty: f64,
    pub wall_time_ms: f64,
}

fn seg_err(index: usize) -> impl FnOnce(dnasim_core::Error) -> HarnessError {
    move |source| HarnessError::Segment { index, source }
}

pub fn run_trial(
    config: &ExperimentConfig,
    payload: &PreparedPayload,
    key: TrialKey,
) -> Result<TrialRecord> {
    run_trial_with_payload(config, payload, key).map(|(record, _)| record)
}

/// [`run_trial`] that also returns the decoded payload bytes.
pub fn run_trial_with_payload(
    config: &ExperimentConfig,
    payload: &PreparedPayload,
    key: TrialKey,
) -> Result<(TrialRecord, Vec<u8>)> {
    let start = Instant::now();
    let gamma = config.gammas[key.gamma_index];
    let w = config.ws[key.w_index];
    let base_channel = config.channel(gamma)?;

    let mut errors = 0usize;
    let mut sel_ed = (0usize, 0usize);
    let mut unsel_ed = (0usize, 0usize);
    let mut rebuilt = Vec::with_capacity(payload.strand.len());
    for (i, seg) in payload.segments.iter().enumerate() {
        let channel = ChannelSpec {
            master_seed: key.channel_seed(config.master_seed, i),
            ..base_channel
        };
        let out = screen_segment(
            seg,
            &channel,
            config.v,
            w,
            config.kmer,
            key.mode,
            key.select_seed(config.master_seed, i),
        )
        .map_err(seg_err(i))?;

        errors += symbol_errors(&seg.digits(), &out.consensus.digits()).min(seg.len());
        for (r, read) in out.reads.reads.iter().enumerate() {
            let slot = if out.selection.is_selected(r) {
                &mut sel_ed
            } else {
                &mut unsel_ed
            };
            slot.0 += edit_distance(seg, read);
            slot.1 += 1;
        }
        // keep segment boundaries aligned for the payload decoder
        let end = rebuilt.len() + seg.len();
        rebuilt.extend(out.consensus.iter().copied().take(seg.len()));
        rebuilt.resize(end, Base::A);
    }

    let decoded = config
        .codec
        .variant
        .decode_lossy(&rebuilt, payload.bytes.len());
    let (width, height, channels) = payload.image.dims();
    let restored = RasterImage::new(width, height, channels, decoded)?;
    let mean = |(sum, n): (usize, usize)| if n == 0 { 0.0 } else { sum as f64 / n as f64 };
    let record = TrialRecord {
        gamma,
        w,
        mode: key.mode,
        trial: key.trial,
        ber: errors as f64 / payload.strand.len() as f64,
        mean_selected_edit_distance: mean(sel_ed),
        mean_unselected_edit_distance: mean(unsel_ed),
        psnr: metrics::psnr(&payload.image, &restored)?,
        ssim: ssim_or_nan(&payload.image, &restored)?,
        gc_fraction: payload.gc_fraction,
        max_run: payload.max_run,
        penalty: payload.penalty,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok((record, restored.into_pixels()))
}

fn ssim_or_nan(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    match metrics::ssim(a, b) {
        Err(dnasim_core::Error::ImageTooSmall { .. }) => Ok(f64::NAN),
        other => Ok(other?),
    }
}

/// Trial keys in canonical row order: gamma, then w, then mode, then trial.
pub fn sweep_keys(config: &ExperimentConfig) -> Vec<TrialKey> {
    let mut keys = Vec::new();
    for gamma_index in 0..config.gammas.len() {
        for w_index in 0..config.ws.len() {
            for &mode in &config.modes {
                for trial in 0..config.trials {
                    keys.push(TrialKey {
                        gamma_index,
                        w_index,
                        mode,
                        trial,
                    });
                }
            }
        }
    }
    keys
}

/// Per-(gamma, w, mode) means.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub gamma: f64,
    pub w: usize,
    pub mode: SelectionMode,
    pub trials: usize,
    pub mean_ber: f64,
    pub mean_selected_edit_distance: f64,
    pub mean_unselected_edit_distance: f64,
    pub mean_psnr: f64,
    pub mean_ssim: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<CellSummary>,
}

fn run_parallel<T: Send>(
    threads: usize,
    job: impl FnOnce() -> T + Send,
) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(job))
}

/// Run every trial of the grid. Rows come back in canonical order whatever
/// the degree of parallelism.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let payload = PreparedPayload::load(config)?;
    let keys = sweep_keys(config);
    let records = run_parallel(config.threads, || {
        keys.par_iter()
            .map(|&key| run_trial(config, &payload, key))
            .collect::<Result<Vec<_>>>()
    })??;
    let summary = summarize(&records, config.trials);
    Ok(SweepResult { records, summary })
}

fn summarize(records: &[TrialRecord], trials: usize) -> Vec<CellSummary> {
    records
        .chunks(trials)
        .map(|cell| {
            let n = cell.len() as f64;
            let avg = |f: fn(&TrialRecord) -> f64| cell.iter().map(f).sum::<f64>() / n;
            CellSummary {
                gamma: cell[0].gamma,
                w: cell[0].w,
                mode: cell[0].mode,
                trials: cell.len(),
                mean_ber: avg(|r| r.ber),
                mean_selected_edit_distance: avg(|r| r.mean_selected_edit_distance),
                mean_unselected_edit_distance: avg(|r| r.mean_unselected_edit_distance),
                mean_psnr: avg(|r| r.psnr),
                mean_ssim: avg(|r| r.ssim),
            }
        })
        .collect()
}

/// Paired random-minus-MRS differences for one (gamma, w) cell. Positive
/// gaps mean MRS did better.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub gamma: f64,
    pub w: usize,
    pub trials: usize,
    pub mean_edit_distance_gap: f64,
    pub sd_edit_distance_gap: f64,
    pub mean_ber_gap: f64,
    pub sd_ber_gap: f64,
}

impl ComparisonRow {
    /// Mean edit-distance gap over its standard deviation (0 when both are 0).
    pub fn edit_distance_effect_size(&self) -> f64 {
        effect_size(self.mean_edit_distance_gap, self.sd_edit_distance_gap)
    }

    pub fn ber_effect_size(&self) -> f64 {
        effect_size(self.mean_ber_gap, self.sd_ber_gap)
    }
}

fn effect_size(mean: f64, sd: f64) -> f64 {
    if sd == 0.0 {
        if mean == 0.0 {
            0.0
        } else {
            mean.signum() * f64::INFINITY
        }
    } else {
        mean / sd
    }
}

/// Sample mean and standard deviation (n - 1 denominator; 0 for n < 2).
pub fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn compare_selection(config: &ExperimentConfig) -> Result<(SweepResult, Vec<ComparisonRow>)> {
    if !(config.modes.contains(&SelectionMode::Mrs) && config.modes.contains(&SelectionMode::Random)) {
        return Err(HarnessError::MissingModes);
    }
    let mut cfg = config.clone();
    cfg.modes = vec![SelectionMode::Mrs, SelectionMode::Random];
    let sweep = run_sweep(&cfg)?;
    let rows = sweep
        .records
        .chunks(2 * cfg.trials)
        .map(|cell| {
            let (mrs, random) = cell.split_at(cfg.trials);
            let ed: Vec<f64> = mrs
                .iter()
                .zip(random)
                .map(|(m, r)| r.mean_selected_edit_distance - m.mean_selected_edit_distance)
                .collect();
            let ber: Vec<f64> = mrs.iter().zip(random).map(|(m, r)| r.ber - m.ber).collect();
            let (mean_ed, sd_ed) = mean_sd(&ed);
            let (mean_ber, sd_ber) = mean_sd(&ber);
            ComparisonRow {
                gamma: mrs[0].gamma,
                w: mrs[0].w,
                trials: cfg.trials,
                mean_edit_distance_gap: mean_ed,
                sd_edit_distance_gap: sd_ed,
                mean_ber_gap: mean_ber,
                sd_ber_gap: sd_ber,
            }
        })
        .collect();
    Ok((sweep, rows))
}
