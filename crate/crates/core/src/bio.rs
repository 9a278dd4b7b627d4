//! GC content, homopolymer runs and the segment composition penalty.
//!
//! The penalty maps a strand to digits `0..=3` and slides a window of `d`
//! bases with step `stride`. For each window it takes the mean `T` and the
//! unbiased variance `H` of the digits and accumulates
//! `(T - 1.5)^2 + (H - 1.25)^2`; the penalty is the average over windows.
//! A window with each base equally frequent has `T = 1.5` exactly.
//!
//! Statistics are generic over [`Field`], so the same code evaluates in
//! floating point or exactly over rationals.

use std::collections::BTreeMap;

use crate::dna::Base;
use crate::error::{Error, Result};
use crate::metrics::{self, RasterImage};
use crate::scalar::{Field, Real};

/// Target window mean.
pub const TARGET_MEAN: (i64, i64) = (3, 2);
/// Target window variance.
pub const TARGET_VARIANCE: (i64, i64) = (5, 4);

pub const DEFAULT_WINDOW: usize = 256;
pub const DEFAULT_STRIDE: usize = 128;

/// Run length -> number of maximal runs of that length.
pub type RunHistogram = BTreeMap<usize, usize>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentSpec {
    pub d: usize,
    pub stride: usize,
}

impl SegmentSpec {
    pub fn new(d: usize, stride: usize) -> Result<Self> {
        if d < 2 || stride == 0 || stride > d {
            return Err(Error::InvalidSegmentSpec { d, stride });
        }
        Ok(SegmentSpec { d, stride })
    }

    /// Number of full windows over a sequence of length `len`.
    pub fn window_count(&self, len: usize) -> usize {
        if len < self.d {
            0
        } else {
            (len - self.d) / self.stride + 1
        }
    }
}

impl Default for SegmentSpec {
    fn default() -> Self {
        SegmentSpec {
            d: DEFAULT_WINDOW,
            stride: DEFAULT_STRIDE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentStat<T> {
    pub mean: T,
    pub variance: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport<T> {
    pub m: usize,
    pub means: Vec<T>,
    pub variances: Vec<T>,
    pub penalty: T,
    pub gc_fraction: T,
    pub run_histogram: RunHistogram,
}

impl<T> ConstraintReport<T> {
    pub fn max_run(&self) -> usize {
        self.run_histogram.keys().next_back().copied().unwrap_or(0)
    }
}

fn ratio<T: Field>((n, d): (i64, i64)) -> T {
    T::from_i64(n).unwrap() / T::from_i64(d).unwrap()
}

pub fn gc_content<T: Field>(seq: &[Base]) -> Result<T> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let gc = seq.iter().filter(|b| b.is_gc()).count();
    Ok(T::from_usize_exact(gc) / T::from_usize_exact(seq.len()))
}

pub fn homopolymer_histogram(seq: &[Base]) -> RunHistogram {
    let mut hist = RunHistogram::new();
    for run in seq.chunk_by(|a, b| a == b) {
        *hist.entry(run.len()).or_default() += 1;
    }
    hist
}

/// Share of runs whose length exceeds `limit`.
pub fn run_fraction_above(hist: &RunHistogram, limit: usize) -> f64 {
    let total: usize = hist.values().sum();
    if total == 0 {
        return 0.0;
    }
    let over: usize = hist.range(limit + 1..).map(|(_, &c)| c).sum();
    over as f64 / total as f64
}

fn check(len: usize, spec: &SegmentSpec) -> Result<()> {
    if spec.d < 2 || spec.stride == 0 || spec.stride > spec.d {
        return Err(Error::InvalidSegmentSpec {
            d: spec.d,
            stride: spec.stride,
        });
    }
    if len < spec.d {
        return Err(Error::SequenceTooShort { len, d: spec.d });
    }
    Ok(())
}

/// Mean and unbiased variance of each full window; a trailing partial window
/// is dropped. Summation is left to right.
pub fn segment_stats<T: Field>(digits: &[u8], spec: &SegmentSpec) -> Result<Vec<SegmentStat<T>>> {
    check(digits.len(), spec)?;
    let d = T::from_usize_exact(spec.d);
    let d1 = T::from_usize_exact(spec.d - 1);
    let stats = (0..spec.window_count(digits.len()))
        .map(|i| {
            let window = &digits[i * spec.stride..i * spec.stride + spec.d];
            let to_t = |z: u8| T::from_u8(z).unwrap();
            let mean = window.iter().fold(T::zero(), |acc, &z| acc + to_t(z)) / d;
            let variance = window.iter().fold(T::zero(), |acc, &z| {
                let dev = to_t(z) - mean;
                acc + dev * dev
            }) / d1;
            SegmentStat { mean, variance }
        })
        .collect();
    Ok(stats)
}

pub fn constraint_penalty<T: Field>(digits: &[u8], spec: &SegmentSpec) -> Result<T> {
    let stats = segment_stats::<T>(digits, spec)?;
    Ok(penalty_of(&stats))
}

fn penalty_of<T: Field>(stats: &[SegmentStat<T>]) -> T {
    let t_star: T = ratio(TARGET_MEAN);
    let h_star: T = ratio(TARGET_VARIANCE);
    let sum = stats.iter().fold(T::zero(), |acc, s| {
        let dt = s.mean - t_star;
        let dh = s.variance - h_star;
        acc + dt * dt + dh * dh
    });
    sum / T::from_usize_exact(stats.len())
}

/// Pixel MSE on `[0, 1]`-normalized values plus `alpha` times the penalty.
pub fn total_loss<T: Real>(
    x: &RasterImage,
    x_hat: &RasterImage,
    digits: &[u8],
    alpha: T,
    spec: &SegmentSpec,
) -> Result<T> {
    let raw: T = metrics::mse(x, x_hat)?;
    let scale = T::lit(255.0);
    let penalty: T = constraint_penalty(digits, spec)?;
    Ok(raw / (scale * scale) + alpha * penalty)
}

/// Everything the analysis report needs for one strand.
pub fn analyze<T: Field>(seq: &[Base], spec: &SegmentSpec) -> Result<ConstraintReport<T>> {
    let digits: Vec<u8> = seq.iter().map(|b| b.digit()).collect();
    let stats = segment_stats::<T>(&digits, spec)?;
    Ok(ConstraintReport {
        m: stats.len(),
        penalty: penalty_of(&stats),
        means: stats.iter().map(|s| s.mean).collect(),
        variances: stats.iter().map(|s| s.variance).collect(),
        gc_fraction: gc_content(seq)?,
        run_histogram: homopolymer_histogram(seq),
    })
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::dna::DnaSequence;
    use num_rational::Ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Ratio<i64>;

    fn seq(s: &str) -> DnaSequence {
        s.parse().unwrap()
    }

    #[test]
    fn gc_examples() {
        assert_eq!(gc_content::<f64>(&seq("GGCC")).unwrap(), 1.0);
        assert_eq!(gc_content::<f64>(&seq("ATAT")).unwrap(), 0.0);
        assert_eq!(gc_content::<Q>(&seq("ACGT")).unwrap(), Q::new(1, 2));
        assert_eq!(gc_content::<f64>(&seq("")), Err(Error::EmptySequence));
    }

    #[test]
    fn histogram_examples() {
        let h = homopolymer_histogram(&seq("AAAT"));
        assert_eq!(h, RunHistogram::from([(3, 1), (1, 1)]));
        assert_eq!(
            homopolymer_histogram(&seq("ACGT")),
            RunHistogram::from([(1, 4)])
        );
        assert!(homopolymer_histogram(&seq("")).is_empty());
        assert_eq!(run_fraction_above(&h, 2), 0.5);
    }

    #[test]
    fn geometric_run_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: DnaSequence = (0..1_000_000)
            .map(|_| Base::ALL[rng.gen_range(0..4usize)])
            .collect();
        let h = homopolymer_histogram(&s);
        let runs: usize = h.values().sum();
        for len in 1..=4 {
            let observed = *h.get(&len).unwrap_or(&0) as f64 / runs as f64;
            let expected = 0.75 * 0.25f64.powi(len as i32 - 1);
            assert!((observed - expected).abs() < 0.005, "L={len}: {observed}");
        }
    }

    #[test]
    fn stats_exact_points() {
        let spec = SegmentSpec::new(4, 4).unwrap();
        let s = segment_stats::<Q>(&[0, 1, 2, 3], &spec).unwrap();
        assert_eq!(s[0].mean, Q::new(3, 2));
        assert_eq!(s[0].variance, Q::new(5, 3));
        let s = segment_stats::<Q>(&[1, 2, 1, 2], &spec).unwrap();
        assert_eq!(s[0].mean, Q::new(3, 2));
        assert_eq!(s[0].variance, Q::new(1, 3));
    }

    #[test]
    fn penalty_of_repeated_acgt() {
        let spec = SegmentSpec::new(4, 4).unwrap();
        let digits: Vec<u8> = (0..40).map(|i| (i % 4) as u8).collect();
        let p = constraint_penalty::<Q>(&digits, &spec).unwrap();
        let dh = Q::new(5, 3) - Q::new(5, 4);
        assert_eq!(p, dh * dh);
        let pf = constraint_penalty::<f64>(&digits, &spec).unwrap();
        assert!((pf - 0.173_611_111_111_111).abs() < 1e-12);
    }

    #[test]
    fn penalty_zero_at_target() {
        // integer digits can never hit both targets at once, so check the
        // reduction directly on target statistics
        let at_target = SegmentStat {
            mean: Q::new(3, 2),
            variance: Q::new(5, 4),
        };
        assert_eq!(penalty_of(&[at_target; 3]), Q::from_integer(0));
    }

    #[test]
    fn balanced_variance_limit() {
        // equal counts of all four digits: H = 1.25 d / (d - 1)
        for d in [4usize, 40, 400] {
            let digits: Vec<u8> = (0..d).map(|i| (i % 4) as u8).collect();
            let spec = SegmentSpec::new(d, d).unwrap();
            let s = segment_stats::<Q>(&digits, &spec).unwrap();
            assert_eq!(s[0].mean, Q::new(3, 2));
            assert_eq!(s[0].variance, Q::new(5 * d as i64, 4 * (d as i64 - 1)));
        }
    }

    #[test]
    fn spec_and_length_errors() {
        assert!(SegmentSpec::new(1, 1).is_err());
        assert!(SegmentSpec::new(4, 5).is_err());
        assert!(SegmentSpec::new(4, 0).is_err());
        let spec = SegmentSpec::new(4, 2).unwrap();
        assert_eq!(
            segment_stats::<f64>(&[0, 1, 2], &spec),
            Err(Error::SequenceTooShort { len: 3, d: 4 })
        );
        let bad = SegmentSpec { d: 1, stride: 1 };
        assert!(constraint_penalty::<f64>(&[0, 1], &bad).is_err());
    }

    #[test]
    fn window_layout() {
        let spec = SegmentSpec::new(4, 2).unwrap();
        assert_eq!(spec.window_count(4), 1);
        assert_eq!(spec.window_count(9), 3);
        assert_eq!(spec.window_count(3), 0);
        let s = segment_stats::<Q>(&[0, 0, 3, 3, 1, 1, 2], &spec).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[1].mean, Q::new(8, 4));
    }

    #[test]
    fn loss_terms() {
        let img = RasterImage::new(2, 2, 1, vec![0, 64, 128, 255]).unwrap();
        let shifted = RasterImage::new(2, 2, 1, vec![1, 65, 129, 254]).unwrap();
        let spec = SegmentSpec::new(4, 4).unwrap();
        let digits: Vec<u8> = (0..16).map(|i| (i % 4) as u8).collect();
        let mse = 1.0 / (255.0 * 255.0);
        assert_eq!(total_loss::<f64>(&img, &img, &digits, 0.0, &spec).unwrap(), 0.0);
        assert_eq!(
            total_loss::<f64>(&img, &shifted, &digits, 0.0, &spec).unwrap(),
            mse
        );
        let pen = constraint_penalty::<f64>(&digits, &spec).unwrap();
        let got = total_loss::<f64>(&img, &shifted, &digits, 2.0, &spec).unwrap();
        assert!((got - (mse + 2.0 * pen)).abs() < 1e-12);
        let other = RasterImage::new(1, 4, 1, vec![0; 4]).unwrap();
        assert!(total_loss::<f64>(&img, &other, &digits, 1.0, &spec).is_err());
    }

    #[test]
    fn analyze_report() {
        let s = seq("AAAACCGT");
        let r = analyze::<f64>(&s, &SegmentSpec::new(4, 2).unwrap()).unwrap();
        assert_eq!(r.m, 3);
        assert_eq!(r.max_run(), 4);
        assert_eq!(r.gc_fraction, 0.375);
        let total: usize = r.run_histogram.iter().map(|(l, c)| l * c).sum();
        assert_eq!(total, s.len());
    }

    fn reference_penalty(digits: &[u8], d: usize, stride: usize) -> f64 {
        let mut acc = 0.0;
        let mut m = 0;
        let mut start = 0;
        while start + d <= digits.len() {
            let mut t = 0.0;
            for i in start..start + d {
                t += digits[i] as f64;
            }
            t /= d as f64;
            let mut h = 0.0;
            for i in start..start + d {
                h += (digits[i] as f64 - t).powi(2);
            }
            h /= (d - 1) as f64;
            acc += (t - 1.5).powi(2) + (h - 1.25).powi(2);
            m += 1;
            start += stride;
        }
        acc / m as f64
    }

    proptest! {
        #[test]
        fn matches_reference(
            (digits, d, stride) in (2usize..40).prop_flat_map(|d| (
                prop::collection::vec(0u8..4, d..200), Just(d), 1..=d,
            ))
        ) {
            let spec = SegmentSpec::new(d, stride).unwrap();
            let got = constraint_penalty::<f64>(&digits, &spec).unwrap();
            prop_assert!((got - reference_penalty(&digits, d, stride)).abs() < 1e-12);
        }

        #[test]
        fn reversal_invariance(blocks in 1usize..10, d in 2usize..20, seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let digits: Vec<u8> = (0..blocks * d).map(|_| rng.gen_range(0..4)).collect();
            let rev: Vec<u8> = digits.iter().rev().copied().collect();
            let spec = SegmentSpec::new(d, d).unwrap();
            prop_assert_eq!(
                constraint_penalty::<Q>(&digits, &spec).unwrap(),
                constraint_penalty::<Q>(&rev, &spec).unwrap()
            );
        }

        #[test]
        fn gc_plus_at_is_one(d in prop::collection::vec(0u8..4, 1..200)) {
            let s = DnaSequence::from_digits(&d).unwrap();
            let gc = gc_content::<Q>(&s).unwrap();
            let at = Q::new(s.iter().filter(|b| !b.is_gc()).count() as i64, s.len() as i64);
            prop_assert_eq!(gc + at, Q::from_integer(1));
            let h = homopolymer_histogram(&s);
            prop_assert_eq!(h.iter().map(|(l, c)| l * c).sum::<usize>(), s.len());
        }
    }
}
