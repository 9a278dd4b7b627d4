//! Image and sequence fidelity measures.
//!
//! Image metrics work on raw `0..=255` pixel values. SSIM uses 8x8 uniform
//! windows at stride 1 with population statistics and the usual stabilizers
//! `C1 = (0.01 * 255)^2`, `C2 = (0.03 * 255)^2`; per-channel means are
//! averaged. Window sums come from integer summed-area tables, so every
//! window statistic is exact before the final conversion.

use crate::dna::Base;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const SSIM_WINDOW: usize = 8;

/// Interleaved row-major image with 1 or 3 channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<u8>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "{channels} channels (expected 1 or 3)"
            )));
        }
        if pixels.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "{} pixel values for {width}x{height}x{channels}",
                pixels.len()
            )));
        }
        Ok(RasterImage {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// `n = width * height * channels`.
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> u8 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }
}

fn same_dims(a: &RasterImage, b: &RasterImage) -> Result<()> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            left: a.dims(),
            right: b.dims(),
        });
    }
    Ok(())
}

pub fn mse<T: Real>(a: &RasterImage, b: &RasterImage) -> Result<T> {
    same_dims(a, b)?;
    if a.is_empty() {
        return Ok(T::zero());
    }
    let sse: u64 = a
        .pixels
        .iter()
        .zip(&b.pixels)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    Ok(T::from_u64(sse).unwrap() / T::from_usize_exact(a.len()))
}

/// PSNR in dB from an MSE value; `+inf` when the MSE is zero.
pub fn psnr_from_mse<T: Real>(mse: T) -> T {
    if mse == T::zero() {
        return T::infinity();
    }
    let peak = T::lit(255.0);
    T::lit(10.0) * (peak * peak / mse).log10()
}

pub fn psnr<T: Real>(a: &RasterImage, b: &RasterImage) -> Result<T> {
    Ok(psnr_from_mse(mse::<T>(a, b)?))
}

/// Summed-area table with a zero top row and left column.
struct Integral {
    stride: usize,
    sums: Vec<i64>,
}

impl Integral {
    fn build(width: usize, height: usize, value: impl Fn(usize, usize) -> i64) -> Self {
        let stride = width + 1;
        let mut sums = vec![0i64; stride * (height + 1)];
        for y in 0..height {
            let mut row = 0i64;
            for x in 0..width {
                row += value(x, y);
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        Integral { stride, sums }
    }

    fn window(&self, x: usize, y: usize, size: usize) -> i64 {
        let s = self.stride;
        self.sums[(y + size) * s + x + size] - self.sums[y * s + x + size]
            - self.sums[(y + size) * s + x]
            + self.sums[y * s + x]
    }
}

fn ssim_channel<T: Real>(a: &RasterImage, b: &RasterImage, c: usize) -> T {
    let (w, h) = (a.width, a.height);
    let pa = |x, y| a.get(x, y, c) as i64;
    let pb = |x, y| b.get(x, y, c) as i64;
    let sa = Integral::build(w, h, pa);
    let sb = Integral::build(w, h, pb);
    let saa = Integral::build(w, h, |x, y| pa(x, y) * pa(x, y));
    let sbb = Integral::build(w, h, |x, y| pb(x, y) * pb(x, y));
    let sab = Integral::build(w, h, |x, y| pa(x, y) * pb(x, y));

    let n = (SSIM_WINDOW * SSIM_WINDOW) as i64;
    let n2 = T::from_i64(n * n).unwrap();
    let c1 = T::lit((0.01 * 255.0) * (0.01 * 255.0));
    let c2 = T::lit((0.03 * 255.0) * (0.03 * 255.0));
    let two = T::lit(2.0);
    let mut acc = T::zero();
    let mut count = 0usize;
    for y in 0..=h - SSIM_WINDOW {
        for x in 0..=w - SSIM_WINDOW {
            let (ta, tb) = (sa.window(x, y, SSIM_WINDOW), sb.window(x, y, SSIM_WINDOW));
            // n^2 times the population moments, exact in integers
            let var_a = n * saa.window(x, y, SSIM_WINDOW) - ta * ta;
            let var_b = n * sbb.window(x, y, SSIM_WINDOW) - tb * tb;
            let cov = n * sab.window(x, y, SSIM_WINDOW) - ta * tb;
            let to_t = |v: i64| T::from_i64(v).unwrap() / n2;
            let (ma2, mb2, mab) = (to_t(ta * ta), to_t(tb * tb), to_t(ta * tb));
            let num = (two * mab + c1) * (two * to_t(cov) + c2);
            let den = (ma2 + mb2 + c1) * (to_t(var_a) + to_t(var_b) + c2);
            acc += num / den;
            count += 1;
        }
    }
    acc / T::from_usize_exact(count)
}

pub fn ssim<T: Real>(a: &RasterImage, b: &RasterImage) -> Result<T> {
    same_dims(a, b)?;
    if a.width < SSIM_WINDOW || a.height < SSIM_WINDOW {
        return Err(Error::ImageTooSmall {
            width: a.width,
            height: a.height,
            window: SSIM_WINDOW,
        });
    }
    let total = (0..a.channels).fold(T::zero(), |acc, c| acc + ssim_channel::<T>(a, b, c));
    Ok(total / T::from_usize_exact(a.channels))
}

/// Levenshtein distance (unit-cost insertion, deletion, substitution).
///
/// Bit-parallel over 64-row blocks of `a`, O(ceil(|a|/64) * |b|).
pub fn edit_distance(a: &[Base], b: &[Base]) -> usize {
    let m = a.len();
    if m == 0 {
        return b.len();
    }
    if b.is_empty() {
        return m;
    }
    let blocks = m.div_ceil(64);
    let mut peq = vec![[0u64; 4]; blocks];
    for (i, &base) in a.iter().enumerate() {
        peq[i / 64][base as usize] |= 1 << (i % 64);
    }
    let last_bit = 1u64 << ((m - 1) % 64);
    let mut pv = vec![!0u64; blocks];
    let mut mv = vec![0u64; blocks];
    let mut score = m as isize;

    for &ch in b {
        // horizontal delta entering the top block: row 0 grows by one per column
        let mut hin: i8 = 1;
        for blk in 0..blocks {
            let high = if blk + 1 == blocks { last_bit } else { 1 << 63 };
            let mut eq = peq[blk][ch as usize];
            let (p, mm) = (pv[blk], mv[blk]);
            let xv = eq | mm;
            if hin < 0 {
                eq |= 1;
            }
            let xh = ((eq & p).wrapping_add(p) ^ p) | eq;
            let mut ph = mm | !(xh | p);
            let mut mh = p & xh;
            let hout: i8 = if ph & high != 0 {
                1
            } else if mh & high != 0 {
                -1
            } else {
                0
            };
            ph <<= 1;
            mh <<= 1;
            if hin < 0 {
                mh |= 1;
            } else if hin > 0 {
                ph |= 1;
            }
            pv[blk] = mh | !(xv | ph);
            mv[blk] = ph & xv;
            hin = hout;
        }
        score += hin as isize;
    }
    score as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dna::DnaSequence;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn img(w: usize, h: usize, c: usize, seed: u64) -> RasterImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RasterImage::new(w, h, c, (0..w * h * c).map(|_| rng.gen()).collect()).unwrap()
    }

    fn dp_distance(a: &[Base], b: &[Base]) -> usize {
        let mut prev: Vec<usize> = (0..=b.len()).collect();
        for i in 1..=a.len() {
            let mut cur = vec![i; b.len() + 1];
            for j in 1..=b.len() {
                let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
                cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
            }
            prev = cur;
        }
        prev[b.len()]
    }

    /// Straightforward per-window SSIM in f64.
    fn ssim_reference(a: &RasterImage, b: &RasterImage) -> f64 {
        let (c1, c2) = ((0.01f64 * 255.0).powi(2), (0.03f64 * 255.0).powi(2));
        let n = 64.0;
        let mut per_channel = 0.0;
        for c in 0..a.channels() {
            let mut acc = 0.0;
            let mut cnt = 0.0;
            for y in 0..=a.height() - 8 {
                for x in 0..=a.width() - 8 {
                    let (mut ma, mut mb) = (0.0, 0.0);
                    for dy in 0..8 {
                        for dx in 0..8 {
                            ma += a.get(x + dx, y + dy, c) as f64;
                            mb += b.get(x + dx, y + dy, c) as f64;
                        }
                    }
                    ma /= n;
                    mb /= n;
                    let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
                    for dy in 0..8 {
                        for dx in 0..8 {
                            let da = a.get(x + dx, y + dy, c) as f64 - ma;
                            let db = b.get(x + dx, y + dy, c) as f64 - mb;
                            va += da * da;
                            vb += db * db;
                            cov += da * db;
                        }
                    }
                    va /= n;
                    vb /= n;
                    cov /= n;
                    acc += (2.0 * ma * mb + c1) * (2.0 * cov + c2)
                        / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                    cnt += 1.0;
                }
            }
            per_channel += acc / cnt;
        }
        per_channel / a.channels() as f64
    }

    #[test]
    fn image_validation() {
        assert!(RasterImage::new(2, 2, 2, vec![0; 8]).is_err());
        assert!(RasterImage::new(2, 2, 1, vec![0; 3]).is_err());
        assert_eq!(RasterImage::new(2, 2, 3, vec![0; 12]).unwrap().len(), 12);
    }

    #[test]
    fn mse_examples() {
        let a = img(5, 4, 3, 1);
        assert_eq!(mse::<f64>(&a, &a).unwrap(), 0.0);
        let plus = RasterImage::new(
            5,
            4,
            3,
            a.pixels().iter().map(|&p| p.min(254) + 1).collect(),
        )
        .unwrap();
        let base = RasterImage::new(5, 4, 3, a.pixels().iter().map(|&p| p.min(254)).collect())
            .unwrap();
        assert_eq!(mse::<f64>(&base, &plus).unwrap(), 1.0);
        let other = img(4, 5, 3, 1);
        assert!(matches!(
            mse::<f64>(&a, &other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mse_matches_double_loop() {
        for seed in 0..50 {
            let (a, b) = (img(9, 7, 3, seed), img(9, 7, 3, seed + 1000));
            let mut acc = 0.0;
            for y in 0..7 {
                for x in 0..9 {
                    for c in 0..3 {
                        acc += (a.get(x, y, c) as f64 - b.get(x, y, c) as f64).powi(2);
                    }
                }
            }
            assert!((mse::<f64>(&a, &b).unwrap() - acc / 189.0).abs() < 1e-9);
        }
    }

    #[test]
    fn psnr_examples() {
        let a = img(8, 8, 1, 2);
        assert_eq!(psnr::<f64>(&a, &a).unwrap(), f64::INFINITY);
        assert!((psnr_from_mse(1.0f64) - 48.130_803_608_679_1).abs() < 1e-6);
        assert!((psnr_from_mse(1.0f32) - 48.1308).abs() < 1e-3);
    }

    #[test]
    fn psnr_decreases_with_noise() {
        let a = img(32, 32, 1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut last = f64::INFINITY;
        for amp in [2i32, 8, 16, 32, 64] {
            let noisy: Vec<u8> = a
                .pixels()
                .iter()
                .map(|&p| (p as i32 + rng.gen_range(-amp..=amp)).clamp(0, 255) as u8)
                .collect();
            let b = RasterImage::new(32, 32, 1, noisy).unwrap();
            let p = psnr::<f64>(&a, &b).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ssim_identity_and_errors() {
        let a = img(16, 12, 3, 5);
        assert_eq!(ssim::<f64>(&a, &a).unwrap(), 1.0);
        let small = img(7, 12, 1, 5);
        assert!(matches!(
            ssim::<f64>(&small, &small),
            Err(Error::ImageTooSmall { .. })
        ));
        assert!(ssim::<f64>(&a, &img(16, 12, 1, 5)).is_err());
    }

    #[test]
    fn ssim_constant_shift() {
        let a = RasterImage::new(8, 8, 1, vec![10; 64]).unwrap();
        let b = RasterImage::new(8, 8, 1, vec![200; 64]).unwrap();
        let s = ssim::<f64>(&a, &b).unwrap();
        assert!(s.is_finite() && s < 1.0 && s > 0.0);
    }

    #[test]
    fn ssim_matches_reference() {
        for seed in 0..40 {
            let (a, b) = (img(16, 16, 1, seed), img(16, 16, 1, seed + 77));
            let got = ssim::<f64>(&a, &b).unwrap();
            assert!((got - ssim_reference(&a, &b)).abs() < 1e-9);
            assert!((got - ssim::<f64>(&b, &a).unwrap()).abs() < 1e-12);
        }
        let (a, b) = (img(11, 9, 3, 1), img(11, 9, 3, 2));
        assert!((ssim::<f64>(&a, &b).unwrap() - ssim_reference(&a, &b)).abs() < 1e-9);
        let s32 = ssim::<f32>(&a, &b).unwrap() as f64;
        assert!((s32 - ssim_reference(&a, &b)).abs() < 1e-4);
    }

    fn dna(s: &str) -> DnaSequence {
        s.parse().unwrap()
    }

    #[test]
    fn edit_distance_examples() {
        assert_eq!(edit_distance(&dna("ACGT"), &dna("ACGT")), 0);
        assert_eq!(edit_distance(&dna("ACGT"), &dna("AGT")), 1);
        assert_eq!(edit_distance(&dna(""), &dna("AGT")), 3);
        assert_eq!(edit_distance(&dna("AGT"), &dna("")), 3);
        assert_eq!(edit_distance(&dna("AAAA"), &dna("TTTT")), 4);
    }

    fn arb_dna(max: usize) -> impl Strategy<Value = DnaSequence> {
        prop::collection::vec(0u8..4, 0..max).prop_map(|d| DnaSequence::from_digits(&d).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn edit_distance_matches_dp(a in arb_dna(64), b in arb_dna(64)) {
            prop_assert_eq!(edit_distance(&a, &b), dp_distance(&a, &b));
        }

        #[test]
        fn edit_distance_multi_block(a in arb_dna(300), b in arb_dna(300)) {
            prop_assert_eq!(edit_distance(&a, &b), dp_distance(&a, &b));
        }

        #[test]
        fn edit_distance_is_a_metric(a in arb_dna(40), b in arb_dna(40), c in arb_dna(40)) {
            let ab = edit_distance(&a, &b);
            prop_assert_eq!(ab, edit_distance(&b, &a));
            prop_assert_eq!(ab == 0, a == b);
            prop_assert!(edit_distance(&a, &c) <= ab + edit_distance(&b, &c));
        }
    }
}
