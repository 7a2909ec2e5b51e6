//! Otsu threshold for saliency binarization.
//!
//! The map is histogrammed into equal-width bins over `[min, max]` and the
//! split maximizing between-class variance is selected. "Salient" means
//! strictly greater than the returned threshold.

use crate::grid::SaliencyMap;
use crate::scalar::Scalar;

/// Classic bin count, independent of the input bit depth.
pub const DEFAULT_OTSU_BINS: usize = 256;

/// [`otsu_threshold_with_bins`] with 256 bins.
pub fn otsu_threshold<T: Scalar>(s: &SaliencyMap<T>) -> T {
    otsu_threshold_with_bins(s, DEFAULT_OTSU_BINS)
}

/// Between-class-variance maximizing threshold over a `bins`-bin histogram.
///
/// Cell `v` lands in bin `floor((v - min) / (max - min) * bins)`, clamped to
/// the last bin. Candidate `k` puts bins `0..=k` below and the rest above;
/// the returned threshold is the upper edge of bin `k`,
/// `min + (k + 1) * (max - min) / bins`, for the smallest `k` maximizing the
/// variance. A constant map returns the constant itself, so every cell is
/// non-salient.
pub fn otsu_threshold_with_bins<T: Scalar>(s: &SaliencyMap<T>, bins: usize) -> T {
    let bins = bins.max(1);
    let values = s.values();
    let mut min = values[0];
    let mut max = values[0];
    for &v in values {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    if min == max {
        return min;
    }

    let range = max - min;
    let bins_t = T::from_f64_lossy(bins as f64);
    let mut hist = vec![0u64; bins];
    for &v in values {
        let idx = ((v - min) / range * bins_t).floor().to_f64_lossy() as usize;
        hist[idx.min(bins - 1)] += 1;
    }

    let total: f64 = values.len() as f64;
    let sum_total: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &h)| i as f64 * h as f64)
        .sum();

    // Raw counts keep the running sums exact; the argmax is unchanged.
    let mut best_k = bins - 1;
    let mut best_var = f64::NEG_INFINITY;
    let mut count0 = 0.0f64;
    let mut sum0 = 0.0f64;
    for (k, &h) in hist.iter().enumerate() {
        count0 += h as f64;
        sum0 += k as f64 * h as f64;
        let count1 = total - count0;
        let var = if count0 == 0.0 || count1 == 0.0 {
            0.0
        } else {
            let d = sum0 / count0 - (sum_total - sum0) / count1;
            count0 * count1 * d * d
        };
        if var > best_var {
            best_var = var;
            best_k = k;
        }
    }

    min + T::from_f64_lossy((best_k + 1) as f64) * range / bins_t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(w: usize, h: usize, v: Vec<f64>) -> SaliencyMap<f64> {
        SaliencyMap::from_values(w, h, v).unwrap()
    }

    #[test]
    fn bimodal_split_is_exact() {
        let mut v = vec![0.0; 8];
        v.extend([255.0; 8]);
        let t = otsu_threshold(&map(4, 4, v.clone()));
        assert!(t > 0.0 && t < 255.0);
        let low = v.iter().filter(|&&x| x <= t).count();
        let high = v.iter().filter(|&&x| x > t).count();
        assert_eq!((low, high), (8, 8));
    }

    #[test]
    fn constant_map_returns_constant() {
        let t = otsu_threshold(&map(3, 3, vec![7.5; 9]));
        assert_eq!(t, 7.5);
        // every cell non-salient under v > t
        assert_eq!([7.5; 9].iter().filter(|&&x| x > t).count(), 0);
    }

    /// Independent oracle: recompute between-class variance from scratch for
    /// every candidate split and take the first argmax.
    fn brute_force_otsu(values: &[f64], bins: usize) -> f64 {
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            return min;
        }
        let mut hist = vec![0u64; bins];
        for &v in values {
            let idx = (((v - min) / (max - min)) * bins as f64).floor() as usize;
            hist[idx.min(bins - 1)] += 1;
        }
        let mut best_k = bins - 1;
        let mut best_var = f64::NEG_INFINITY;
        for k in 0..bins {
            let mut count0 = 0.0;
            let mut sum0 = 0.0;
            let mut count1 = 0.0;
            let mut sum1 = 0.0;
            for (i, &h) in hist.iter().enumerate() {
                if i <= k {
                    count0 += h as f64;
                    sum0 += i as f64 * h as f64;
                } else {
                    count1 += h as f64;
                    sum1 += i as f64 * h as f64;
                }
            }
            let var = if count0 == 0.0 || count1 == 0.0 {
                0.0
            } else {
                let d = sum0 / count0 - sum1 / count1;
                count0 * count1 * d * d
            };
            if var > best_var {
                best_var = var;
                best_k = k;
            }
        }
        min + (best_k + 1) as f64 * (max - min) / bins as f64
    }

    #[test]
    fn matches_brute_force_on_random_8bit_maps() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let values: Vec<f64> = (0..32 * 32)
                .map(|_| rng.random_range(0..=255u32) as f64)
                .collect();
            let s = map(32, 32, values.clone());
            let got = otsu_threshold(&s);
            let want = brute_force_otsu(&values, 256);
            assert_eq!(got, want, "threshold mismatch");
        }
    }
}
