//! Congruency: fraction of fixations landing in the Otsu-salient region.

use crate::error::{Error, Result};
use crate::gaze::{fixation_cell, Scanpath};
use crate::grid::SaliencyMap;
use crate::metrics::otsu::otsu_threshold;
use crate::scalar::Scalar;

/// Ratio of the scanpath's fixations that fall on salient cells of the
/// Otsu-binarized map. Fixations are counted individually, so duplicates on
/// a salient cell each contribute.
pub fn congruency<T: Scalar>(s: &SaliencyMap<T>, scanpath: &Scanpath<T>) -> Result<T> {
    if scanpath.fixations.is_empty() {
        return Err(Error::EmptyScanpath);
    }
    let threshold = otsu_threshold(s);
    let mut hits = 0usize;
    for f in &scanpath.fixations {
        let (row, col) = fixation_cell(f.x, f.y, s.width(), s.height());
        if s.get(row, col) > threshold {
            hits += 1;
        }
    }
    Ok(T::from_f64_lossy(hits as f64) / T::from_f64_lossy(scanpath.len() as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaze::Fixation;

    fn path(points: &[(f64, f64)]) -> Scanpath<f64> {
        Scanpath::new(
            points.iter().map(|&(x, y)| Fixation::new(x, y)).collect(),
            "t",
            10,
            10,
        )
        .unwrap()
    }

    /// 4x4 map: a bright 2x2 block bottom-right, dim elsewhere.
    fn bimodal_map() -> SaliencyMap<f64> {
        let mut v = vec![10.0; 16];
        for row in 2..4 {
            for col in 2..4 {
                v[row * 4 + col] = 200.0;
            }
        }
        SaliencyMap::from_values(4, 4, v).unwrap()
    }

    #[test]
    fn all_fixations_salient() {
        let s = bimodal_map();
        // (1,1) in normalized coords maps to cell (3,3) which is bright.
        let c = congruency(&s, &path(&[(1.0, 1.0), (0.9, 0.9)])).unwrap();
        assert_eq!(c, 1.0);
    }

    #[test]
    fn no_fixation_salient() {
        let s = bimodal_map();
        let c = congruency(&s, &path(&[(0.0, 0.0), (0.3, 0.0)])).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn half_salient() {
        let s = bimodal_map();
        // Two on the bright block, two on the dim region.
        let c = congruency(&s, &path(&[(1.0, 1.0), (0.7, 0.7), (0.0, 0.0), (0.0, 0.6)])).unwrap();
        assert_eq!(c, 0.5);
    }

    #[test]
    fn duplicates_count_individually() {
        let s = bimodal_map();
        let c = congruency(&s, &path(&[(1.0, 1.0), (1.0, 1.0), (0.0, 0.0)])).unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_scanpath_is_error() {
        let s = bimodal_map();
        let sp = Scanpath::<f64> {
            fixations: vec![],
            image_id: "t".into(),
            image_width: 1,
            image_height: 1,
        };
        assert!(congruency(&s, &sp).is_err());
    }
}
