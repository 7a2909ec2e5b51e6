//! Normalized Scanpath Saliency.
//!
//! The saliency map is z-scored with its own mean and population standard
//! deviation, then averaged at the fixated cells. A constant map has no
//! z-score and is rejected as degenerate.

use crate::error::{Error, Result};
use crate::grid::{FixationMap, Grid, SaliencyMap};
use crate::scalar::Scalar;

/// Z-score normalization of a saliency map: `P = (S - mean(S)) / std(S)`.
///
/// Errors when the population standard deviation is zero.
pub fn normalize_saliency<T: Scalar>(s: &SaliencyMap<T>) -> Result<Grid<T>> {
    let mean = s.grid().mean();
    let std = s.grid().std();
    if std == T::zero() || !std.is_finite() {
        return Err(Error::DegenerateSaliency);
    }
    let data: Vec<T> = s.values().iter().map(|&v| (v - mean) / std).collect();
    let p = Grid::new(s.width(), s.height(), data)?;
    // 1e-9 is the f64 contract; wider scalars get a tolerance scaled to
    // their epsilon.
    let tol = T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_f64_lossy(1e4));
    debug_assert!(p.mean().abs() < tol);
    debug_assert!((p.std() - T::one()).abs() < tol);
    Ok(p)
}

/// Mean of the normalized saliency map over the set cells of a fixation map.
///
/// Errors on shape mismatch, an all-zero fixation map, or a degenerate
/// (constant) saliency map.
pub fn nss<T: Scalar>(s: &SaliencyMap<T>, fixmap: &FixationMap) -> Result<T> {
    if s.width() != fixmap.width() || s.height() != fixmap.height() {
        return Err(Error::shape(
            format!("{}x{}", s.width(), s.height()),
            format!("{}x{}", fixmap.width(), fixmap.height()),
        ));
    }
    let n = fixmap.count_set();
    if n == 0 {
        return Err(Error::EmptyScanpath);
    }
    let p = normalize_saliency(s)?;
    let sum = fixmap
        .set_cells()
        .fold(T::zero(), |acc, (row, col)| acc + p.get(row, col));
    Ok(sum / T::from_f64_lossy(n as f64))
}
