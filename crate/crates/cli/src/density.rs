//! Fixation density histograms.

use gazetk::{Error, Grid, Result};

/// Bins normalized fixation coordinates into a `bins x bins` grid and
/// normalizes the counts to sum to 1. Errors when there are no fixations.
pub fn density_grid(points: &[(f64, f64)], bins: usize) -> Result<Grid> {
    if points.is_empty() {
        return Err(Error::EmptyScanpath);
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bins must be >= 1".into()));
    }
    let mut grid = Grid::zeros(bins, bins);
    for &(x, y) in points {
        let col = ((x * bins as f64).floor() as usize).min(bins - 1);
        let row = ((y * bins as f64).floor() as usize).min(bins - 1);
        let v = grid.get(row, col);
        grid.set(row, col, v + 1.0);
    }
    let total = points.len() as f64;
    for v in grid.values_mut() {
        *v /= total;
    }
    Ok(grid)
}
