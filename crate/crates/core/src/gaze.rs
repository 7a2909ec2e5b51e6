//! Gaze domain types: fixations, scanpaths and saccade vectors.
//!
//! Coordinates are stored normalized to `[0, 1]` in both axes; pixel inputs
//! are divided by `(width - 1, height - 1)` at ingestion time. All types are
//! immutable after construction and every operation here is a pure function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::FixationMap;
use crate::scalar::Scalar;

/// A single gaze fixation in normalized image coordinates.
///
/// `t` is milliseconds since stimulus onset, `dur` the fixation duration in
/// milliseconds; both are optional because most predictors emit neither.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fixation<T> {
    pub x: T,
    pub y: T,
    pub t: Option<T>,
    pub dur: Option<T>,
}

impl<T: Scalar> Fixation<T> {
    pub fn new(x: T, y: T) -> Self {
        Fixation {
            x,
            y,
            t: None,
            dur: None,
        }
    }

    pub fn with_timing(x: T, y: T, t: Option<T>, dur: Option<T>) -> Self {
        Fixation { x, y, t, dur }
    }

    /// Euclidean distance to another fixation.
    pub fn distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Ordered fixation sequence over one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scanpath<T> {
    pub fixations: Vec<Fixation<T>>,
    pub image_id: String,
    pub image_width: u32,
    pub image_height: u32,
}

impl<T: Scalar> Scanpath<T> {
    /// Builds a scanpath; errors on an empty fixation list.
    pub fn new(
        fixations: Vec<Fixation<T>>,
        image_id: impl Into<String>,
        image_width: u32,
        image_height: u32,
    ) -> Result<Self> {
        if fixations.is_empty() {
            return Err(Error::EmptyScanpath);
        }
        Ok(Scanpath {
            fixations,
            image_id: image_id.into(),
            image_width,
            image_height,
        })
    }

    pub fn len(&self) -> usize {
        self.fixations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fixations.is_empty()
    }
}

/// Difference between two consecutive fixations, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaccadeVector<T> {
    pub dx: T,
    pub dy: T,
}

impl<T: Scalar> SaccadeVector<T> {
    pub fn new(dx: T, dy: T) -> Self {
        SaccadeVector { dx, dy }
    }

    /// Euclidean length of the saccade.
    pub fn norm(&self) -> T {
        (self.dx * self.dx + self.dy * self.dy).sqrt()
    }

    /// Euclidean distance between two saccade vectors.
    pub fn distance(&self, other: &Self) -> T {
        let dx = self.dx - other.dx;
        let dy = self.dy - other.dy;
        (dx * dx + dy * dy).sqrt()
    }

    /// Unsigned angle between two saccades in `[0, pi]`.
    ///
    /// A zero-length saccade has no direction; by convention its angle
    /// difference against anything is zero.
    pub fn angle_between(&self, other: &Self) -> T {
        if self.dx == other.dx && self.dy == other.dy {
            return T::zero();
        }
        let na = self.norm();
        let nb = other.norm();
        if na == T::zero() || nb == T::zero() {
            return T::zero();
        }
        let cos = ((self.dx * other.dx + self.dy * other.dy) / (na * nb))
            .max(-T::one())
            .min(T::one());
        cos.acos()
    }
}

/// Maps a normalized coordinate pair onto a grid cell.
///
/// Column is `round(x * (grid_w - 1))`, row is `round(y * (grid_h - 1))`,
/// rounding half away from zero. Inputs are expected in `[0, 1]`; anything
/// else has been rejected at ingestion.
pub fn fixation_cell<T: Scalar>(x: T, y: T, grid_w: usize, grid_h: usize) -> (usize, usize) {
    let col = (x * T::from_f64_lossy((grid_w - 1) as f64)).round();
    let row = (y * T::from_f64_lossy((grid_h - 1) as f64)).round();
    let col = col.to_f64_lossy().clamp(0.0, (grid_w - 1) as f64) as usize;
    let row = row.to_f64_lossy().clamp(0.0, (grid_h - 1) as f64) as usize;
    (row, col)
}

/// Rasterizes a scanpath into a binary fixation map.
///
/// Each fixation sets exactly one cell; duplicates collapse to a single set
/// cell. Errors on an empty scanpath or zero-sized grid.
pub fn rasterize<T: Scalar>(
    scanpath: &Scanpath<T>,
    grid_w: usize,
    grid_h: usize,
) -> Result<FixationMap> {
    if scanpath.fixations.is_empty() {
        return Err(Error::EmptyScanpath);
    }
    if grid_w == 0 || grid_h == 0 {
        return Err(Error::shape("grid dims >= 1", format!("{grid_w}x{grid_h}")));
    }
    let mut map = FixationMap::zeros(grid_w, grid_h);
    for f in &scanpath.fixations {
        let (row, col) = fixation_cell(f.x, f.y, grid_w, grid_h);
        map.set(row, col);
    }
    Ok(map)
}

/// Consecutive fixation differences, one vector per saccade.
///
/// Errors when the scanpath has fewer than two fixations. Zero-length
/// saccades are preserved.
pub fn saccade_vectors<T: Scalar>(scanpath: &Scanpath<T>) -> Result<Vec<SaccadeVector<T>>> {
    if scanpath.fixations.len() < 2 {
        return Err(Error::NoSaccades);
    }
    Ok(scanpath
        .fixations
        .windows(2)
        .map(|w| SaccadeVector::new(w[1].x - w[0].x, w[1].y - w[0].y))
        .collect())
}
