//! MultiMatch scanpath similarity.
//!
//! Both scanpaths are turned into saccade-vector sequences, aligned with
//! [`align`](super::align), and compared per aligned pair on shape,
//! direction, length, position and (when durations exist) duration. Each
//! component similarity is one minus the mean per-pair dissimilarity. The
//! aggregate score always averages the first four components; duration is
//! reported but never folded in.
//!
//! Normalization keeps every component in `[0, 1]` for in-bounds scanpaths:
//! shape divides by `2*sqrt(2)` (the largest possible difference between two
//! saccade vectors with components in `[-1, 1]`), length and position divide
//! by `sqrt(2)` (the unit-square diagonal), direction divides by pi.

use crate::error::{Error, Result};
use crate::gaze::{saccade_vectors, Scanpath};
use crate::metrics::align::align;
use crate::scalar::Scalar;

/// The five component similarities plus the aggregate score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiMatchResult<T> {
    pub shape: T,
    pub direction: T,
    pub length: T,
    pub position: T,
    pub duration: Option<T>,
    pub score: T,
}

/// Compares two scanpaths; both need at least two fixations.
pub fn multimatch<T: Scalar>(a: &Scanpath<T>, b: &Scanpath<T>) -> Result<MultiMatchResult<T>> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::NoSaccades);
    }
    let sa = saccade_vectors(a)?;
    let sb = saccade_vectors(b)?;
    let alignment = align(&sa, &sb)?;
    let npairs = T::from_f64_lossy(alignment.pairs.len() as f64);

    let sqrt2 = T::from_f64_lossy(std::f64::consts::SQRT_2);
    let two_sqrt2 = sqrt2 + sqrt2;
    let pi = T::PI();

    let mut shape_dis = T::zero();
    let mut direction_dis = T::zero();
    let mut length_dis = T::zero();
    let mut position_dis = T::zero();
    let mut duration_dis = T::zero();
    let mut duration_defined = true;

    for &(i, j) in &alignment.pairs {
        let u = sa[i];
        let v = sb[j];
        shape_dis += u.distance(&v) / two_sqrt2;
        direction_dis += u.angle_between(&v) / pi;
        length_dis += (u.norm() - v.norm()).abs() / sqrt2;

        // Saccade k ends at fixation k+1.
        let end_a = a.fixations[i + 1];
        let end_b = b.fixations[j + 1];
        position_dis += end_a.distance(&end_b) / sqrt2;

        match (end_a.dur, end_b.dur) {
            (Some(da), Some(db)) => {
                let m = da.max(db);
                duration_dis += if m == T::zero() {
                    T::zero()
                } else {
                    (da - db).abs() / m
                };
            }
            _ => duration_defined = false,
        }
    }

    let shape = T::one() - shape_dis / npairs;
    let direction = T::one() - direction_dis / npairs;
    let length = T::one() - length_dis / npairs;
    let position = T::one() - position_dis / npairs;
    let duration = if duration_defined {
        Some(T::one() - duration_dis / npairs)
    } else {
        None
    };
    let four = T::from_f64_lossy(4.0);
    let score = (shape + direction + length + position) / four;

    Ok(MultiMatchResult {
        shape,
        direction,
        length,
        position,
        duration,
        score,
    })
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

    #[test]
    fn identity_scores_one() {
        let a = path(&[(0.1, 0.2), (0.5, 0.4), (0.9, 0.8), (0.3, 0.6)]);
        let r = multimatch(&a, &a).unwrap();
        assert_eq!(r.shape, 1.0);
        assert_eq!(r.direction, 1.0);
        assert_eq!(r.length, 1.0);
        assert_eq!(r.position, 1.0);
        assert_eq!(r.score, 1.0);
        assert_eq!(r.duration, None);
    }

    #[test]
    fn translation_only_moves_position() {
        let a = path(&[(0.1, 0.2), (0.4, 0.5), (0.6, 0.3)]);
        let b = path(&[(0.2, 0.2), (0.5, 0.5), (0.7, 0.3)]);
        let r = multimatch(&a, &b).unwrap();
        // Saccades agree only up to rounding of the coordinate subtraction,
        // and acos is ill-conditioned near 1, so direction sees ~1e-8 noise.
        assert!((r.shape - 1.0).abs() < 1e-12);
        assert!((r.direction - 1.0).abs() < 1e-8);
        assert!((r.length - 1.0).abs() < 1e-12);
        let expected_pos = 1.0 - 0.1 / std::f64::consts::SQRT_2;
        assert!((r.position - expected_pos).abs() < 1e-12);
        assert!((r.score - (3.0 + expected_pos) / 4.0).abs() < 1e-8);
    }

    #[test]
    fn orthogonal_single_saccade_closed_form() {
        let a = path(&[(0.0, 0.0), (1.0, 0.0)]);
        let b = path(&[(0.0, 0.0), (0.0, 1.0)]);
        let r = multimatch(&a, &b).unwrap();
        assert!((r.direction - 0.5).abs() < 1e-12);
        assert!((r.length - 1.0).abs() < 1e-12);
        assert!((r.shape - 0.5).abs() < 1e-12);
        assert!(r.position.abs() < 1e-12);
        assert!((r.score - 0.5).abs() < 1e-12);
    }

    #[test]
    fn too_short_inputs_error() {
        let a = path(&[(0.1, 0.1)]);
        let b = path(&[(0.0, 0.0), (0.5, 0.5)]);
        assert!(multimatch(&a, &b).is_err());
        assert!(multimatch(&b, &a).is_err());
    }

    #[test]
    fn duration_reported_but_not_scored() {
        let mk = |durs: [f64; 2]| {
            Scanpath::new(
                vec![
                    Fixation::with_timing(0.1, 0.1, Some(0.0), Some(durs[0])),
                    Fixation::with_timing(0.5, 0.5, Some(100.0), Some(durs[1])),
                ],
                "t",
                10,
                10,
            )
            .unwrap()
        };
        let a = mk([100.0, 200.0]);
        let b = mk([100.0, 100.0]);
        let r = multimatch(&a, &b).unwrap();
        // one aligned pair, end fixations dur 200 vs 100
        assert!((r.duration.unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(
            r.score,
            (r.shape + r.direction + r.length + r.position) / 4.0
        );
    }

    #[test]
    fn duration_absent_when_either_side_lacks_it() {
        let a = path(&[(0.1, 0.1), (0.5, 0.5)]);
        let b = Scanpath::new(
            vec![
                Fixation::with_timing(0.1, 0.1, Some(0.0), Some(50.0)),
                Fixation::with_timing(0.4, 0.5, Some(80.0), Some(60.0)),
            ],
            "t",
            10,
            10,
        )
        .unwrap();
        assert_eq!(multimatch(&a, &b).unwrap().duration, None);
    }

    #[test]
    fn zero_durations_count_as_identical() {
        let mk = || {
            Scanpath::new(
                vec![
                    Fixation::with_timing(0.1, 0.1, None, Some(0.0)),
                    Fixation::with_timing(0.6, 0.2, None, Some(0.0)),
                ],
                "t",
                10,
                10,
            )
            .unwrap()
        };
        let r = multimatch(&mk(), &mk()).unwrap();
        assert_eq!(r.duration, Some(1.0));
    }
}
