//! Scanpath prediction and evaluation toolkit.
//!
//! The crate bundles a canonical data model for eye-movement scanpaths and
//! saliency maps, the NSS / Congruency / MultiMatch metrics, dataset length
//! statistics, two baseline scanpath generators, and a small fully
//! convolutional scanpath regressor trained with MSE and Adam.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases at the crate root fix `f64`, which is what the CLI uses.
//!
//! ```
//! use gazetk::{Fixation, Scanpath};
//! use gazetk::metrics::multimatch;
//!
//! let a = Scanpath::new(
//!     vec![Fixation::new(0.1, 0.2), Fixation::new(0.7, 0.4)], "a", 640, 480)?;
//! let b = Scanpath::new(
//!     vec![Fixation::new(0.2, 0.2), Fixation::new(0.8, 0.4)], "b", 640, 480)?;
//! let result = multimatch(&a, &b)?;
//! assert!(result.score > 0.9);
//! # Ok::<(), gazetk::Error>(())
//! ```

pub mod baselines;
pub mod error;
pub mod gaze;
pub mod grid;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Fixation in `f64`.
pub type Fixation = gaze::Fixation<f64>;
/// Scanpath in `f64`.
pub type Scanpath = gaze::Scanpath<f64>;
/// Saccade vector in `f64`.
pub type SaccadeVector = gaze::SaccadeVector<f64>;
/// Dense grid in `f64`.
pub type Grid = grid::Grid<f64>;
/// Saliency map in `f64`.
pub type SaliencyMap = grid::SaliencyMap<f64>;
/// Binary fixation map (scalar-free).
pub type FixationMap = grid::FixationMap;
/// MultiMatch result in `f64`.
pub type MultiMatchResult = metrics::MultiMatchResult<f64>;
/// 4-D tensor in `f64`.
pub type Tensor4 = tensor::Tensor4<f64>;
/// Scanpath regressor in `f64`.
pub type Model = model::Model<f64>;
/// Model prediction in `f64`.
pub type PredictedScanpath = model::PredictedScanpath<f64>;
/// Dataset record in `f64`.
pub type DatasetRecord = ingest::DatasetRecord<f64>;
