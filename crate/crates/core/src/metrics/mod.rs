//! Evaluation metrics: NSS, Congruency and MultiMatch.
//!
//! NSS and Congruency are hybrid metrics comparing a scanpath against a
//! saliency map; MultiMatch compares two scanpaths as sequences of saccade
//! vectors aligned on a monotone lattice.

mod align;
mod congruency;
mod multimatch;
mod nss;
mod otsu;

pub use align::{align, alignment_cost, Alignment};
pub use congruency::congruency;
pub use multimatch::{multimatch, MultiMatchResult};
pub use nss::{normalize_saliency, nss};
pub use otsu::{otsu_threshold, otsu_threshold_with_bins, DEFAULT_OTSU_BINS};
