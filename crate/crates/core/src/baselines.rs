//! Baseline scanpath generators: center-bias sampling and winner-takes-all
//! with inhibition of return.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gaze::{Fixation, Scanpath};
use crate::grid::SaliencyMap;
use crate::scalar::Scalar;

/// Spread of the center-bias Gaussian in normalized units.
pub const CENTER_BIAS_STD: f64 = 0.15;

/// Winner-takes-all configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WtaConfig {
    pub n_fixations: usize,
    /// Hard suppression radius in normalized units.
    pub ior_radius: f64,
}

impl Default for WtaConfig {
    fn default() -> Self {
        WtaConfig {
            n_fixations: 8,
            ior_radius: 0.1,
        }
    }
}

/// `n` i.i.d. draws from an isotropic Gaussian at (0.5, 0.5) with std 0.15,
/// rejection-sampled into the unit square.
pub fn center_bias<T: Scalar>(n: usize, seed: u64) -> Result<Scanpath<T>> {
    if n == 0 {
        return Err(Error::EmptyScanpath);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fixations = Vec::with_capacity(n);
    while fixations.len() < n {
        // Box-Muller transform; both coordinates from one pair of uniforms.
        let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.random_range(0.0..1.0);
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        let x = 0.5 + CENTER_BIAS_STD * r * theta.cos();
        let y = 0.5 + CENTER_BIAS_STD * r * theta.sin();
        if (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y) {
            fixations.push(Fixation::new(T::from_f64_lossy(x), T::from_f64_lossy(y)));
        }
    }
    Scanpath::new(fixations, "center-bias", 1, 1)
}

/// Iteratively picks the global saliency argmax (ties: smallest row, then
/// column), emits the cell center in normalized coordinates, and suppresses
/// every cell within `ior_radius` of it. Stops after `n_fixations` picks or
/// when everything is suppressed. Errors on a constant map.
pub fn wta_scanpath<T: Scalar>(s: &SaliencyMap<T>, cfg: &WtaConfig) -> Result<Scanpath<T>> {
    let (w, h) = (s.width(), s.height());
    let first = s.values()[0];
    if s.values().iter().all(|&v| v == first) {
        return Err(Error::ConstantSaliency);
    }
    if cfg.n_fixations == 0 || cfg.ior_radius <= 0.0 {
        return Err(Error::InvalidConfig(
            "wta needs n_fixations >= 1 and ior_radius > 0".into(),
        ));
    }

    // Cell (r, c) has normalized center ((c + 0.5) / w, (r + 0.5) / h).
    let center = |row: usize, col: usize| -> (f64, f64) {
        ((col as f64 + 0.5) / w as f64, (row as f64 + 0.5) / h as f64)
    };

    let mut values: Vec<f64> = s.values().iter().map(|v| v.to_f64_lossy()).collect();
    let mut fixations = Vec::with_capacity(cfg.n_fixations);
    for _ in 0..cfg.n_fixations {
        let mut best = f64::NEG_INFINITY;
        let mut best_cell = None;
        for row in 0..h {
            for col in 0..w {
                let v = values[row * w + col];
                if v > best {
                    best = v;
                    best_cell = Some((row, col));
                }
            }
        }
        let Some((row, col)) = best_cell else { break };
        if best == f64::NEG_INFINITY {
            break;
        }
        let (cx, cy) = center(row, col);
        fixations.push(Fixation::new(T::from_f64_lossy(cx), T::from_f64_lossy(cy)));
        for r2 in 0..h {
            for c2 in 0..w {
                let (ox, oy) = center(r2, c2);
                let d = ((ox - cx).powi(2) + (oy - cy).powi(2)).sqrt();
                if d <= cfg.ior_radius {
                    values[r2 * w + c2] = f64::NEG_INFINITY;
                }
            }
        }
    }
    Scanpath::new(fixations, "wta", w as u32, h as u32)
}
