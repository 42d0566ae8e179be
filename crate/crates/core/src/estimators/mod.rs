//! Pitch estimators.
//!
//! * [`mmle_harmonic`]: nonlinear least squares under the harmonic model,
//!   i.e. the misspecified MLE;
//! * [`anls`]: harmonic summation of the periodogram;
//! * [`unstructured_mle`]: `K` unrelated sinusoids;
//! * [`chs_plugin`]: the closest harmonic spectrum of the unstructured fit;
//! * [`ml_map_hybrid`]: joint ML/MAP under Gaussian inharmonicity.
//!
//! All of them concentrate the complex amplitudes out by least squares, so
//! only frequencies are searched.

mod harmonic;
mod mlmap;
mod optim;
mod unstructured;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::signal::Sinusoid;

pub use harmonic::{anls, harmonic_local_minima, mmle_harmonic, nls_criterion, HarmonicCriterion};
pub use mlmap::ml_map_hybrid;
pub use optim::{golden_section, nelder_mead, Minimum};
pub use unstructured::{chs_plugin, periodogram_peaks, unstructured_mle};

/// Search settings shared by the estimators. Unset fields take defaults
/// that depend on the signal length `N` and model order `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    /// Lower end of the `ω₀` grid; default `2π/N`.
    pub omega_min: Option<f64>,
    /// Upper end of the `ω₀` grid (exclusive); default `π/L`.
    pub omega_max: Option<f64>,
    /// Target `ω₀` grid spacing; default `π/(10 L N)`. The grid is the
    /// power-of-two FFT grid at least this fine.
    pub resolution: Option<f64>,
    /// Final accuracy of the local refinement, radians.
    pub tolerance: f64,
    /// Iteration cap for each local refinement.
    pub max_iterations: usize,
    /// Periodogram size for peak picking; default the power of two `≥ 8N`.
    pub periodogram_size: Option<usize>,
    /// Minimum distance between picked peaks; default
    /// `max(ω̂₀/2, 2π/N)` with `ω̂₀` the coarse harmonic-summation estimate.
    pub min_peak_separation: Option<f64>,
    /// Simplex restarts after the first convergence.
    pub restarts: usize,
    /// Grid minima refined before the best is chosen.
    pub candidates: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            omega_min: None,
            omega_max: None,
            resolution: None,
            tolerance: 1e-10,
            max_iterations: 5000,
            periodogram_size: None,
            min_peak_separation: None,
            restarts: 2,
            candidates: 4,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        if let Some(r) = self.resolution {
            if !(r > 0.0) {
                return Err(invalid("resolution must be positive"));
            }
        }
        if self.max_iterations == 0 || self.candidates == 0 {
            return Err(invalid("max_iterations and candidates must be positive"));
        }
        for bound in [self.omega_min, self.omega_max].into_iter().flatten() {
            if !(bound > 0.0 && bound < PI) {
                return Err(invalid(format!("ω₀ search bound {bound} outside (0, π)")));
            }
        }
        if let Some(s) = self.min_peak_separation {
            if !(s > 0.0) {
                return Err(invalid("minimum peak separation must be positive"));
            }
        }
        Ok(())
    }

    pub(crate) fn omega_range(&self, n: usize, order: usize) -> Result<(f64, f64)> {
        self.validate()?;
        let lo = self.omega_min.unwrap_or(2.0 * PI / n as f64);
        let hi = self.omega_max.unwrap_or(PI / order as f64);
        if order as f64 * hi > PI * (1.0 + 1e-12) {
            return Err(invalid(format!(
                "upper grid bound {hi} puts harmonic {order} above π"
            )));
        }
        if !(lo < hi) {
            return Err(invalid(format!("empty ω₀ range [{lo}, {hi})")));
        }
        Ok((lo, hi))
    }

    pub(crate) fn grid_size(&self, n: usize, order: usize) -> usize {
        let res = self
            .resolution
            .unwrap_or(PI / (10.0 * order as f64 * n as f64));
        ((2.0 * PI / res).ceil() as usize).max(n).next_power_of_two()
    }
}

/// Convergence information of an estimate.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Final value of the optimized criterion, in the estimator's own sign
    /// convention.
    pub criterion: f64,
    pub converged: bool,
    /// Why the search did not converge, or other remarks.
    pub message: Option<String>,
    /// Best criterion value after each refinement iteration.
    pub history: Vec<f64>,
}

/// Output of every estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateResult {
    pub omega0_hat: f64,
    /// Fitted components, by increasing frequency.
    pub components: Vec<Sinusoid>,
    pub noise_var_hat: f64,
    /// `Δ̂_k = ω̂_k − k ω̂₀`, ML/MAP only.
    pub delta_hat: Option<Vec<f64>>,
    pub diagnostics: Diagnostics,
}

impl EstimateResult {
    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frequency).collect()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.amplitude).collect()
    }
}

/// `Σ_k k ω_k / Σ_k k²`, the least-squares harmonic fit of `K` frequencies.
pub fn weighted_fundamental(freqs: &[f64]) -> f64 {
    let (num, den) = freqs.iter().enumerate().fold((0.0, 0.0), |(n, d), (i, &w)| {
        let k = (i + 1) as f64;
        (n + k * w, d + k * k)
    });
    num / den
}

pub(crate) fn components_from_fit(
    freqs: &[f64],
    fit: &crate::signal::ProjectionFit,
) -> Vec<Sinusoid> {
    freqs
        .iter()
        .zip(&fit.coefficients)
        .map(|(&w, c)| Sinusoid {
            amplitude: c.norm(),
            phase: c.arg(),
            frequency: w,
        })
        .collect()
}
