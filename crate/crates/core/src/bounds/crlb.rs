use super::derivatives::gradient_products;
use super::linalg::spd_inverse;
use crate::error::{invalid, Result};
use crate::signal::HarmonicModelParams;

fn check_n(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(invalid("at least two samples required"));
    }
    Ok(n as f64)
}

fn weighted_power(amplitudes: &[f64]) -> f64 {
    amplitudes
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1) as f64).powi(2) * r * r)
        .sum()
}

/// Large-`N` CRLB of `ω₀` in the harmonic model:
/// `6σ² / (N(N²−1) Σ_k k² r_k²)`.
pub fn crlb_harmonic_asymptotic(amplitudes: &[f64], n: usize, sigma2: f64) -> Result<f64> {
    let nf = check_n(n)?;
    Ok(6.0 * sigma2 / (nf * (nf * nf - 1.0) * weighted_power(amplitudes)))
}

/// Diagonal of the exact harmonic-model CRLB `(σ²/2) J⁻¹` at `params`,
/// ordered as `(ω₀, φ₁..φ_L, r₁..r_L)`.
pub fn crlb_harmonic_exact(params: &HarmonicModelParams, n: usize, sigma2: f64) -> Result<Vec<f64>> {
    check_n(n)?;
    params.validate()?;
    let (j, _) = gradient_products(params, n, None);
    let fim = j * (2.0 / sigma2);
    let (inv, _) = spd_inverse(&fim, "harmonic Fisher information", 1e-15)?;
    Ok(inv.diagonal().iter().copied().collect())
}

/// Large-`N` CRLB of an unstructured sinusoidal model.
#[derive(Debug, Clone, PartialEq)]
pub struct UnstructuredCrlb {
    /// `6σ² / (N(N²−1) r_k²)`.
    pub frequency: Vec<f64>,
    /// `σ² / (2N)`.
    pub amplitude: Vec<f64>,
}

pub fn crlb_unstructured(amplitudes: &[f64], n: usize, sigma2: f64) -> Result<UnstructuredCrlb> {
    let nf = check_n(n)?;
    if amplitudes.iter().any(|&r| !(r > 0.0)) {
        return Err(invalid("amplitudes must be positive"));
    }
    let cubic = nf * (nf * nf - 1.0);
    Ok(UnstructuredCrlb {
        frequency: amplitudes.iter().map(|r| 6.0 * sigma2 / (cubic * r * r)).collect(),
        amplitude: vec![sigma2 / (2.0 * nf); amplitudes.len()],
    })
}

/// Asymptotic variance of the CHS plug-in estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChsVariance {
    pub value: f64,
    /// Harmonic CRLB part.
    pub harmonic_term: f64,
    /// Part caused by inharmonicity; decays only as `1/N`.
    pub inharmonic_term: f64,
    /// The deviations from the best harmonic fit are below `ω̃₀/(2K+3)`.
    /// When false the closest harmonic spectrum may assign components to
    /// other harmonics and the formula does not apply.
    pub premise_holds: bool,
}

/// Asymptotic variance of the CHS plug-in estimator for components with
/// amplitudes `r_k` at frequencies `ω_k`, `k = 1..K`:
///
/// ```text
/// 6σ²/(N(N²−1)S) + 2σ²/(N S⁴) Σ_k k² r_k² (Σ_ℓ ℓ r_ℓ² (ℓ ω_k − k ω_ℓ))²
/// ```
///
/// with `S = Σ_k k² r_k²`.
pub fn chs_asymptotic_var(
    amplitudes: &[f64],
    frequencies: &[f64],
    n: usize,
    sigma2: f64,
) -> Result<ChsVariance> {
    let nf = check_n(n)?;
    if amplitudes.len() != frequencies.len() || amplitudes.is_empty() {
        return Err(invalid("need matching, non-empty amplitudes and frequencies"));
    }
    let s = weighted_power(amplitudes);
    let harmonic_term = 6.0 * sigma2 / (nf * (nf * nf - 1.0) * s);
    let mut sum = 0.0;
    for (k, (&rk, &wk)) in amplitudes.iter().zip(frequencies).enumerate() {
        let kf = (k + 1) as f64;
        let inner: f64 = amplitudes
            .iter()
            .zip(frequencies)
            .enumerate()
            .map(|(l, (&rl, &wl))| {
                let lf = (l + 1) as f64;
                lf * rl * rl * (lf * wk - kf * wl)
            })
            .sum();
        sum += kf * kf * rk * rk * inner * inner;
    }
    let inharmonic_term = 2.0 * sigma2 * sum / (nf * s.powi(4));

    let w0 = crate::estimators::weighted_fundamental(frequencies);
    let k = frequencies.len() as f64;
    let max_dev = frequencies
        .iter()
        .enumerate()
        .map(|(i, w)| (w - (i + 1) as f64 * w0).abs())
        .fold(0.0, f64::max);
    Ok(ChsVariance {
        value: harmonic_term + inharmonic_term,
        harmonic_term,
        inharmonic_term,
        premise_holds: max_dev < w0 / (2.0 * k + 3.0),
    })
}

/// Mean squared error of an estimator of `pseudo_value` judged against
/// `reference`: the covariance bound plus the squared bias.
pub fn mse_misspecified(bound: f64, pseudo_value: f64, reference: f64) -> f64 {
    bound + (pseudo_value - reference).powi(2)
}
