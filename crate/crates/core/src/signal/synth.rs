use std::f64::consts::PI;

use num_complex::Complex64;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::types::{ComplexSignal, SinusoidSet, StochasticPitchModel};
use crate::error::{invalid, Result};
use crate::rng::StreamSeed;

/// Samples `x_t = Σ_k r_k exp(i φ_k + i ω_k t)` for `t = 0..n-1`.
pub fn synth_sinusoids(set: &SinusoidSet, n: usize) -> Result<ComplexSignal> {
    if n == 0 {
        return Err(invalid("signal length must be at least 1"));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for c in set.components() {
        for (t, x) in out.iter_mut().enumerate() {
            *x += Complex64::from_polar(c.amplitude, c.phase + c.frequency * t as f64);
        }
    }
    ComplexSignal::new(out)
}

/// Stiff-string partial frequencies `ω_k = k ω₀ √(1 + k² β)`, `k = 1..K`.
pub fn string_model_frequencies(omega0: f64, beta: f64, components: usize) -> Result<Vec<f64>> {
    if components == 0 {
        return Err(invalid("at least one component required"));
    }
    if !(omega0 > 0.0) || !(beta >= 0.0) || !beta.is_finite() {
        return Err(invalid("string model needs omega0 > 0 and beta >= 0"));
    }
    let freqs: Vec<f64> = (1..=components)
        .map(|k| {
            let k = k as f64;
            k * omega0 * (1.0 + k * k * beta).sqrt()
        })
        .collect();
    if let Some(&top) = freqs.last() {
        if top >= PI {
            return Err(invalid(format!(
                "partial {components} at {top} reaches or exceeds π"
            )));
        }
    }
    Ok(freqs)
}

/// Inharmonicity `Δ_k = ω_k − k ω₀` of a frequency vector.
pub fn inharmonicity(omega0: f64, freqs: &[f64]) -> Vec<f64> {
    freqs
        .iter()
        .enumerate()
        .map(|(i, &w)| w - (i + 1) as f64 * omega0)
        .collect()
}

/// Draws `K` independent `N(0, σ²_Δ)` inharmonicity values.
pub fn draw_inharmonicity(model: &StochasticPitchModel, seed: StreamSeed) -> Vec<f64> {
    let k = model.components();
    if model.sigma2_delta == 0.0 {
        return vec![0.0; k];
    }
    let normal = Normal::new(0.0, model.sigma2_delta.sqrt()).expect("finite std");
    let mut rng = seed.rng();
    (0..k).map(|_| normal.sample(&mut rng)).collect()
}

/// Adds circularly symmetric white Gaussian noise of variance `sigma2`
/// (each of the real and imaginary parts has variance `sigma2 / 2`).
pub fn add_noise(x: &ComplexSignal, sigma2: f64, seed: StreamSeed) -> Result<ComplexSignal> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(invalid("noise variance must be positive"));
    }
    let scale = (sigma2 / 2.0).sqrt();
    let mut rng = seed.rng();
    let samples = x
        .samples()
        .iter()
        .map(|&z| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            z + Complex64::new(scale * re, scale * im)
        })
        .collect();
    ComplexSignal::new(samples)
}

/// Noise variance giving `snr_db = 10 log10(Σ r_k² / σ²)`.
pub fn snr_to_noise_var(amplitudes: &[f64], snr_db: f64) -> Result<f64> {
    let power: f64 = amplitudes.iter().map(|r| r * r).sum();
    if !(power > 0.0) {
        return Err(invalid("at least one nonzero amplitude required"));
    }
    if !snr_db.is_finite() {
        return Err(invalid("SNR must be finite"));
    }
    Ok(power / 10f64.powf(snr_db / 10.0))
}

/// Amplitudes `r_k = exp(−ρ (k − K/2)²)`, `k = 1..K`.
pub fn gaussian_bell_amplitudes(components: usize, rho: f64) -> Vec<f64> {
    let half = components as f64 / 2.0;
    (1..=components)
        .map(|k| (-rho * (k as f64 - half).powi(2)).exp())
        .collect()
}
