use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::derivatives::gradient_products;
use super::linalg::spd_inverse;
use super::pseudo::PseudoTrueResult;
use crate::error::{invalid, Result};
use crate::signal::{ComplexSignal, HarmonicModelParams, Sinusoid};

/// Misspecified CRLB `A⁻¹ F A⁻¹` at the pseudo-true parameter.
#[derive(Debug, Clone)]
pub struct McrlbExact {
    /// Bound on the variance of `ω₀`.
    pub omega0: f64,
    /// Diagonal of `A⁻¹ F A⁻¹`, ordered `(ω₀, φ₁..φ_L, r₁..r_L)`.
    pub diagonal: Vec<f64>,
    pub matrix: DMatrix<f64>,
    /// Reciprocal condition number of `−A` after diagonal scaling.
    pub rcond: f64,
}

/// Misspecified CRLB for estimators of the pseudo-true parameter.
///
/// With `ε_t = μ_t(θ₀) − x_t`,
/// `F = (2σ²/σ̄⁴) Σ_t Re(∇μ_t^* ∇μ_tᵀ)`,
/// `F̃ = (2/σ̄²) Σ_t Re(ε_t^* ∇²μ_t)` and `A = −(σ̄²/σ²) F − F̃`.
/// The pseudo-true result must come from [`pseudo_true`](super::pseudo_true)
/// on the same `x`.
pub fn mcrlb_exact(theta0: &PseudoTrueResult, x: &ComplexSignal, sigma2: f64) -> Result<McrlbExact> {
    if !(sigma2 > 0.0) {
        return Err(invalid("noise variance must be positive"));
    }
    let n = x.len();
    if theta0.residual.len() != n {
        return Err(invalid("pseudo-true parameter computed for a different signal length"));
    }
    let p = &theta0.theta0;
    let residual: Vec<_> = p
        .waveform(n)
        .iter()
        .zip(x.samples())
        .map(|(m, v)| m - v)
        .collect();
    let sbar = sigma2 + residual.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    let (j, h) = gradient_products(p, n, Some(&residual));
    let f = &j * (2.0 * sigma2 / (sbar * sbar));
    let f_tilde = &h * (2.0 / sbar);
    let neg_a = &f * (sbar / sigma2) + f_tilde;
    let (inv, rcond) = spd_inverse(&neg_a, "misspecified information matrix A", 1e-15)?;
    let bound = &inv * f * &inv;
    let bound = 0.5 * (&bound + bound.transpose());
    Ok(McrlbExact {
        omega0: bound[(0, 0)],
        diagonal: bound.diagonal().iter().copied().collect(),
        matrix: bound,
        rcond,
    })
}

/// Large-`N` misspecified CRLB of `ω₀` and its constituent sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McrlbAsymptotic {
    pub value: f64,
    pub c: f64,
    pub z: f64,
    pub d: f64,
    pub e: f64,
    /// `ω₀ < 10 · 2π/N`: too close to zero for the expansion to be trusted.
    pub low_frequency: bool,
}

/// `σ² (C + E) / (C − E + Z + D)²`, evaluated from the pseudo-true
/// parameter `theta0` and the true components `truth` (harmonic `k` is
/// `truth[k-1]`).
pub fn mcrlb_asymptotic(
    theta0: &HarmonicModelParams,
    truth: &[Sinusoid],
    sigma2: f64,
    n: usize,
) -> Result<McrlbAsymptotic> {
    let order = theta0.order();
    if truth.len() != order {
        return Err(invalid("pseudo-true order differs from the number of components"));
    }
    let nf = n as f64;
    let w0 = theta0.omega0;
    let s_model: f64 = theta0
        .amplitudes
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1) as f64).powi(2) * r * r)
        .sum();
    let c = nf * (nf * nf - 1.0) * s_model / 6.0;

    let mut z = -2.0 * s_model * nf * (nf - 1.0) * (2.0 * nf - 1.0) / 6.0;
    let mut d_inner = nf * (nf - 1.0) / 2.0 * s_model;
    let mut e = 0.0;
    for k in 0..order {
        let kf = (k + 1) as f64;
        let (r, rbar) = (theta0.amplitudes[k], truth[k].amplitude);
        let phi_b = theta0.phases[k] - truth[k].phase;
        let omega_b = kf * w0 - truth[k].frequency;
        let (mut t2cos, mut tcos, mut tsin) = (0.0, 0.0, 0.0);
        for t in 0..n {
            let tf = t as f64;
            let (s, co) = (phi_b + omega_b * tf).sin_cos();
            t2cos += tf * tf * co;
            tcos += tf * co;
            tsin += tf * s;
        }
        z += 2.0 * kf * kf * r * rbar * t2cos;
        d_inner -= kf * kf * r * rbar * tcos;
        e += 2.0 / nf * kf * kf * rbar * rbar * tsin * tsin;
        e += 2.0 / nf * kf * kf * (rbar * tcos - r * nf * (nf - 1.0) / 2.0).powi(2);
    }
    let d = 2.0 * (nf - 1.0) * d_inner;
    let denom = c - e + z + d;
    Ok(McrlbAsymptotic {
        value: sigma2 * (c + e) / (denom * denom),
        c,
        z,
        d,
        e,
        low_frequency: w0 < 10.0 * 2.0 * PI / nf,
    })
}
