use nalgebra::{DMatrix, DVector};

use super::optim::nelder_mead;
use super::unstructured::{projection_criterion, refined_peaks};
use super::{components_from_fit, weighted_fundamental, Diagnostics, EstimateResult, SearchConfig};
use crate::error::{invalid, Error, Result};
use crate::signal::{ls_amp_phase, ComplexSignal};

/// Orthonormal basis of the complement of `(1, 2, …, K)` in `ℝᴷ`, as the
/// last `K − 1` columns of the Householder reflection sending `e₁` to the
/// normalized weight vector.
fn complement_basis(k: usize) -> DMatrix<f64> {
    let w = DVector::from_fn(k, |i, _| (i + 1) as f64).normalize();
    let mut u = w.clone();
    u[0] -= 1.0;
    let norm = u.norm();
    let h = if norm < 1e-15 {
        DMatrix::identity(k, k)
    } else {
        let u = u / norm;
        DMatrix::identity(k, k) - 2.0 * &u * u.transpose()
    };
    h.columns(1, k - 1).into_owned()
}

/// Hybrid ML/MAP estimate under Gaussian inharmonicity of variance
/// `sigma2_delta`.
///
/// Maximizes `ψ(ω) = −N log Σ(ω) − ν(ω)/(2σ²_Δ)` over `K` free frequencies,
/// where `Σ(ω)` is the least-squares residual power and
/// `ν(ω) = Σ_k (ω_k − k ω₀(ω))²` with `ω₀(ω) = Σ k ω_k / Σ k²`.
///
/// The search runs in the coordinates `(ω₀, z)` with
/// `ω = ω₀ (1..K) + s B z`, `B` an orthonormal basis of the complement of
/// `(1..K)`, so that `ν = s² ‖z‖²`. The scale `s` combines the prior width
/// with the typical frequency error, which keeps the simplex well shaped in
/// both the harmonic (`σ²_Δ → 0`) and unstructured (`σ²_Δ → ∞`) limits.
pub fn ml_map_hybrid(
    y: &ComplexSignal,
    components: usize,
    sigma2_delta: f64,
    cfg: &SearchConfig,
) -> Result<EstimateResult> {
    cfg.validate()?;
    if !(sigma2_delta > 0.0 && sigma2_delta.is_finite()) {
        return Err(invalid("inharmonicity variance must be positive and finite"));
    }
    let k = components;
    let n = y.len();
    let nf = n as f64;
    let init = refined_peaks(y, k, cfg)?;
    let fit0 = ls_amp_phase(y, &init)?;
    let noise = fit0.residual_power.max(1e-300);
    let amps = fit0.amplitudes();
    let mean_power = amps.iter().map(|r| r * r).sum::<f64>() / k as f64;
    let weighted_power: f64 = amps
        .iter()
        .enumerate()
        .map(|(i, r)| ((i + 1) as f64).powi(2) * r * r)
        .sum();
    let cubic = nf * (nf * nf - 1.0);
    let v_typ = (6.0 * noise / (cubic * mean_power.max(1e-300))).max(1e-30);
    let s = 1.0 / (1.0 / v_typ + 1.0 / sigma2_delta).sqrt();
    let omega0_std = (6.0 * noise / (cubic * weighted_power.max(1e-300))).sqrt();

    let basis = if k > 1 { complement_basis(k) } else { DMatrix::zeros(1, 0) };
    let weights = DVector::from_fn(k, |i, _| (i + 1) as f64);
    let to_freqs = |x: &[f64]| -> Vec<f64> {
        let z = DVector::from_column_slice(&x[1..]);
        let w = &weights * x[0] + (&basis * z) * s;
        w.iter().copied().collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let w = to_freqs(x);
        let captured = projection_criterion(y.samples(), &w);
        if !captured.is_finite() {
            return f64::INFINITY;
        }
        let sigma = (y.energy() / nf + captured).max(1e-300);
        let nu: f64 = x[1..].iter().map(|z| z * z).sum::<f64>() * s * s;
        nf * sigma.ln() + nu / (2.0 * sigma2_delta)
    };

    let w0 = weighted_fundamental(&init);
    let resid = DVector::from_iterator(k, init.iter().enumerate().map(|(i, w)| w - (i + 1) as f64 * w0));
    let shrink = sigma2_delta / (sigma2_delta + v_typ);
    let z0 = basis.transpose() * resid * (shrink / s);
    let mut x0 = vec![w0];
    x0.extend(z0.iter().copied());

    let mut step = vec![(2.0 * omega0_std).clamp(1e-9, 0.01)];
    step.extend(std::iter::repeat_n(1.0, k - 1));
    let mut xtol = vec![cfg.tolerance];
    xtol.extend(std::iter::repeat_n(cfg.tolerance / s, k - 1));

    let mut best = nelder_mead(objective, &x0, &step, &xtol, cfg.max_iterations);
    let mut iterations = best.iterations;
    let mut history = best.history.clone();
    for _ in 0..cfg.restarts {
        let small: Vec<f64> = step.iter().map(|v| 0.1 * v).collect();
        let again = nelder_mead(objective, &best.x, &small, &xtol, cfg.max_iterations);
        iterations += again.iterations;
        history.extend(again.history.iter().map(|v| v.min(best.value)));
        if again.value <= best.value {
            best = again;
        }
    }
    if !best.value.is_finite() {
        return Err(Error::EstimationFailed(
            "frequencies collapsed during refinement".into(),
        ));
    }
    let freqs = to_freqs(&best.x);
    let omega0 = weighted_fundamental(&freqs);
    let delta: Vec<f64> = freqs
        .iter()
        .enumerate()
        .map(|(i, w)| w - (i + 1) as f64 * omega0)
        .collect();
    let fit = ls_amp_phase(y, &freqs).map_err(|e| {
        Error::EstimationFailed(format!("final frequencies not resolvable: {e}"))
    })?;
    Ok(EstimateResult {
        omega0_hat: omega0,
        components: components_from_fit(&freqs, &fit),
        noise_var_hat: fit.residual_power,
        delta_hat: Some(delta),
        diagnostics: Diagnostics {
            iterations,
            criterion: -best.value,
            converged: best.converged,
            message: (!best.converged).then(|| "simplex iteration limit reached".to_string()),
            history: history.into_iter().map(|v| -v).collect(),
        },
    })
}
