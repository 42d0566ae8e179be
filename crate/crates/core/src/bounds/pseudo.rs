use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::derivatives::{gradient_products, mu_gradient};
use crate::error::{invalid, Error, Result};
use crate::estimators::{harmonic_local_minima, HarmonicCriterion, SearchConfig};
use crate::signal::{ls_amp_phase, wrap_phase, ComplexSignal, HarmonicModelParams};

/// Relative cost gap below which a second local minimum makes the
/// pseudo-true parameter ambiguous.
pub const AMBIGUITY_TOLERANCE: f64 = 0.01;

/// Best harmonic approximation of a noiseless signal in ℓ2.
#[derive(Debug, Clone)]
pub struct PseudoTrueResult {
    pub theta0: HarmonicModelParams,
    /// `σ̄² = σ² + (1/N) Σ |ε_t(θ₀)|²`.
    pub sigma2_pseudo: f64,
    /// `(1/N) Σ |ε_t(θ₀)|²`.
    pub fit_residual: f64,
    /// `ε_t(θ₀) = μ_t(θ₀) − x_t`.
    pub residual: Vec<Complex64>,
    /// Another local minimum of the ℓ2 cost is within
    /// [`AMBIGUITY_TOLERANCE`] of the global one.
    pub ambiguous: bool,
    /// Refined local minima `(ω₀, cost)`, best first.
    pub local_minima: Vec<(f64, f64)>,
}

impl PseudoTrueResult {
    pub fn omega0(&self) -> f64 {
        self.theta0.omega0
    }

    /// `‖Σ_t Re(ε_t^* ∇μ_t)‖`: zero at a stationary point.
    pub fn stationarity(&self) -> f64 {
        score(&self.theta0, &self.residual).norm()
    }
}

fn score(p: &HarmonicModelParams, residual: &[Complex64]) -> DVector<f64> {
    let mut g = DVector::zeros(p.dim());
    for (t, e) in residual.iter().enumerate() {
        for (i, d) in mu_gradient(p, t as f64).iter().enumerate() {
            g[i] += (e.conj() * d).re;
        }
    }
    g
}

fn residual_of(p: &HarmonicModelParams, x: &[Complex64]) -> Vec<Complex64> {
    p.waveform(x.len()).iter().zip(x).map(|(m, v)| m - v).collect()
}

fn normalize(theta: &[f64]) -> HarmonicModelParams {
    let mut p = HarmonicModelParams::from_slice(theta);
    for (r, phi) in p.amplitudes.iter_mut().zip(p.phases.iter_mut()) {
        if *r < 0.0 {
            *r = -*r;
            *phi += PI;
        }
        *phi = wrap_phase(*phi);
    }
    p
}

/// Newton steps on the full parameter vector using the exact Hessian
/// `2(J + H)` of `Σ|x − μ(θ)|²` (Gauss–Newton `J` where that is not
/// positive definite), with backtracking.
///
/// Near the optimum the cost changes by less than its rounding error, so a
/// step is accepted if it lowers the cost or, when the costs cannot be told
/// apart, if it lowers the gradient norm.
fn newton_polish(mut p: HarmonicModelParams, x: &[Complex64]) -> HarmonicModelParams {
    let cost = |r: &[Complex64]| r.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let mut res = residual_of(&p, x);
    let mut current = cost(&res);
    let mut g = score(&p, &res);
    for _ in 0..50 {
        let (j, h) = gradient_products(&p, x.len(), Some(&res));
        let Some(chol) = (&j + h).cholesky().or_else(|| j.cholesky()) else { break };
        let step = chol.solve(&g);
        let theta = p.to_vec();
        let mut accepted = None;
        let mut alpha = 1.0;
        for _ in 0..30 {
            let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(a, s)| a - alpha * s).collect();
            let next = normalize(&trial);
            if next.validate().is_ok() {
                let r = residual_of(&next, x);
                let c = cost(&r);
                let tie = (c - current).abs() <= 1e-12 * current.max(f64::MIN_POSITIVE);
                if c < current && !tie {
                    accepted = Some((next, r, c));
                    break;
                }
                if tie {
                    let gn = score(&next, &r);
                    if gn.norm() < g.norm() {
                        accepted = Some((next, r, c));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        let Some((next, r, c)) = accepted else { break };
        let done = alpha * step.amax() < 1e-15 * (1.0 + p.omega0);
        p = next;
        res = r;
        current = c;
        g = score(&p, &res);
        if done {
            break;
        }
    }
    p
}

/// Pseudo-true parameter of the harmonic model of order `order` for the
/// noiseless signal `x` with measurement noise variance `sigma2`.
///
/// The concentrated cost is searched as in the harmonic NLS estimator, then
/// the full parameter vector is polished by Newton steps. The result is
/// flagged ambiguous when another local minimum's ℓ2 cost is within
/// [`AMBIGUITY_TOLERANCE`] of the global cost, relative to the signal power.
pub fn pseudo_true(
    x: &ComplexSignal,
    order: usize,
    sigma2: f64,
    cfg: &SearchConfig,
) -> Result<PseudoTrueResult> {
    if !(sigma2 >= 0.0 && sigma2.is_finite()) {
        return Err(invalid("noise variance must be finite and non-negative"));
    }
    let n = x.len();
    let power = x.energy() / n as f64;
    let minima = harmonic_local_minima(x, order, cfg, HarmonicCriterion::Nls)?;
    let local_minima: Vec<(f64, f64)> = minima
        .iter()
        .map(|m| (m.0, power + m.1))
        .collect();
    let (w0, best) = local_minima[0];
    let scale = w0.max(f64::MIN_POSITIVE);
    let ambiguous = local_minima[1..].iter().any(|&(w, c)| {
        (w - w0).abs() > 1e-6 * scale && c - best <= AMBIGUITY_TOLERANCE * power
    });

    let freqs: Vec<f64> = (1..=order).map(|l| l as f64 * w0).collect();
    let fit = ls_amp_phase(x, &freqs)?;
    let start = HarmonicModelParams::new(w0, fit.phases(), fit.amplitudes())?;
    let theta0 = newton_polish(start, x.samples());
    theta0.validate().map_err(|_| Error::EstimationFailed("pseudo-true polish left the parameter domain".into()))?;
    let residual = residual_of(&theta0, x.samples());
    let fit_residual = residual.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
    Ok(PseudoTrueResult {
        theta0,
        sigma2_pseudo: sigma2 + fit_residual,
        fit_residual,
        residual,
        ambiguous,
        local_minima,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian_bell_amplitudes, string_model_frequencies, synth_sinusoids, SinusoidSet};

    #[test]
    fn harmonic_signal_is_its_own_pseudo_true() {
        let amps = gaussian_bell_amplitudes(5, 0.2);
        let phases = [0.5, -0.3, 1.1, 2.2, -2.0];
        let w0 = 0.28;
        let freqs: Vec<f64> = (1..=5).map(|k| k as f64 * w0).collect();
        let x = synth_sinusoids(&SinusoidSet::from_parts(&amps, &phases, &freqs).unwrap(), 200).unwrap();
        let p = pseudo_true(&x, 5, 0.3, &SearchConfig::default()).unwrap();
        assert!((p.omega0() - w0).abs() < 1e-12);
        assert!((p.sigma2_pseudo - 0.3).abs() < 1e-12);
        for (a, b) in p.theta0.amplitudes.iter().zip(&amps) {
            assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in p.theta0.phases.iter().zip(&phases) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn string_model_fit_is_stationary() {
        let amps = gaussian_bell_amplitudes(5, 0.2);
        let freqs = string_model_frequencies(PI / 10.0, 1e-3, 5).unwrap();
        let phases = [0.0; 5];
        let x = synth_sinusoids(&SinusoidSet::from_parts(&amps, &phases, &freqs).unwrap(), 500).unwrap();
        let p = pseudo_true(&x, 5, 0.27, &SearchConfig::default()).unwrap();
        assert!(!p.ambiguous);
        let grad_scale: f64 = amps.iter().map(|r| r * r).sum::<f64>() * 500.0 * 500.0;
        assert!(p.stationarity() < 1e-6 * grad_scale);
        let direct = x
            .samples()
            .iter()
            .zip(p.theta0.waveform(500))
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / 500.0;
        assert!((p.sigma2_pseudo - 0.27 - direct).abs() <= 1e-10 * direct);
    }
}
