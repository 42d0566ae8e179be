use std::f64::consts::PI;

use num_complex::Complex64;

use super::harmonic::{harmonic_local_minima, HarmonicCriterion};
use super::optim::{golden_section, nelder_mead};
use super::{components_from_fit, weighted_fundamental, Diagnostics, EstimateResult, SearchConfig};
use crate::error::{invalid, Error, Result};
use crate::omt::{chs, LineSpectrum};
use crate::signal::{correlate, gram, ls_amp_phase, periodogram, ComplexSignal};

fn periodogram_size(cfg: &SearchConfig, n: usize) -> usize {
    cfg.periodogram_size.unwrap_or(8 * n).max(n).next_power_of_two()
}

/// The `count` largest local maxima of the periodogram on `(0, π)` that are
/// at least `separation` apart, by increasing frequency.
///
/// Peaks are taken greedily by decreasing power; equal powers prefer the
/// lower frequency.
pub fn periodogram_peaks(
    y: &ComplexSignal,
    count: usize,
    separation: f64,
    grid_size: usize,
) -> Result<Vec<f64>> {
    let p = periodogram(y, grid_size)?;
    let power = p.power();
    let half = grid_size / 2;
    let mut maxima: Vec<usize> = (1..half)
        .filter(|&j| power[j] > power[j - 1] && power[j] >= power[j + 1])
        .collect();
    maxima.sort_by(|&a, &b| power[b].total_cmp(&power[a]).then(a.cmp(&b)));
    let mut chosen: Vec<f64> = Vec::with_capacity(count);
    for j in maxima {
        let w = p.frequency(j);
        if chosen.iter().all(|&c| (c - w).abs() >= separation) {
            chosen.push(w);
            if chosen.len() == count {
                break;
            }
        }
    }
    if chosen.len() < count {
        return Err(Error::EstimationFailed(format!(
            "found {} of {count} resolvable periodogram peaks",
            chosen.len()
        )));
    }
    chosen.sort_by(f64::total_cmp);
    Ok(chosen)
}

/// Minus the power captured by projecting `y` onto `freqs`; infinite for
/// unordered, out-of-range or numerically coincident frequencies.
pub(crate) fn projection_criterion(y: &[Complex64], freqs: &[f64]) -> f64 {
    if freqs.windows(2).any(|w| w[1] <= w[0]) || freqs[0] <= 0.0 || freqs[freqs.len() - 1] >= PI
    {
        return f64::INFINITY;
    }
    let n = y.len();
    let b = nalgebra::DVector::from_vec(correlate(y, freqs));
    match gram(freqs, n).cholesky() {
        Some(chol) => -chol.solve(&b).dotc(&b).re / n as f64,
        None => f64::INFINITY,
    }
}

/// Periodogram peaks, each refined to the local maximum of `|b(ω)|²`.
pub(crate) fn refined_peaks(y: &ComplexSignal, count: usize, cfg: &SearchConfig) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(invalid("number of components must be at least 1"));
    }
    let n = y.len();
    let separation = match cfg.min_peak_separation {
        Some(s) => s,
        None => {
            let coarse = SearchConfig {
                candidates: 1,
                ..cfg.clone()
            };
            let w0 = harmonic_local_minima(y, count, &coarse, HarmonicCriterion::Anls)?[0].0;
            (0.5 * w0).max(2.0 * PI / n as f64)
        }
    };
    let size = periodogram_size(cfg, n);
    let cell = 2.0 * PI / size as f64;
    let peaks = periodogram_peaks(y, count, separation, size)?;
    let refined = peaks
        .iter()
        .map(|&w| {
            let m = golden_section(
                |v| -correlate(y.samples(), &[v])[0].norm_sqr(),
                (w - cell).max(f64::EPSILON),
                (w + cell).min(PI - f64::EPSILON),
                cfg.tolerance,
                cfg.max_iterations,
            );
            m.x[0]
        })
        .collect();
    Ok(refined)
}

/// Maximum likelihood estimate of `K` unrelated sinusoids.
///
/// Initialized at the `K` largest separated periodogram peaks, each refined
/// on its own, then polished jointly by simplex descent on the projection
/// residual. `omega0_hat` is the harmonic fit `Σ k ω̂_k / Σ k²`.
pub fn unstructured_mle(
    y: &ComplexSignal,
    components: usize,
    cfg: &SearchConfig,
) -> Result<EstimateResult> {
    cfg.validate()?;
    let n = y.len();
    let init = refined_peaks(y, components, cfg)?;
    let fit0 = ls_amp_phase(y, &init)?;
    let noise = fit0.residual_power.max(0.0);
    let nf = n as f64;
    let step: Vec<f64> = fit0
        .amplitudes()
        .iter()
        .map(|&r| {
            let std = (6.0 * noise / (nf * (nf * nf - 1.0) * (r * r).max(1e-300))).sqrt();
            (2.0 * std).clamp(1e-7, 2.0 * PI / nf)
        })
        .collect();
    let xtol = vec![cfg.tolerance; components];
    let criterion = |w: &[f64]| projection_criterion(y.samples(), w);

    let mut best = nelder_mead(criterion, &init, &step, &xtol, cfg.max_iterations);
    let mut iterations = best.iterations;
    let mut history = best.history.clone();
    for _ in 0..cfg.restarts {
        let small: Vec<f64> = step.iter().map(|s| 0.1 * s).collect();
        let again = nelder_mead(criterion, &best.x, &small, &xtol, cfg.max_iterations);
        iterations += again.iterations;
        history.extend(again.history.iter().map(|v| v.min(best.value)));
        if again.value <= best.value {
            let converged = again.converged;
            best = again;
            best.converged = converged;
        }
    }
    if !best.value.is_finite() {
        return Err(Error::EstimationFailed(
            "frequencies collapsed during refinement".into(),
        ));
    }
    let freqs = best.x;
    let fit = ls_amp_phase(y, &freqs).map_err(|e| {
        Error::EstimationFailed(format!("final frequencies not resolvable: {e}"))
    })?;
    Ok(EstimateResult {
        omega0_hat: weighted_fundamental(&freqs),
        components: components_from_fit(&freqs, &fit),
        noise_var_hat: fit.residual_power,
        delta_hat: None,
        diagnostics: Diagnostics {
            iterations,
            criterion: best.value,
            converged: best.converged,
            message: (!best.converged).then(|| "simplex iteration limit reached".to_string()),
            history,
        },
    })
}

/// Fundamental of the closest harmonic spectrum of the unstructured fit.
pub fn chs_plugin(y: &ComplexSignal, components: usize, cfg: &SearchConfig) -> Result<EstimateResult> {
    let mut est = unstructured_mle(y, components, cfg)?;
    let spectrum = LineSpectrum::from_sinusoids(&est.amplitudes(), &est.frequencies())?;
    let fit = chs(&spectrum, None)?;
    est.omega0_hat = fit.omega0;
    if fit.tie {
        est.diagnostics.message = Some("closest harmonic spectrum is not unique".into());
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{gaussian_bell_amplitudes, string_model_frequencies, synth_sinusoids, SinusoidSet};

    fn string_signal(beta: f64, n: usize) -> (ComplexSignal, Vec<f64>, Vec<f64>) {
        let amps = gaussian_bell_amplitudes(5, 0.2);
        let freqs = string_model_frequencies(PI / 10.0, beta, 5).unwrap();
        let phases = [0.1, 2.0, -0.7, 1.3, -2.9];
        let y = synth_sinusoids(&SinusoidSet::from_parts(&amps, &phases, &freqs).unwrap(), n).unwrap();
        (y, amps, freqs)
    }

    #[test]
    fn noiseless_frequencies_exact() {
        let (y, _, freqs) = string_signal(1e-3, 500);
        let est = unstructured_mle(&y, 5, &SearchConfig::default()).unwrap();
        for (a, b) in est.frequencies().iter().zip(&freqs) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(est.diagnostics.history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn chs_plugin_noiseless_is_weighted_mean() {
        let (y, amps, freqs) = string_signal(1e-3, 500);
        let est = chs_plugin(&y, 5, &SearchConfig::default()).unwrap();
        let expect = crate::omt::weighted_harmonic_fit(&amps, &freqs);
        assert!((est.omega0_hat - expect).abs() < 1e-8);
    }

    #[test]
    fn too_few_peaks_fails() {
        let set = SinusoidSet::from_parts(&[1.0], &[0.0], &[0.5]).unwrap();
        let y = synth_sinusoids(&set, 64).unwrap();
        let cfg = SearchConfig {
            min_peak_separation: Some(3.0),
            ..SearchConfig::default()
        };
        assert!(matches!(
            unstructured_mle(&y, 2, &cfg),
            Err(Error::EstimationFailed(_))
        ));
    }
}
