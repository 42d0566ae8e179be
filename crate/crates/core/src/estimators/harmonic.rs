use nalgebra::DVector;
use num_complex::Complex64;

use super::optim::golden_section;
use super::{components_from_fit, Diagnostics, EstimateResult, SearchConfig};
use crate::error::{invalid, Error, Result};
use crate::signal::{correlate, gram, ls_amp_phase, padded_dft, ComplexSignal};

/// Which harmonic criterion to minimize over `ω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicCriterion {
    /// `−(1/N) Re(bᴴ G⁻¹ b)`: minus the power captured by the least-squares
    /// projection onto the harmonics. Minimizing it minimizes the residual.
    Nls,
    /// `−(1/N) Σ_ℓ |b_ℓ|²`: minus the harmonic sum of the periodogram.
    Anls,
}

fn harmonics(omega0: f64, order: usize) -> Vec<f64> {
    (1..=order).map(|l| l as f64 * omega0).collect()
}

/// Power captured by projecting onto `freqs`, given `b = Aᴴy`.
fn projected_power(b: &[Complex64], freqs: &[f64], n: usize) -> Option<f64> {
    let chol = gram(freqs, n).cholesky()?;
    let bv = DVector::from_column_slice(b);
    let c = chol.solve(&bv);
    Some(bv.dotc(&c).re / n as f64)
}

fn criterion_from_b(kind: HarmonicCriterion, b: &[Complex64], freqs: &[f64], n: usize) -> f64 {
    match kind {
        HarmonicCriterion::Nls => projected_power(b, freqs, n).map_or(f64::INFINITY, |p| -p),
        HarmonicCriterion::Anls => -b.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64,
    }
}

fn criterion_at(kind: HarmonicCriterion, y: &[Complex64], order: usize, omega0: f64) -> f64 {
    let freqs = harmonics(omega0, order);
    let b = correlate(y, &freqs);
    criterion_from_b(kind, &b, &freqs, y.len())
}

/// The NLS criterion `(1/N) min_c ‖y − A(ω₀) c‖²` at one `ω₀`.
pub fn nls_criterion(y: &ComplexSignal, order: usize, omega0: f64) -> Result<f64> {
    let fit = ls_amp_phase(y, &harmonics(omega0, order))?;
    Ok(fit.residual_power)
}

/// Refined local minima of a harmonic criterion, best first.
///
/// The criterion is tabulated on the FFT grid, its `cfg.candidates` lowest
/// grid minima are refined by golden section over one grid step on either
/// side, and the refined points are returned as `(ω₀, value, iterations,
/// history)` sorted by value.
pub fn harmonic_local_minima(
    y: &ComplexSignal,
    order: usize,
    cfg: &SearchConfig,
    kind: HarmonicCriterion,
) -> Result<Vec<(f64, f64, usize, Vec<f64>)>> {
    if order == 0 {
        return Err(invalid("model order must be at least 1"));
    }
    let n = y.len();
    let (lo, hi) = cfg.omega_range(n, order)?;
    let m = cfg.grid_size(n, order);
    let step = 2.0 * std::f64::consts::PI / m as f64;
    let spectrum = padded_dft(y.samples(), m);
    let first = (lo / step).ceil() as usize;
    let mut grid = Vec::new();
    let mut j = first.max(1);
    while (j as f64) * step < hi {
        let omega0 = j as f64 * step;
        let b: Vec<Complex64> = (1..=order).map(|l| spectrum[(l * j) % m]).collect();
        let freqs = harmonics(omega0, order);
        grid.push((omega0, criterion_from_b(kind, &b, &freqs, n)));
        j += 1;
    }
    if grid.is_empty() {
        return Err(Error::EstimationFailed("ω₀ grid is empty".into()));
    }
    let mut minima: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let v = grid[i].1;
            v.is_finite()
                && (i == 0 || v <= grid[i - 1].1)
                && (i + 1 == grid.len() || v < grid[i + 1].1)
        })
        .collect();
    if minima.is_empty() {
        return Err(Error::EstimationFailed(
            "no grid point admits a well-conditioned projection".into(),
        ));
    }
    minima.sort_by(|&a, &b| grid[a].1.total_cmp(&grid[b].1));
    minima.truncate(cfg.candidates);

    let mut refined: Vec<(f64, f64, usize, Vec<f64>)> = minima
        .iter()
        .map(|&i| {
            let centre = grid[i].0;
            let a = (centre - step).max(lo);
            let b = (centre + step).min(hi);
            let m = golden_section(
                |w| criterion_at(kind, y.samples(), order, w),
                a,
                b,
                cfg.tolerance,
                cfg.max_iterations,
            );
            let (w, v) = if m.value <= grid[i].1 {
                (m.x[0], m.value)
            } else {
                (centre, grid[i].1)
            };
            (w, v, m.iterations, m.history)
        })
        .collect();
    refined.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.total_cmp(&b.0)));
    Ok(refined)
}

fn harmonic_estimate(
    y: &ComplexSignal,
    order: usize,
    cfg: &SearchConfig,
    kind: HarmonicCriterion,
) -> Result<EstimateResult> {
    let minima = harmonic_local_minima(y, order, cfg, kind)?;
    let (omega0, value, iterations, history) = minima.into_iter().next().expect("non-empty");
    let freqs = harmonics(omega0, order);
    let fit = ls_amp_phase(y, &freqs)?;
    Ok(EstimateResult {
        omega0_hat: omega0,
        components: components_from_fit(&freqs, &fit),
        noise_var_hat: fit.residual_power,
        delta_hat: None,
        diagnostics: Diagnostics {
            iterations,
            criterion: value,
            converged: true,
            message: None,
            history,
        },
    })
}

/// Harmonic nonlinear least squares: `ω̂₀ = argmin (1/N)‖y − A(ω₀) c‖²`.
///
/// The reported criterion is minus the projected power; `noise_var_hat` is
/// the residual power per sample.
pub fn mmle_harmonic(y: &ComplexSignal, order: usize, cfg: &SearchConfig) -> Result<EstimateResult> {
    harmonic_estimate(y, order, cfg, HarmonicCriterion::Nls)
}

/// Harmonic summation: `ω̂₀ = argmax Σ_ℓ |Σ_t y_t e^{−iℓω₀t}|²`.
///
/// Amplitudes, phases and `noise_var_hat` come from a least-squares fit at
/// `ω̂₀`; the reported criterion is minus the harmonic sum divided by `N`.
pub fn anls(y: &ComplexSignal, order: usize, cfg: &SearchConfig) -> Result<EstimateResult> {
    harmonic_estimate(y, order, cfg, HarmonicCriterion::Anls)
}
