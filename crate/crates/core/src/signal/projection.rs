//! Least-squares fits of complex amplitudes on a set of Fourier atoms.
//!
//! The atom matrix `A(ω)` has columns `a(ω_k)_t = exp(i ω_k t)`. Its Gram
//! matrix is a Dirichlet kernel evaluated in closed form, so a fit costs
//! `O(K N)` for the correlations plus a `K × K` Hermitian solve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::types::ComplexSignal;
use crate::error::{invalid, Error, Result};

/// Fits with a Gram reciprocal condition number below this are rejected.
pub const MIN_RCOND: f64 = 1e-10;

/// Steps between exact re-evaluations of the rotating phasor.
const RESEED: usize = 256;

/// Result of projecting a signal onto `A(ω)`.
#[derive(Debug, Clone)]
pub struct ProjectionFit {
    /// `(AᴴA)⁻¹Aᴴy`, one complex amplitude per frequency.
    pub coefficients: Vec<Complex64>,
    /// `(1/N) ‖y − A c‖²`.
    pub residual_power: f64,
    /// Reciprocal condition number of `AᴴA`.
    pub rcond: f64,
}

impl ProjectionFit {
    pub fn amplitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm()).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.arg()).collect()
    }
}

/// `Σ_{t<N} exp(i δ t)`.
pub fn dirichlet(delta: f64, n: usize) -> Complex64 {
    let half = 0.5 * delta;
    let s = half.sin();
    if s == 0.0 {
        return Complex64::new(n as f64, 0.0);
    }
    let ratio = (n as f64 * half).sin() / s;
    Complex64::from_polar(ratio, half * (n as f64 - 1.0))
}

/// Correlations `Σ_t y_t exp(−i ω t)` for each frequency.
pub fn correlate(y: &[Complex64], freqs: &[f64]) -> Vec<Complex64> {
    freqs
        .iter()
        .map(|&w| {
            let step = Complex64::from_polar(1.0, -w);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ph = Complex64::new(1.0, 0.0);
            for (t, &yt) in y.iter().enumerate() {
                if t % RESEED == 0 {
                    ph = Complex64::from_polar(1.0, -w * t as f64);
                }
                acc += yt * ph;
                ph *= step;
            }
            acc
        })
        .collect()
}

/// Gram matrix `AᴴA` with entries `Σ_t exp(i(ω_k − ω_j)t)`.
pub fn gram(freqs: &[f64], n: usize) -> DMatrix<Complex64> {
    let k = freqs.len();
    DMatrix::from_fn(k, k, |j, l| {
        if j == l {
            Complex64::new(n as f64, 0.0)
        } else {
            dirichlet(freqs[l] - freqs[j], n)
        }
    })
}

/// Reciprocal condition number `λ_min / λ_max` of a Hermitian PSD matrix.
pub fn hermitian_rcond(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 1 {
        return if m[(0, 0)].re > 0.0 { 1.0 } else { 0.0 };
    }
    let eig = m.clone().symmetric_eigenvalues();
    let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        0.0
    } else {
        (min / max).max(0.0)
    }
}

/// Solves `G c = b` given the correlations `b = Aᴴy`.
pub fn solve_amplitudes(freqs: &[f64], n: usize, b: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let g = gram(freqs, n);
    let rcond = hermitian_rcond(&g);
    if !(rcond >= MIN_RCOND) {
        return Err(Error::IllConditioned { rcond });
    }
    let chol = g.cholesky().ok_or(Error::IllConditioned { rcond })?;
    let c = chol.solve(&DVector::from_column_slice(b));
    Ok((c.iter().copied().collect(), rcond))
}

/// Least-squares complex amplitudes of `y` on `exp(i ω_k t)`.
///
/// Amplitude and phase of component `k` are the modulus and argument of
/// the returned coefficient.
pub fn ls_amp_phase(y: &ComplexSignal, freqs: &[f64]) -> Result<ProjectionFit> {
    let n = y.len();
    if freqs.len() > n {
        return Err(invalid(format!(
            "{} frequencies exceed {} samples",
            freqs.len(),
            n
        )));
    }
    if freqs.iter().any(|w| !w.is_finite()) {
        return Err(invalid("frequencies must be finite"));
    }
    if freqs.is_empty() {
        return Ok(ProjectionFit {
            coefficients: vec![],
            residual_power: y.energy() / n as f64,
            rcond: 1.0,
        });
    }
    let b = correlate(y.samples(), freqs);
    let (coefficients, rcond) = solve_amplitudes(freqs, n, &b)?;
    let residual_power = residual_power(y.samples(), freqs, &coefficients);
    Ok(ProjectionFit {
        coefficients,
        residual_power,
        rcond,
    })
}

/// `(1/N) Σ_t |y_t − Σ_k c_k exp(i ω_k t)|²`, evaluated sample by sample.
pub fn residual_power(y: &[Complex64], freqs: &[f64], coefficients: &[Complex64]) -> f64 {
    let n = y.len();
    let steps: Vec<Complex64> = freqs.iter().map(|&w| Complex64::from_polar(1.0, w)).collect();
    let mut phasors: Vec<Complex64> = coefficients.to_vec();
    let mut total = 0.0;
    for (t, &yt) in y.iter().enumerate() {
        if t % RESEED == 0 && t > 0 {
            for ((p, &c), &w) in phasors.iter_mut().zip(coefficients).zip(freqs) {
                *p = c * Complex64::from_polar(1.0, w * t as f64);
            }
        }
        let model: Complex64 = phasors.iter().sum();
        total += (yt - model).norm_sqr();
        for (p, s) in phasors.iter_mut().zip(&steps) {
            *p *= s;
        }
    }
    total / n as f64
}
