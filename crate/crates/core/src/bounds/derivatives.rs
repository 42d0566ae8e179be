//! Analytic derivatives of the harmonic waveform
//! `μ_t(θ) = Σ_ℓ r_ℓ exp(i(φ_ℓ + ℓ ω₀ t))`, `θ = (ω₀, φ₁..φ_L, r₁..r_L)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::signal::HarmonicModelParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn unit_phasors(p: &HarmonicModelParams, t: f64) -> Vec<Complex64> {
    p.phases
        .iter()
        .enumerate()
        .map(|(i, &phi)| Complex64::from_polar(1.0, phi + (i + 1) as f64 * p.omega0 * t))
        .collect()
}

/// `∇_θ μ_t` at sample `t`.
pub fn mu_gradient(p: &HarmonicModelParams, t: f64) -> Vec<Complex64> {
    let l = p.order();
    let e = unit_phasors(p, t);
    let mut g = vec![Complex64::new(0.0, 0.0); 2 * l + 1];
    for k in 0..l {
        let h = (k + 1) as f64;
        let re = e[k] * p.amplitudes[k];
        g[0] += I * h * t * re;
        g[1 + k] = I * re;
        g[1 + l + k] = e[k];
    }
    g
}

/// `∇²_θ μ_t` at sample `t`; entries coupling different harmonics vanish.
pub fn mu_hessian(p: &HarmonicModelParams, t: f64) -> DMatrix<Complex64> {
    let l = p.order();
    let e = unit_phasors(p, t);
    let mut h = DMatrix::from_element(2 * l + 1, 2 * l + 1, Complex64::new(0.0, 0.0));
    for k in 0..l {
        let n = (k + 1) as f64;
        let re = e[k] * p.amplitudes[k];
        let (phi, r) = (1 + k, 1 + l + k);
        h[(0, 0)] -= n * n * t * t * re;
        h[(0, phi)] = -n * t * re;
        h[(phi, 0)] = h[(0, phi)];
        h[(0, r)] = I * n * t * e[k];
        h[(r, 0)] = h[(0, r)];
        h[(phi, phi)] = -re;
        h[(phi, r)] = I * e[k];
        h[(r, phi)] = h[(phi, r)];
    }
    h
}

/// `J = Σ_t Re(∇μ_t^* ∇μ_tᵀ)` and, when `residual` is given,
/// `H = Σ_t Re(ε_t^* ∇²μ_t)` with `ε_t = μ_t − x_t`.
pub fn gradient_products(
    p: &HarmonicModelParams,
    n: usize,
    residual: Option<&[Complex64]>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = p.dim();
    let l = p.order();
    let mut j = DMatrix::zeros(dim, dim);
    let mut hsum = DMatrix::zeros(dim, dim);
    for t in 0..n {
        let tf = t as f64;
        let g = mu_gradient(p, tf);
        for a in 0..dim {
            for b in a..dim {
                let v = (g[a].conj() * g[b]).re;
                j[(a, b)] += v;
            }
        }
        if let Some(eps) = residual {
            let e = eps[t].conj();
            let ph = unit_phasors(p, tf);
            for k in 0..l {
                let nk = (k + 1) as f64;
                let re = ph[k] * p.amplitudes[k];
                let (phi, r) = (1 + k, 1 + l + k);
                hsum[(0, 0)] -= (e * re).re * nk * nk * tf * tf;
                hsum[(0, phi)] -= (e * re).re * nk * tf;
                hsum[(0, r)] += (e * I * ph[k]).re * nk * tf;
                hsum[(phi, phi)] -= (e * re).re;
                hsum[(phi, r)] += (e * I * ph[k]).re;
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            j[(a, b)] = j[(b, a)];
            hsum[(a, b)] = hsum[(b, a)];
        }
    }
    (j, hsum)
}
