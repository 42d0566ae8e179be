use nalgebra::DMatrix;

use super::linalg::spd_inverse;
use crate::error::{invalid, Result};
use crate::signal::StochasticPitchModel;

/// Hybrid information matrix over `θ̆ = (ω₀, φ₁..φ_K, r₁..r_K, Δ₁..Δ_K)`.
#[derive(Debug, Clone)]
pub struct HybridFisher {
    pub matrix: DMatrix<f64>,
    pub components: usize,
    /// `σ²_Δ = 0`: the matrix is the harmonic-model information without the
    /// (infinite) prior term, and the `Δ` rows and columns describe
    /// parameters that are known to be zero.
    pub delta_deterministic: bool,
}

impl HybridFisher {
    /// Labels of the rows, e.g. `omega0`, `phi3`, `r1`, `delta2`.
    pub fn labels(&self) -> Vec<String> {
        let k = self.components;
        let mut v = vec!["omega0".to_string()];
        v.extend((1..=k).map(|i| format!("phi{i}")));
        v.extend((1..=k).map(|i| format!("r{i}")));
        v.extend((1..=k).map(|i| format!("delta{i}")));
        v
    }

    /// The `(2K+1) × (2K+1)` block of the deterministic parameters.
    pub fn theta_block(&self) -> DMatrix<f64> {
        let m = 2 * self.components + 1;
        self.matrix.view((0, 0), (m, m)).into_owned()
    }

    pub fn delta_index(&self, k: usize) -> usize {
        2 * self.components + k
    }
}

/// `Λ^{(t)}`: the expectation over `Δ` of `Re(∇μ_t^* ∇μ_tᵀ)`.
fn lambda(model: &StochasticPitchModel, t: f64) -> DMatrix<f64> {
    let k = model.components();
    let r = &model.amplitudes;
    let phase = &model.phases;
    let damp = (-model.sigma2_delta * t * t).exp();
    // a[k][l] = ω₀(k−ℓ)t + φ_k − φ_ℓ
    let angle = |a: usize, b: usize| model.omega0 * (a as f64 - b as f64) * t + phase[a] - phase[b];
    let h = |a: usize| (a + 1) as f64;
    let om = 0;
    let phi = |a: usize| 1 + a;
    let amp = |a: usize| 1 + k + a;
    let del = |a: usize| 1 + 2 * k + a;
    let dim = 3 * k + 1;
    let mut m = DMatrix::zeros(dim, dim);
    let mut set = |i: usize, j: usize, v: f64| {
        m[(i, j)] = v;
        m[(j, i)] = v;
    };

    let mut ww = t * t * (0..k).map(|a| h(a) * h(a) * r[a] * r[a]).sum::<f64>();
    for a in 0..k {
        for b in 0..k {
            if a != b {
                ww += t * t * damp * h(a) * h(b) * r[a] * r[b] * angle(a, b).cos();
            }
        }
    }
    set(om, om, ww);

    for a in 0..k {
        let mut w_r = 0.0;
        let mut w_phi = t * h(a) * r[a] * r[a];
        for b in 0..k {
            if b != a {
                let (s, c) = angle(a, b).sin_cos();
                w_r += t * damp * h(b) * r[b] * s;
                w_phi += t * damp * h(b) * r[a] * r[b] * c;
            }
        }
        set(om, amp(a), w_r);
        set(om, phi(a), w_phi);
        set(om, del(a), t * w_phi);

        for b in 0..k {
            let (s, c) = angle(a, b).sin_cos();
            let (rr, rphi, phiphi) = if a == b {
                (1.0, 0.0, r[a] * r[a])
            } else {
                (damp * c, damp * r[b] * s, damp * r[a] * r[b] * c)
            };
            set(amp(a), amp(b), rr);
            set(amp(a), phi(b), rphi);
            set(phi(a), phi(b), phiphi);
            set(amp(a), del(b), t * rphi);
            set(phi(a), del(b), t * phiphi);
            set(del(a), del(b), t * t * phiphi);
        }
    }
    m
}

/// Hybrid Fisher matrix `F̆ = (2/σ²) Σ_t Λ^{(t)} + diag(0, I/σ²_Δ)`.
///
/// Cross terms between components are damped by `exp(−σ²_Δ t²)`, the
/// characteristic function of `Δ_k − Δ_ℓ`. With `σ²_Δ = 0` the prior term
/// is dropped and the result is flagged as deterministic in `Δ`.
pub fn hybrid_fisher(model: &StochasticPitchModel, n: usize) -> Result<HybridFisher> {
    model.validate()?;
    if n < 2 {
        return Err(invalid("at least two samples required"));
    }
    let k = model.components();
    let dim = 3 * k + 1;
    let mut sum = DMatrix::zeros(dim, dim);
    for t in 0..n {
        sum += lambda(model, t as f64);
    }
    let mut matrix = sum * (2.0 / model.sigma2_noise);
    let deterministic = model.sigma2_delta == 0.0;
    if !deterministic {
        for i in 0..k {
            matrix[(1 + 2 * k + i, 1 + 2 * k + i)] += 1.0 / model.sigma2_delta;
        }
    }
    Ok(HybridFisher {
        matrix,
        components: k,
        delta_deterministic: deterministic,
    })
}

/// Hybrid CRLB.
#[derive(Debug, Clone)]
pub struct Hcrlb {
    /// Diagonal of `F̆⁻¹`, in the order of [`HybridFisher::labels`].
    pub diagonal: Vec<f64>,
    pub omega0: f64,
    /// Bound for `ω̄₁ = ω₀ + Δ₁`.
    pub omega1: f64,
    pub rcond: f64,
}

pub fn hcrlb(model: &StochasticPitchModel, n: usize) -> Result<Hcrlb> {
    if !(model.sigma2_delta > 0.0) {
        return Err(invalid("the hybrid bound needs a positive inharmonicity variance"));
    }
    let f = hybrid_fisher(model, n)?;
    let (inv, rcond) = spd_inverse(&f.matrix, "hybrid Fisher matrix", 1e-15)?;
    let d1 = f.delta_index(1);
    Ok(Hcrlb {
        diagonal: inv.diagonal().iter().copied().collect(),
        omega0: inv[(0, 0)],
        omega1: inv[(0, 0)] + inv[(d1, d1)] + 2.0 * inv[(0, d1)],
        rcond,
    })
}
