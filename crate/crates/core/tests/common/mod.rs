//! Oracles shared by the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::f64::consts::PI;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use inharmonic::bounds::{mu_gradient, mu_hessian};
use inharmonic::omt::{omt_distance, Atom, LineSpectrum};
use inharmonic::signal::{HarmonicModelParams, StochasticPitchModel};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// The signal used throughout the experiments: five components with
/// Gaussian-bell amplitudes around the third harmonic.
pub fn bell_amplitudes() -> Vec<f64> {
    (1..=5).map(|k| (-0.2 * (k as f64 - 2.5).powi(2)).exp()).collect()
}

/// Random sorted frequencies in `(0, π)` at least `gap` apart.
pub fn random_frequencies(rng: &mut impl Rng, count: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut f: Vec<f64> = (0..count).map(|_| rng.random_range(0.05..PI - 0.05)).collect();
        f.sort_by(f64::total_cmp);
        if f.windows(2).all(|w| w[1] - w[0] > gap) {
            return f;
        }
    }
}

/// Random dyadic powers `m/64` with the given integer total `64·p`, so that
/// both sides of a transport problem carry bit-identical total mass.
pub fn dyadic_powers(rng: &mut impl Rng, count: usize, total_units: u32) -> Vec<f64> {
    assert!(total_units as usize >= count);
    let mut units = vec![1u32; count];
    for _ in 0..total_units as usize - count {
        units[rng.random_range(0..count)] += 1;
    }
    units.into_iter().map(|u| u as f64 / 64.0).collect()
}

pub fn spectrum(freqs: &[f64], powers: &[f64]) -> LineSpectrum {
    LineSpectrum::new(
        freqs
            .iter()
            .zip(powers)
            .map(|(&frequency, &power)| Atom { frequency, power })
            .collect(),
    )
    .unwrap()
}

/// Transport cost by linear programming over all couplings, with masses
/// `2π · power` and cost `(ω − ω')²`.
pub fn lp_transport(from: &LineSpectrum, to: &LineSpectrum) -> f64 {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let src = from.atoms();
    let dst = to.atoms();
    let vars: Vec<Vec<_>> = src
        .iter()
        .map(|a| {
            dst.iter()
                .map(|b| problem.add_var((a.frequency - b.frequency).powi(2), (0.0, f64::INFINITY)))
                .collect()
        })
        .collect();
    for (i, a) in src.iter().enumerate() {
        let row: Vec<_> = vars[i].iter().map(|&v| (v, 1.0)).collect();
        problem.add_constraint(&row, ComparisonOp::Eq, a.power);
    }
    for (j, b) in dst.iter().enumerate() {
        let col: Vec<_> = vars.iter().map(|r| (r[j], 1.0)).collect();
        problem.add_constraint(&col, ComparisonOp::Eq, b.power);
    }
    2.0 * PI * problem.solve().expect("feasible transport problem").objective()
}

/// Minimum transport cost from `spec` onto any harmonic spectrum with
/// fundamental `omega0` and harmonics `1..=order`, by enumerating every
/// assignment of atoms to harmonics.
pub fn brute_harmonic_min(spec: &LineSpectrum, omega0: f64, order: usize) -> f64 {
    let k = spec.len();
    let powers = spec.powers();
    let mut assignment = vec![1usize; k];
    let mut best = f64::INFINITY;
    loop {
        let mut harmonic = vec![0.0; order];
        for (i, &l) in assignment.iter().enumerate() {
            harmonic[l - 1] += powers[i];
        }
        let target = LineSpectrum::harmonic(omega0, &harmonic).unwrap();
        best = best.min(omt_distance(spec, &target).unwrap().0);
        let mut i = 0;
        loop {
            if i == k {
                return best;
            }
            assignment[i] += 1;
            if assignment[i] <= order {
                break;
            }
            assignment[i] = 1;
            i += 1;
        }
    }
}

pub fn random_harmonic_params(rng: &mut impl Rng, order: usize) -> HarmonicModelParams {
    let omega0 = rng.random_range(0.05..(PI / order as f64 - 0.01));
    HarmonicModelParams::new(
        omega0,
        (0..order).map(|_| rng.random_range(-PI..PI)).collect(),
        (0..order).map(|_| rng.random_range(0.1..2.0)).collect(),
    )
    .unwrap()
}

fn mu_at(theta: &[f64], t: f64) -> Complex64 {
    HarmonicModelParams::from_slice(theta)
        .waveform_at(t)
}

trait WaveformAt {
    fn waveform_at(&self, t: f64) -> Complex64;
}

impl WaveformAt for HarmonicModelParams {
    fn waveform_at(&self, t: f64) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(i, (&r, &phi))| Complex64::from_polar(r, phi + (i + 1) as f64 * self.omega0 * t))
            .sum()
    }
}

/// Worst relative errors `(gradient, hessian)` of the analytic derivatives
/// of `μ_t` against central differences with step `h`, each measured as
/// `‖analytic − numeric‖ / ‖analytic‖` over all entries.
pub fn derivative_errors(p: &HarmonicModelParams, t: f64, h: f64) -> (f64, f64) {
    let theta = p.to_vec();
    let d = theta.len();
    let grad = mu_gradient(p, t);
    let hess = mu_hessian(p, t);
    let shifted = |i: usize, s: f64| {
        let mut v = theta.clone();
        v[i] += s;
        v
    };
    let mut g_err = 0.0;
    let mut g_norm = 0.0;
    let mut h_err = 0.0;
    let mut h_norm = 0.0;
    for i in 0..d {
        let num = (mu_at(&shifted(i, h), t) - mu_at(&shifted(i, -h), t)) / (2.0 * h);
        g_err += (num - grad[i]).norm_sqr();
        g_norm += grad[i].norm_sqr();
        let gp = mu_gradient(&HarmonicModelParams::from_slice(&shifted(i, h)), t);
        let gm = mu_gradient(&HarmonicModelParams::from_slice(&shifted(i, -h)), t);
        for j in 0..d {
            let num = (gp[j] - gm[j]) / (2.0 * h);
            h_err += (num - hess[(i, j)]).norm_sqr();
            h_norm += hess[(i, j)].norm_sqr();
        }
    }
    ((g_err / g_norm).sqrt(), (h_err / h_norm).sqrt())
}

/// Monte Carlo estimate of the hybrid Fisher matrix: the average outer
/// product of the joint score of `(x, Δ)` over `draws` joint draws.
///
/// The score is coded here from the model directly:
/// `∂/∂θ log p = (2/σ²) Σ_t Re(conj(x_t − μ_t) ∂μ_t/∂θ) − [θ = Δ] Δ/σ²_Δ`
/// with `μ_t = Σ_k r_k exp(i(φ_k + (kω₀ + Δ_k) t))`.
pub fn sampled_hybrid_fisher(
    model: &StochasticPitchModel,
    n: usize,
    draws: usize,
    seed: u64,
) -> DMatrix<f64> {
    let k = model.components();
    let dim = 3 * k + 1;
    let mut rng = rng(seed);
    let delta_dist = Normal::new(0.0, model.sigma2_delta.sqrt()).unwrap();
    let noise_dist = Normal::new(0.0, (model.sigma2_noise / 2.0).sqrt()).unwrap();
    let mut acc = DMatrix::<f64>::zeros(dim, dim);
    let mut score = vec![0.0; dim];
    let mut comps = vec![Complex64::new(0.0, 0.0); k];
    for _ in 0..draws {
        let delta: Vec<f64> = (0..k).map(|_| delta_dist.sample(&mut rng)).collect();
        score.iter_mut().for_each(|s| *s = 0.0);
        for t in 0..n {
            let tf = t as f64;
            for c in 0..k {
                let w = (c + 1) as f64 * model.omega0 + delta[c];
                comps[c] = Complex64::from_polar(model.amplitudes[c], model.phases[c] + w * tf);
            }
            let noise = Complex64::new(noise_dist.sample(&mut rng), noise_dist.sample(&mut rng));
            // x − μ is the noise itself
            let e = noise.conj();
            let i = Complex64::new(0.0, 1.0);
            for c in 0..k {
                let h = (c + 1) as f64;
                let d_omega = i * h * tf * comps[c];
                let d_phi = i * comps[c];
                let d_r = comps[c] / model.amplitudes[c];
                let d_delta = i * tf * comps[c];
                score[0] += (e * d_omega).re;
                score[1 + c] += (e * d_phi).re;
                score[1 + k + c] += (e * d_r).re;
                score[1 + 2 * k + c] += (e * d_delta).re;
            }
        }
        for s in score.iter_mut() {
            *s *= 2.0 / model.sigma2_noise;
        }
        for c in 0..k {
            score[1 + 2 * k + c] -= delta[c] / model.sigma2_delta;
        }
        for a in 0..dim {
            for b in 0..dim {
                acc[(a, b)] += score[a] * score[b];
            }
        }
    }
    acc / draws as f64
}

/// `‖A − B‖_F / ‖B‖_F`.
pub fn frobenius_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// `‖D(A − B)D‖_F / ‖DBD‖_F` with `D = diag(B)^{-1/2}`: the same comparison
/// after putting all parameters on a common scale.
pub fn normalized_frobenius_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let d = DMatrix::from_diagonal(&b.diagonal().map(|v| 1.0 / v.sqrt()));
    frobenius_rel(&(&d * a * &d), &(&d * b * &d))
}
