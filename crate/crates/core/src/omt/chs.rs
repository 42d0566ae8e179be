//! Closest harmonic spectrum.
//!
//! For a fundamental `ω₀`, moving all mass of a line spectrum onto the
//! multiples `ℓω₀, ℓ = 1..L` costs
//!
//! ```text
//! q_L(ω₀) = 2π Σ_k r_k² min_ℓ (ℓω₀ − ω_k)²
//! ```
//!
//! since each atom goes whole to its nearest multiple. `q_L` is the lower
//! envelope of convex quadratics: atom `k` switches from harmonic `ℓ+1` to
//! `ℓ` at `ω₀ = ω_k / (ℓ + ½)`. Between consecutive switch points the
//! assignment is fixed and the minimiser is the closed-form weighted mean
//! `Σ r_k² ℓ_k ω_k / Σ r_k² ℓ_k²`, so enumerating the pieces gives the
//! global minimum exactly.

use std::f64::consts::PI;

use super::spectrum::LineSpectrum;
use crate::error::{invalid, Result};

/// Relative slack used when comparing `ℓ·d` with the top frequency.
const ORDER_SLACK: f64 = 1e-9;

/// Smallest `ℓ` with `ℓ d ≥ ω_K`, where `d` is the smaller of the lowest
/// frequency and the smallest gap between consecutive frequencies.
pub fn maximal_harmonic_order(freqs: &[f64]) -> Result<usize> {
    if freqs.is_empty() {
        return Err(invalid("at least one frequency required"));
    }
    if freqs[0] <= 0.0 || freqs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("frequencies must be positive and strictly increasing"));
    }
    let d = freqs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(freqs[0], f64::min);
    let top = freqs[freqs.len() - 1];
    let ratio = top / d;
    let mut order = ratio.ceil().max(1.0) as usize;
    // a harmonic set {ω, 2ω, …} can produce gaps a few ulps short of ω
    if order > 1 && (order - 1) as f64 >= ratio * (1.0 - ORDER_SLACK) {
        order -= 1;
    }
    Ok(order)
}

/// Nearest multiple `ℓ ∈ 1..=L` of `omega0` to `freq`; ties go to the smaller `ℓ`.
pub fn nearest_harmonic(omega0: f64, freq: f64, order: usize) -> usize {
    let ideal = freq / omega0;
    let below = ideal.floor().clamp(1.0, order as f64) as usize;
    let above = (below + 1).min(order);
    let d_below = (below as f64 * omega0 - freq).abs();
    let d_above = (above as f64 * omega0 - freq).abs();
    if d_above < d_below {
        above
    } else {
        below
    }
}

/// `q_L(ω₀)`: cost of transporting the spectrum onto the best harmonic
/// spectrum with fundamental `omega0` and at most `order` harmonics.
pub fn q_cost(omega0: f64, spectrum: &LineSpectrum, order: usize) -> f64 {
    spectrum
        .atoms()
        .iter()
        .map(|a| {
            let l = nearest_harmonic(omega0, a.frequency, order) as f64;
            a.mass() * (l * omega0 - a.frequency).powi(2)
        })
        .sum()
}

/// A local minimum of `q_L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalMinimum {
    pub omega0: f64,
    pub cost: f64,
}

/// The closest harmonic spectrum.
#[derive(Debug, Clone)]
pub struct ChsResult {
    pub omega0: f64,
    pub order: usize,
    /// Power `Σ_{k ∈ I_ℓ} r_k²` collected on harmonic `ℓ = 1..L`.
    pub harmonic_powers: Vec<f64>,
    /// `I_ℓ`: input atom indices sent to harmonic `ℓ` (index `ℓ - 1`).
    pub assignment: Vec<Vec<usize>>,
    /// Harmonic number of each input atom.
    pub atom_harmonics: Vec<usize>,
    /// `q_L(ω₀)`.
    pub cost: f64,
    /// Another, distinct `ω₀` attains the same minimal cost; the smallest
    /// such `ω₀` is reported.
    pub tie: bool,
    /// All local minima of `q_L` on the search range, by increasing `ω₀`.
    pub local_minima: Vec<LocalMinimum>,
}

impl ChsResult {
    /// The CHS as a line spectrum.
    pub fn spectrum(&self) -> Result<LineSpectrum> {
        LineSpectrum::harmonic(self.omega0, &self.harmonic_powers)
    }

    /// Local minima of `q_L` inside `[lo, hi]`.
    pub fn local_minima_in(&self, lo: f64, hi: f64) -> Vec<LocalMinimum> {
        self.local_minima
            .iter()
            .copied()
            .filter(|m| m.omega0 >= lo && m.omega0 <= hi)
            .collect()
    }

    /// True when some local minimum in `[lo, hi]` differs from the global one.
    pub fn has_distinct_local_minimum_in(&self, lo: f64, hi: f64) -> bool {
        let scale = self.omega0.abs().max(f64::MIN_POSITIVE);
        self.local_minima_in(lo, hi)
            .iter()
            .any(|m| (m.omega0 - self.omega0).abs() > 1e-12 * scale)
    }
}

/// Closest harmonic spectrum of `spectrum`.
///
/// `order` defaults to [`maximal_harmonic_order`] of the atom frequencies.
/// The fundamental is searched over `(0, ω_K + d]`.
pub fn chs(spectrum: &LineSpectrum, order: Option<usize>) -> Result<ChsResult> {
    let freqs = spectrum.frequencies();
    let order = match order {
        Some(0) => return Err(invalid("harmonic order must be at least 1")),
        Some(l) => l,
        None => maximal_harmonic_order(&freqs)?,
    };
    let top = freqs[freqs.len() - 1];
    let d = freqs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(freqs[0], f64::min);
    let upper = top + d;

    let mut cuts: Vec<f64> = freqs
        .iter()
        .flat_map(|&w| (1..order).map(move |l| w / (l as f64 + 0.5)))
        .filter(|&c| c < upper)
        .collect();
    cuts.push(0.0);
    cuts.push(upper);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut candidates: Vec<LocalMinimum> = Vec::new();
    let mut local_minima = Vec::new();
    for piece in cuts.windows(2) {
        let (lo, hi) = (piece[0], piece[1]);
        if hi <= lo {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let (mut num, mut den) = (0.0, 0.0);
        for a in spectrum.atoms() {
            let l = nearest_harmonic(mid, a.frequency, order) as f64;
            num += a.power * l * a.frequency;
            den += a.power * l * l;
        }
        let stationary = num / den;
        let interior = stationary > lo && stationary < hi;
        let omega0 = stationary.clamp(lo, hi);
        if omega0 <= 0.0 {
            continue;
        }
        let cand = LocalMinimum {
            omega0,
            cost: q_cost(omega0, spectrum, order),
        };
        if interior {
            local_minima.push(cand);
        }
        candidates.push(cand);
    }

    let best_cost = candidates
        .iter()
        .map(|c| c.cost)
        .fold(f64::INFINITY, f64::min);
    let scale = spectrum.total_mass() * top * top;
    let tol = 1e-12 * scale;
    let mut ties: Vec<LocalMinimum> = candidates
        .iter()
        .copied()
        .filter(|c| c.cost <= best_cost + tol)
        .collect();
    ties.sort_by(|a, b| a.omega0.total_cmp(&b.omega0));
    let best = ties[0];
    let tie = ties
        .iter()
        .any(|c| (c.omega0 - best.omega0).abs() > 1e-12 * best.omega0);

    let atom_harmonics: Vec<usize> = spectrum
        .atoms()
        .iter()
        .map(|a| nearest_harmonic(best.omega0, a.frequency, order))
        .collect();
    let mut assignment = vec![Vec::new(); order];
    let mut harmonic_powers = vec![0.0; order];
    for (k, (&l, a)) in atom_harmonics.iter().zip(spectrum.atoms()).enumerate() {
        assignment[l - 1].push(k);
        harmonic_powers[l - 1] += a.power;
    }
    debug_assert!(best.omega0 < PI);
    Ok(ChsResult {
        omega0: best.omega0,
        order,
        harmonic_powers,
        assignment,
        atom_harmonics,
        cost: best.cost,
        tie,
        local_minima,
    })
}

/// `Σ r_k² k ω_k / Σ r_k² k²`: the stationary point of `q` when atom `k`
/// is assigned to harmonic `k`.
pub fn weighted_harmonic_fit(amplitudes: &[f64], freqs: &[f64]) -> f64 {
    let (num, den) = amplitudes
        .iter()
        .zip(freqs)
        .enumerate()
        .fold((0.0, 0.0), |(n, d), (i, (&r, &w))| {
            let k = (i + 1) as f64;
            (n + r * r * k * w, d + r * r * k * k)
        });
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omt::spectrum::Atom;
    use crate::signal::{gaussian_bell_amplitudes, string_model_frequencies};

    #[test]
    fn order_examples() {
        let w = 0.3;
        let harmonic: Vec<f64> = (1..=6).map(|k| k as f64 * w).collect();
        assert_eq!(maximal_harmonic_order(&harmonic).unwrap(), 6);
        assert_eq!(maximal_harmonic_order(&[0.4, 0.9, 1.4]).unwrap(), 4);
        assert_eq!(maximal_harmonic_order(&[0.7]).unwrap(), 1);
        assert!(maximal_harmonic_order(&[0.4, 0.4]).is_err());
    }

    #[test]
    fn string_model_order_is_k_or_k_plus_one() {
        let freqs = string_model_frequencies(PI / 10.0, 1e-3, 5).unwrap();
        let l = maximal_harmonic_order(&freqs).unwrap();
        assert!(l == 5 || l == 6);
    }

    #[test]
    fn q_cost_examples() {
        let single = LineSpectrum::new(vec![Atom { frequency: 0.5, power: 1.0 }]).unwrap();
        assert!((q_cost(0.4, &single, 1) - 2.0 * PI * 0.01).abs() < 1e-15);
        let w0 = 0.25;
        let h = LineSpectrum::from_sinusoids(&[1.0, 0.5, 0.7], &[w0, 2.0 * w0, 3.0 * w0]).unwrap();
        assert!(q_cost(w0, &h, 3).abs() < 1e-15);
    }

    #[test]
    fn midpoint_tie_goes_to_lower_harmonic() {
        assert_eq!(nearest_harmonic(0.2, 0.3, 4), 1);
        assert_eq!(nearest_harmonic(0.2, 0.31, 4), 2);
        assert_eq!(nearest_harmonic(0.2, 5.0, 4), 4);
        assert_eq!(nearest_harmonic(0.2, 0.01, 4), 1);
    }

    #[test]
    fn harmonic_input_is_its_own_chs() {
        let w0 = 0.2;
        let amps = [1.0, 0.3, 0.8, 0.5];
        let freqs: Vec<f64> = (1..=4).map(|k| k as f64 * w0).collect();
        let s = LineSpectrum::from_sinusoids(&amps, &freqs).unwrap();
        let r = chs(&s, None).unwrap();
        assert_eq!(r.order, 4);
        assert!((r.omega0 - w0).abs() < 1e-14);
        assert!(r.cost.abs() < 1e-20);
        assert_eq!(r.spectrum().unwrap().len(), 4);
        for (p, a) in r.harmonic_powers.iter().zip(&amps) {
            assert!((p - a * a).abs() < 1e-15);
        }
        assert!(!r.tie);
    }

    #[test]
    fn string_model_chs_is_weighted_mean() {
        let w0 = PI / 10.0;
        let amps = gaussian_bell_amplitudes(5, 0.2);
        for beta in [5e-4, 1e-3] {
            let freqs = string_model_frequencies(w0, beta, 5).unwrap();
            let s = LineSpectrum::from_sinusoids(&amps, &freqs).unwrap();
            let r = chs(&s, None).unwrap();
            let expect = weighted_harmonic_fit(&amps, &freqs);
            assert!((r.omega0 - expect).abs() < 1e-14, "{} vs {expect}", r.omega0);
            assert_eq!(r.atom_harmonics, vec![1, 2, 3, 4, 5]);
        }
        // frozen from the closed form at β = 1e-3
        let freqs = string_model_frequencies(w0, 1e-3, 5).unwrap();
        let s = LineSpectrum::from_sinusoids(&amps, &freqs).unwrap();
        assert!((chs(&s, None).unwrap().omega0 - 0.315_998_233_634_263_9).abs() < 1e-13);
    }

    #[test]
    fn single_atom_is_its_own_chs() {
        let s = LineSpectrum::new(vec![Atom { frequency: 0.9, power: 2.0 }]).unwrap();
        let r = chs(&s, None).unwrap();
        assert_eq!(r.order, 1);
        assert!((r.omega0 - 0.9).abs() < 1e-15);
    }

    #[test]
    fn symmetric_tie_flagged_and_smallest_returned() {
        // two atoms, L = 1: the stationary point is the power-weighted mean,
        // unique; L = 2 with atoms at 1 and 2 has minima at ω₀=1 (cost 0)
        let s = LineSpectrum::from_sinusoids(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
        let r = chs(&s, Some(2)).unwrap();
        assert!((r.omega0 - 1.0).abs() < 1e-14);
        assert!(!r.tie);
        // equal atoms at 0.6 and 1.2 with L=1 and an extra copy: construct a
        // genuine tie between ω₀ = 0.5·(a) configurations
        let s = LineSpectrum::from_sinusoids(&[1.0, 1.0], &[0.6, 0.9]).unwrap();
        let r = chs(&s, Some(3)).unwrap();
        // ω₀=0.3 puts both atoms exactly on harmonics 2 and 3
        assert!(r.cost < 1e-20);
        assert!((r.omega0 - 0.3).abs() < 1e-14);
    }
}
