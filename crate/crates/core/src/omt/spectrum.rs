use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// A spectral line at `frequency` carrying squared amplitude `power`.
///
/// The transport mass of the line is `2π · power`, matching the spectrum
/// `Φ(ω) = 2π Σ r_k² δ(ω − ω_k)` of a sum of sinusoids with random phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub frequency: f64,
    pub power: f64,
}

impl Atom {
    pub fn mass(&self) -> f64 {
        2.0 * PI * self.power
    }
}

/// A point-mass spectrum with strictly increasing frequencies in `(0, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSpectrum {
    atoms: Vec<Atom>,
}

impl LineSpectrum {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(invalid("line spectrum needs at least one atom"));
        }
        for a in &atoms {
            if !(a.power > 0.0 && a.power.is_finite()) {
                return Err(invalid(format!("atom power {} must be positive", a.power)));
            }
            if !(a.frequency > 0.0 && a.frequency < PI) {
                return Err(invalid(format!("atom frequency {} outside (0, π)", a.frequency)));
            }
        }
        if atoms.windows(2).any(|w| w[1].frequency <= w[0].frequency) {
            return Err(invalid("atom frequencies must be strictly increasing"));
        }
        Ok(Self { atoms })
    }

    /// Spectrum of sinusoids with the given amplitudes (power `r²`); the
    /// input is sorted by frequency.
    pub fn from_sinusoids(amplitudes: &[f64], frequencies: &[f64]) -> Result<Self> {
        if amplitudes.len() != frequencies.len() {
            return Err(invalid("amplitude and frequency counts differ"));
        }
        let mut atoms: Vec<Atom> = amplitudes
            .iter()
            .zip(frequencies)
            .map(|(&r, &w)| Atom {
                frequency: w,
                power: r * r,
            })
            .collect();
        atoms.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        Self::new(atoms)
    }

    /// Harmonic spectrum with `powers[ℓ-1]` at `ℓ ω₀`; zero powers are skipped.
    pub fn harmonic(omega0: f64, powers: &[f64]) -> Result<Self> {
        Self::new(
            powers
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, &p)| Atom {
                    frequency: (i + 1) as f64 * omega0,
                    power: p,
                })
                .collect(),
        )
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.frequency).collect()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.power).collect()
    }

    pub fn total_power(&self) -> f64 {
        self.atoms.iter().map(|a| a.power).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(Atom::mass).sum()
    }

    /// Same frequencies with every power multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    power: a.power * factor,
                    ..*a
                })
                .collect(),
        )
    }
}
