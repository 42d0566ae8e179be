use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Wraps an angle to `[-π, π)`.
pub fn wrap_phase(phase: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let wrapped = phase - two_pi * ((phase + PI) / two_pi).floor();
    // floor can land exactly on π after rounding
    if wrapped >= PI {
        wrapped - two_pi
    } else {
        wrapped
    }
}

/// One sinusoidal component `r·exp(i(φ + ωt))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub phase: f64,
    pub frequency: f64,
}

/// A set of sinusoids ordered by strictly increasing frequency.
///
/// Zero-amplitude components are dropped on construction and phases are
/// wrapped to `[-π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidSet {
    components: Vec<Sinusoid>,
}

impl SinusoidSet {
    pub fn new(components: impl IntoIterator<Item = Sinusoid>) -> Result<Self> {
        let mut comps = Vec::new();
        for c in components {
            if !(c.amplitude.is_finite() && c.phase.is_finite() && c.frequency.is_finite()) {
                return Err(invalid("sinusoid parameters must be finite"));
            }
            if c.amplitude < 0.0 {
                return Err(invalid(format!("negative amplitude {}", c.amplitude)));
            }
            if !(-PI..PI).contains(&c.frequency) {
                return Err(invalid(format!("frequency {} outside [-π, π)", c.frequency)));
            }
            if c.amplitude == 0.0 {
                continue;
            }
            comps.push(Sinusoid {
                phase: wrap_phase(c.phase),
                ..c
            });
        }
        comps.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        if comps.windows(2).any(|w| w[0].frequency == w[1].frequency) {
            return Err(invalid("component frequencies must be distinct"));
        }
        Ok(Self { components: comps })
    }

    /// Builds a set from parallel amplitude/phase/frequency slices.
    pub fn from_parts(amplitudes: &[f64], phases: &[f64], frequencies: &[f64]) -> Result<Self> {
        if amplitudes.len() != phases.len() || amplitudes.len() != frequencies.len() {
            return Err(invalid("amplitude, phase and frequency counts differ"));
        }
        Self::new(
            amplitudes
                .iter()
                .zip(phases)
                .zip(frequencies)
                .map(|((&amplitude, &phase), &frequency)| Sinusoid {
                    amplitude,
                    phase,
                    frequency,
                }),
        )
    }

    pub fn components(&self) -> &[Sinusoid] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.amplitude).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.phase).collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.frequency).collect()
    }
}

/// A finite sequence of complex samples `y_0 .. y_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    samples: Vec<Complex64>,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(invalid("signal must contain at least one sample"));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(invalid("signal samples must be finite"));
        }
        Ok(Self { samples })
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); n])
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// `Σ |y_t|²`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Parameters `θ = (ω₀, φ₁..φ_L, r₁..r_L)` of a perfectly harmonic waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicModelParams {
    pub omega0: f64,
    pub phases: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl HarmonicModelParams {
    pub fn new(omega0: f64, phases: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        let params = Self {
            omega0,
            phases,
            amplitudes,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let order = self.amplitudes.len();
        if order == 0 {
            return Err(invalid("harmonic model needs at least one harmonic"));
        }
        if self.phases.len() != order {
            return Err(invalid("phase and amplitude counts differ"));
        }
        if !(self.omega0 > 0.0 && self.omega0 < PI) {
            return Err(invalid(format!("omega0 {} outside (0, π)", self.omega0)));
        }
        if order as f64 * self.omega0 >= PI {
            return Err(invalid(format!(
                "harmonic {order} of omega0 {} is not below π",
                self.omega0
            )));
        }
        if self.amplitudes.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
            return Err(invalid("harmonic amplitudes must be finite and non-negative"));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return Err(invalid("harmonic phases must be finite"));
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.amplitudes.len()
    }

    /// Number of real parameters, `2L + 1`.
    pub fn dim(&self) -> usize {
        2 * self.order() + 1
    }

    /// Flattens into `[ω₀, φ₁..φ_L, r₁..r_L]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.omega0);
        v.extend_from_slice(&self.phases);
        v.extend_from_slice(&self.amplitudes);
        v
    }

    /// Inverse of [`to_vec`](Self::to_vec); no validation.
    pub fn from_slice(theta: &[f64]) -> Self {
        assert!(theta.len() % 2 == 1, "θ has odd length 2L+1");
        let order = (theta.len() - 1) / 2;
        Self {
            omega0: theta[0],
            phases: theta[1..=order].to_vec(),
            amplitudes: theta[order + 1..].to_vec(),
        }
    }

    /// The waveform `μ_t(θ)` for `t = 0..n-1`.
    pub fn waveform(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|t| {
                let t = t as f64;
                self.amplitudes
                    .iter()
                    .zip(&self.phases)
                    .enumerate()
                    .map(|(i, (&r, &phi))| {
                        let l = (i + 1) as f64;
                        Complex64::from_polar(r, phi + l * self.omega0 * t)
                    })
                    .sum()
            })
            .collect()
    }
}

/// Harmonic signal whose component frequencies are perturbed by zero-mean
/// Gaussian inharmonicity `Δ_k ~ N(0, σ²_Δ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticPitchModel {
    pub omega0: f64,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub sigma2_delta: f64,
    pub sigma2_noise: f64,
}

impl StochasticPitchModel {
    pub fn new(
        omega0: f64,
        amplitudes: Vec<f64>,
        phases: Vec<f64>,
        sigma2_delta: f64,
        sigma2_noise: f64,
    ) -> Result<Self> {
        let model = Self {
            omega0,
            amplitudes,
            phases,
            sigma2_delta,
            sigma2_noise,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.amplitudes.len();
        if k == 0 || self.phases.len() != k {
            return Err(invalid("stochastic model needs matching, non-empty amplitudes and phases"));
        }
        if !(self.omega0 > 0.0 && k as f64 * self.omega0 < PI) {
            return Err(invalid(format!(
                "harmonics of omega0 {} must lie in (0, π)",
                self.omega0
            )));
        }
        if !(self.sigma2_delta >= 0.0 && self.sigma2_delta.is_finite()) {
            return Err(invalid("inharmonicity variance must be finite and non-negative"));
        }
        if !(self.sigma2_noise > 0.0 && self.sigma2_noise.is_finite()) {
            return Err(invalid("noise variance must be positive"));
        }
        Ok(())
    }

    pub fn components(&self) -> usize {
        self.amplitudes.len()
    }
}
