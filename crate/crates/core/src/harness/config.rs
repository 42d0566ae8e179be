use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::SearchConfig;
use crate::signal::{gaussian_bell_amplitudes, string_model_frequencies};

/// What the sweep grid varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// String stiffness `β`.
    StringBetaSweep,
    /// Signal length `N`.
    #[serde(rename = "string-N-sweep")]
    StringNSweep,
    /// Inharmonicity variance `σ²_Δ` of the stochastic model.
    StochasticSigmaSweep,
    /// SNR in dB, string model with the configured `β`.
    SnrSweep,
}

impl Scenario {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Scenario::StochasticSigmaSweep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Mmle,
    Anls,
    Unstructured,
    Chs,
    MlMap,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Mmle => "mmle",
            EstimatorKind::Anls => "anls",
            EstimatorKind::Unstructured => "unstructured",
            EstimatorKind::Chs => "chs",
            EstimatorKind::MlMap => "ml_map",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum AmplitudeRule {
    /// `r_k = exp(−ρ (k − K/2)²)`.
    GaussianBell { rho: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhaseRule {
    /// Independent uniform phases on `[−π, π)` in every trial.
    #[default]
    UniformPerTrial,
    Fixed { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalSpec {
    pub components: usize,
    pub omega0: f64,
    pub amplitudes: AmplitudeRule,
    #[serde(default)]
    pub phases: PhaseRule,
    /// String stiffness for the deterministic scenarios other than the β sweep.
    #[serde(default)]
    pub beta: f64,
}

impl SignalSpec {
    pub fn amplitude_values(&self) -> Vec<f64> {
        match &self.amplitudes {
            AmplitudeRule::GaussianBell { rho } => gaussian_bell_amplitudes(self.components, *rho),
            AmplitudeRule::Explicit { values } => values.clone(),
        }
    }
}

/// A Monte Carlo experiment, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub signal: SignalSpec,
    /// Values of the swept quantity.
    pub sweep: Vec<f64>,
    /// Signal length; ignored by the N sweep.
    #[serde(default = "default_n")]
    pub n_samples: usize,
    /// SNR in dB; ignored by the SNR sweep.
    #[serde(default = "default_snr")]
    pub snr_db: f64,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    /// Summary CSV path; standard output when absent.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Optional per-trial CSV path.
    #[serde(default)]
    pub trial_output: Option<PathBuf>,
    #[serde(default)]
    pub search: SearchConfig,
}

fn default_n() -> usize {
    500
}

fn default_snr() -> f64 {
    10.0
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| config_error(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Signal length at sweep value `v`.
    pub fn n_at(&self, v: f64) -> usize {
        match self.scenario {
            Scenario::StringNSweep => v as usize,
            _ => self.n_samples,
        }
    }

    pub fn snr_at(&self, v: f64) -> f64 {
        match self.scenario {
            Scenario::SnrSweep => v,
            _ => self.snr_db,
        }
    }

    /// String stiffness at sweep value `v` (zero for the stochastic model).
    pub fn beta_at(&self, v: f64) -> f64 {
        match self.scenario {
            Scenario::StringBetaSweep => v,
            Scenario::StochasticSigmaSweep => 0.0,
            _ => self.signal.beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.signal;
        if s.components == 0 {
            return Err(config_error("signal.components must be at least 1"));
        }
        if !(s.omega0 > 0.0 && s.components as f64 * s.omega0 < PI) {
            return Err(config_error("signal.omega0 must keep all harmonics in (0, π)"));
        }
        let amps = s.amplitude_values();
        if amps.len() != s.components || amps.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(config_error("need one positive amplitude per component"));
        }
        if let PhaseRule::Fixed { values } = &s.phases {
            if values.len() != s.components || values.iter().any(|p| !p.is_finite()) {
                return Err(config_error("need one finite phase per component"));
            }
        }
        if self.trials == 0 {
            return Err(config_error("trials must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(config_error("sweep grid is empty"));
        }
        if self.estimators.is_empty() {
            return Err(config_error("no estimators selected"));
        }
        let unique: HashSet<_> = self.estimators.iter().collect();
        if unique.len() != self.estimators.len() {
            return Err(config_error("estimators listed twice"));
        }
        if !self.scenario.is_stochastic() && self.estimators.contains(&EstimatorKind::MlMap) {
            return Err(config_error(
                "ml_map needs an inharmonicity variance; use the stochastic-sigma-sweep scenario",
            ));
        }
        if !self.snr_db.is_finite() {
            return Err(config_error("snr_db must be finite"));
        }
        self.search
            .validate()
            .map_err(|e| config_error(format!("search: {e}")))?;
        if !(s.beta >= 0.0 && s.beta.is_finite()) {
            return Err(config_error("signal.beta must be non-negative"));
        }
        for &v in &self.sweep {
            if !v.is_finite() {
                return Err(config_error("sweep values must be finite"));
            }
            match self.scenario {
                Scenario::StringBetaSweep if v < 0.0 => {
                    return Err(config_error("β must be non-negative"));
                }
                Scenario::StringNSweep if !(v >= 2.0 && v.fract() == 0.0) => {
                    return Err(config_error("N sweep values must be integers ≥ 2"));
                }
                Scenario::StochasticSigmaSweep if !(v > 0.0) => {
                    return Err(config_error("σ²_Δ sweep values must be positive"));
                }
                _ => {}
            }
            if self.n_at(v) < 2 * s.components {
                return Err(config_error("signal too short for the number of components"));
            }
            if !self.scenario.is_stochastic() {
                string_model_frequencies(s.omega0, self.beta_at(v), s.components)
                    .map_err(|e| config_error(format!("sweep value {v}: {e}")))?;
            }
        }
        Ok(())
    }
}
