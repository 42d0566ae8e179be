//! Seeded Monte Carlo experiments and their CSV output.
//!
//! An experiment is described by a JSON [`ExperimentConfig`]:
//!
//! ```json
//! {
//!   "scenario": "string-beta-sweep",
//!   "signal": {
//!     "components": 5,
//!     "omega0": 0.3141592653589793,
//!     "amplitudes": {"rule": "gaussian_bell", "rho": 0.2},
//!     "phases": {"rule": "uniform_per_trial"}
//!   },
//!   "sweep": [0.0, 0.0005, 0.001, 0.002],
//!   "n_samples": 500,
//!   "snr_db": 10.0,
//!   "trials": 2000,
//!   "seed": 1,
//!   "estimators": ["mmle", "anls", "chs"],
//!   "output": "beta_sweep.csv"
//! }
//! ```
//!
//! Scenarios are `string-beta-sweep`, `string-N-sweep`, `snr-sweep` (string
//! model with `signal.beta`) and `stochastic-sigma-sweep` (Gaussian
//! inharmonicity with variance equal to the sweep value). Estimators are
//! `mmle`, `anls`, `unstructured`, `chs` and, in the stochastic scenario
//! only, `ml_map`. An optional `search` object overrides
//! [`SearchConfig`](crate::estimators::SearchConfig) fields, and
//! `trial_output` names a per-trial CSV.

mod config;
mod csv;
mod run;

pub use config::{AmplitudeRule, EstimatorKind, ExperimentConfig, PhaseRule, Scenario, SignalSpec};
pub use csv::{write_bounds, write_summary, write_trials, SUMMARY_HEADER, TRIAL_HEADER};
pub use run::{run_experiment, run_experiment_with_threads, ExperimentOutput, SummaryRow, TrialRecord};
