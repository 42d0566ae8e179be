use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use super::config::{EstimatorKind, ExperimentConfig, PhaseRule};
use crate::bounds::{
    chs_asymptotic_var, crlb_harmonic_asymptotic, crlb_unstructured, hcrlb, mcrlb_asymptotic,
    mcrlb_exact, mse_misspecified, pseudo_true,
};
use crate::error::{invalid, Result};
use crate::estimators::{
    anls, chs_plugin, ml_map_hybrid, mmle_harmonic, unstructured_mle, EstimateResult, SearchConfig,
};
use crate::omt::{chs, LineSpectrum};
use crate::rng::{Purpose, StreamSeed};
use crate::signal::{
    add_noise, draw_inharmonicity, snr_to_noise_var, string_model_frequencies, synth_sinusoids,
    SinusoidSet, StochasticPitchModel,
};

/// One estimate of one target in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub trial: usize,
    /// Estimator and target, e.g. `mmle` or `ml_map/omega1`.
    pub estimator: String,
    /// `NaN` when the estimator failed.
    pub estimate: f64,
    pub reference: f64,
    pub squared_error: f64,
    pub converged: bool,
    pub failed: bool,
    pub wall_time_ms: f64,
}

/// Per sweep point, estimator and bound: sample moments of the error
/// `estimate − reference` over the successful trials.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub estimator: String,
    pub n_trials: usize,
    pub n_failed: usize,
    pub mean_estimate: f64,
    /// Mean of the per-trial references.
    pub reference: f64,
    /// Squared mean error.
    pub bias2: f64,
    /// Population variance of the error.
    pub variance: f64,
    /// Mean squared error; equals `bias2 + variance`.
    pub mse: f64,
    pub bound_name: String,
    /// Bound averaged over the trials' signal realizations.
    pub bound_value: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentOutput {
    pub summary: Vec<SummaryRow>,
    pub trials: Vec<TrialRecord>,
}

/// Reference values and bounds of one trial, keyed by target.
struct Target {
    name: String,
    estimate: Option<f64>,
    converged: bool,
    reference: f64,
    bounds: Vec<(&'static str, f64)>,
    wall_time_ms: f64,
}

struct TrialOutcome {
    targets: Vec<Target>,
}

fn draw_phases(cfg: &ExperimentConfig, sweep: usize, trial: usize) -> Vec<f64> {
    match &cfg.signal.phases {
        PhaseRule::Fixed { values } => values.clone(),
        PhaseRule::UniformPerTrial => {
            let mut rng = StreamSeed::for_trial(cfg.seed, sweep, trial, Purpose::Phases).rng();
            (0..cfg.signal.components)
                .map(|_| rng.random_range(-PI..PI))
                .collect()
        }
    }
}

fn run_estimator(
    kind: EstimatorKind,
    y: &crate::signal::ComplexSignal,
    k: usize,
    sigma2_delta: f64,
    search: &SearchConfig,
) -> (Option<EstimateResult>, f64) {
    let start = Instant::now();
    let est = match kind {
        EstimatorKind::Mmle => mmle_harmonic(y, k, search),
        EstimatorKind::Anls => anls(y, k, search),
        EstimatorKind::Unstructured => unstructured_mle(y, k, search),
        EstimatorKind::Chs => chs_plugin(y, k, search),
        EstimatorKind::MlMap => ml_map_hybrid(y, k, sigma2_delta, search),
    };
    (est.ok(), start.elapsed().as_secs_f64() * 1e3)
}

fn deterministic_trial(
    cfg: &ExperimentConfig,
    sweep: usize,
    value: f64,
    trial: usize,
) -> Result<TrialOutcome> {
    let k = cfg.signal.components;
    let n = cfg.n_at(value);
    let amps = cfg.signal.amplitude_values();
    let freqs = string_model_frequencies(cfg.signal.omega0, cfg.beta_at(value), k)?;
    let phases = draw_phases(cfg, sweep, trial);
    let sigma2 = snr_to_noise_var(&amps, cfg.snr_at(value))?;
    let truth = SinusoidSet::from_parts(&amps, &phases, &freqs)?;
    let x = synth_sinusoids(&truth, n)?;
    let y = add_noise(&x, sigma2, StreamSeed::for_trial(cfg.seed, sweep, trial, Purpose::Noise))?;

    let pt = pseudo_true(&x, k, sigma2, &cfg.search)?;
    let mcrlb = mcrlb_exact(&pt, &x, sigma2)?.omega0;
    let mcrlb_asym = mcrlb_asymptotic(&pt.theta0, truth.components(), sigma2, n)?.value;
    let crlb_h = crlb_harmonic_asymptotic(&amps, n, sigma2)?;
    let chs_var = chs_asymptotic_var(&amps, &freqs, n, sigma2)?.value;
    let chs_w0 = chs(&LineSpectrum::from_sinusoids(&amps, &freqs)?, None)?.omega0;
    let crlb_u1 = crlb_unstructured(&amps, n, sigma2)?.frequency[0];

    let mut targets = Vec::new();
    for &kind in &cfg.estimators {
        let (est, ms) = run_estimator(kind, &y, k, 0.0, &cfg.search);
        let converged = est.as_ref().is_some_and(|e| e.diagnostics.converged);
        let (name, estimate, reference, bounds): (String, _, _, Vec<(&'static str, f64)>) = match kind {
            EstimatorKind::Mmle | EstimatorKind::Anls => (
                kind.name().into(),
                est.map(|e| e.omega0_hat),
                pt.omega0(),
                vec![
                    ("mcrlb_exact", mcrlb),
                    ("mcrlb_asymptotic", mcrlb_asym),
                    ("crlb_harmonic", crlb_h),
                ],
            ),
            EstimatorKind::Chs => (
                kind.name().into(),
                est.map(|e| e.omega0_hat),
                chs_w0,
                vec![("chs_asymptotic_var", chs_var), ("crlb_harmonic", crlb_h)],
            ),
            EstimatorKind::Unstructured => (
                format!("{}/omega1", kind.name()),
                est.map(|e| e.components[0].frequency),
                freqs[0],
                vec![("crlb_unstructured_1", crlb_u1)],
            ),
            EstimatorKind::MlMap => unreachable!("rejected by validation"),
        };
        targets.push(Target {
            name,
            estimate,
            converged,
            reference,
            bounds,
            wall_time_ms: ms,
        });
    }
    Ok(TrialOutcome { targets })
}

fn stochastic_trial(
    cfg: &ExperimentConfig,
    sweep: usize,
    sigma2_delta: f64,
    trial: usize,
) -> Result<TrialOutcome> {
    let k = cfg.signal.components;
    let n = cfg.n_samples;
    let w0 = cfg.signal.omega0;
    let amps = cfg.signal.amplitude_values();
    let phases = draw_phases(cfg, sweep, trial);
    let sigma2 = snr_to_noise_var(&amps, cfg.snr_db)?;
    let model = StochasticPitchModel::new(w0, amps.clone(), phases.clone(), sigma2_delta, sigma2)?;
    let delta = draw_inharmonicity(
        &model,
        StreamSeed::for_trial(cfg.seed, sweep, trial, Purpose::Inharmonicity),
    );
    let freqs: Vec<f64> = delta
        .iter()
        .enumerate()
        .map(|(i, d)| (i + 1) as f64 * w0 + d)
        .collect();
    if freqs.windows(2).any(|p| p[1] <= p[0]) || freqs[0] <= 0.0 || freqs[k - 1] >= PI {
        return Err(invalid("inharmonicity draw leaves (0, π) or reorders the components"));
    }
    let truth = SinusoidSet::from_parts(&amps, &phases, &freqs)?;
    let x = synth_sinusoids(&truth, n)?;
    let y = add_noise(&x, sigma2, StreamSeed::for_trial(cfg.seed, sweep, trial, Purpose::Noise))?;
    let omega1 = freqs[0];

    let h = hcrlb(&model, n)?;
    let crlb_u1 = crlb_unstructured(&amps, n, sigma2)?.frequency[0];
    let needs_pt = cfg
        .estimators
        .iter()
        .any(|e| matches!(e, EstimatorKind::Mmle | EstimatorKind::Anls));
    let pt_bounds = if needs_pt {
        let pt = pseudo_true(&x, k, sigma2, &cfg.search)?;
        let m = mcrlb_exact(&pt, &x, sigma2)?.omega0;
        Some((pt.omega0(), m))
    } else {
        None
    };
    let chs_info = if cfg.estimators.contains(&EstimatorKind::Chs) {
        let c = chs(&LineSpectrum::from_sinusoids(&amps, &freqs)?, None)?.omega0;
        Some((c, chs_asymptotic_var(&amps, &freqs, n, sigma2)?.value))
    } else {
        None
    };

    let mut targets = Vec::new();
    for &kind in &cfg.estimators {
        let (est, ms) = run_estimator(kind, &y, k, sigma2_delta, &cfg.search);
        let converged = est.as_ref().is_some_and(|e| e.diagnostics.converged);
        let w0_hat = est.as_ref().map(|e| e.omega0_hat);
        let w1_hat = est.as_ref().map(|e| match kind {
            EstimatorKind::MlMap | EstimatorKind::Unstructured => e.components[0].frequency,
            _ => e.omega0_hat,
        });
        let (mse0, mse1): (Vec<(&'static str, f64)>, Vec<(&'static str, f64)>) = match kind {
            EstimatorKind::Mmle | EstimatorKind::Anls => {
                let (p, m) = pt_bounds.expect("computed above");
                (
                    vec![("mcrlb_mse", mse_misspecified(m, p, w0))],
                    vec![("mcrlb_mse", mse_misspecified(m, p, omega1))],
                )
            }
            EstimatorKind::Chs => {
                let (c, v) = chs_info.expect("computed above");
                (
                    vec![("chs_var_mse", mse_misspecified(v, c, w0))],
                    vec![("chs_var_mse", mse_misspecified(v, c, omega1))],
                )
            }
            _ => (vec![], vec![]),
        };
        let mut b0 = vec![("hcrlb_omega0", h.omega0)];
        b0.extend(mse0);
        let mut b1 = vec![("hcrlb_omega1", h.omega1), ("crlb_unstructured_1", crlb_u1)];
        b1.extend(mse1);
        targets.push(Target {
            name: format!("{}/omega0", kind.name()),
            estimate: w0_hat,
            converged,
            reference: w0,
            bounds: b0,
            wall_time_ms: ms,
        });
        targets.push(Target {
            name: format!("{}/omega1", kind.name()),
            estimate: w1_hat,
            converged,
            reference: omega1,
            bounds: b1,
            wall_time_ms: ms,
        });
    }
    Ok(TrialOutcome { targets })
}

fn run_trial(cfg: &ExperimentConfig, sweep: usize, value: f64, trial: usize) -> Result<TrialOutcome> {
    if cfg.scenario.is_stochastic() {
        stochastic_trial(cfg, sweep, value, trial)
    } else {
        deterministic_trial(cfg, sweep, value, trial)
    }
}

/// Target names in output order for a configuration.
fn target_names(cfg: &ExperimentConfig) -> Vec<String> {
    let mut names = Vec::new();
    for &kind in &cfg.estimators {
        if cfg.scenario.is_stochastic() {
            names.push(format!("{}/omega0", kind.name()));
            names.push(format!("{}/omega1", kind.name()));
        } else if kind == EstimatorKind::Unstructured {
            names.push(format!("{}/omega1", kind.name()));
        } else {
            names.push(kind.name().to_string());
        }
    }
    names
}

/// Runs every trial of every sweep point.
///
/// Trials run in parallel on the current rayon pool. Each trial draws from
/// its own random streams and results are aggregated in trial order, so the
/// output does not depend on the number of threads. A trial whose signal or
/// references cannot be formed counts as a failure of every estimator.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let names = target_names(cfg);
    let mut out = ExperimentOutput::default();
    for (sweep, &value) in cfg.sweep.iter().enumerate() {
        let outcomes: Vec<Result<TrialOutcome>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| run_trial(cfg, sweep, value, trial))
            .collect();

        let mut errors: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        let mut estimates: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        let mut references: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
        let mut failed = vec![0usize; names.len()];
        let mut bound_sums: Vec<Vec<(&'static str, f64)>> = vec![Vec::new(); names.len()];
        let mut bound_counts = vec![0usize; names.len()];

        for (trial, outcome) in outcomes.into_iter().enumerate() {
            let Ok(outcome) = outcome else {
                for f in failed.iter_mut() {
                    *f += 1;
                }
                continue;
            };
            for (i, t) in outcome.targets.into_iter().enumerate() {
                debug_assert_eq!(t.name, names[i]);
                if bound_sums[i].is_empty() {
                    bound_sums[i] = t.bounds.iter().map(|&(b, _)| (b, 0.0)).collect();
                }
                for (acc, (_, v)) in bound_sums[i].iter_mut().zip(&t.bounds) {
                    acc.1 += v;
                }
                bound_counts[i] += 1;
                let (estimate, sq, is_failed) = match t.estimate {
                    Some(e) => {
                        let err = e - t.reference;
                        errors[i].push(err);
                        estimates[i].push(e);
                        references[i].push(t.reference);
                        (e, err * err, false)
                    }
                    None => {
                        failed[i] += 1;
                        (f64::NAN, f64::NAN, true)
                    }
                };
                out.trials.push(TrialRecord {
                    sweep_value: value,
                    trial,
                    estimator: t.name,
                    estimate,
                    reference: t.reference,
                    squared_error: sq,
                    converged: t.converged,
                    failed: is_failed,
                    wall_time_ms: t.wall_time_ms,
                });
            }
        }

        for (i, name) in names.iter().enumerate() {
            let mean = |v: &[f64]| if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
            let bias = mean(&errors[i]);
            let mse = mean(&errors[i].iter().map(|e| e * e).collect::<Vec<_>>());
            let variance = mean(&errors[i].iter().map(|e| (e - bias).powi(2)).collect::<Vec<_>>());
            let bounds: Vec<(&str, f64)> = if bound_sums[i].is_empty() {
                vec![("none", f64::NAN)]
            } else {
                bound_sums[i]
                    .iter()
                    .map(|&(b, s)| (b, s / bound_counts[i] as f64))
                    .collect()
            };
            for (bname, bval) in bounds {
                out.summary.push(SummaryRow {
                    sweep_value: value,
                    estimator: name.clone(),
                    n_trials: cfg.trials,
                    n_failed: failed[i],
                    mean_estimate: mean(&estimates[i]),
                    reference: mean(&references[i]),
                    bias2: bias * bias,
                    variance,
                    mse,
                    bound_name: bname.to_string(),
                    bound_value: bval,
                });
            }
        }
    }
    Ok(out)
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| crate::error::Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(cfg))
}
