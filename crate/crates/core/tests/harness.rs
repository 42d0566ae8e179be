use inharmonic::harness::{run_experiment, run_experiment_with_threads, ExperimentConfig};

fn config(extra: &str) -> ExperimentConfig {
    ExperimentConfig::from_json(&format!(
        r#"{{
            "signal": {{"components": 5, "omega0": 0.3141592653589793,
                       "amplitudes": {{"rule": "gaussian_bell", "rho": 0.2}}}},
            {extra}
        }}"#
    ))
    .unwrap()
}

#[test]
fn noiseless_limit_has_negligible_error() {
    let cfg = config(
        r#""scenario": "snr-sweep", "sweep": [120], "trials": 1, "n_samples": 300,
           "estimators": ["mmle", "unstructured", "chs"]"#,
    );
    let out = run_experiment(&cfg).unwrap();
    for row in &out.summary {
        assert_eq!(row.n_failed, 0);
        assert!(row.mse < 1e-16, "{}: {}", row.estimator, row.mse);
        assert!((row.mean_estimate - row.reference).abs() < 1e-8);
    }
}

#[test]
fn summary_moments_agree_with_trials() {
    let cfg = config(
        r#""scenario": "string-beta-sweep", "sweep": [0, 0.001], "trials": 25, "seed": 3,
           "n_samples": 200, "estimators": ["mmle", "chs", "unstructured"]"#,
    );
    let out = run_experiment(&cfg).unwrap();
    for row in &out.summary {
        let errs: Vec<f64> = out
            .trials
            .iter()
            .filter(|t| t.sweep_value == row.sweep_value && t.estimator == row.estimator && !t.failed)
            .map(|t| t.squared_error)
            .collect();
        assert_eq!(errs.len(), row.n_trials - row.n_failed);
        let mse = errs.iter().sum::<f64>() / errs.len() as f64;
        assert!((mse - row.mse).abs() <= 1e-12 * mse);
        assert!((row.bias2 + row.variance - row.mse).abs() <= 1e-10 * row.mse);
    }
}

#[test]
fn failures_are_rare_in_the_reference_setting() {
    let cfg = config(
        r#""scenario": "string-beta-sweep", "sweep": [0.001], "trials": 100, "seed": 5,
           "estimators": ["mmle", "anls", "unstructured", "chs"]"#,
    );
    let out = run_experiment(&cfg).unwrap();
    let failed = out.trials.iter().filter(|t| t.failed).count();
    assert!(failed * 100 < out.trials.len(), "{failed} of {}", out.trials.len());
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let cfg = config(
        r#""scenario": "stochastic-sigma-sweep", "sweep": [1e-7], "trials": 16, "seed": 9,
           "n_samples": 200, "estimators": ["ml_map", "mmle", "chs"]"#,
    );
    let a = run_experiment_with_threads(&cfg, 1).unwrap();
    let b = run_experiment_with_threads(&cfg, 4).unwrap();
    assert_eq!(a.summary, b.summary);
    let key = |o: &inharmonic::harness::ExperimentOutput| {
        o.trials.iter().map(|t| (t.estimate.to_bits(), t.reference.to_bits())).collect::<Vec<_>>()
    };
    assert_eq!(key(&a), key(&b));
}

#[test]
fn invalid_configs_are_rejected() {
    let base = r#""signal": {"components": 5, "omega0": 0.3141592653589793,
                  "amplitudes": {"rule": "gaussian_bell", "rho": 0.2}}"#;
    for body in [
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 0, "estimators": ["mmle"]"#,
        r#""scenario": "snr-sweep", "sweep": [], "trials": 3, "estimators": ["mmle"]"#,
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": []"#,
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": ["mmle", "mmle"]"#,
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": ["ml_map"]"#,
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": ["yin"]"#,
        r#""scenario": "pitch-sweep", "sweep": [10], "trials": 3, "estimators": ["mmle"]"#,
        r#""scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": ["mmle"], "typo": 1"#,
    ] {
        let text = format!("{{{base}, {body}}}");
        let err = ExperimentConfig::from_json(&text).unwrap_err();
        assert!(matches!(err, inharmonic::Error::Config(_)), "{body}: {err}");
    }
    let wide = r#"{"signal": {"components": 5, "omega0": 0.7,
                  "amplitudes": {"rule": "gaussian_bell", "rho": 0.2}},
                  "scenario": "snr-sweep", "sweep": [10], "trials": 3, "estimators": ["mmle"]}"#;
    assert!(ExperimentConfig::from_json(wide).is_err());
}
