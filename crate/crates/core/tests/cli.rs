use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn inharmonic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inharmonic")).args(args).output().unwrap()
}

fn name_values(text: &str) -> HashMap<String, f64> {
    text.lines()
        .skip(1)
        .filter_map(|l| {
            let (k, v) = l.split_once(',')?;
            Some((k.to_string(), v.parse().ok()?))
        })
        .collect()
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    std::fs::write(&csv, "t,re,im\n0,1,0\n1,0,1\n").unwrap();
    let csv = csv.to_str().unwrap();
    assert_eq!(inharmonic(&["estimate", "--input", csv, "--estimator", "yin"]).status.code(), Some(2));
    assert_eq!(inharmonic(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(inharmonic(&["estimate", "--input", "/nonexistent.csv", "--estimator", "mmle"]).status.code(), Some(2));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"scenario": "snr-sweep"}"#).unwrap();
    assert_eq!(inharmonic(&["mc", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bounds_coincide_without_stiffness() {
    let out = inharmonic(&["bounds", "--beta", "0"]);
    assert!(out.status.success());
    let v = name_values(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["n_samples"], 500.0);
    assert!(rel_err(v["mcrlb_exact"], v["crlb_harmonic"]) < 1e-9);
    assert!(rel_err(v["crlb_harmonic_asymptotic"], 6.264e-10) < 1e-3);
}

#[test]
fn synth_then_estimate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let csv = csv.to_str().unwrap();
    let synth = inharmonic(&["synth", "--beta", "0.001", "--n", "400", "--noiseless", "--out", csv]);
    assert!(synth.status.success());
    let estimate = |est: &str| {
        let out = inharmonic(&["estimate", "--input", csv, "--estimator", est]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        name_values(&String::from_utf8(out.stdout).unwrap())
    };
    let chs = estimate("chs");
    assert!((chs["omega0_hat"] - 0.3159982336342639).abs() < 1e-8, "{}", chs["omega0_hat"]);
    let free = estimate("unstructured");
    let w0 = std::f64::consts::PI / 10.0;
    for k in 1..=5 {
        let kf = k as f64;
        let truth = kf * w0 * (1.0 + kf * kf * 1e-3).sqrt();
        assert!((free[&format!("frequency_{k}")] - truth).abs() < 1e-8);
    }
    let out = inharmonic(&["estimate", "--input", csv, "--estimator", "ml-map"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mc_writes_summary_and_trials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mc.json");
    std::fs::write(
        &cfg,
        r#"{"scenario": "string-beta-sweep",
            "signal": {"components": 5, "omega0": 0.3141592653589793,
                       "amplitudes": {"rule": "gaussian_bell", "rho": 0.2}},
            "sweep": [0, 0.001], "n_samples": 200, "trials": 4,
            "estimators": ["mmle", "chs"]}"#,
    )
    .unwrap();
    let summary = dir.path().join("summary.csv");
    let trials = dir.path().join("trials.csv");
    let out = inharmonic(&[
        "mc",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        summary.to_str().unwrap(),
        "--trials-out",
        trials.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let read = |p: &Path| std::fs::read_to_string(p).unwrap();
    let s = read(&summary);
    assert!(s.starts_with("sweep_value,estimator,n_trials"));
    assert!(s.lines().skip(1).any(|l| l.starts_with("0.001,chs,4,0,")));
    // 2 sweep points, 2 estimators, 4 trials
    assert_eq!(read(&trials).lines().count(), 1 + 2 * 2 * 4);
}
