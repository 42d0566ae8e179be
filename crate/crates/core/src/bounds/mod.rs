//! Pseudo-true parameters and Cramér–Rao type bounds.

mod crlb;
mod derivatives;
mod hybrid;
mod linalg;
mod mcrlb;
mod pseudo;

pub use crlb::{
    chs_asymptotic_var, crlb_harmonic_asymptotic, crlb_harmonic_exact, crlb_unstructured,
    mse_misspecified, ChsVariance, UnstructuredCrlb,
};
pub use derivatives::{gradient_products, mu_gradient, mu_hessian};
pub use hybrid::{hcrlb, hybrid_fisher, Hcrlb, HybridFisher};
pub use linalg::{min_eigen_ratio, spd_inverse};
pub use mcrlb::{mcrlb_asymptotic, mcrlb_exact, McrlbAsymptotic, McrlbExact};
pub use pseudo::{pseudo_true, PseudoTrueResult, AMBIGUITY_TOLERANCE};

use crate::error::Result;
use crate::estimators::SearchConfig;
use crate::omt::{chs, LineSpectrum};
use crate::signal::{synth_sinusoids, SinusoidSet, StochasticPitchModel};

/// A named scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: String,
    pub value: f64,
}

/// Bounds, and the reference values they refer to, for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub n: usize,
    pub sigma2: f64,
    pub entries: Vec<BoundEntry>,
    pub warnings: Vec<String>,
}

impl BoundReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.value)
    }

    fn push(&mut self, name: impl Into<String>, value: f64) {
        self.entries.push(BoundEntry {
            name: name.into(),
            value,
        });
    }
}

/// All deterministic-waveform quantities for the signal `truth`, whose
/// `k`-th component (by frequency) is taken as harmonic `k`.
///
/// Entries: `pseudo_true_omega0`, `chs_omega0`, `crlb_harmonic` (exact, at
/// the pseudo-true parameter), `crlb_harmonic_asymptotic`, `mcrlb_exact`,
/// `mcrlb_asymptotic`, `chs_asymptotic_var` and `crlb_unstructured_k`.
pub fn deterministic_report(
    truth: &SinusoidSet,
    n: usize,
    sigma2: f64,
    cfg: &SearchConfig,
) -> Result<BoundReport> {
    let k = truth.len();
    let amps = truth.amplitudes();
    let freqs = truth.frequencies();
    let x = synth_sinusoids(truth, n)?;
    let pt = pseudo_true(&x, k, sigma2, cfg)?;
    let omt = chs(&LineSpectrum::from_sinusoids(&amps, &freqs)?, None)?;
    let mut report = BoundReport {
        n,
        sigma2,
        entries: Vec::new(),
        warnings: Vec::new(),
    };
    if pt.ambiguous {
        report.warnings.push("pseudo-true fundamental is ambiguous".into());
    }
    if omt.tie {
        report.warnings.push("closest harmonic spectrum is not unique".into());
    }
    report.push("pseudo_true_omega0", pt.omega0());
    report.push("chs_omega0", omt.omega0);
    report.push("crlb_harmonic", crlb_harmonic_exact(&pt.theta0, n, sigma2)?[0]);
    report.push("crlb_harmonic_asymptotic", crlb_harmonic_asymptotic(&amps, n, sigma2)?);
    report.push("mcrlb_exact", mcrlb_exact(&pt, &x, sigma2)?.omega0);
    let asym = mcrlb_asymptotic(&pt.theta0, truth.components(), sigma2, n)?;
    if asym.low_frequency {
        report.warnings.push("fundamental too close to zero for the asymptotic bound".into());
    }
    report.push("mcrlb_asymptotic", asym.value);
    let cv = chs_asymptotic_var(&amps, &freqs, n, sigma2)?;
    if !cv.premise_holds {
        report
            .warnings
            .push("inharmonicity too large for the CHS variance formula".into());
    }
    report.push("chs_asymptotic_var", cv.value);
    for (i, v) in crlb_unstructured(&amps, n, sigma2)?.frequency.iter().enumerate() {
        report.push(format!("crlb_unstructured_{}", i + 1), *v);
    }
    Ok(report)
}

/// Hybrid CRLB of every parameter of a stochastic model (`hcrlb_omega0`,
/// `hcrlb_phi1`, …, `hcrlb_delta5`) plus `hcrlb_omega1` for `ω₀ + Δ₁`.
pub fn stochastic_report(model: &StochasticPitchModel, n: usize) -> Result<BoundReport> {
    let bound = hcrlb(model, n)?;
    let labels = hybrid_fisher(model, n)?.labels();
    let mut report = BoundReport {
        n,
        sigma2: model.sigma2_noise,
        entries: Vec::new(),
        warnings: Vec::new(),
    };
    for (label, v) in labels.iter().zip(&bound.diagonal) {
        report.push(format!("hcrlb_{label}"), *v);
    }
    report.push("hcrlb_omega1", bound.omega1);
    report.push(
        "crlb_harmonic_asymptotic",
        crlb_harmonic_asymptotic(&model.amplitudes, n, model.sigma2_noise)?,
    );
    report.push(
        "crlb_unstructured_1",
        crlb_unstructured(&model.amplitudes, n, model.sigma2_noise)?.frequency[0],
    );
    Ok(report)
}
