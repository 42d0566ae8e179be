use std::io::Write;

use super::run::{SummaryRow, TrialRecord};
use crate::bounds::BoundReport;
use crate::error::Result;

pub const SUMMARY_HEADER: &str =
    "sweep_value,estimator,n_trials,n_failed,mean_estimate,reference,bias2,variance,mse,bound_name,bound_value";

pub const TRIAL_HEADER: &str =
    "sweep_value,trial,estimator,estimate,reference,squared_error,converged,failed,wall_time_ms";

/// Summary table; floats use the shortest representation that round-trips.
pub fn write_summary<W: Write>(mut w: W, rows: &[SummaryRow]) -> Result<()> {
    writeln!(w, "{SUMMARY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.sweep_value,
            r.estimator,
            r.n_trials,
            r.n_failed,
            r.mean_estimate,
            r.reference,
            r.bias2,
            r.variance,
            r.mse,
            r.bound_name,
            r.bound_value
        )?;
    }
    Ok(())
}

pub fn write_trials<W: Write>(mut w: W, rows: &[TrialRecord]) -> Result<()> {
    writeln!(w, "{TRIAL_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.sweep_value,
            r.trial,
            r.estimator,
            r.estimate,
            r.reference,
            r.squared_error,
            r.converged,
            r.failed,
            r.wall_time_ms
        )?;
    }
    Ok(())
}

/// `name,value` rows of a bound report.
pub fn write_bounds<W: Write>(mut w: W, report: &BoundReport) -> Result<()> {
    writeln!(w, "name,value")?;
    writeln!(w, "n_samples,{}", report.n)?;
    writeln!(w, "sigma2,{}", report.sigma2)?;
    for e in &report.entries {
        writeln!(w, "{},{}", e.name, e.value)?;
    }
    Ok(())
}
