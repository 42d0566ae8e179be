use super::spectrum::LineSpectrum;
use crate::error::{Error, Result};

/// Relative tolerance on the equality of total masses.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// One entry of a transport plan: `mass` moved from source atom `source`
/// to target atom `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanEntry {
    pub source: usize,
    pub target: usize,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TransportPlan {
    pub entries: Vec<PlanEntry>,
}

impl TransportPlan {
    /// Mass leaving each source atom.
    pub fn source_marginal(&self, sources: usize) -> Vec<f64> {
        let mut out = vec![0.0; sources];
        for e in &self.entries {
            out[e.source] += e.mass;
        }
        out
    }

    /// Mass arriving at each target atom.
    pub fn target_marginal(&self, targets: usize) -> Vec<f64> {
        let mut out = vec![0.0; targets];
        for e in &self.entries {
            out[e.target] += e.mass;
        }
        out
    }
}

fn ground_cost(a: f64, b: f64) -> f64 {
    (a - b) * (a - b)
}

/// Optimal transport between two line spectra under the cost `(ω₁ − ω₂)²`.
///
/// On the line, with a convex cost of the difference, the monotone
/// (north-west corner) coupling of the sorted atoms is optimal. Masses are
/// `2π · power`; the totals must agree to [`MASS_TOLERANCE`].
pub fn omt_distance(from: &LineSpectrum, to: &LineSpectrum) -> Result<(f64, TransportPlan)> {
    let total_from = from.total_mass();
    let total_to = to.total_mass();
    if (total_from - total_to).abs() > MASS_TOLERANCE * total_from.max(total_to) {
        return Err(Error::MassMismatch {
            source_mass: total_from,
            target_mass: total_to,
        });
    }
    let src = from.atoms();
    let dst = to.atoms();
    let mut supply: Vec<f64> = src.iter().map(|a| a.mass()).collect();
    let mut demand: Vec<f64> = dst.iter().map(|a| a.mass()).collect();
    let mut plan = TransportPlan::default();
    let mut cost = 0.0;
    let (mut i, mut j) = (0, 0);
    while i < src.len() && j < dst.len() {
        let last_src = i + 1 == src.len();
        let last_dst = j + 1 == dst.len();
        // the final cell absorbs the rounding-level mismatch of the totals
        let moved = if last_src && last_dst {
            supply[i].max(demand[j])
        } else if last_src {
            demand[j]
        } else if last_dst {
            supply[i]
        } else {
            supply[i].min(demand[j])
        };
        if moved > 0.0 {
            plan.entries.push(PlanEntry {
                source: i,
                target: j,
                mass: moved,
            });
            cost += moved * ground_cost(src[i].frequency, dst[j].frequency);
        }
        supply[i] -= moved;
        demand[j] -= moved;
        if last_src && last_dst {
            break;
        }
        if !last_src && (last_dst || supply[i] <= demand[j]) {
            i += 1;
        } else {
            j += 1;
        }
    }
    Ok((cost, plan))
}
