//! Pitch as the fundamental of the closest harmonic line spectrum under
//! optimal mass transport with quadratic ground cost.

mod chs;
mod spectrum;
mod transport;

pub use chs::{
    chs, maximal_harmonic_order, nearest_harmonic, q_cost, weighted_harmonic_fit, ChsResult,
    LocalMinimum,
};
pub use spectrum::{Atom, LineSpectrum};
pub use transport::{omt_distance, PlanEntry, TransportPlan, MASS_TOLERANCE};
