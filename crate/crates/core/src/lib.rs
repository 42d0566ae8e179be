//! Fundamental frequency of almost-harmonic signals.
//!
//! Three notions of pitch for signals whose partials are close to, but not
//! exactly at, integer multiples of a common frequency:
//!
//! * the best harmonic fit in ℓ2 (the pseudo-true parameter of a harmonic
//!   model fitted to inharmonic data), see [`bounds::pseudo_true`];
//! * the fundamental of the closest harmonic line spectrum under optimal
//!   mass transport, see [`omt::chs`];
//! * the expectation of a harmonic model with random Gaussian
//!   inharmonicity, see [`estimators::ml_map_hybrid`] and [`bounds::hcrlb`].
//!
//! The [`estimators`] module provides the matching estimators, [`bounds`]
//! the Cramér–Rao type bounds, and [`harness`] a seeded Monte Carlo runner
//! that writes the results as CSV.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod omt;
pub mod rng;
pub mod signal;

pub use error::{Error, Result};
