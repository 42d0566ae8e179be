//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha20 generator keyed by a
//! base seed and a 64-bit stream id. Monte Carlo trials address their own
//! streams, so the draws of a trial do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// What a stream is used for within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Phases = 1,
    Inharmonicity = 2,
    Noise = 3,
    Other = 4,
}

/// A (base seed, stream id) pair identifying an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamSeed {
    pub base: u64,
    pub stream: u64,
}

impl StreamSeed {
    pub fn new(base: u64, stream: u64) -> Self {
        Self { base, stream }
    }

    /// Stream for `purpose` in trial `trial` of sweep point `sweep`.
    pub fn for_trial(base: u64, sweep: usize, trial: usize, purpose: Purpose) -> Self {
        assert!(sweep < 1 << 16, "sweep index out of range");
        assert!(trial < 1 << 32, "trial index out of range");
        let stream = ((sweep as u64) << 40) | ((trial as u64) << 8) | purpose as u64;
        Self { base, stream }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.base);
        rng.set_stream(self.stream);
        rng
    }
}

impl From<u64> for StreamSeed {
    fn from(base: u64) -> Self {
        Self { base, stream: 0 }
    }
}
