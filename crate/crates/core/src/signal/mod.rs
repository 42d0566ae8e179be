//! Signal models, synthesis, noise and the spectral/projection kernels.

mod periodogram;
mod projection;
mod synth;
mod types;

pub use periodogram::{padded_dft, periodogram, Periodogram};
pub use projection::{
    correlate, dirichlet, gram, hermitian_rcond, ls_amp_phase, residual_power, solve_amplitudes,
    ProjectionFit, MIN_RCOND,
};
pub use synth::{
    add_noise, draw_inharmonicity, gaussian_bell_amplitudes, inharmonicity, snr_to_noise_var,
    string_model_frequencies, synth_sinusoids,
};
pub use types::{
    wrap_phase, ComplexSignal, HarmonicModelParams, Sinusoid, SinusoidSet, StochasticPitchModel,
};
