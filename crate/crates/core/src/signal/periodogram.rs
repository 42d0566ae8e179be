use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::types::ComplexSignal;
use crate::error::{invalid, Result};

/// Zero-padded DFT `Y_j = Σ_t y_t exp(−i 2π j t / M)`, `j = 0..M-1`.
pub fn padded_dft(y: &[Complex64], size: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    buf[..y.len()].copy_from_slice(y);
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(size).process(&mut buf);
    buf
}

/// Periodogram `|Σ_t y_t e^{−iωt}|² / N` on the grid `ω_j = 2πj/M`.
#[derive(Debug, Clone)]
pub struct Periodogram {
    power: Vec<f64>,
}

impl Periodogram {
    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn grid_size(&self) -> usize {
        self.power.len()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.power.len() as f64
    }

    pub fn frequency(&self, index: usize) -> f64 {
        index as f64 * self.spacing()
    }
}

pub fn periodogram(y: &ComplexSignal, grid_size: usize) -> Result<Periodogram> {
    let n = y.len();
    if grid_size < n {
        return Err(invalid(format!(
            "grid size {grid_size} smaller than signal length {n}"
        )));
    }
    let power = padded_dft(y.samples(), grid_size)
        .into_iter()
        .map(|z| z.norm_sqr() / n as f64)
        .collect();
    Ok(Periodogram { power })
}
