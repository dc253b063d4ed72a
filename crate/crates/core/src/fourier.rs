//! Discrete Fourier transforms with the envelope convention
//! `Omega(tau) = sum_k c_k exp(-i omega_k tau)`.
//!
//! Every module that moves between the time and frequency domains goes
//! through [`Spectral`], so the sign of the exponent (and with it the sign of
//! `Im chi`, i.e. absorption versus gain) is fixed in one place.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Angular frequency of DFT bin `k` for `n` samples spaced by `d_tau`, in
/// standard ordering (non-negative frequencies first, then negative).
pub fn omega(k: usize, n: usize, d_tau: f64) -> f64 {
    let span = n as f64 * d_tau;
    let k = if k < n / 2 { k as isize } else { k as isize - n as isize };
    2.0 * PI * k as f64 / span
}

pub fn omega_axis(n: usize, d_tau: f64) -> Vec<f64> {
    (0..n).map(|k| omega(k, n, d_tau)).collect()
}

/// Bin indices sorted by ascending frequency.
pub fn ascending_order(n: usize) -> impl Iterator<Item = usize> {
    (n / 2..n).chain(0..n / 2)
}

#[derive(Clone)]
pub struct Spectral {
    n: usize,
    d_tau: f64,
    // exp(-i ...): synthesis of the time signal from mode amplitudes
    synth: Arc<dyn Fft<f64>>,
    // exp(+i ...): analysis of the time signal
    analysis: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.n)
            .field("d_tau", &self.d_tau)
            .finish()
    }
}

impl Spectral {
    pub fn new(n: usize, d_tau: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Spectral {
            n,
            d_tau,
            synth: planner.plan_fft_forward(n),
            analysis: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d_omega(&self) -> f64 {
        2.0 * PI / (self.n as f64 * self.d_tau)
    }

    pub fn omega(&self, k: usize) -> f64 {
        omega(k, self.n, self.d_tau)
    }

    pub fn omegas(&self) -> Vec<f64> {
        omega_axis(self.n, self.d_tau)
    }

    /// Mode amplitudes `c_k = (1/n) sum_j x_j exp(+i omega_k tau_j)`, in place.
    pub fn forward(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.analysis.process(buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
    }

    /// Time samples `x_j = sum_k c_k exp(-i omega_k tau_j)`, in place.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.synth.process(buf);
    }

    pub fn to_modes(&self, values: &[Complex64]) -> Vec<Complex64> {
        let mut buf = values.to_vec();
        self.forward(&mut buf);
        buf
    }

    pub fn to_time(&self, modes: &[Complex64]) -> Vec<Complex64> {
        let mut buf = modes.to_vec();
        self.inverse(&mut buf);
        buf
    }

    /// Applies a frequency-domain multiplier `h(omega_k)` to a time signal.
    pub fn filter(&self, values: &mut [Complex64], mut h: impl FnMut(f64) -> Complex64) {
        self.forward(values);
        for (k, v) in values.iter_mut().enumerate() {
            *v *= h(self.omega(k));
        }
        self.inverse(values);
    }
}
