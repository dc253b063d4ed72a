//! Physical parameters and the simulation grid.
//!
//! Frequencies are measured in units of the excited-state decay rate `gamma`,
//! times in `1/gamma`. The propagation coordinate is a length `zeta`; the
//! coupling constant `eta` carries units of `gamma` per length, so `eta * zeta
//! / gamma` is the dimensionless depth used on every output axis.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Atomic and field constants of the N-type medium.
///
/// The two radiative branching rates are not stored: the J = 1/2 <-> J = 1/2
/// Clebsch-Gordan coefficients fix them to `gamma/3` (pi) and `2 gamma/3`
/// (sigma), see [`PhysParams::gamma_p`] and [`PhysParams::gamma_s`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    /// Total decay rate of each excited state.
    pub gamma: f64,
    /// Ground-state coherence decay rate.
    pub gamma_g: f64,
    /// Control Rabi frequency on |1> <-> |4>.
    pub omega_c: Complex64,
    /// Probe detuning from |1> <-> |3>.
    pub delta_p: f64,
    /// Control detuning from |1> <-> |4>.
    pub delta_c: f64,
    /// Kerr detuning of the probe from |2> <-> |4>.
    pub delta_kerr: f64,
    /// Coupling constant, gamma per unit length.
    pub eta: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        PhysParams {
            gamma: 1.0,
            gamma_g: 0.0,
            omega_c: Complex64::new(1.0, 0.0),
            delta_p: 0.0,
            delta_c: 0.0,
            delta_kerr: 4.0,
            eta: 1.0,
        }
    }
}

impl PhysParams {
    pub fn new(
        gamma: f64,
        gamma_g: f64,
        omega_c: Complex64,
        delta_p: f64,
        delta_c: f64,
        delta_kerr: f64,
        eta: f64,
    ) -> Result<Self> {
        let p = PhysParams {
            gamma,
            gamma_g,
            omega_c,
            delta_p,
            delta_c,
            delta_kerr,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters at Raman resonance, `delta_p = delta_c = delta`, with `gamma = 1`,
    /// `Gamma = 0` and unit coupling constant.
    pub fn raman(omega_c: f64, delta: f64, delta_kerr: f64) -> Self {
        PhysParams {
            omega_c: Complex64::new(omega_c, 0.0),
            delta_p: delta,
            delta_c: delta,
            delta_kerr,
            ..PhysParams::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(invalid("gamma", format!("must be positive, got {}", self.gamma)));
        }
        if !(self.gamma_g.is_finite() && self.gamma_g >= 0.0) {
            return Err(invalid(
                "gamma_g",
                format!("must be non-negative, got {}", self.gamma_g),
            ));
        }
        // eta = 0 is accepted: it switches the medium off, which is a useful limit.
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(invalid("eta", format!("must be non-negative, got {}", self.eta)));
        }
        let finite = [
            ("omega_c", self.omega_c.re),
            ("omega_c", self.omega_c.im),
            ("delta_p", self.delta_p),
            ("delta_c", self.delta_c),
            ("delta_kerr", self.delta_kerr),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// Decay rate of the pi transitions, `gamma / 3`.
    pub fn gamma_p(&self) -> f64 {
        self.gamma / 3.0
    }

    /// Decay rate of the sigma transitions, `2 gamma / 3`.
    pub fn gamma_s(&self) -> f64 {
        2.0 * self.gamma / 3.0
    }

    pub fn is_raman_resonant(&self) -> bool {
        (self.delta_p - self.delta_c).abs() <= 1e-12 * self.gamma
    }

    /// Converts a propagation length into the dimensionless depth `eta zeta / gamma`.
    pub fn depth(&self, zeta: f64) -> f64 {
        self.eta * zeta / self.gamma
    }
}

/// Coupling constant `gamma N lambda^2 / (8 pi)`.
///
/// Units follow the inputs: with `number_density` in m^-3 and `wavelength` in m
/// the result is in units of `gamma` per metre.
pub fn coupling_constant(number_density: f64, wavelength: f64, gamma: f64) -> Result<f64> {
    if !(number_density > 0.0 && number_density.is_finite()) {
        return Err(invalid("number_density", "must be positive"));
    }
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(invalid("wavelength", "must be positive"));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(invalid("gamma", "must be positive"));
    }
    Ok(gamma * number_density * wavelength * wavelength / (8.0 * PI))
}

/// Uniform retarded-time grid plus the propagation stepping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimGrid {
    pub n_tau: usize,
    pub d_tau: f64,
    pub n_zeta: usize,
    /// Propagation step as a length; `eta * d_zeta` is the step in units of `gamma`.
    pub d_zeta: f64,
    /// Store a snapshot every `record_stride` propagation steps.
    pub record_stride: usize,
}

impl SimGrid {
    pub fn new(
        n_tau: usize,
        d_tau: f64,
        n_zeta: usize,
        d_zeta: f64,
        record_stride: usize,
    ) -> Result<Self> {
        let g = SimGrid {
            n_tau,
            d_tau,
            n_zeta,
            d_zeta,
            record_stride,
        };
        g.validate()?;
        Ok(g)
    }

    /// Grid covering depths up to `zeta_max` in `n_zeta` steps.
    pub fn with_depth(
        n_tau: usize,
        d_tau: f64,
        zeta_max: f64,
        n_zeta: usize,
        record_stride: usize,
    ) -> Result<Self> {
        if n_zeta == 0 {
            return Err(invalid("n_zeta", "must be at least 1"));
        }
        Self::new(n_tau, d_tau, n_zeta, zeta_max / n_zeta as f64, record_stride)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_tau < 2 || !self.n_tau.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.n_tau));
        }
        if !(self.d_tau > 0.0 && self.d_tau.is_finite()) {
            return Err(invalid("d_tau", "must be positive"));
        }
        if !(self.d_zeta > 0.0 && self.d_zeta.is_finite()) {
            return Err(invalid("d_zeta", "must be positive"));
        }
        if self.record_stride == 0 {
            return Err(invalid("record_stride", "must be at least 1"));
        }
        Ok(())
    }

    pub fn tau_span(&self) -> f64 {
        self.n_tau as f64 * self.d_tau
    }

    pub fn tau(&self, j: usize) -> f64 {
        j as f64 * self.d_tau
    }

    pub fn taus(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.n_tau).map(|j| self.tau(j))
    }

    pub fn zeta_max(&self) -> f64 {
        self.n_zeta as f64 * self.d_zeta
    }

    /// Propagation step indices at which snapshots are stored, always
    /// including the entrance (0) and the exit face (`n_zeta`).
    pub fn snapshot_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (0..=self.n_zeta).step_by(self.record_stride).collect();
        if *steps.last().unwrap() != self.n_zeta {
            steps.push(self.n_zeta);
        }
        steps
    }

    /// Checks that the time window holds the pulse plus the expected group
    /// delay: `tau_span >= tau0 + 6 sigma + max_delay`.
    pub fn check_window(&self, tau0: f64, sigma: f64, max_delay: f64) -> Result<()> {
        let needed = tau0 + 6.0 * sigma + max_delay.max(0.0);
        if self.tau_span() < needed {
            return Err(Error::WindowTooSmall(format!(
                "tau_span = {} but tau0 + 6 sigma + group delay = {}",
                self.tau_span(),
                needed
            )));
        }
        Ok(())
    }
}
