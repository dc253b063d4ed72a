//! Probe envelopes on the retarded-time grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::params::SimGrid;

/// Largest boundary value tolerated when sampling an input pulse, relative to its peak.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    #[default]
    Gaussian,
    Sech,
}

impl PulseShape {
    /// Default centre time in units of the pulse width, chosen so that the
    /// leading tail at `tau = 0` stays below [`TRUNCATION_TOLERANCE`].
    pub fn default_center_widths(self) -> f64 {
        match self {
            PulseShape::Gaussian => 6.5,
            PulseShape::Sech => 20.0,
        }
    }

    fn profile(self, x: f64) -> f64 {
        match self {
            PulseShape::Gaussian => (-0.5 * x * x).exp(),
            PulseShape::Sech => 1.0 / x.cosh(),
        }
    }
}

/// Input pulse at the entrance face.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseSpec {
    /// Peak Rabi frequency, units of gamma.
    pub amp: f64,
    /// Temporal width, units of 1/gamma.
    pub sigma: f64,
    /// Centre time, units of 1/gamma.
    pub tau0: f64,
    pub shape: PulseShape,
}

impl PulseSpec {
    pub fn new(amp: f64, sigma: f64, tau0: f64, shape: PulseShape) -> Result<Self> {
        let s = PulseSpec {
            amp,
            sigma,
            tau0,
            shape,
        };
        s.validate()?;
        Ok(s)
    }

    /// Pulse centred at the shape's default offset from `tau = 0`.
    pub fn centered(amp: f64, sigma: f64, shape: PulseShape) -> Result<Self> {
        Self::new(amp, sigma, shape.default_center_widths() * sigma, shape)
    }

    pub fn gaussian(amp: f64, sigma: f64) -> Result<Self> {
        Self::centered(amp, sigma, PulseShape::Gaussian)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amp >= 0.0 && self.amp.is_finite()) {
            return Err(invalid("amp", format!("must be non-negative, got {}", self.amp)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(invalid("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(invalid("tau0", format!("must be positive, got {}", self.tau0)));
        }
        Ok(())
    }

    pub fn value(&self, tau: f64) -> f64 {
        self.amp * self.shape.profile((tau - self.tau0) / self.sigma)
    }
}

/// Complex probe Rabi frequency sampled on the retarded-time axis at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub grid: SimGrid,
    pub values: Vec<Complex64>,
    /// Propagation length at which the envelope was sampled.
    pub zeta: f64,
}

impl Envelope {
    pub fn new(grid: SimGrid, values: Vec<Complex64>, zeta: f64) -> Result<Self> {
        if values.len() != grid.n_tau {
            return Err(Error::GridMismatch(format!(
                "{} samples on a grid of {}",
                values.len(),
                grid.n_tau
            )));
        }
        Ok(Envelope { grid, values, zeta })
    }

    pub fn zeros(grid: SimGrid) -> Self {
        Envelope {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n_tau],
            zeta: 0.0,
        }
    }

    /// Builds an envelope by evaluating `f(tau)` on every grid sample.
    pub fn from_fn(grid: SimGrid, f: impl Fn(f64) -> Complex64) -> Self {
        Envelope {
            grid,
            values: grid.taus().map(f).collect(),
            zeta: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn intensity(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// `sum |Omega|^2 d_tau`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.d_tau
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Samples the input pulse on the grid.
pub fn make_pulse(spec: &PulseSpec, grid: &SimGrid) -> Result<Envelope> {
    spec.validate()?;
    grid.validate()?;
    let lo = spec.tau0 - 5.0 * spec.sigma;
    let hi = spec.tau0 + 5.0 * spec.sigma;
    let last = grid.tau(grid.n_tau - 1);
    if lo < 0.0 || hi > last {
        return Err(Error::WindowTooSmall(format!(
            "[tau0 - 5 sigma, tau0 + 5 sigma] = [{lo}, {hi}] not inside [0, {last}]"
        )));
    }
    let env = Envelope::from_fn(*grid, |tau| Complex64::new(spec.value(tau), 0.0));
    let limit = TRUNCATION_TOLERANCE * spec.amp;
    let (first, end) = (env.values[0].norm(), env.values[grid.n_tau - 1].norm());
    if first > limit || end > limit {
        return Err(Error::WindowTooSmall(format!(
            "boundary values {first:e} / {end:e} exceed {TRUNCATION_TOLERANCE:e} of the peak"
        )));
    }
    Ok(env)
}
