//! Probe-pulse propagation through a four-level N-type atomic medium.
//!
//! Two solvers share one set of parameter, grid and envelope types:
//!
//! * [`mbsolver`] marches the coupled Maxwell-Bloch equations (the
//!   four-level master equation of [`bloch`] plus the co-moving field equation),
//! * [`ssfm`] solves the reduced dispersion + Kerr model built from the
//!   closed-form coefficients of [`analytic`].
//!
//! [`analysis`] turns the resulting [`PropagationRecord`]s into spectra,
//! peak sets and comparison metrics.
//!
//! Units: frequencies in `gamma`, times in `1/gamma`, depth reported as
//! `eta zeta / gamma`.

pub mod analysis;
pub mod analytic;
pub mod bloch;
pub mod error;
pub mod fourier;
pub mod mbsolver;
pub mod params;
pub mod pulse;
pub mod record;
pub mod ssfm;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use params::{coupling_constant, PhysParams, SimGrid};
pub use pulse::{make_pulse, Envelope, PulseShape, PulseSpec};
pub use record::{transmission, PropagationRecord, SolverKind};
