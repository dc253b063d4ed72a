//! Full Maxwell-Bloch propagation in the co-moving frame.
//!
//! In retarded time the field equation becomes an ODE in depth,
//! `d Omega_p / d zeta = i eta (rho_24 - rho_13)`, where the source at every
//! `tau` comes from integrating the master equation along `tau` with the
//! current envelope. Each depth step is one Heun predictor-corrector pass.

use num_complex::Complex64;

use crate::analytic;
use crate::bloch::bloch_source;
use crate::error::{invalid, Error, Result};
use crate::params::{PhysParams, SimGrid};
use crate::pulse::{make_pulse, Envelope, PulseSpec};
use crate::record::{PropagationRecord, SolverKind};

/// Largest stable depth step `eta d_zeta`, in units of gamma.
pub const MAX_STEP: f64 = 0.5;
/// Peak growth relative to the input that is reported as an instability.
pub const BLOW_UP_FACTOR: f64 = 10.0;

/// Group delay of the carrier over the whole medium, `eta zeta_max Re beta_1(0)`.
/// Falls back to zero when `omega = 0` sits on a pole of chi.
pub fn expected_group_delay(p: &PhysParams, grid: &SimGrid) -> f64 {
    analytic::chi_slope(0.0, p)
        .map(|s| p.eta * grid.zeta_max() * s.re)
        .unwrap_or(0.0)
}

/// Validates a pulse/grid/medium combination before a run.
pub fn check_setup(spec: &PulseSpec, p: &PhysParams, grid: &SimGrid) -> Result<()> {
    p.validate()?;
    spec.validate()?;
    grid.validate()?;
    grid.check_window(spec.tau0, spec.sigma, expected_group_delay(p, grid))
}

/// Propagates `pulse` through `grid.n_zeta` depth steps of the medium.
pub fn propagate_full(pulse: &Envelope, p: &PhysParams) -> Result<PropagationRecord> {
    p.validate()?;
    let grid = pulse.grid;
    grid.validate()?;
    let h = p.eta * grid.d_zeta;
    if h > MAX_STEP * p.gamma {
        return Err(invalid(
            "d_zeta",
            format!("eta * d_zeta = {h} exceeds {MAX_STEP} gamma"),
        ));
    }

    let input_peak = pulse.peak_amplitude();
    let stored = grid.snapshot_steps();
    let mut snapshots = Vec::with_capacity(stored.len());
    let mut next_store = stored.iter().peekable();

    let mut field = pulse.clone();
    field.zeta = 0.0;
    let mut drift: f64 = 0.0;
    let mut trial = field.clone();

    for step in 0..=grid.n_zeta {
        if next_store.peek() == Some(&&step) {
            snapshots.push(field.clone());
            next_store.next();
        }
        if step == grid.n_zeta {
            break;
        }

        let first = bloch_source(&field, p)?;
        for ((t, v), s) in trial.values.iter_mut().zip(&field.values).zip(&first.source) {
            *t = v + Complex64::i() * h * s;
        }
        let second = bloch_source(&trial, p)?;
        for ((v, s1), s2) in field.values.iter_mut().zip(&first.source).zip(&second.source) {
            *v += Complex64::i() * (0.5 * h) * (s1 + s2);
        }
        field.zeta = (step + 1) as f64 * grid.d_zeta;
        drift = drift.max(first.max_trace_drift).max(second.max_trace_drift);

        let peak = field.peak_amplitude();
        if !field.is_finite() || peak > BLOW_UP_FACTOR * input_peak {
            return Err(Error::BlowUp {
                depth: p.depth(field.zeta),
                peak,
                input_peak,
            });
        }
    }

    Ok(PropagationRecord {
        snapshots,
        params: *p,
        grid,
        pulse: None,
        solver: SolverKind::Full,
        max_trace_drift: drift,
        warnings: Vec::new(),
    })
}

/// Builds the input pulse from `spec`, checks the window and runs [`propagate_full`].
pub fn simulate_full(spec: &PulseSpec, p: &PhysParams, grid: &SimGrid) -> Result<PropagationRecord> {
    check_setup(spec, p, grid)?;
    let pulse = make_pulse(spec, grid)?;
    let mut record = propagate_full(&pulse, p)?;
    record.pulse = Some(*spec);
    Ok(record)
}
