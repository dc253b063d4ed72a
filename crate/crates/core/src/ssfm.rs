//! Split-step Fourier solver for the reduced propagation model
//!
//! ```text
//! d Omega / d zeta = i eta [ chi_L(i d/dtau) Omega + R_p |Omega|^2 Omega ]
//! ```
//!
//! With the `exp(-i omega tau)` envelope convention, `i^n d^n/dtau^n` acts on
//! a mode as `omega^n`, so the linear operator is diagonal in frequency with
//! symbol `chi_L(omega)`: the third-order Taylor polynomial of `chi` or, for
//! validation, `chi` itself.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, DispersionSet};
use crate::error::{Error, Result};
use crate::fourier::Spectral;
use crate::params::PhysParams;
use crate::pulse::Envelope;
use crate::record::{PropagationRecord, SolverKind};

/// Fraction of the frequency axis, at each end, watched for aliasing.
pub const ALIAS_BAND: f64 = 0.1;
/// Spectral power fraction in the alias band that triggers a warning.
pub const ALIAS_LIMIT: f64 = 1e-6;
/// Peak growth relative to the input that is reported as an instability.
pub const BLOW_UP_FACTOR: f64 = 10.0;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LinearMode {
    /// `sum_{n<=3} beta_n omega^n / n!`
    #[default]
    Taylor3,
    /// Exact susceptibility.
    ExactChi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SplitScheme {
    /// Linear step then nonlinear step (first order).
    Lie,
    /// Half linear, full nonlinear, half linear (second order).
    #[default]
    Strang,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsfmOptions {
    pub linear_mode: LinearMode,
    pub split_scheme: SplitScheme,
    /// Clamp `Im chi_L` at zero. The cubic Taylor term turns into spurious
    /// gain far from the carrier, which amplifies round-off without bound.
    pub passive_clamp: bool,
}

impl Default for SsfmOptions {
    fn default() -> Self {
        SsfmOptions {
            linear_mode: LinearMode::Taylor3,
            split_scheme: SplitScheme::Strang,
            passive_clamp: true,
        }
    }
}

/// Linear symbol for every DFT bin.
fn linear_symbol(
    set: &DispersionSet,
    spectral: &Spectral,
    opts: &SsfmOptions,
) -> Result<Vec<Complex64>> {
    (0..spectral.len())
        .map(|k| {
            let w = spectral.omega(k);
            let mut s = match opts.linear_mode {
                LinearMode::Taylor3 => set.taylor(w),
                LinearMode::ExactChi => set.chi(w)?,
            };
            if opts.passive_clamp && s.im < 0.0 {
                s.im = 0.0;
            }
            Ok(s)
        })
        .collect()
}

/// Exact solution of `d Omega/d z = i h R |Omega|^2 Omega` over unit `z`:
/// the intensity decays as `I / (1 + 2 h Im R I)` and the phase is
/// `h Re R I ln(1 + x) / x` with `x = 2 h Im R I`. For `Im R = 0` this is
/// the pure phase rotation `exp(i h R I)`.
fn kerr_step(values: &mut [Complex64], h: f64, r_p: Complex64) {
    for v in values.iter_mut() {
        let intensity = v.norm_sqr();
        let x = 2.0 * h * r_p.im * intensity;
        let (scale, phase_factor) = if x.abs() < 1e-12 {
            (1.0 - 0.5 * x, 1.0 - 0.5 * x)
        } else {
            (1.0 / (1.0 + x).sqrt(), x.ln_1p() / x)
        };
        let phase = h * r_p.re * intensity * phase_factor;
        *v *= Complex64::from_polar(scale, phase);
    }
}

/// Conditions under which the reduced model is expected to track the full
/// solution: adiabatic following, a narrow spectrum for the Taylor expansion,
/// and a weak probe. Violations are returned as human-readable warnings.
pub fn validity_warnings(pulse: &Envelope, p: &PhysParams, zeta_max: f64) -> Result<Vec<String>> {
    let set = analytic::dispersion_set(p)?;
    let spectral = Spectral::new(pulse.len(), pulse.grid.d_tau)?;
    let modes = spectral.to_modes(&pulse.values);
    let total: f64 = modes.iter().map(|m| m.norm_sqr()).sum();
    let mut warnings = Vec::new();
    if total == 0.0 {
        return Ok(warnings);
    }
    let mean: f64 = modes
        .iter()
        .enumerate()
        .map(|(k, m)| spectral.omega(k) * m.norm_sqr())
        .sum::<f64>()
        / total;
    let rms0 = (modes
        .iter()
        .enumerate()
        .map(|(k, m)| (spectral.omega(k) - mean).powi(2) * m.norm_sqr())
        .sum::<f64>()
        / total)
        .sqrt();
    let peak_intensity = pulse.peak_amplitude().powi(2);
    // Peak self-phase over the medium and the resulting rms broadening of a Gaussian.
    let phi_max = p.eta * zeta_max * set.r_p.re.abs() * peak_intensity;
    let bandwidth = rms0 * (1.0 + 4.0 / (3.0 * 3f64.sqrt()) * phi_max * phi_max).sqrt();

    let c2 = p.omega_c.norm_sqr();
    let response_time = (1.0 / p.gamma).max(p.gamma / c2);
    if bandwidth * response_time > 0.1 {
        warnings.push(format!(
            "validity(alpha): spectral width {bandwidth:.4} (after SPM) is not small against the medium response rate {:.4}; adiabatic following is not guaranteed",
            1.0 / response_time
        ));
    }
    let radius = analytic::taylor_validity_radius(p);
    if 3.0 * bandwidth > radius {
        warnings.push(format!(
            "validity(beta): spectrum extends to ~{:.4} beyond the Taylor validity radius {radius:.4}",
            3.0 * bandwidth
        ));
    }
    let weak = 0.01 * (p.gamma * p.gamma).min(c2);
    if peak_intensity > weak {
        warnings.push(format!(
            "validity(gamma): peak intensity {peak_intensity:.4} exceeds the third-order regime bound {weak:.4}"
        ));
    }
    Ok(warnings)
}

/// Fraction of spectral power in the outer [`ALIAS_BAND`] of the frequency axis.
pub fn edge_power_fraction(spectral: &Spectral, modes: &[Complex64]) -> f64 {
    let w_max = spectral.omega(spectral.len() / 2).abs();
    let mut edge = 0.0;
    let mut total = 0.0;
    for (k, m) in modes.iter().enumerate() {
        let p = m.norm_sqr();
        total += p;
        if spectral.omega(k).abs() > (1.0 - ALIAS_BAND) * w_max {
            edge += p;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        edge / total
    }
}

/// Propagates `pulse` through the reduced model with the depth stepping of its
/// grid. Validity warnings for the medium are attached to the record.
pub fn propagate_model(pulse: &Envelope, p: &PhysParams, opts: &SsfmOptions) -> Result<PropagationRecord> {
    let set = analytic::dispersion_set(p)?;
    let mut warnings = validity_warnings(pulse, p, pulse.grid.zeta_max())?;
    let mut record = propagate_with(pulse, &set, opts)?;
    warnings.append(&mut record.warnings);
    record.warnings = warnings;
    Ok(record)
}

/// Split-step propagation with explicit coefficients. `set.params` supplies
/// `eta` and, for [`LinearMode::ExactChi`], the susceptibility.
pub fn propagate_with(pulse: &Envelope, set: &DispersionSet, opts: &SsfmOptions) -> Result<PropagationRecord> {
    let grid = pulse.grid;
    grid.validate()?;
    let p = &set.params;
    let spectral = Spectral::new(grid.n_tau, grid.d_tau)?;
    let h = p.eta * grid.d_zeta;
    let symbol = linear_symbol(set, &spectral, opts)?;
    let mut warnings = Vec::new();
    let (lin_h, nl_h) = match opts.split_scheme {
        SplitScheme::Lie => (h, h),
        SplitScheme::Strang => (0.5 * h, h),
    };
    let propagator: Vec<Complex64> = symbol.iter().map(|s| (I * lin_h * s).exp()).collect();

    let input_peak = pulse.peak_amplitude();
    let stored = grid.snapshot_steps();
    let mut next_store = stored.iter().peekable();
    let mut snapshots = Vec::with_capacity(stored.len());
    let mut field = pulse.clone();
    field.zeta = 0.0;
    let mut aliased = false;

    let apply_linear = |values: &mut Vec<Complex64>, aliased: &mut bool| {
        spectral.forward(values);
        for (v, u) in values.iter_mut().zip(&propagator) {
            *v *= u;
        }
        if !*aliased && edge_power_fraction(&spectral, values) > ALIAS_LIMIT {
            *aliased = true;
        }
        spectral.inverse(values);
    };

    for step in 0..=grid.n_zeta {
        if next_store.peek() == Some(&&step) {
            snapshots.push(field.clone());
            next_store.next();
        }
        if step == grid.n_zeta {
            break;
        }
        match opts.split_scheme {
            SplitScheme::Lie => {
                apply_linear(&mut field.values, &mut aliased);
                kerr_step(&mut field.values, nl_h, set.r_p);
            }
            SplitScheme::Strang => {
                apply_linear(&mut field.values, &mut aliased);
                kerr_step(&mut field.values, nl_h, set.r_p);
                apply_linear(&mut field.values, &mut aliased);
            }
        }
        field.zeta = (step + 1) as f64 * grid.d_zeta;
        let peak = field.peak_amplitude();
        if !field.is_finite() || peak > BLOW_UP_FACTOR * input_peak {
            return Err(Error::BlowUp {
                depth: p.depth(field.zeta),
                peak,
                input_peak,
            });
        }
    }
    if aliased {
        warnings.push(format!(
            "aliasing: more than {ALIAS_LIMIT:e} of the spectral power reached the outer {}% of the frequency grid",
            ALIAS_BAND * 100.0
        ));
    }

    Ok(PropagationRecord {
        snapshots,
        params: *p,
        grid,
        pulse: None,
        solver: SolverKind::Model {
            linear_mode: opts.linear_mode,
            split_scheme: opts.split_scheme,
        },
        max_trace_drift: 0.0,
        warnings,
    })
}
