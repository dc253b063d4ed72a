//! Four-level master equation for the N-type atom.
//!
//! State labels follow the level scheme: |1>, |2> excited (m = -1/2, +1/2),
//! |3>, |4> ground (m = -1/2, +1/2). The probe drives |1> <-> |3> and
//! |2> <-> |4> (with opposite dipole signs), the control drives |1> <-> |4>.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::PhysParams;
use crate::pulse::Envelope;

/// Trace drift beyond which an integration is reported as too coarse.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Hermitian 4x4 density matrix stored as real populations plus the upper
/// triangle of coherences, so Hermiticity holds by construction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DensityMatrix {
    /// rho_11, rho_22, rho_33, rho_44
    pub pop: [f64; 4],
    /// rho_12, rho_13, rho_14, rho_23, rho_24, rho_34
    pub coh: [Complex64; 6],
}

fn coherence_slot(i: usize, j: usize) -> usize {
    match (i, j) {
        (1, 2) => 0,
        (1, 3) => 1,
        (1, 4) => 2,
        (2, 3) => 3,
        (2, 4) => 4,
        (3, 4) => 5,
        _ => unreachable!("not an upper-triangle index ({i},{j})"),
    }
}

impl DensityMatrix {
    /// Pure state |k><k|, `k` in 1..=4.
    pub fn pure(k: usize) -> Self {
        assert!((1..=4).contains(&k), "state label {k} out of range");
        let mut rho = DensityMatrix::default();
        rho.pop[k - 1] = 1.0;
        rho
    }

    /// All atoms in |3>, the initial condition of every propagation run.
    pub fn ground() -> Self {
        Self::pure(3)
    }

    /// Element rho_ij with 1-based state labels.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        assert!((1..=4).contains(&i) && (1..=4).contains(&j));
        if i == j {
            Complex64::new(self.pop[i - 1], 0.0)
        } else if i < j {
            self.coh[coherence_slot(i, j)]
        } else {
            self.coh[coherence_slot(j, i)].conj()
        }
    }

    /// Sets rho_ij (and implicitly rho_ji). Diagonal entries keep only the real part.
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        if i == j {
            self.pop[i - 1] = v.re;
        } else if i < j {
            self.coh[coherence_slot(i, j)] = v;
        } else {
            self.coh[coherence_slot(j, i)] = v.conj();
        }
    }

    pub fn to_matrix(&self) -> [[Complex64; 4]; 4] {
        let mut m = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.get(i + 1, j + 1);
            }
        }
        m
    }

    /// Builds from a full matrix, keeping the upper triangle and the real diagonal.
    pub fn from_matrix(m: &[[Complex64; 4]; 4]) -> Self {
        let mut rho = DensityMatrix::default();
        for i in 1..=4 {
            for j in i..=4 {
                rho.set(i, j, m[i - 1][j - 1]);
            }
        }
        rho
    }

    pub fn trace(&self) -> f64 {
        self.pop.iter().sum()
    }

    pub fn is_finite(&self) -> bool {
        self.pop.iter().all(|v| v.is_finite())
            && self.coh.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Probe source term `rho_24 - rho_13` of the field equation.
    pub fn source(&self) -> Complex64 {
        self.coh[4] - self.coh[1]
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        let p = self
            .pop
            .iter()
            .zip(&other.pop)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        self.coh
            .iter()
            .zip(&other.coh)
            .map(|(a, b)| (a - b).norm())
            .fold(p, f64::max)
    }

    fn axpy(&self, a: f64, x: &DensityMatrix) -> DensityMatrix {
        let mut out = *self;
        for (o, v) in out.pop.iter_mut().zip(&x.pop) {
            *o += a * v;
        }
        for (o, v) in out.coh.iter_mut().zip(&x.coh) {
            *o += v * a;
        }
        out
    }
}

impl Add for DensityMatrix {
    type Output = DensityMatrix;
    fn add(self, rhs: DensityMatrix) -> DensityMatrix {
        self.axpy(1.0, &rhs)
    }
}

impl Sub for DensityMatrix {
    type Output = DensityMatrix;
    fn sub(self, rhs: DensityMatrix) -> DensityMatrix {
        self.axpy(-1.0, &rhs)
    }
}

impl Mul<f64> for DensityMatrix {
    type Output = DensityMatrix;
    fn mul(self, a: f64) -> DensityMatrix {
        DensityMatrix::default().axpy(a, &self)
    }
}

/// Time derivative of the density matrix for a given probe Rabi frequency.
///
/// The nine independent element equations are written out directly; the
/// remaining population follows from trace conservation,
/// `d rho_44/dt = -(d rho_11 + d rho_22 + d rho_33)/dt`, which also carries
/// the repopulation `gamma_s rho_11 + gamma_p rho_22` of |4>.
pub fn bloch_rhs(rho: &DensityMatrix, omega_p: Complex64, p: &PhysParams) -> DensityMatrix {
    let g = p.gamma_p() + p.gamma_s();
    let wp = omega_p;
    let wpc = omega_p.conj();
    let wc = p.omega_c;
    let wcc = p.omega_c.conj();

    let [r11, r22, r33, r44] = rho.pop;
    let [r12, r13, r14, r23, r24, r34] = rho.coh;
    let (r21, r31, r41, r32, r42, r43) = (
        r12.conj(),
        r13.conj(),
        r14.conj(),
        r23.conj(),
        r24.conj(),
        r34.conj(),
    );

    let d11 = -g * r11 + (-I * wp * r31 + I * wpc * r13 + I * wc * r41 - I * wcc * r14).re;
    let d22 = -g * r22 + (I * wp * r42 - I * wpc * r24).re;
    let d33 = p.gamma_p() * r11 + p.gamma_s() * r22 + (-I * wpc * r13 + I * wp * r31).re;

    let d12 = -(g - I * (p.delta_c - p.delta_kerr)) * r12 + I * wc * r42
        - I * wp * r32
        - I * wpc * r14;
    let d13 = -(0.5 * g - I * p.delta_p) * r13 + I * wc * r43 - I * wp * (r33 - r11);
    let d14 = -(0.5 * g - I * p.delta_c) * r14 - I * wp * (r34 + r12) + I * wc * (r44 - r11);
    let d23 = -(0.5 * g + I * (p.delta_c - (p.delta_p + p.delta_kerr))) * r23
        + I * wp * r43
        + I * wp * r21;
    let d24 = -(0.5 * g - I * p.delta_kerr) * r24 + I * wp * (r44 - r22) - I * wc * r21;
    // Ground-state coherence relaxes at gamma_g; the detuning term carries the
    // sign that -i[H, rho] produces for the |3><4| element.
    let d34 = -(p.gamma_g + I * (p.delta_p - p.delta_c)) * r34
        - I * wpc * r14
        - I * wp * r32
        - I * wc * r31;

    DensityMatrix {
        pop: [d11, d22, d33, -(d11 + d22 + d33)],
        coh: [d12, d13, d14, d23, d24, d34],
    }
}

/// One classical RK4 step of length `h` with the probe at the start, middle
/// and end of the step.
pub fn rk4_step(
    rho: &DensityMatrix,
    h: f64,
    omega_start: Complex64,
    omega_mid: Complex64,
    omega_end: Complex64,
    p: &PhysParams,
) -> DensityMatrix {
    let k1 = bloch_rhs(rho, omega_start, p);
    let k2 = bloch_rhs(&rho.axpy(0.5 * h, &k1), omega_mid, p);
    let k3 = bloch_rhs(&rho.axpy(0.5 * h, &k2), omega_mid, p);
    let k4 = bloch_rhs(&rho.axpy(h, &k3), omega_end, p);
    rho.axpy(h / 6.0, &k1)
        .axpy(h / 3.0, &k2)
        .axpy(h / 3.0, &k3)
        .axpy(h / 6.0, &k4)
}

/// Density matrix at every sample of the retarded-time grid.
#[derive(Debug, Clone)]
pub struct BlochTrajectory {
    pub states: Vec<DensityMatrix>,
    pub d_tau: f64,
    /// Largest `|Tr rho - 1|` seen along the trajectory.
    pub max_trace_drift: f64,
}

impl BlochTrajectory {
    /// The field source `rho_24 - rho_13` at every sample.
    pub fn source(&self) -> Vec<Complex64> {
        self.states.iter().map(DensityMatrix::source).collect()
    }

    pub fn element(&self, i: usize, j: usize) -> Vec<Complex64> {
        self.states.iter().map(|r| r.get(i, j)).collect()
    }
}

/// Source sequence produced by an integration, without the full trajectory.
#[derive(Debug, Clone)]
pub struct SourceTrace {
    pub source: Vec<Complex64>,
    pub max_trace_drift: f64,
}

fn march(
    rho0: &DensityMatrix,
    envelope: &Envelope,
    p: &PhysParams,
    mut visit: impl FnMut(&DensityMatrix),
) -> Result<f64> {
    let h = envelope.grid.d_tau;
    let trace0 = rho0.trace();
    let mut rho = *rho0;
    let mut drift: f64 = 0.0;
    visit(&rho);
    for (j, w) in envelope.values.windows(2).enumerate() {
        let mid = 0.5 * (w[0] + w[1]);
        rho = rk4_step(&rho, h, w[0], mid, w[1], p);
        let d = (rho.trace() - trace0).abs();
        if !rho.is_finite() || d > TRACE_DRIFT_LIMIT {
            return Err(Error::InvariantViolation {
                tau: envelope.grid.tau(j + 1),
                what: if rho.is_finite() {
                    format!("trace drift {d:e} exceeds {TRACE_DRIFT_LIMIT:e}; reduce d_tau")
                } else {
                    "non-finite density matrix; reduce d_tau".to_string()
                },
            });
        }
        drift = drift.max(d);
        visit(&rho);
    }
    Ok(drift)
}

/// Integrates the master equation along the time axis of `envelope`, with
/// the probe interpolated linearly between samples.
pub fn integrate_bloch(
    rho0: &DensityMatrix,
    envelope: &Envelope,
    p: &PhysParams,
) -> Result<BlochTrajectory> {
    let mut states = Vec::with_capacity(envelope.len());
    let max_trace_drift = march(rho0, envelope, p, |r| states.push(*r))?;
    Ok(BlochTrajectory {
        states,
        d_tau: envelope.grid.d_tau,
        max_trace_drift,
    })
}

/// Integrates from |3><3| and keeps only the field source `rho_24 - rho_13`.
pub fn bloch_source(envelope: &Envelope, p: &PhysParams) -> Result<SourceTrace> {
    let mut source = Vec::with_capacity(envelope.len());
    let max_trace_drift = march(&DensityMatrix::ground(), envelope, p, |r| {
        source.push(r.source())
    })?;
    Ok(SourceTrace {
        source,
        max_trace_drift,
    })
}
