use crate::error::{Error, Result};
use crate::params::{PhysParams, SimGrid};
use crate::pulse::{Envelope, PulseSpec};
use crate::ssfm::{LinearMode, SplitScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverKind {
    /// Coupled Maxwell-Bloch equations.
    Full,
    /// Reduced dispersion + Kerr model by split-step Fourier.
    Model {
        linear_mode: LinearMode,
        split_scheme: SplitScheme,
    },
}

impl SolverKind {
    pub fn name(&self) -> &'static str {
        match self {
            SolverKind::Full => "full",
            SolverKind::Model { .. } => "model",
        }
    }
}

/// Envelopes at successive depths, entrance face first.
#[derive(Debug, Clone)]
pub struct PropagationRecord {
    pub snapshots: Vec<Envelope>,
    pub params: PhysParams,
    pub grid: SimGrid,
    pub pulse: Option<PulseSpec>,
    pub solver: SolverKind,
    /// Largest density-matrix trace drift seen by the Bloch integrations (full solver).
    pub max_trace_drift: f64,
    pub warnings: Vec<String>,
}

impl PropagationRecord {
    pub fn input(&self) -> Result<&Envelope> {
        self.snapshots.first().ok_or(Error::EmptyRecord)
    }

    pub fn exit(&self) -> Result<&Envelope> {
        self.snapshots.last().ok_or(Error::EmptyRecord)
    }

    /// Snapshot depths as `eta zeta / gamma`.
    pub fn depths(&self) -> Vec<f64> {
        self.snapshots
            .iter()
            .map(|s| self.params.depth(s.zeta))
            .collect()
    }
}

/// Energy transmitted to the exit face relative to the input,
/// `sum |Omega_exit|^2 / sum |Omega_in|^2`. A zero-energy input reports 0.
pub fn transmission(record: &PropagationRecord) -> Result<f64> {
    let e_in = record.input()?.energy();
    let e_out = record.exit()?.energy();
    if e_in == 0.0 {
        return Ok(0.0);
    }
    Ok(e_out / e_in)
}
