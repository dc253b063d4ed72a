//! Scenario configuration files.
//!
//! A scenario is a TOML document with the sections `[scenario]`, `[solver]`,
//! `[physics]`, `[pulse]`, `[grid]`, `[ssfm]`, `[analysis]` and `[output]`.
//! Every section rejects unknown keys. All physical quantities are in units
//! of the excited-state decay rate: frequencies in `gamma`, times in
//! `1/gamma`, and the propagation step `d_zeta` such that `eta * d_zeta`
//! is the depth step in `eta zeta / gamma`.

use std::path::PathBuf;

use kerrsplit::analysis::{DEFAULT_MIN_PROMINENCE, DEFAULT_REL_THRESHOLD};
use kerrsplit::ssfm::{LinearMode, SplitScheme, SsfmOptions};
use kerrsplit::{Complex64, PhysParams, PulseShape, PulseSpec, SimGrid};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: ScenarioMeta,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub physics: PhysicsSection,
    pub pulse: PulseSection,
    pub grid: GridSection,
    #[serde(default)]
    pub ssfm: SsfmSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    #[serde(default)]
    pub name: String,
    /// Free text copied into the summary, e.g. the figure a preset reproduces.
    #[serde(default)]
    pub provenance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    #[default]
    Full,
    Model,
    Both,
}

impl SolverChoice {
    pub fn name(self) -> &'static str {
        match self {
            SolverChoice::Full => "full",
            SolverChoice::Model => "model",
            SolverChoice::Both => "both",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub kind: SolverChoice,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsSection {
    pub gamma: f64,
    pub gamma_g: f64,
    pub omega_c: f64,
    pub omega_c_im: f64,
    pub delta_p: f64,
    pub delta_c: f64,
    pub delta_kerr: f64,
    pub eta: f64,
}

impl Default for PhysicsSection {
    fn default() -> Self {
        let p = PhysParams::default();
        PhysicsSection {
            gamma: p.gamma,
            gamma_g: p.gamma_g,
            omega_c: p.omega_c.re,
            omega_c_im: p.omega_c.im,
            delta_p: p.delta_p,
            delta_c: p.delta_c,
            delta_kerr: p.delta_kerr,
            eta: p.eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSection {
    pub amp: f64,
    pub sigma: f64,
    /// Defaults to 6.5 sigma (gaussian) or 20 sigma (sech).
    #[serde(default)]
    pub tau0: Option<f64>,
    #[serde(default)]
    pub shape: PulseShape,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n_tau: usize,
    pub d_tau: f64,
    pub n_zeta: usize,
    pub d_zeta: f64,
    /// Defaults to `n_zeta / 20` (at least 1).
    #[serde(default)]
    pub record_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsfmSection {
    pub linear_mode: LinearMode,
    pub split_scheme: SplitScheme,
    pub passive_clamp: bool,
}

impl Default for SsfmSection {
    fn default() -> Self {
        let o = SsfmOptions::default();
        SsfmSection {
            linear_mode: o.linear_mode,
            split_scheme: o.split_scheme,
            passive_clamp: o.passive_clamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    pub rel_threshold: f64,
    pub min_prominence: f64,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection {
            rel_threshold: DEFAULT_REL_THRESHOLD,
            min_prominence: DEFAULT_MIN_PROMINENCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// `exit_envelope.csv`
    ExitCsv,
    /// `raster.bin`
    RasterBin,
    /// `raster.csv`
    RasterCsv,
    /// `spectra/spectrum_NNNN.csv`
    Spectra,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            formats: vec![
                OutputFormat::ExitCsv,
                OutputFormat::RasterBin,
                OutputFormat::RasterCsv,
                OutputFormat::Spectra,
            ],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

impl ScenarioConfig {
    /// Parses a TOML document, applies `section.key=value` overrides and
    /// validates the result against the schema.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config {
            path: String::new(),
            message: e.message().to_string(),
        })?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| CliError::Config {
            path: e.path().to_string(),
            message: e.into_inner().message().to_string(),
        })
    }

    pub fn params(&self) -> Result<PhysParams, CliError> {
        let s = &self.physics;
        Ok(PhysParams::new(
            s.gamma,
            s.gamma_g,
            Complex64::new(s.omega_c, s.omega_c_im),
            s.delta_p,
            s.delta_c,
            s.delta_kerr,
            s.eta,
        )?)
    }

    pub fn pulse_spec(&self) -> Result<PulseSpec, CliError> {
        let s = &self.pulse;
        let tau0 = s.tau0.unwrap_or(s.shape.default_center_widths() * s.sigma);
        Ok(PulseSpec::new(s.amp, s.sigma, tau0, s.shape)?)
    }

    pub fn sim_grid(&self) -> Result<SimGrid, CliError> {
        let g = &self.grid;
        let stride = g.record_stride.unwrap_or((g.n_zeta / 20).max(1));
        Ok(SimGrid::new(g.n_tau, g.d_tau, g.n_zeta, g.d_zeta, stride)?)
    }

    pub fn ssfm_options(&self) -> SsfmOptions {
        SsfmOptions {
            linear_mode: self.ssfm.linear_mode,
            split_scheme: self.ssfm.split_scheme,
            passive_clamp: self.ssfm.passive_clamp,
        }
    }
}

/// Sets `a.b.c = value` in `table`. The value is read as a TOML value and
/// falls back to a plain string, so `--override solver.kind=model` works
/// without quoting.
fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let bad = |message: &str| CliError::Override {
        spec: spec.to_string(),
        message: message.to_string(),
    };
    let (key, raw) = spec.split_once('=').ok_or_else(|| bad("expected key=value"))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(bad("empty key segment"));
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));

    let (last, path) = parts.split_last().expect("non-empty key");
    let mut cur = table;
    for p in path {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| bad(&format!("`{p}` is not a section")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
