//! Runs scenarios and writes their outputs.

use std::path::{Path, PathBuf};

use kerrsplit::analysis::{
    compare_records, find_peaks, is_fully_separated, power_spectrum, subpulse_delay, Comparison,
    PeakSet,
};
use kerrsplit::analytic::{self, delay_difference};
use kerrsplit::fourier::Spectral;
use kerrsplit::ssfm::{edge_power_fraction, propagate_model, LinearMode, SplitScheme};
use kerrsplit::{make_pulse, mbsolver, transmission, Envelope, PropagationRecord, SolverKind};

use crate::config::{OutputFormat, ScenarioConfig, SolverChoice};
use crate::error::CliError;
use crate::output::{self, list, num, KeyValues, Staging};

/// Largest full-vs-model exit peak offset, in `1/gamma`, counted as agreement.
pub const PEAK_OFFSET_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonStatus {
    Agree,
    /// Disagreement while the reduced model reported violated validity conditions.
    ExpectedDivergence,
    Divergence,
}

impl ComparisonStatus {
    pub fn name(self) -> &'static str {
        match self {
            ComparisonStatus::Agree => "agree",
            ComparisonStatus::ExpectedDivergence => "expected-divergence",
            ComparisonStatus::Divergence => "divergence",
        }
    }
}

pub fn classify(c: &Comparison, model_warnings: &[String]) -> ComparisonStatus {
    if c.peak_counts_match() && c.max_peak_offset <= PEAK_OFFSET_LIMIT {
        ComparisonStatus::Agree
    } else if model_warnings.iter().any(|w| w.starts_with("validity")) {
        ComparisonStatus::ExpectedDivergence
    } else {
        ComparisonStatus::Divergence
    }
}

/// Everything produced by one scenario, kept in memory for callers that
/// want the numbers without re-reading files.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub dir: PathBuf,
    pub full: Option<(PropagationRecord, KeyValues)>,
    pub model: Option<(PropagationRecord, KeyValues)>,
    pub comparison: Option<(Comparison, ComparisonStatus, KeyValues)>,
}

/// Runs the solvers selected in `cfg` without touching the filesystem.
pub fn solve(cfg: &ScenarioConfig) -> Result<(Option<PropagationRecord>, Option<PropagationRecord>), CliError> {
    let name = cfg.scenario.name.as_str();
    let p = cfg.params()?;
    let spec = cfg.pulse_spec()?;
    let grid = cfg.sim_grid()?;
    mbsolver::check_setup(&spec, &p, &grid).map_err(CliError::in_scenario(name))?;
    let pulse = make_pulse(&spec, &grid).map_err(CliError::in_scenario(name))?;

    let kind = cfg.solver.kind;
    let full = if matches!(kind, SolverChoice::Full | SolverChoice::Both) {
        let mut r = mbsolver::propagate_full(&pulse, &p).map_err(CliError::in_scenario(name))?;
        r.pulse = Some(spec);
        Some(r)
    } else {
        None
    };
    let model = if matches!(kind, SolverChoice::Model | SolverChoice::Both) {
        let mut r = propagate_model(&pulse, &p, &cfg.ssfm_options()).map_err(CliError::in_scenario(name))?;
        r.pulse = Some(spec);
        Some(r)
    } else {
        None
    };
    Ok((full, model))
}

/// Runs `cfg` and writes its outputs to `out` (replacing it). With
/// `solver.kind = "both"` each solver gets a subdirectory and a
/// `comparison.txt` is written next to them.
pub fn run_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let staging = Staging::new(out)?;
    let (full, model) = solve(cfg)?;
    let both = full.is_some() && model.is_some();

    let mut outcome = Outcome {
        dir: out.to_path_buf(),
        full: None,
        model: None,
        comparison: None,
    };
    for (record, slot) in [(full, &mut outcome.full), (model, &mut outcome.model)] {
        let Some(record) = record else { continue };
        let dir = if both {
            staging.path().join(record.solver.name())
        } else {
            staging.path().to_path_buf()
        };
        std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        let summary = summarize(&record, cfg)?;
        write_record(&dir, &record, &summary, cfg)?;
        *slot = Some((record, summary));
    }
    if let (Some((f, _)), Some((m, _))) = (&outcome.full, &outcome.model) {
        let c = compare_records(f, m).map_err(CliError::in_scenario(&cfg.scenario.name))?;
        let status = classify(&c, &m.warnings);
        let report = comparison_report(cfg, &c, status, &m.warnings);
        output::write_text(&staging.path().join("comparison.txt"), &report.render())?;
        outcome.comparison = Some((c, status, report));
    }
    staging.commit()?;
    Ok(outcome)
}

/// [`run_scenario`] with both solvers forced on.
pub fn compare_scenario(cfg: &ScenarioConfig, out: &Path) -> Result<Outcome, CliError> {
    let mut cfg = cfg.clone();
    cfg.solver.kind = SolverChoice::Both;
    run_scenario(&cfg, out)
}

fn write_record(dir: &Path, record: &PropagationRecord, summary: &KeyValues, cfg: &ScenarioConfig) -> Result<(), CliError> {
    let out = &cfg.output;
    if out.wants(OutputFormat::ExitCsv) {
        output::write_text(&dir.join("exit_envelope.csv"), &output::exit_csv(record.exit()?))?;
    }
    if out.wants(OutputFormat::RasterBin) {
        output::write_bytes(&dir.join("raster.bin"), &output::raster_bin(record))?;
    }
    if out.wants(OutputFormat::RasterCsv) {
        output::write_text(&dir.join("raster.csv"), &output::raster_csv(record))?;
    }
    if out.wants(OutputFormat::Spectra) {
        output::write_spectra(dir, record)?;
    }
    output::write_text(&dir.join("summary.txt"), &summary.render())
}

fn peaks_of(signal: &[f64], positions: &[f64], cfg: &ScenarioConfig) -> PeakSet {
    find_peaks(signal, positions, cfg.analysis.rel_threshold, cfg.analysis.min_prominence)
}

fn intensity_peaks(env: &Envelope, cfg: &ScenarioConfig) -> PeakSet {
    let taus: Vec<f64> = env.grid.taus().collect();
    peaks_of(&env.intensity(), &taus, cfg)
}

/// Key-value summary of one record: provenance, all inputs, and the
/// derived observables.
pub fn summarize(record: &PropagationRecord, cfg: &ScenarioConfig) -> Result<KeyValues, CliError> {
    let p = &record.params;
    let g = &record.grid;
    let mut kv = KeyValues::default();
    kv.push("scenario", &cfg.scenario.name);
    kv.push("provenance", &cfg.scenario.provenance);
    kv.push("solver", record.solver.name());
    if let SolverKind::Model { linear_mode, split_scheme } = record.solver {
        kv.push(
            "linear_mode",
            match linear_mode {
                LinearMode::Taylor3 => "taylor3",
                LinearMode::ExactChi => "exact_chi",
            },
        );
        kv.push(
            "split_scheme",
            match split_scheme {
                SplitScheme::Lie => "lie",
                SplitScheme::Strang => "strang",
            },
        );
        kv.push("passive_clamp", cfg.ssfm.passive_clamp);
    }
    kv.push("gamma", p.gamma);
    kv.push("gamma_g", p.gamma_g);
    kv.push("omega_c", p.omega_c.re);
    kv.push("omega_c_im", p.omega_c.im);
    kv.push("delta_p", p.delta_p);
    kv.push("delta_c", p.delta_c);
    kv.push("delta_kerr", p.delta_kerr);
    kv.push("eta", p.eta);
    if let Some(s) = record.pulse {
        kv.push("amp", s.amp);
        kv.push("sigma", s.sigma);
        kv.push("tau0", s.tau0);
        kv.push("shape", format!("{:?}", s.shape).to_lowercase());
    }
    kv.push("n_tau", g.n_tau);
    kv.push("d_tau", g.d_tau);
    kv.push("n_zeta", g.n_zeta);
    kv.push("d_zeta", g.d_zeta);
    kv.push("record_stride", g.record_stride);
    let depths = record.depths();
    let depth_max = depths.last().copied().unwrap_or(0.0);
    kv.push("depth_max", depth_max);
    kv.push("snapshots", record.snapshots.len());
    kv.push("rel_threshold", cfg.analysis.rel_threshold);
    kv.push("min_prominence", cfg.analysis.min_prominence);

    let exit = record.exit()?;
    kv.push("transmission", num(transmission(record)?));
    let peaks = intensity_peaks(exit, cfg);
    kv.push("peak_count", peaks.len());
    kv.push("peak_positions", list(&peaks.positions()));
    kv.push("peak_heights", list(&peaks.peaks.iter().map(|p| p.height).collect::<Vec<_>>()));
    kv.push("fully_separated", is_fully_separated(&exit.intensity(), &peaks));
    kv.push(
        "subpulse_delay",
        subpulse_delay(&peaks).map(num).unwrap_or_else(|_| "none".into()),
    );
    let separation = record
        .snapshots
        .iter()
        .zip(&depths)
        .find(|(env, _)| is_fully_separated(&env.intensity(), &intensity_peaks(env, cfg)))
        .map(|(_, d)| *d);
    kv.push("separation_depth", separation.map(|d| d.to_string()).unwrap_or_else(|| "none".into()));

    let spectrum = power_spectrum(exit)?;
    let speaks = peaks_of(&spectrum.power, &spectrum.omega, cfg);
    kv.push("spectral_peak_count", speaks.len());
    kv.push("spectral_peak_positions", list(&speaks.positions()));
    // Group-delay difference of the outermost spectral components, accrued
    // from the separation depth to the exit.
    let estimate = match (speaks.peaks.first(), speaks.peaks.last(), separation) {
        (Some(a), Some(b), Some(d)) if speaks.len() >= 2 && p.is_raman_resonant() => {
            delay_difference(p, a.position, b.position, depth_max - d).ok()
        }
        _ => None,
    };
    kv.push(
        "analytic_delay_estimate",
        estimate.map(num).unwrap_or_else(|| "none".into()),
    );

    // Convergence indicators.
    let peak_intensity = exit.intensity().iter().copied().fold(0.0, f64::max);
    let edge = exit.values[0].norm_sqr().max(exit.values[g.n_tau - 1].norm_sqr());
    kv.push(
        "boundary_intensity_ratio",
        num(if peak_intensity > 0.0 { edge / peak_intensity } else { 0.0 }),
    );
    let spectral = Spectral::new(g.n_tau, g.d_tau)?;
    kv.push(
        "spectral_edge_fraction",
        num(edge_power_fraction(&spectral, &spectral.to_modes(&exit.values))),
    );
    kv.push("max_trace_drift", num(record.max_trace_drift));
    let energies: Vec<f64> = record.snapshots.iter().map(|s| s.energy()).collect();
    let max_gain = energies.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    kv.push("max_snapshot_energy_gain", num(if energies.len() > 1 { max_gain } else { 0.0 }));
    if p.is_raman_resonant() {
        if let Ok(set) = analytic::dispersion_set(p) {
            kv.push("re_beta1", set.beta[1].re);
            kv.push("re_r_p", set.r_p.re);
            kv.push("im_r_p", set.r_p.im);
        }
    }
    kv.push("warning_count", record.warnings.len());
    kv.push("warnings", record.warnings.join(" | "));
    Ok(kv)
}

pub fn comparison_report(
    cfg: &ScenarioConfig,
    c: &Comparison,
    status: ComparisonStatus,
    model_warnings: &[String],
) -> KeyValues {
    let mut kv = KeyValues::default();
    kv.push("scenario", &cfg.scenario.name);
    kv.push("provenance", &cfg.scenario.provenance);
    kv.push("status", status.name());
    kv.push("l2_distance", num(c.l2_distance));
    kv.push("peak_count_full", c.peaks_a.len());
    kv.push("peak_count_model", c.peaks_b.len());
    kv.push("peaks_full", list(&c.peaks_a));
    kv.push("peaks_model", list(&c.peaks_b));
    kv.push("peak_offsets", list(&c.peak_offsets));
    kv.push("max_peak_offset", num(c.max_peak_offset));
    kv.push("peak_offset_limit", PEAK_OFFSET_LIMIT);
    kv.push("model_warning_count", model_warnings.len());
    kv.push("model_warnings", model_warnings.join(" | "));
    kv
}

/// Quantity swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    /// `delta_p = delta_c`, tabulating beta_0..beta_3 and R_p.
    Delta,
    /// `delta_kerr`, same columns.
    DeltaKerr,
    /// Probe frequency offset, tabulating chi (and its cubic Taylor form at Raman resonance).
    Omega,
}

impl SweepVar {
    pub fn default_range(self) -> (f64, f64) {
        match self {
            SweepVar::Delta | SweepVar::DeltaKerr => (0.0, 8.0),
            SweepVar::Omega => (-2.0, 2.0),
        }
    }
}

/// Tabulates analytic coefficients on `steps` evenly spaced points of `[from, to]`.
pub fn sweep(base: &kerrsplit::PhysParams, var: SweepVar, from: f64, to: f64, steps: usize) -> Result<String, CliError> {
    if steps < 2 || !from.is_finite() || !to.is_finite() || from >= to {
        return Err(CliError::Usage(format!(
            "sweep needs from < to and at least 2 steps, got [{from}, {to}] with {steps}"
        )));
    }
    base.validate()?;
    let xs = (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64);
    let mut s = String::new();
    use std::fmt::Write as _;
    match var {
        SweepVar::Delta | SweepVar::DeltaKerr => {
            let name = if var == SweepVar::Delta { "delta" } else { "delta_kerr" };
            let _ = writeln!(
                s,
                "{name},re_beta0,im_beta0,re_beta1,im_beta1,re_beta2,im_beta2,re_beta3,im_beta3,re_r_p,im_r_p"
            );
            for x in xs {
                let mut p = *base;
                if var == SweepVar::Delta {
                    p.delta_p = x;
                    p.delta_c = x;
                } else {
                    p.delta_kerr = x;
                }
                let set = analytic::dispersion_set(&p)?;
                let _ = write!(s, "{x}");
                for b in set.beta {
                    let _ = write!(s, ",{:e},{:e}", b.re, b.im);
                }
                let _ = writeln!(s, ",{:e},{:e}", set.r_p.re, set.r_p.im);
            }
        }
        SweepVar::Omega => {
            let set = analytic::dispersion_set(base).ok();
            let _ = write!(s, "omega,re_chi,im_chi");
            if set.is_some() {
                s.push_str(",re_chi_taylor3,im_chi_taylor3");
            }
            s.push('\n');
            for x in xs {
                let c = analytic::chi(x, base)?;
                let _ = write!(s, "{x},{:e},{:e}", c.re, c.im);
                if let Some(set) = &set {
                    let t = set.taylor(x);
                    let _ = write!(s, ",{:e},{:e}", t.re, t.im);
                }
                s.push('\n');
            }
        }
    }
    Ok(s)
}
