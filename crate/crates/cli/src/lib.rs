//! Batch front-end for the `kerrsplit` solvers.
//!
//! ```text
//! kerrsplit run      (--config FILE | --preset NAME) [--out DIR] [--override KEY=VALUE]...
//! kerrsplit compare  (--config FILE | --preset NAME) [--out DIR] [--override KEY=VALUE]...
//! kerrsplit sweep    --var delta|delta-kerr|omega [--from X] [--to X] [--steps N]
//!                    [--config FILE | --preset NAME] [--override KEY=VALUE]... [--out FILE]
//! kerrsplit presets-list
//! ```

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod scenario;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::ScenarioConfig;
pub use error::CliError;
use scenario::SweepVar;

#[derive(Debug, Parser)]
#[command(name = "kerrsplit", version, about = "Probe-pulse propagation in four-level N-type media")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its output files.
    Run(ScenarioArgs),
    /// Run both solvers on a scenario and write a comparison report.
    Compare(ScenarioArgs),
    /// Tabulate dispersion coefficients or the susceptibility.
    Sweep(SweepArgs),
    /// List the built-in presets.
    PresetsList,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Built-in preset name.
    #[arg(long)]
    pub preset: Option<String>,
    /// Override a config value, e.g. `physics.delta_p=8`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub source: Source,
    /// Output directory; replaces `output.dir` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SweepVarArg {
    Delta,
    DeltaKerr,
    Omega,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub var: SweepVarArg,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long, default_value_t = 81)]
    pub steps: usize,
    /// Physics defaults come from here when given.
    #[command(flatten)]
    pub source: Source,
    /// Output CSV file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load(source: &Source) -> Result<ScenarioConfig, CliError> {
    match (&source.config, &source.preset) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
            ScenarioConfig::parse(&text, &source.overrides)
        }
        (None, Some(name)) => presets::load(name, &source.overrides),
        _ => Err(CliError::Usage("exactly one of --config or --preset is required".into())),
    }
}

fn out_dir(cfg: &ScenarioConfig, out: &Option<PathBuf>) -> PathBuf {
    out.clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| {
            let name = if cfg.scenario.name.is_empty() {
                "scenario"
            } else {
                &cfg.scenario.name
            };
            PathBuf::from("out").join(name)
        })
}

/// Executes one command, writing human-readable progress to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match &cli.command {
        Command::Run(a) | Command::Compare(a) => {
            let cfg = load(&a.source)?;
            let dir = out_dir(&cfg, &a.out);
            let outcome = if matches!(cli.command, Command::Compare(_)) {
                scenario::compare_scenario(&cfg, &dir)?
            } else {
                scenario::run_scenario(&cfg, &dir)?
            };
            writeln!(stdout, "output={}", outcome.dir.display()).map_err(io)?;
            for (_, kv) in outcome.full.iter().chain(&outcome.model) {
                for key in ["solver", "transmission", "peak_count", "peak_positions", "subpulse_delay"] {
                    writeln!(stdout, "{key}={}", kv.get(key).unwrap_or("")).map_err(io)?;
                }
            }
            if let Some((_, status, _)) = &outcome.comparison {
                writeln!(stdout, "comparison={}", status.name()).map_err(io)?;
            }
        }
        Command::Sweep(a) => {
            let params = if a.source.config.is_some() || a.source.preset.is_some() {
                load(&a.source)?.params()?
            } else if a.source.overrides.is_empty() {
                kerrsplit::PhysParams::default()
            } else {
                return Err(CliError::Usage("--override needs --config or --preset".into()));
            };
            let var = match a.var {
                SweepVarArg::Delta => SweepVar::Delta,
                SweepVarArg::DeltaKerr => SweepVar::DeltaKerr,
                SweepVarArg::Omega => SweepVar::Omega,
            };
            let (lo, hi) = var.default_range();
            let csv = scenario::sweep(&params, var, a.from.unwrap_or(lo), a.to.unwrap_or(hi), a.steps)?;
            match &a.out {
                Some(path) => {
                    output::write_file_atomic(path, &csv)?;
                    writeln!(stdout, "output={}", path.display()).map_err(io)?;
                }
                None => stdout.write_all(csv.as_bytes()).map_err(io)?,
            }
        }
        Command::PresetsList => {
            for p in presets::PRESETS {
                let cfg = presets::load(p.name, &[])?;
                writeln!(stdout, "{}\t{}\t{}", p.name, cfg.solver.kind.name(), cfg.scenario.provenance).map_err(io)?;
            }
        }
    }
    Ok(())
}
