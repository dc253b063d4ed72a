//! File writers. Every file is a pure function of the record, so reruns of
//! the same configuration are byte-identical.
//!
//! Floats in data columns use Rust's shortest round-trip exponent form;
//! axis values use plain decimal form.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use kerrsplit::analysis::power_spectrum;
use kerrsplit::{Envelope, PropagationRecord};

use crate::error::CliError;

/// Leading bytes of the binary raster format.
pub const RASTER_MAGIC: &[u8; 8] = b"KSRASTR1";

/// Scratch directory next to the requested output directory. Unless
/// [`Staging::commit`] runs, it is removed on drop, so a failed run leaves
/// no partial output behind.
pub struct Staging {
    tmp: PathBuf,
    target: PathBuf,
    committed: bool,
}

impl Staging {
    pub fn new(target: &Path) -> Result<Self, CliError> {
        let name = target
            .file_name()
            .ok_or_else(|| CliError::Usage(format!("output path `{}` has no final component", target.display())))?;
        let mut tmp_name = std::ffi::OsString::from(".");
        tmp_name.push(name);
        tmp_name.push(".partial");
        let tmp = target.with_file_name(tmp_name);
        if tmp.exists() {
            fs::remove_dir_all(&tmp).map_err(CliError::io(&tmp))?;
        }
        fs::create_dir_all(&tmp).map_err(CliError::io(&tmp))?;
        Ok(Staging {
            tmp,
            target: target.to_path_buf(),
            committed: false,
        })
    }

    pub fn path(&self) -> &Path {
        &self.tmp
    }

    /// Replaces the target directory with the staged files.
    pub fn commit(mut self) -> Result<PathBuf, CliError> {
        if self.target.exists() {
            fs::remove_dir_all(&self.target).map_err(CliError::io(&self.target))?;
        }
        fs::rename(&self.tmp, &self.target).map_err(CliError::io(&self.target))?;
        self.committed = true;
        Ok(self.target.clone())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if !self.committed {
            let _ = fs::remove_dir_all(&self.tmp);
        }
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(CliError::io(path))
}

/// `tau,re,im,intensity` for the exit envelope.
pub fn exit_csv(env: &Envelope) -> String {
    let mut s = String::with_capacity(env.len() * 64);
    s.push_str("tau,re,im,intensity\n");
    for (tau, v) in env.grid.taus().zip(&env.values) {
        let _ = writeln!(s, "{tau},{:e},{:e},{:e}", v.re, v.im, v.norm_sqr());
    }
    s
}

/// Binary raster of `|Omega(depth, tau)|^2`, all little-endian:
/// magic (8 bytes), `n_rows: u64`, `n_cols: u64`, `n_rows` depths (f64),
/// `n_cols` tau values (f64), then `n_rows * n_cols` intensities (f64),
/// row-major with one row per stored depth.
pub fn raster_bin(record: &PropagationRecord) -> Vec<u8> {
    let depths = record.depths();
    let n_cols = record.grid.n_tau;
    let mut b = Vec::with_capacity(24 + 8 * (depths.len() + n_cols + depths.len() * n_cols));
    b.extend_from_slice(RASTER_MAGIC);
    b.extend_from_slice(&(depths.len() as u64).to_le_bytes());
    b.extend_from_slice(&(n_cols as u64).to_le_bytes());
    for d in &depths {
        b.extend_from_slice(&d.to_le_bytes());
    }
    for t in record.grid.taus() {
        b.extend_from_slice(&t.to_le_bytes());
    }
    for env in &record.snapshots {
        for v in &env.values {
            b.extend_from_slice(&v.norm_sqr().to_le_bytes());
        }
    }
    b
}

/// CSV form of the raster: a header row `depth\tau,tau_0,tau_1,...`, then
/// one row per stored depth.
pub fn raster_csv(record: &PropagationRecord) -> String {
    let mut s = String::new();
    s.push_str("depth\\tau");
    for t in record.grid.taus() {
        let _ = write!(s, ",{t}");
    }
    s.push('\n');
    for (env, d) in record.snapshots.iter().zip(record.depths()) {
        let _ = write!(s, "{d}");
        for v in &env.values {
            let _ = write!(s, ",{:e}", v.norm_sqr());
        }
        s.push('\n');
    }
    s
}

/// Writes `spectra/spectrum_NNNN.csv` (`omega,power`, ascending omega) for
/// every snapshot and `spectra/index.csv` mapping file index to depth.
pub fn write_spectra(dir: &Path, record: &PropagationRecord) -> Result<(), CliError> {
    let spectra = dir.join("spectra");
    fs::create_dir_all(&spectra).map_err(CliError::io(&spectra))?;
    let mut index = String::from("index,depth,file\n");
    for (i, (env, d)) in record.snapshots.iter().zip(record.depths()).enumerate() {
        let spec = power_spectrum(env)?;
        let file = format!("spectrum_{i:04}.csv");
        let mut s = String::with_capacity(spec.omega.len() * 40);
        s.push_str("omega,power\n");
        for (w, p) in spec.omega.iter().zip(&spec.power) {
            let _ = writeln!(s, "{w},{p:e}");
        }
        write_text(&spectra.join(&file), &s)?;
        let _ = writeln!(index, "{i},{d},{file}");
    }
    write_text(&spectra.join("index.csv"), &index)
}

/// Ordered `key=value` lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    pub fn push(&mut self, key: &str, value: impl ToString) {
        // Values are single-line by construction.
        let v = value.to_string().replace('\n', " ");
        self.0.push((key.to_string(), v));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    /// Parses text produced by [`KeyValues::render`].
    pub fn parse(text: &str) -> Self {
        KeyValues(
            text.lines()
                .filter_map(|l| l.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }
}

/// Plain decimal for moderate magnitudes, exponent form otherwise.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// Comma-joined list; empty lists render as an empty value.
pub fn list(values: &[f64]) -> String {
    values.iter().map(|&v| num(v)).collect::<Vec<_>>().join(",")
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut f = fs::File::create(path).map_err(CliError::io(path))?;
    f.write_all(bytes).map_err(CliError::io(path))
}

/// Writes `text` to `path` through a sibling temporary file, so an
/// interrupted write never leaves a truncated file.
pub fn write_file_atomic(path: &Path, text: &str) -> Result<(), CliError> {
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(path.file_name().unwrap_or_default());
    tmp_name.push(".partial");
    let tmp = path.with_file_name(tmp_name);
    if let Err(e) = write_text(&tmp, text) {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path).map_err(CliError::io(path))
}
