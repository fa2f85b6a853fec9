//! Batch front end for `plasmonkit-core`: TOML configuration in, CSV tables
//! plus a JSON metadata sidecar out.

pub mod commands;
pub mod config;
pub mod table;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{ConfigError, RunConfig};
pub use table::{read_table, LoadedTable, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Depolarization factors and principal axes.
    Depol,
    /// L dyadic of a star-shaped exclusion domain.
    Ldyadic,
    /// Perturbation matrix and perturbed eigenvalues at one frequency.
    Perturb,
    /// Static and size-corrected resonance per axis.
    Resonance,
    /// Observables on a frequency grid.
    Spectrum,
    /// Validity report of the one-step correction.
    Regime,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Depol => "depol",
            Command::Ldyadic => "ldyadic",
            Command::Perturb => "perturb",
            Command::Resonance => "resonance",
            Command::Spectrum => "spectrum",
            Command::Regime => "regime",
        })
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Numerical(#[from] plasmonkit_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize output: {0}")]
    Csv(#[from] csv::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Io(_) | RunError::Csv(_) | RunError::Pool(_) => EXIT_IO,
        }
    }

    /// Machine-readable record written to stderr.
    pub fn record(&self) -> ErrorRecord {
        let (kind, messages) = match self {
            RunError::Config(c) => ("config", c.violations.clone()),
            RunError::Numerical(e) => ("numerical", vec![e.to_string()]),
            other => ("io", vec![other.to_string()]),
        };
        ErrorRecord {
            error: kind,
            exit_code: self.exit_code(),
            messages,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub exit_code: i32,
    pub messages: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub command: String,
    pub library_version: &'static str,
    pub config_sha256: String,
    pub workers: Option<usize>,
    pub columns: Vec<String>,
    pub rows: usize,
}

/// Path of the metadata sidecar for output `out`.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Load `config`, run `command` on `workers` threads (rayon's default when
/// `None`) and write the table and its metadata atomically.
pub fn run(command: Command, config: &Path, out: &Path, workers: Option<usize>) -> Result<Table, RunError> {
    let (cfg, bytes) = RunConfig::load(config, command, out.to_path_buf())?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let table = pool.install(|| commands::execute(&cfg))?;

    let meta = Metadata {
        command: command.to_string(),
        library_version: env!("CARGO_PKG_VERSION"),
        config_sha256: sha256_hex(&bytes),
        workers,
        columns: table.columns.clone(),
        rows: table.rows.len(),
    };
    let mut meta_bytes = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
    meta_bytes.push(b'\n');
    table::write_atomic(out, &table.to_csv()?)?;
    table::write_atomic(&metadata_path(out), &meta_bytes)?;
    Ok(table)
}
