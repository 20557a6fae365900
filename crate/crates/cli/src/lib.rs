//! Batch driver: reads a JSON problem description, runs the matching solver
//! and writes CSV tables, sampled fields and PPM heatmaps.
//!
//! Exit codes: `0` success, `1` output I/O failure, `2` configuration error,
//! `3` numerical error. Nothing is left on disk when a run fails.

pub mod commands;
pub mod config;
pub mod field;

use config::{Command, Format};
use mesoscat_core::Exec;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Numerical(#[from] mesoscat_core::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

/// One output file, held in memory until the whole run has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub format: Format,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub output_dir: Option<PathBuf>,
    pub threads: Option<usize>,
    pub verbose: bool,
}

/// Runs one command end to end and returns the files written.
pub fn execute(inv: &Invocation) -> Result<Vec<PathBuf>, CliError> {
    let cfg = config::load(&inv.config)?;
    if inv.threads == Some(0) {
        return Err(CliError::Config("--threads must be >= 1".into()));
    }
    let exec = if inv.threads == Some(1) {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let log = |msg: &str| {
        if inv.verbose {
            eprintln!("mesoscat: {msg}");
        }
    };
    log(&format!(
        "{} from {}",
        inv.command.key(),
        inv.config.display()
    ));
    let work = || commands::dispatch(inv.command, &cfg, exec, &log);
    let artifacts = match inv.threads {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start {n} threads: {e}")))?
            .install(work)?,
        _ => work()?,
    };
    let dir = inv
        .output_dir
        .clone()
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let selected: Vec<&Artifact> = artifacts
        .iter()
        .filter(|a| cfg.output.formats.contains(&a.format))
        .collect();
    let written = write_all(&dir, &selected)?;
    for p in &written {
        log(&format!("wrote {}", p.display()));
    }
    Ok(written)
}

fn write_all(dir: &Path, artifacts: &[&Artifact]) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for a in artifacts {
        let path = dir.join(&a.name);
        if let Err(e) = std::fs::write(&path, &a.bytes) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            let _ = std::fs::remove_file(&path);
            return Err(CliError::Io(format!(
                "cannot write {}: {e}",
                path.display()
            )));
        }
        written.push(path);
    }
    Ok(written)
}
