//! CSV and manifest writers. Every file is written to a temporary sibling
//! and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    U(u64),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::U(x as u64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::U(x)
    }
}

impl From<i64> for Cell {
    fn from(x: i64) -> Self {
        Cell::I(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::U(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::S(x.to_string())
    }
}

/// 17 significant digits, so every f64 reads back bit-exact.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::F(x) => format_float(*x),
            Cell::I(x) => x.to_string(),
            Cell::U(x) => x.to_string(),
            Cell::S(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).map_err(output_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(output_err)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

fn output_err(e: impl std::fmt::Display) -> CliError {
    CliError::Output(e.to_string())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
        }
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp-{}", std::process::id()));
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        CliError::Output(format!("{}: {e}", path.display()))
    })
}

/// Collects the files of one run and writes the manifest last.
pub struct Run<'a, P: Serialize> {
    pub experiment: &'a str,
    pub dir: PathBuf,
    pub seed: u64,
    pub workers: usize,
    pub params: &'a P,
    started: Instant,
    files: Vec<String>,
}

#[derive(Serialize)]
struct ConfigEcho<'a, P> {
    experiment: &'a str,
    seed: u64,
    workers: usize,
    output: String,
    parameters: &'a P,
}

#[derive(Serialize)]
struct Manifest<'a, P> {
    schema_version: u32,
    artifact: &'static str,
    artifact_version: &'static str,
    config: ConfigEcho<'a, P>,
    wall_time_s: f64,
    tolerances: Value,
    derived: Value,
    files: &'a [String],
}

impl<'a, P: Serialize> Run<'a, P> {
    pub fn new(experiment: &'a str, dir: PathBuf, seed: u64, workers: usize, params: &'a P) -> Self {
        Self { experiment, dir, seed, workers, params, started: Instant::now(), files: Vec::new() }
    }

    /// Write `table` to `<dir>/<name>` (a path relative to the output dir).
    pub fn csv(&mut self, name: &str, table: &Table) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), &table.to_bytes()?)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(output_err)?;
        bytes.push(b'\n');
        write_atomic(&self.dir.join(name), &bytes)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn finish(self, tolerances: Value, derived: Value) -> Result<PathBuf, CliError> {
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            artifact: env!("CARGO_PKG_NAME"),
            artifact_version: env!("CARGO_PKG_VERSION"),
            config: ConfigEcho {
                experiment: self.experiment,
                seed: self.seed,
                workers: self.workers,
                output: self.dir.display().to_string(),
                parameters: self.params,
            },
            wall_time_s: self.started.elapsed().as_secs_f64(),
            tolerances,
            derived,
            files: &self.files,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.experiment));
        let mut bytes = serde_json::to_vec_pretty(&manifest).map_err(output_err)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)?;
        Ok(path)
    }
}
