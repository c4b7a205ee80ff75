//! Report structure and output files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use hodgemetric_core::asymptotics::RayRow;
use hodgemetric_core::linalg::CMat;
use hodgemetric_core::C64;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

pub type Complex = [f64; 2];
pub type Matrix = Vec<Vec<Complex>>;

pub fn cx(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn cvec(v: &[C64]) -> Vec<Complex> {
    v.iter().copied().map(cx).collect()
}

pub fn cmat(m: &CMat) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| cx(m[(i, j)])).collect()).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RngInfo {
    pub algorithm: &'static str,
    pub seed: Option<u64>,
    /// How each command derives its per-point generator from the seed.
    pub streams: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandReport {
    pub command: Command,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub result: serde_json::Value,
}

impl CommandReport {
    pub fn failed(command: Command, error: String) -> Self {
        CommandReport { command, pass: false, error: Some(error), result: serde_json::Value::Null }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub rng: RngInfo,
    pub config: RunConfig,
    pub pass: bool,
    pub commands: Vec<CommandReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRecord {
    pub r: f64,
    pub lambda: f64,
    pub h11: f64,
    pub ratio_growth: f64,
    pub ratio_schwarz: f64,
}

impl From<&RayRow> for ProfileRecord {
    fn from(row: &RayRow) -> Self {
        ProfileRecord {
            r: row.r,
            lambda: row.lambda,
            h11: row.h11,
            ratio_growth: row.ratio_growth(),
            ratio_schwarz: row.ratio_schwarz(),
        }
    }
}

/// A CSV table to be written next to the report.
#[derive(Clone, Debug)]
pub struct Table {
    pub file: String,
    pub rows: Vec<ProfileRecord>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

pub fn write_csv(path: &Path, rows: &[ProfileRecord]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Writes the JSON report and all tables into `dir`; returns the report path.
pub fn write_outputs(dir: &Path, report_name: &str, report: &Report, tables: &[Table]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for t in tables {
        write_csv(&dir.join(&t.file), &t.rows)?;
    }
    let path = dir.join(report_name);
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    Ok(path)
}
