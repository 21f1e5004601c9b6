//! Result rows and their CSV/JSON emission. Only the leading `#` comment line
//! carries a timestamp, so bodies are reproducible byte for byte.

use std::io::Write;

use holoheis::stochastic::{MCEstimate, MCParams};
use num_complex::Complex64;
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One comparison of an estimate against a target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub config_hash: String,
    #[serde(rename = "T")]
    pub t: f64,
    pub steps: usize,
    pub paths: usize,
    pub seed: u64,
    pub target: f64,
    pub estimate_re: f64,
    pub estimate_im: f64,
    pub stderr: f64,
    pub pass: bool,
    pub target_im: f64,
}

/// Shared fields of the rows produced by one command.
#[derive(Debug, Clone)]
pub struct RowContext {
    pub hash: String,
    pub t: f64,
}

impl RowContext {
    /// Row for an exact (non-sampled) comparison.
    pub fn exact(&self, experiment: String, target: Complex64, estimate: Complex64, pass: bool) -> Row {
        Row {
            experiment,
            config_hash: self.hash.clone(),
            t: self.t,
            steps: 0,
            paths: 0,
            seed: 0,
            target: target.re,
            estimate_re: estimate.re,
            estimate_im: estimate.im,
            stderr: 0.0,
            pass,
            target_im: target.im,
        }
    }

    pub fn sampled(
        &self,
        experiment: String,
        params: &MCParams,
        target: Complex64,
        est: &MCEstimate,
        pass: bool,
    ) -> Row {
        Row {
            experiment,
            config_hash: self.hash.clone(),
            t: params.t,
            steps: params.steps,
            paths: params.paths,
            seed: params.seed,
            target: target.re,
            estimate_re: est.mean.re,
            estimate_im: est.mean.im,
            stderr: est.stderr,
            pass,
            target_im: target.im,
        }
    }
}

pub fn header_comment(command: &str) -> String {
    format!(
        "# holoheis {command} generated {}",
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
    )
}

/// Writes a `#` comment line followed by the CSV records.
pub fn write_csv<T: Serialize, W: Write>(out: W, command: &str, rows: &[T]) -> Result<(), CliError> {
    let mut out = out;
    writeln!(out, "{}", header_comment(command))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDoc<'a, T: Serialize> {
    command: &'a str,
    generated: String,
    rows: &'a [T],
}

pub fn write_json<T: Serialize, W: Write>(out: W, command: &str, rows: &[T]) -> Result<(), CliError> {
    let doc = JsonDoc {
        command,
        generated: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        rows,
    };
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

pub fn write_rows<T: Serialize, W: Write>(
    out: W,
    format: Format,
    command: &str,
    rows: &[T],
) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(out, command, rows),
        Format::Json => write_json(out, command, rows),
    }
}

/// Drops `#` comment lines, leaving the part of a CSV file that must be
/// reproducible.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}
