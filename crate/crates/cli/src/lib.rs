//! Command-line experiment runner for `holoheis`.
//!
//! Every command reads an [`ExperimentConfig`], writes rows as CSV (with one
//! leading `#` comment holding the timestamp) or JSON, and exits with 0 only
//! when every check in its output passes. Configuration problems exit with 2.

pub mod config;
pub mod report;
pub mod suite;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use holoheis::fock::taylor;
use holoheis::geometry::{bargmann_check, gaussian_bound_check, BoundReport, DistanceOptions};
use holoheis::poly::heat_expectation;
use holoheis::projections::projection_convergence;
use holoheis::stochastic::{sample_path, skeleton_mc_many, MCEstimate, MCParams};
use holoheis::{GroupElement, Polynomial};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use config::ExperimentConfig;
pub use report::{Format, Row};

use report::RowContext;
use suite::{Suite, SIGMAS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] holoheis::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// Keeps the message of a core config error without doubling the prefix.
    pub(crate) fn from_core_config(e: holoheis::Error) -> Self {
        match e {
            holoheis::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Config(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Io(_) | CliError::Core(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "holoheis", version, about = "Heat-kernel and Fock-space experiments on Heisenberg-type groups")]
pub struct Cli {
    /// Experiment configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides `mc.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads. Changes wall time only.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Heat-kernel MC of the `simulate` polynomials against the exact oracle.
    Simulate,
    /// Taylor tensor of the `taylor` polynomial.
    Taylor,
    /// Fock norm against the heat oracle and MC.
    Isometry,
    /// Skeleton MC against exact values on the configured points.
    Skeleton,
    /// Itô isometry and chaos-residual rate study.
    Chaos,
    /// Convergence of the Taylor tensors of `u∘π_P` as `P` grows.
    Project,
    /// Bargmann and Gaussian pointwise bounds.
    Bounds,
    /// The full verification suite.
    VerifyAll,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Taylor => "taylor",
            Command::Isometry => "isometry",
            Command::Skeleton => "skeleton",
            Command::Chaos => "chaos",
            Command::Project => "project",
            Command::Bounds => "bounds",
            Command::VerifyAll => "verify-all",
        }
    }
}

/// Runs the command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match try_run(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn try_run(cli: &Cli) -> Result<bool, CliError> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        cfg.mc.seed = seed;
    }
    let workers = cli.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    pool.install(|| execute(cli, &cfg))
}

fn execute(cli: &Cli, cfg: &ExperimentConfig) -> Result<bool, CliError> {
    let name = cli.command.name();
    let sink: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    };
    match cli.command {
        Command::Taylor => {
            taylor_command(cfg, sink, cli.format)?;
            Ok(true)
        }
        Command::Project => {
            let rows = project_rows(cfg)?;
            let pass = rows.iter().all(|r| r.pass);
            report::write_rows(sink, cli.format, name, &rows)?;
            Ok(pass)
        }
        Command::Bounds => {
            let rows = bounds_rows(cfg)?;
            let pass = rows.iter().all(|r| r.pass);
            report::write_rows(sink, cli.format, name, &rows)?;
            Ok(pass)
        }
        _ => {
            let rows = match cli.command {
                Command::Simulate => simulate_rows(cfg)?,
                Command::Isometry => isometry_rows(cfg)?,
                Command::Skeleton => skeleton_rows(cfg)?,
                Command::Chaos => chaos_rows(cfg)?,
                _ => verify_rows(cfg)?,
            };
            let pass = rows.iter().all(|r| r.pass);
            report::write_rows(sink, cli.format, name, &rows)?;
            Ok(pass)
        }
    }
}

fn ctx(cfg: &ExperimentConfig) -> RowContext {
    RowContext {
        hash: cfg.hash(),
        t: cfg.t,
    }
}

fn polynomials(cfg: &ExperimentConfig, list: &[String], section: &str) -> Result<Vec<Polynomial>, CliError> {
    if list.is_empty() {
        return Err(CliError::Config(format!("{section}.polynomials is empty")));
    }
    list.iter().map(|s| cfg.polynomial(s)).collect()
}

/// MC estimate of `E f(g_T)` together with a discretization allowance.
///
/// Every path is also coarsened by two. For a bias of order `Δt` the mean
/// difference between the two resolutions estimates the bias at the fine
/// one, so the allowance is `|mean diff| + 3·stderr(diff)`. Odd step counts
/// get no allowance.
fn estimate_with_allowance(f: &Polynomial, cfg: &ExperimentConfig, params: &MCParams) -> (MCEstimate, f64) {
    let group = &cfg.group;
    let pairs: Vec<(Complex64, Complex64)> = (0..params.paths as u64)
        .into_par_iter()
        .map(|i| {
            let b = sample_path(group, params, i);
            let fine = f.eval(&b.terminal_group(group));
            let coarse = match b.coarsen(2) {
                Ok(cb) if params.steps % 2 == 0 => f.eval(&cb.terminal_group(group)),
                _ => fine,
            };
            (fine, fine - coarse)
        })
        .collect();
    let fine: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let diff: Vec<Complex64> = pairs.iter().map(|p| p.1).collect();
    let est = MCEstimate::from_samples(&fine);
    let d = MCEstimate::from_samples(&diff);
    (est, d.mean.norm() + SIGMAS * d.stderr)
}

fn simulate_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let ctx = ctx(cfg);
    let params = cfg.mc_params();
    let fs = polynomials(cfg, &cfg.simulate.polynomials, "simulate")?;
    fs.iter()
        .zip(&cfg.simulate.polynomials)
        .map(|(f, text)| {
            let target = heat_expectation(f, cfg.t, &cfg.group)?;
            let (est, allowance) = estimate_with_allowance(f, cfg, &params);
            let pass = (est.mean - target).norm() <= SIGMAS * est.stderr + allowance;
            Ok(ctx.sampled(format!("simulate/{text}"), &params, target, &est, pass))
        })
        .collect()
}

fn isometry_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let ctx = ctx(cfg);
    let params = cfg.mc_params();
    let fs = polynomials(cfg, &cfg.isometry.polynomials, "isometry")?;
    let mut rows = Vec::new();
    for (f, text) in fs.iter().zip(&cfg.isometry.polynomials) {
        let fock = taylor(f, &cfg.group, f.graded_degree())?.fock_norm_sq(cfg.t)?;
        let oracle = heat_expectation(&f.modulus_sq(), cfg.t, &cfg.group)?;
        let rel = (oracle - fock).norm() / fock.abs().max(f64::MIN_POSITIVE);
        rows.push(ctx.exact(
            format!("isometry/oracle/{text}"),
            Complex64::new(fock, 0.0),
            oracle,
            rel <= 1e-9 || (oracle - fock).norm() == 0.0,
        ));
        let (est, allowance) = estimate_with_allowance(&f.modulus_sq(), cfg, &params);
        let target = Complex64::new(fock, 0.0);
        let pass = (est.mean - target).norm() <= SIGMAS * est.stderr + allowance;
        rows.push(ctx.sampled(format!("isometry/mc/{text}"), &params, target, &est, pass));
    }
    Ok(rows)
}

fn skeleton_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let ctx = ctx(cfg);
    let params = cfg.mc_params();
    let fs = polynomials(cfg, &cfg.skeleton.polynomials, "skeleton")?;
    let hs = &cfg.skeleton.points;
    if hs.is_empty() {
        return Err(CliError::Config("skeleton.points is empty".into()));
    }
    let ests = skeleton_mc_many(&fs, hs, &cfg.group, &params)?;
    let mut rows = Vec::new();
    for (i, (f, text)) in fs.iter().zip(&cfg.skeleton.polynomials).enumerate() {
        for (j, h) in hs.iter().enumerate() {
            // S_T f(h) exactly; equal to f(h) for holomorphic f
            let target = heat_expectation(&f.left_translate(&cfg.group, h)?, cfg.t, &cfg.group)?;
            let est = &ests[i][j];
            rows.push(ctx.sampled(
                format!("skeleton/{text}/h{j}"),
                &params,
                target,
                est,
                est.within(target, SIGMAS),
            ));
        }
    }
    Ok(rows)
}

fn chaos_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let suite = Suite::new(cfg);
    let (mut rows, _) = suite.ito_study(&cfg.chaos.ranks, cfg.mc.steps, cfg.mc.paths, 5000)?;
    if !cfg.chaos.polynomials.is_empty() {
        let fs = polynomials(cfg, &cfg.chaos.polynomials, "chaos")?;
        let (more, _) = suite.residual_study(&fs, &cfg.chaos.levels, cfg.mc.paths, 6000)?;
        rows.extend(more);
    }
    Ok(rows)
}

fn verify_rows(cfg: &ExperimentConfig) -> Result<Vec<Row>, CliError> {
    let suite = Suite::new(cfg);
    let mut rows = Vec::new();
    for (id, _) in suite::CRITERIA {
        let outcome = suite.run(id)?;
        eprintln!("{}", outcome.line());
        rows.extend(outcome.rows);
    }
    Ok(rows)
}

fn taylor_command(cfg: &ExperimentConfig, sink: Box<dyn Write>, format: Format) -> Result<(), CliError> {
    let f = cfg.polynomial(&cfg.taylor.polynomial)?;
    let maxrank = cfg.taylor.maxrank.unwrap_or_else(|| f.graded_degree());
    let alpha = taylor(&f, &cfg.group, maxrank)?;
    match format {
        Format::Json => {
            let mut sink = sink;
            serde_json::to_writer_pretty(&mut sink, &alpha.to_file())
                .map_err(|e| CliError::Io(e.to_string()))?;
            writeln!(sink)?;
            Ok(())
        }
        Format::Csv => {
            #[derive(Serialize)]
            struct Entry {
                config_hash: String,
                rank: usize,
                index: String,
                value_re: f64,
                value_im: f64,
            }
            let hash = cfg.hash();
            let rows: Vec<Entry> = alpha
                .to_records()
                .into_iter()
                .map(|r| Entry {
                    config_hash: hash.clone(),
                    rank: r.rank,
                    index: r
                        .index
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    value_re: r.value[0],
                    value_im: r.value[1],
                })
                .collect();
            report::write_csv(sink, "taylor", &rows)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProjectRow {
    pub config_hash: String,
    pub projection_rank: usize,
    pub tensor_rank: usize,
    pub error: f64,
    pub pass: bool,
}

fn project_rows(cfg: &ExperimentConfig) -> Result<Vec<ProjectRow>, CliError> {
    let u = cfg.polynomial(&cfg.project.polynomial)?;
    let k = cfg.group.k();
    let ranks = if cfg.project.ranks.is_empty() {
        (0..=k).collect()
    } else {
        cfg.project.ranks.clone()
    };
    let rep = projection_convergence(&u, &cfg.group, &ranks)?;
    let hash = cfg.hash();
    Ok(rep
        .rows
        .iter()
        .map(|r| ProjectRow {
            config_hash: hash.clone(),
            projection_rank: r.projection_rank,
            tensor_rank: r.tensor_rank,
            error: r.error,
            // only the full projection has a definite expected value
            pass: r.projection_rank < k || r.error == 0.0,
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsRow {
    pub check: String,
    pub point: String,
    #[serde(rename = "|f|")]
    pub value: f64,
    pub bound: f64,
    pub margin: f64,
    pub d_upper: f64,
    pub pass: bool,
}

pub fn format_point(g: &GroupElement) -> String {
    let part = |v: &[Complex64]| {
        v.iter()
            .map(|z| format!("{}{:+}i", z.re, z.im))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!("w=[{}] c=[{}]", part(&g.w), part(&g.c))
}

fn bounds_rows(cfg: &ExperimentConfig) -> Result<Vec<BoundsRow>, CliError> {
    let f = cfg.polynomial(&cfg.bounds.polynomial)?;
    let points = &cfg.bounds.points;
    if points.is_empty() {
        return Err(CliError::Config("bounds.points is empty".into()));
    }
    let opts = DistanceOptions {
        segments: cfg.bounds.segments,
        restarts: cfg.bounds.restarts,
        seed: cfg.mc.seed,
    };
    let params = cfg.mc_params();
    let mut reports: Vec<(String, BoundReport)> = Vec::new();
    if f.is_holomorphic() {
        reports.push(("bargmann".into(), bargmann_check(&f, &cfg.group, points, cfg.t, &opts)?));
    }
    for &p in &cfg.bounds.p {
        let rep = gaussian_bound_check(&f, &cfg.group, points, cfg.t, p, &opts, Some(&params))?;
        reports.push((format!("gaussian_p{p}"), rep));
    }
    Ok(reports
        .iter()
        .flat_map(|(check, rep)| {
            rep.rows.iter().map(move |r| BoundsRow {
                check: check.clone(),
                point: format_point(&r.point),
                value: r.value,
                bound: r.bound,
                margin: r.margin,
                d_upper: r.d_upper,
                pass: r.pass(),
            })
        })
        .collect())
}
