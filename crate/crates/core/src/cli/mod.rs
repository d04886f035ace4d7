//! Command-line front end: `continue`, `detect`, `prove`, `pipeline`,
//! `verify` and `report`, all reading and writing JSON files.
//!
//! Exit codes: 0 success, 1 a proof failed, 2 bad input, 3 numerical failure.

pub mod config;
mod plot;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::continuation::{continue_manifold, ContinuationError, Flag, Triangulation};
use crate::detect::{detect_all, trace_triangle, DetectSummary};
use crate::model::{ModelError, ModelSpec};
use crate::prove::{prove_cusp, same_cusp, verify, CuspCertificate, ProveError};
pub use config::RunConfig;
pub use report::{CuspSummary, PipelineReport, ProofAttempt, Timings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    ProofFailed(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ProofFailed(_) => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<ContinuationError> for CliError {
    fn from(e: ContinuationError) -> Self {
        match e {
            ContinuationError::Schema(_) => CliError::Input(e.to_string()),
            ContinuationError::Model(ModelError::Domain(_)) => CliError::Numerical(format!("continuation: {e}")),
            ContinuationError::Model(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(format!("continuation: {e}")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cusp", version, about = "Detect and prove cusp bifurcations of two-parameter vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Bundled model name or path to a user model JSON file.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Run configuration JSON; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Radius of the ball for the contraction bound.
    #[arg(long = "r-star", global = true)]
    pub r_star: Option<f64>,
    /// Worker threads for detection and proofs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// A point `x1,...,xn,l1,l2`: the starting equilibrium for `continue`
    /// and `pipeline`, the proof seed for `prove`.
    #[arg(long = "seed-point", global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub seed_point: Option<Vec<f64>>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate the equilibrium manifold.
    Continue,
    /// Flag the triangles of a triangulation.
    Detect {
        /// Triangulation file (default `<out>/triangulation.json`).
        #[arg(long)]
        triangulation: Option<PathBuf>,
        /// Also write the g-samples of every CUSP triangle as CSV.
        #[arg(long)]
        samples: bool,
    },
    /// Certify cusps from flagged triangles or from `--seed-point`.
    Prove {
        /// Detection summary (default `<out>/detection.json`).
        #[arg(long)]
        from: Option<PathBuf>,
        /// Re-check a stored certificate instead.
        #[arg(long)]
        verify: Option<PathBuf>,
    },
    /// Continue, detect and prove, then write a report and plot data.
    Pipeline,
    /// Re-check a stored certificate from its `X_bar` alone.
    Verify { certificate: PathBuf },
    /// Print a stored pipeline report.
    Report {
        /// Report file (default `<out>/report.json`).
        report: Option<PathBuf>,
    },
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

/// Config from `--config`, with command-line flags applied on top.
pub fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if cli.model.is_some() {
        cfg.model = cli.model.clone();
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.r_star.is_some() {
        cfg.proof.r_star = cli.r_star;
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cli.seed_point.is_some() {
        cfg.seed_point = cli.seed_point.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses the process arguments, runs, and maps the result to an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = resolve_config(cli)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli, &cfg))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir();
    match &cli.command {
        Command::Continue => {
            let (_, tri) = cmd_continue(cfg)?;
            write(&out.join("triangulation.json"), &tri.to_json())
        }
        Command::Detect { triangulation, samples } => {
            let path = triangulation.clone().unwrap_or_else(|| out.join("triangulation.json"));
            let mut tri = Triangulation::from_json(&read(&path)?)?;
            let m = model_for(cfg, &tri.model)?;
            cmd_detect(cfg, &m, &mut tri, *samples).map(|_| ())
        }
        Command::Prove { verify: Some(cert), .. } | Command::Verify { certificate: cert } => cmd_verify(cfg, cert),
        Command::Prove { from, .. } => {
            let attempts = if cli.seed_point.is_some() {
                let m = cfg.model()?;
                let seed = cfg.seed_point.clone().expect("seed point given");
                vec![attempt(cfg, &m, None, None, &seed)?]
            } else {
                let path = from.clone().unwrap_or_else(|| out.join("detection.json"));
                if !path.exists() {
                    return Err(CliError::Input(format!(
                        "no seeds: {} does not exist; run `detect` first or pass --seed-point",
                        path.display()
                    )));
                }
                let summary: DetectSummary = serde_json::from_str(&read(&path)?)
                    .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
                let m = model_for(cfg, &summary.model)?;
                prove_candidates(cfg, &m, &summary)?
            };
            let (attempts, _) = record_attempts(&out, attempts)?;
            proof_outcome(&attempts)
        }
        Command::Pipeline => cmd_pipeline(cfg),
        Command::Report { report } => {
            let path = report.clone().unwrap_or_else(|| out.join("report.json"));
            let r = PipelineReport::from_json(&read(&path)?)?;
            print!("{}", r.table());
            Ok(())
        }
    }
}

/// The configured model, or the bundled model a file was written for.
fn model_for(cfg: &RunConfig, recorded: &str) -> Result<ModelSpec, CliError> {
    if cfg.model.is_some() {
        let m = cfg.model()?;
        if m.id != recorded {
            return Err(CliError::Input(format!("input was produced by model `{recorded}`, not `{}`", m.id)));
        }
        return Ok(m);
    }
    RunConfig { model: Some(recorded.to_string()), ..cfg.clone() }.model()
}

pub fn cmd_continue(cfg: &RunConfig) -> Result<(ModelSpec, Triangulation), CliError> {
    let m = cfg.model()?;
    let seed = m.seed.clone().ok_or_else(|| {
        CliError::Input(format!("model `{}` has no starting equilibrium: set `seed` in the model file or pass --seed-point", m.id))
    })?;
    let opts = cfg.continuation(&m)?;
    let tri = continue_manifold(&m, &seed, &opts)?;
    println!(
        "{}: {} nodes, {} simplices, Euler characteristic {}, max residual {:.1e}",
        m.id,
        tri.nodes.len(),
        tri.simplices.len(),
        tri.euler_characteristic(),
        tri.max_residual()
    );
    Ok((m, tri))
}

pub fn cmd_detect(
    cfg: &RunConfig,
    m: &ModelSpec,
    tri: &mut Triangulation,
    samples: bool,
) -> Result<DetectSummary, CliError> {
    let opts = cfg.detection();
    let summary = detect_all(m, tri, &opts);
    let out = cfg.out_dir();
    write(&out.join("triangulation_flagged.json"), &tri.to_json())?;
    write(&out.join("detection.json"), &json(&summary))?;
    let c = &summary.counts;
    println!("CUSP: {}, UNDETERMINED: {}, NO_CUSP: {}", c.cusp, c.undetermined, c.no_cusp);
    for r in summary.candidates() {
        let why = r.verdict.message.as_deref().unwrap_or("");
        println!("  triangle {} {:?} (step {}) {why}", r.id, r.verdict.flag, r.verdict.exit_step);
    }
    if samples {
        for r in summary.triangles.iter().filter(|r| r.verdict.flag == Flag::Cusp) {
            let trace = trace_triangle(m, tri, r.id, &opts).map_err(|e| CliError::Numerical(e.to_string()))?;
            plot::write_samples(&out.join("samples").join(format!("g_samples_{}.csv", r.id)), &trace.samples)?;
        }
    }
    Ok(summary)
}

fn attempt(
    cfg: &RunConfig,
    m: &ModelSpec,
    triangle: Option<usize>,
    flag: Option<Flag>,
    seed: &[f64],
) -> Result<(ProofAttempt, Option<CuspCertificate>), CliError> {
    match prove_cusp(m, seed, &cfg.proof(m)) {
        Ok(cert) => Ok((ProofAttempt::new(triangle, flag, seed, Some(&cert), None), Some(cert))),
        Err(ProveError::Invalid(msg)) => Err(CliError::Input(msg)),
        Err(e) => Ok((ProofAttempt::new(triangle, flag, seed, None, Some(e.to_string())), None)),
    }
}

/// Proof attempts for every CUSP, then every UNDETERMINED triangle, in
/// parallel but returned in this order.
pub fn prove_candidates(
    cfg: &RunConfig,
    m: &ModelSpec,
    summary: &DetectSummary,
) -> Result<Vec<(ProofAttempt, Option<CuspCertificate>)>, CliError> {
    let cands: Vec<_> = summary.candidates().collect();
    cands
        .par_iter()
        .map(|r| attempt(cfg, m, Some(r.id), Some(r.verdict.flag), &r.centroid))
        .collect()
}

/// All attempts, and the first attempt with its certificate for each distinct
/// cusp.
pub type Recorded = (Vec<ProofAttempt>, Vec<(ProofAttempt, CuspCertificate)>);

/// Writes one certificate per attempt, marks duplicates, prints a line per
/// attempt and returns the attempts with the distinct valid certificates.
pub fn record_attempts(out: &Path, attempts: Vec<(ProofAttempt, Option<CuspCertificate>)>) -> Result<Recorded, CliError> {
    let mut distinct: Vec<(ProofAttempt, CuspCertificate)> = Vec::new();
    let mut recorded = Vec::new();
    for (mut a, cert) in attempts {
        if let Some(cert) = cert {
            let name = match a.triangle {
                Some(id) => format!("certificate_{id}.json"),
                None => "certificate_seed.json".to_string(),
            };
            let path = out.join("certificates").join(&name);
            write(&path, &cert.to_json())?;
            a.certificate = Some(format!("certificates/{name}"));
            if cert.valid {
                match distinct.iter().find(|(_, c)| same_cusp(c, &cert)) {
                    Some((first, _)) => a.duplicate_of = first.triangle,
                    None => distinct.push((a.clone(), cert)),
                }
            }
        }
        println!("{}", a.line());
        recorded.push(a);
    }
    println!("{} distinct certified cusp(s)", distinct.len());
    Ok((recorded, distinct))
}

/// A failed proof of a CUSP triangle or of an explicit seed is an error;
/// UNDETERMINED triangles are attempted but allowed to fail.
fn proof_outcome(attempts: &[ProofAttempt]) -> Result<(), CliError> {
    let failed: Vec<String> = attempts
        .iter()
        .filter(|a| !a.valid && a.flag != Some(Flag::Undetermined))
        .map(|a| a.label())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::ProofFailed(format!("no certificate for {}", failed.join(", "))))
    }
}

fn cmd_pipeline(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir();
    let t0 = Instant::now();
    let (m, mut tri) = cmd_continue(cfg)?;
    write(&out.join("triangulation.json"), &tri.to_json())?;
    let t1 = Instant::now();
    let summary = cmd_detect(cfg, &m, &mut tri, false)?;
    let t2 = Instant::now();
    let (attempts, distinct) = record_attempts(&out, prove_candidates(cfg, &m, &summary)?)?;
    let t3 = Instant::now();
    let timings = Timings {
        continue_s: (t1 - t0).as_secs_f64(),
        detect_s: (t2 - t1).as_secs_f64(),
        prove_s: (t3 - t2).as_secs_f64(),
    };
    let report = PipelineReport::new(&tri, &summary, attempts, &distinct, (!cfg.deterministic).then_some(timings));
    write(&out.join("report.json"), &json(&report))?;
    plot::write_plot_data(&out.join("plot"), &tri, &distinct)?;
    print!("{}", report.table());
    println!(
        "time: continue {:.2} s, detect {:.2} s, prove {:.2} s",
        timings.continue_s, timings.detect_s, timings.prove_s
    );
    proof_outcome(&report.attempts)
}

fn cmd_verify(cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    let cert = CuspCertificate::from_json(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let m = model_for(cfg, &cert.model)?;
    let again = verify(&m, &cert).map_err(|e| match e {
        ProveError::Invalid(msg) => CliError::Input(msg),
        other => CliError::Numerical(other.to_string()),
    })?;
    let l = again.lambda();
    if again.valid {
        let b = again.bounds.as_ref().expect("valid certificate has bounds");
        let c = again.c.as_ref().expect("valid certificate has c");
        println!("{}: certificate verified", path.display());
        println!("  lambda = ({:.15}, {:.15}), r = {:.1e}", l[0], l[1], b.r);
        println!("  c = {:.15e} +- {:.1e}", c.mid, c.rad);
        Ok(())
    } else {
        Err(CliError::ProofFailed(format!("{}: certificate does not verify: {:?}", path.display(), again.stages)))
    }
}
