//! `ncplane`: batch experiments for the motion of a charge in a uniform
//! magnetic field on the noncommutative plane.
//!
//! Each subcommand runs one experiment, writes deterministic CSV files
//! plus a gnuplot script into the output directory, and summarizes the
//! run in `summary.txt`. Exit codes: 0 success, 1 configuration or
//! parameter validation failure, 2 numerical non-convergence.

mod config;
mod csvio;
mod experiments;
mod plots;

use clap::{Parser, Subcommand};
use config::{Experiment, ExperimentConfig, Grid};
use ncplane_core::CoreError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ncplane",
    about = "classical and quantum motion on the noncommutative plane",
    version
)]
struct Cli {
    #[command(subcommand)]
    experiment: ExperimentCommand,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Flat key = value configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSVs, plot scripts and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lambda grid `start:stop:step` or a single value.
    #[arg(long)]
    lambda: Option<String>,
    /// Classical angular momentum grid `start:stop:step` or a single value.
    #[arg(long)]
    l: Option<String>,
    /// Fock truncation level.
    #[arg(long = "N", value_name = "int")]
    n: Option<usize>,
    /// Seed for the randomized property sweeps.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Integrate a classical orbit and dump t,q1,q2,x1,x2,p1,p2.
    ClassicalTraj(CommonArgs),
    /// Energy levels of the symmetric- and Landau-gauge Hamiltonians.
    Spectrum(CommonArgs),
    /// Coherent-state mean trajectory against the truncated-Fock oracle.
    MmEvolve(CommonArgs),
    /// Angular-momentum error sweeps (lambda,l,zeta_abs,error).
    LambdaError(CommonArgs),
    /// Lower-symbol phase trajectory (t,re_zeta,im_zeta,abs_zeta).
    LambdaPhase(CommonArgs),
    /// Internal/external radius of the phase trajectory per lambda.
    LambdaRadius(CommonArgs),
    /// Quantization identity suite (identity,N,lambda,max_abs_err,trust_band).
    QuantizeVerify(CommonArgs),
    /// Weight-function moment problem (lambda,n,numeric,analytic,rel_err).
    WeightMoments(CommonArgs),
}

impl ExperimentCommand {
    fn split(self) -> (Experiment, CommonArgs) {
        match self {
            Self::ClassicalTraj(a) => (Experiment::ClassicalTraj, a),
            Self::Spectrum(a) => (Experiment::Spectrum, a),
            Self::MmEvolve(a) => (Experiment::MmEvolve, a),
            Self::LambdaError(a) => (Experiment::LambdaError, a),
            Self::LambdaPhase(a) => (Experiment::LambdaPhase, a),
            Self::LambdaRadius(a) => (Experiment::LambdaRadius, a),
            Self::QuantizeVerify(a) => (Experiment::QuantizeVerify, a),
            Self::WeightMoments(a) => (Experiment::WeightMoments, a),
        }
    }
}

fn build_config(experiment: Experiment, args: &CommonArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_file(experiment, path)?,
        None => ExperimentConfig::defaults(experiment),
    };
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(lambda) = &args.lambda {
        cfg.lambda = Grid::parse(lambda)?;
    }
    if let Some(l) = &args.l {
        cfg.l_grid = Some(Grid::parse(l)?);
    }
    if let Some(n) = args.n {
        cfg.n_max = n;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// 2 for numerical non-convergence anywhere in the error chain, 1 for
/// everything else (validation and I/O failures).
fn classify(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            match core {
                CoreError::QuadratureNonConvergence { .. } | CoreError::StepFailure { .. } => {
                    return 2
                }
                _ => return 1,
            }
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = cli.experiment.split();
    let result = build_config(experiment, &args).and_then(|cfg| {
        let report = experiments::run(&cfg)?;
        for line in &report.summary {
            println!("{line}");
        }
        println!("outputs in {}", cfg.out_dir.display());
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = classify(&err);
            let kind = if code == 2 { "numerical" } else { "validation" };
            let message = format!("{err:#}").replace('"', "'").replace('\n', " ");
            eprintln!("{{\"exit\":{code},\"kind\":\"{kind}\",\"message\":\"{message}\"}}");
            ExitCode::from(code)
        }
    }
}
