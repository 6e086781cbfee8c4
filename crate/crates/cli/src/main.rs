//! Batch front end: build, perturb, analyze, scan, detect, rescale and
//! verify, with all artifacts written as JSON/CSV/mesh text.

mod commands;
mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{EXIT_CONFIG, EXIT_RUNTIME, EXIT_VERDICT};

/// Environment variable that re-roots relative output directories.
const OUTPUT_ROOT_ENV: &str = "HELIMORPH_OUT";

#[derive(Parser)]
#[command(name = "helimorph", version, about = "CMC helicoid perturbation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the configured surface and emit mesh + curvature data.
    BuildHelicoid(RunArgs),
    /// Run the successive-approximation solve and emit the perturbed
    /// surface with its report.
    Perturb(RunArgs),
    /// Emit per-node forms/shape data and a Gauss-residual verdict.
    Analyze(RunArgs),
    /// Delta-stability reports over the configured delta x radius grid.
    StabilityScan(RunArgs),
    /// Search for an N-valued graph certificate.
    DetectMultigraph(RunArgs),
    /// Rescale the surface and check the curvature transformation laws.
    Rescale(RunArgs),
    /// Re-run a stored artifact directory from its resolved config and
    /// check that the summary reproduces byte for byte.
    Verify(VerifyArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Artifact directory of a previous run.
    #[arg(long)]
    dir: PathBuf,
    /// Where to write the verify summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn resolve_out(flag: Option<PathBuf>, cfg_dir: &str) -> PathBuf {
    let dir = flag.unwrap_or_else(|| PathBuf::from(cfg_dir));
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if dir.is_relative() => Path::new(&root).join(dir),
        _ => dir,
    }
}

fn run(args: RunArgs, f: fn(&config::RunConfig, &Path) -> anyhow::Result<commands::Verdict>) -> u8 {
    let cfg = match config::load(args.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            return EXIT_CONFIG as u8;
        }
    };
    let out = resolve_out(args.out, &cfg.output_dir);
    match f(&cfg, &out) {
        Ok(commands::Verdict(true)) => 0,
        Ok(commands::Verdict(false)) => {
            eprintln!("verdict failed; see {}", out.join("summary.json").display());
            EXIT_VERDICT as u8
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME as u8
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::BuildHelicoid(a) => run(a, commands::build),
        Command::Perturb(a) => run(a, commands::perturb),
        Command::Analyze(a) => run(a, commands::analyze),
        Command::StabilityScan(a) => run(a, commands::stability_scan),
        Command::DetectMultigraph(a) => run(a, commands::detect_multigraph),
        Command::Rescale(a) => run(a, commands::rescale),
        Command::Verify(a) => {
            let out = resolve_out(a.out, "out");
            match commands::verify(&a.dir, &out) {
                Ok(commands::Verdict(true)) => 0,
                Ok(commands::Verdict(false)) => {
                    eprintln!("verify failed; see {}", out.join("summary.json").display());
                    EXIT_VERDICT as u8
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_RUNTIME as u8
                }
            }
        }
    };
    ExitCode::from(code)
}
