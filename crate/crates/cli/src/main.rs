//! corrdyn: dynamics of the (2:2) correspondence family that mates quadratic
//! maps with representations of C₂*C₃ — limit-set rendering, parameter-plane
//! scans, Sturmian combinatorics, Kleinian representations and the pinching
//! strip model.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence,
//! 4 internal invariant violation (including failed verify suites).

mod commands;
mod config;
mod verify;

use clap::{Parser, Subcommand};
use config::*;
use corrdyn_core::Error as CoreError;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "corrdyn", version, about)]
struct Cli {
    /// Worker pool size (default: logical cores). The CORRDYN_THREADS
    /// environment variable overrides this flag.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render the limit sets and ordinary set of one correspondence.
    Render(RenderArgs),
    /// Scan the a-plane at fixed k for the empirical mating locus.
    Scan(ScanArgs),
    /// Sturmian p/q combinatorics: word, landing pairs, circle quotient.
    Sturmian(SturmianArgs),
    /// Representations of C₂*C₃: construction, pinching solve, limit sets.
    Kleinian(KleinianArgs),
    /// Beltrami-coefficient grid of the model strip deformation.
    PinchDemo(PinchDemoArgs),
    /// Run a named invariant suite.
    Verify(VerifyArgs),
    /// Replay a run from its JSON sidecar (or a bare config).
    Run {
        #[arg(long)]
        config: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("CORRDYN_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .or(cli.threads);
    if let Some(n) = threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("corrdyn: could not size the worker pool: {e}");
            return ExitCode::from(2);
        }
    }

    let command = match cli.command {
        Command::Render(args) => CommandConfig::Render(args),
        Command::Scan(args) => CommandConfig::Scan(args),
        Command::Sturmian(args) => CommandConfig::Sturmian(args),
        Command::Kleinian(args) => CommandConfig::Kleinian(args),
        Command::PinchDemo(args) => CommandConfig::PinchDemo(args),
        Command::Verify(args) => CommandConfig::Verify(args),
        Command::Run { config } => match load_config(&config) {
            Ok(command) => command,
            Err(msg) => {
                eprintln!("corrdyn: {msg}");
                return ExitCode::from(2);
            }
        },
    };

    let started = Instant::now();
    match commands::execute(&command) {
        Ok(outcome) => {
            if let Some(prefix) = sidecar_prefix(&command) {
                let path = format!("{prefix}.json");
                if let Err(e) = commands::write_sidecar(&path, &command, started, &outcome) {
                    eprintln!("corrdyn: could not write sidecar {path}: {e}");
                    return ExitCode::from(1);
                }
                println!("wrote {}", outcome.outputs.join(", "));
                println!("sidecar {path}");
            }
            if outcome.failed_properties {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("corrdyn: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn load_config(path: &str) -> Result<CommandConfig, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("cannot read {path}: {e}"))?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).map_err(|e| format!("bad JSON in {path}: {e}"))?;
    // accept either a bare RunConfig or a sidecar with a "config" field
    let config_value = value.get("config").cloned().unwrap_or(value);
    let run: RunConfig = serde_json::from_value(config_value)
        .map_err(|e| format!("bad config in {path}: {e}"))?;
    if run.config_version != CONFIG_VERSION {
        return Err(format!(
            "config version {} unsupported (expected {CONFIG_VERSION})",
            run.config_version
        ));
    }
    Ok(run.command)
}

/// Artifact-producing commands get a sidecar next to their outputs.
fn sidecar_prefix(command: &CommandConfig) -> Option<String> {
    match command {
        CommandConfig::Render(args) => Some(args.out.clone()),
        CommandConfig::Scan(args) => Some(args.out.clone()),
        CommandConfig::Sturmian(args) => args.out.as_ref().map(|p| format!("{p}.sidecar")),
        CommandConfig::Kleinian(args) => args.out.as_ref().map(|p| format!("{p}.sidecar")),
        CommandConfig::PinchDemo(args) => Some(format!("{}.sidecar", args.out)),
        CommandConfig::Verify(_) => None,
    }
}

fn exit_code_for(err: &CoreError) -> u8 {
    match err {
        CoreError::NoConvergence { .. } => 3,
        CoreError::InvariantViolation(_) => 4,
        CoreError::ParameterDegenerate(_)
        | CoreError::DegenerateCrossRatio(_)
        | CoreError::NotSturmian
        | CoreError::BadParameters(_)
        | CoreError::InvalidRaster(_)
        | CoreError::OutOfStrip { .. }
        | CoreError::DegenerateRoot
        | CoreError::SamplingDegenerate => 2,
    }
}
