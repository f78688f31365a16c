//! `tancurve`: reports on tangent-position curves of parametrized surfaces.
//!
//! Exit codes: 0 success, 1 load or configuration error, 2 analysis
//! failure, 3 an asserted check failed.

mod commands;
mod output;
mod scene;
mod svg;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, Format, Report, Target, TraceRequest};
use scene::{parse_grid, Scene};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Load(String),
    #[error("{0}")]
    Analysis(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Load(_) => 1,
            CliError::Analysis(_) => 2,
        }
    }
}

impl From<tancurve::Error> for CliError {
    fn from(e: tancurve::Error) -> Self {
        CliError::Analysis(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "tancurve", version, about = "Tangent-position curves on parametrized surfaces")]
struct Cli {
    /// Scene file; the built-in scene is used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory to write reports (and SVG plots) into.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Tracer step in parameter units.
    #[arg(long, global = true)]
    h: Option<f64>,

    /// Grid for metric comparisons, e.g. 20x20.
    #[arg(long, global = true, value_parser = grid_arg)]
    grid: Option<(usize, usize)>,

    #[command(subcommand)]
    command: Command,
}

fn grid_arg(s: &str) -> Result<(usize, usize), String> {
    parse_grid(s).ok_or_else(|| format!("expected MxN with M, N >= 2, got `{s}`"))
}

fn seed_arg(s: &str) -> Result<[f64; 2], String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected U,V, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
    Ok([p(u)?, p(v)?])
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fundamental forms and Christoffel symbols at one point.
    #[command(allow_negative_numbers = true)]
    Forms { surface: String, u: f64, v: f64 },
    /// Trace the tangent-position locus from a seed.
    Trace {
        /// A `[trace.NAME]` entry of the scene.
        name: Option<String>,
        #[arg(long)]
        surface: Option<String>,
        #[arg(long, value_parser = seed_arg, allow_hyphen_values = true)]
        seed: Option<[f64; 2]>,
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Closed-form position components against direct dot products.
    #[command(name = "report-thm31")]
    ReportThm31 {
        /// Curve or trace name.
        curve: String,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run identity and invariance checks.
    Verify {
        #[arg(value_enum, default_value = "all")]
        target: Target,
    },
    /// Compare a registered isometry pair along its curves.
    Isometry {
        pair: String,
        #[arg(long)]
        samples: Option<usize>,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let scene = match &cli.config {
        Some(path) => Scene::load(path)?,
        None => Scene::builtin()?,
    };
    let ctx = Context {
        scene: &scene,
        format: cli.format,
        h: cli.h,
        grid: cli.grid,
    };
    match &cli.command {
        Command::Forms { surface, u, v } => commands::forms(&ctx, surface, *u, *v),
        Command::Trace {
            name,
            surface,
            seed,
            max_steps,
        } => commands::trace(
            &ctx,
            &TraceRequest {
                name: name.as_deref(),
                surface: surface.as_deref(),
                seed: *seed,
                max_steps: *max_steps,
            },
        ),
        Command::ReportThm31 { curve, samples } => commands::report_thm31(&ctx, curve, *samples),
        Command::Verify { target } => commands::verify(&ctx, *target),
        Command::Isometry { pair, samples } => commands::isometry(&ctx, pair, *samples),
    }
}

fn write_files(dir: &PathBuf, report: &Report) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Load(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    for (name, text) in &report.files {
        std::fs::write(dir.join(name), text).map_err(io)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = run(&cli).and_then(|report| {
        if let Some(dir) = &cli.out {
            write_files(dir, &report)?;
        }
        Ok(report)
    });
    match result {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(report.stdout.as_bytes());
            ExitCode::from(if report.failed { 3 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
