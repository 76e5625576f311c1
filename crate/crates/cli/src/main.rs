use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use wcp_cli::{parse_instance, InstanceFormat};
use wcp_core::driver::{SolveError, SolveMode, SolveOptions, SolveReport, SolveStatus};

/// Interior point LP solver: min cᵀx subject to Ax ≥ b.
#[derive(Parser)]
#[command(name = "wcp", version, about)]
struct Args {
    /// Instance file.
    #[arg(long)]
    input: PathBuf,

    /// Instance file format.
    #[arg(long, value_enum, default_value_t = FormatArg::JsonDense)]
    format: FormatArg,

    /// Relative duality-gap tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,

    /// Termination mode.
    #[arg(long, value_enum, default_value_t = ModeArg::Tolerance)]
    mode: ModeArg,

    /// Seed for all randomized components.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Use worst-case constants everywhere (very slow; for conformance
    /// experiments only).
    #[arg(long)]
    strict_constants: bool,

    /// Write a JSONL iteration trace to this path.
    #[arg(long)]
    trace: Option<PathBuf>,

    /// Report style on stdout.
    #[arg(long, value_enum, default_value_t = ReportArg::Text)]
    report: ReportArg,

    /// Iteration budget across all path-following phases.
    #[arg(long, default_value_t = 2_000_000)]
    max_iters: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    JsonDense,
    CsvTriple,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Tolerance,
    Integral,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Text,
    Json,
}

fn print_text(report: &SolveReport, wall_ms: f64) {
    let status = match report.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
    };
    println!("status: {status}");
    if let Some(obj) = report.objective {
        println!("objective: {obj:.12e}");
    }
    if let Some(x) = &report.x_star {
        let coords: Vec<String> = x.iter().map(|v| format!("{v:.12e}")).collect();
        println!("x: [{}]", coords.join(", "));
    }
    if !report.active_set.is_empty() {
        let rows: Vec<String> = report.active_set.iter().map(|i| i.to_string()).collect();
        println!("active rows: [{}]", rows.join(", "));
    }
    println!("duality gap bound: {:.3e}", report.duality_gap_bound);
    println!(
        "iterations: {}  linear solves: {}  audits: {}  rollbacks: {}",
        report.iterations, report.linear_solves, report.audits, report.rollbacks
    );
    println!("wall time: {wall_ms:.1} ms");
}

fn print_json(report: &SolveReport, wall_ms: f64) {
    let mut value = serde_json::to_value(report).expect("report serializes");
    value["wall_time_ms"] = serde_json::json!(wall_ms);
    println!("{}", serde_json::to_string_pretty(&value).expect("report serializes"));
}

fn run(args: Args) -> ExitCode {
    let format = match args.format {
        FormatArg::JsonDense => InstanceFormat::JsonDense,
        FormatArg::CsvTriple => InstanceFormat::CsvTriple,
    };
    let lp = match parse_instance(&args.input, format) {
        Ok(lp) => lp,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(64);
        }
    };
    let opts = SolveOptions {
        tolerance: args.tol,
        mode: match args.mode {
            ModeArg::Tolerance => SolveMode::Tolerance,
            ModeArg::Integral => SolveMode::Integral,
        },
        seed: args.seed,
        strict_constants: args.strict_constants,
        max_iters: args.max_iters,
        ..SolveOptions::default()
    };

    let mut trace_file = match &args.trace {
        Some(path) => match File::create(path) {
            Ok(f) => Some(BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create trace file {}: {e}", path.display());
                return ExitCode::from(64);
            }
        },
        None => None,
    };

    let start = Instant::now();
    let result = wcp_core::driver::solve(
        &lp,
        &opts,
        trace_file.as_mut().map(|f| f as &mut dyn Write),
    );
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    if let Some(f) = trace_file.as_mut() {
        let _ = f.flush();
    }

    match result {
        Ok(report) => {
            match args.report {
                ReportArg::Text => print_text(&report, wall_ms),
                ReportArg::Json => print_json(&report, wall_ms),
            }
            match report.status {
                SolveStatus::Optimal => ExitCode::SUCCESS,
                SolveStatus::Infeasible => ExitCode::from(2),
                SolveStatus::Unbounded => ExitCode::from(3),
            }
        }
        Err(SolveError::InvalidInput(msg)) => {
            eprintln!("error: invalid input: {msg}");
            ExitCode::from(64)
        }
        Err(SolveError::IterationLimit) => {
            eprintln!("error: iteration limit reached");
            ExitCode::from(5)
        }
        Err(SolveError::NumericalFailure(msg)) => {
            eprintln!("error: numerical failure: {msg}");
            ExitCode::from(4)
        }
    }
}

fn main() -> ExitCode {
    run(Args::parse())
}
