//! `nearnormal`: approximate a complex square matrix by a nearby normal one,
//! run reproducible ensemble experiments, and compare against brute-force
//! baselines on tiny instances.

mod demo;
mod ensemble;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nearnormal::oracle::{nearest_normal_search, schur_baseline, ORACLE_DIM_GATE};
use nearnormal::pipeline::{approximate_normal, lower_bound, PipelineConfig};

use ensemble::{assemble_csv, parse_existing, records_text, run_grid, EnsembleParams};
use format::{MatrixFile, RunRecord};

#[derive(Parser)]
#[command(name = "nearnormal", version, about = "Nearest-normal matrix approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate the matrix in a file by a nearby normal matrix.
    Approximate {
        /// Input matrix document (JSON with n, re, im).
        input: PathBuf,
        /// Working scale of the internal normalisation.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Turn gate violations into recorded margins instead of errors.
        #[arg(long)]
        force: bool,
        /// Write the approximant as a matrix document.
        #[arg(long, value_name = "PATH")]
        emit_matrix: Option<PathBuf>,
        /// Write the run record here instead of standard output.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Run the pair-form pipeline over a reproducible random grid.
    Ensemble {
        #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1e-4,1e-3,1e-2,1e-1")]
        scales: Vec<f64>,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 0x6e6f726d616c)]
        seed: u64,
        /// Write the CSV here instead of standard output.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
        /// Worker threads; defaults to NEARNORMAL_JOBS or 1.
        #[arg(long)]
        jobs: Option<usize>,
        /// Skip (dim, scale, trial) keys already present in the output file.
        #[arg(long)]
        resume: bool,
        /// Fill the runtime_ms column (breaks bitwise reproducibility).
        #[arg(long)]
        timings: bool,
        /// Also write one run record per computed trial, line-delimited.
        #[arg(long, value_name = "PATH")]
        records: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        force: bool,
    },
    /// Brute-force nearest-normal search for matrices up to 4x4.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
    },
    /// Run a named scenario and print the full stage trace.
    Demo {
        #[arg(long)]
        case: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        force: bool,
    },
}

/// Failure carrying the process exit code: 1 for I/O and parse problems,
/// 2 for gate and dimension violations.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn gate(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

fn config_from(epsilon: Option<f64>, force: bool) -> PipelineConfig {
    let mut config = PipelineConfig::default();
    if let Some(eps) = epsilon {
        config.epsilon_target = eps;
    }
    config.force = force;
    config
}

fn pipeline_failure(e: nearnormal::Error) -> Failure {
    match &e {
        nearnormal::Error::GateViolation { .. }
        | nearnormal::Error::Stage { .. }
        | nearnormal::Error::Hole { .. } => Failure::gate(e.to_string()),
        _ => Failure::gate(e.to_string()),
    }
}

fn cmd_approximate(
    input: PathBuf,
    epsilon: Option<f64>,
    force: bool,
    emit_matrix: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let doc = MatrixFile::read(&input).map_err(Failure::io)?;
    let a = doc.to_matrix().map_err(Failure::io)?;
    let config = config_from(epsilon, force);
    let (a_prime, report) = approximate_normal(&a, &config).map_err(pipeline_failure)?;
    let record = RunRecord::new(&config, None, &report);
    let text = serde_json::to_string_pretty(&record).expect("serializable record");
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    if let Some(path) = emit_matrix {
        MatrixFile::from_matrix(&a_prime, doc.label.map(|l| format!("{l} (normal approximant)")))
            .write(&path)
            .map_err(Failure::io)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_ensemble(
    dims: Vec<usize>,
    scales: Vec<f64>,
    trials: usize,
    seed: u64,
    csv: Option<PathBuf>,
    jobs: Option<usize>,
    resume: bool,
    timings: bool,
    records: Option<PathBuf>,
    epsilon: Option<f64>,
    force: bool,
) -> Result<(), Failure> {
    let jobs = jobs
        .or_else(|| {
            std::env::var("NEARNORMAL_JOBS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or(1);
    let params = EnsembleParams {
        dims,
        scales,
        trials,
        seed,
        jobs,
        timings,
        records: records.is_some(),
        config: config_from(epsilon, force),
    };
    let reused = if resume {
        match &csv {
            Some(path) if path.exists() => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
                parse_existing(&text)
            }
            _ => Vec::new(),
        }
    } else {
        Vec::new()
    };
    let done: std::collections::HashSet<(usize, u64, usize)> = reused
        .iter()
        .map(|((d, s, t), _)| (*d, s.to_bits(), *t))
        .collect();
    let rows = run_grid(&params, &|d, s, t| done.contains(&(d, s.to_bits(), t)))
        .map_err(Failure::gate)?;
    if let Some(path) = &records {
        let text = records_text(&params, &rows);
        std::fs::write(path, text)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    }
    let text = assemble_csv(&params, rows, reused);
    match csv {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_oracle(input: PathBuf, restarts: usize) -> Result<(), Failure> {
    let doc = MatrixFile::read(&input).map_err(Failure::io)?;
    let a = doc.to_matrix().map_err(Failure::io)?;
    if a.dim() > ORACLE_DIM_GATE {
        return Err(Failure::gate(format!(
            "oracle accepts n <= {ORACLE_DIM_GATE}, got n = {}",
            a.dim()
        )));
    }
    let (_, oracle_dist) =
        nearest_normal_search(&a, restarts, 400).map_err(|e| Failure::gate(e.to_string()))?;
    let (_, baseline) = schur_baseline(&a);
    let lb = lower_bound(&a);
    let (_, report) =
        approximate_normal(&a, &PipelineConfig::default()).map_err(pipeline_failure)?;
    println!("oracle distance      {oracle_dist:.9}");
    println!("schur baseline       {baseline:.9}");
    println!("lower bound          {lb:.9}");
    println!("pipeline distance    {:.9}", report.distance);
    Ok(())
}

fn cmd_demo(case: String, n: usize, epsilon: Option<f64>, force: bool) -> Result<(), Failure> {
    let config = config_from(epsilon, force);
    let result = match case.as_str() {
        "jordan" => demo::run_jordan(n, &config),
        "pauli" => demo::run_pauli(&config),
        "lattice-idempotent" => demo::run_lattice_idempotent(n, &config),
        other => {
            return Err(Failure::io(format!(
                "unknown case '{other}'; available: jordan, pauli, lattice-idempotent"
            )))
        }
    };
    result.map_err(Failure::gate)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Approximate {
            input,
            epsilon,
            force,
            emit_matrix,
            out,
        } => cmd_approximate(input, epsilon, force, emit_matrix, out),
        Command::Ensemble {
            dims,
            scales,
            trials,
            seed,
            csv,
            jobs,
            resume,
            timings,
            records,
            epsilon,
            force,
        } => cmd_ensemble(
            dims, scales, trials, seed, csv, jobs, resume, timings, records, epsilon, force,
        ),
        Command::Oracle { input, restarts } => cmd_oracle(input, restarts),
        Command::Demo {
            case,
            n,
            epsilon,
            force,
        } => cmd_demo(case, n, epsilon, force),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
