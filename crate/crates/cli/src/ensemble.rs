//! The reproducible ensemble runner and its CSV output.
//!
//! Each trial derives its generator from `(seed, dim, scale, trial)` alone,
//! so the rows are identical no matter how the work is scheduled; the output
//! is written in canonical grid order.

use nearnormal::linalg::C64;
use nearnormal::oracle::{nearest_normal_search, random_pair, trial_rng, trial_seed};
use nearnormal::pipeline::{hermitian_pair_form, lower_bound, PipelineConfig};
use rayon::prelude::*;

use crate::format::RunRecord;

pub const CSV_HEADER: &str =
    "dim,scale,trial,comm_norm,distance,ratio,lower_bound,oracle_dist_or_blank,runtime_ms";

/// Largest dimension for which the ensemble fills the oracle column.
pub const ORACLE_COLUMN_MAX_DIM: usize = 2;

#[derive(Debug, Clone)]
pub struct EnsembleParams {
    pub dims: Vec<usize>,
    pub scales: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Fill the `runtime_ms` column. Off by default so that identical seeds
    /// produce bitwise-identical files.
    pub timings: bool,
    /// Also serialise one run record per trial (line-delimited).
    pub records: bool,
    pub config: PipelineConfig,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub dim: usize,
    pub scale: f64,
    pub trial: usize,
    pub comm_norm: f64,
    pub distance: f64,
    pub ratio: f64,
    pub lower_bound: f64,
    pub oracle_dist: Option<f64>,
    pub runtime_ms: Option<f64>,
    /// Serialised run record (one line), when requested.
    pub record: Option<String>,
}

impl Row {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.dim,
            self.scale,
            self.trial,
            self.comm_norm,
            self.distance,
            self.ratio,
            self.lower_bound,
            self.oracle_dist.map(|v| v.to_string()).unwrap_or_default(),
            self.runtime_ms.map(|v| v.to_string()).unwrap_or_default(),
        )
    }
}

fn run_trial(params: &EnsembleParams, dim: usize, scale: f64, trial: usize) -> Result<Row, String> {
    let started = std::time::Instant::now();
    let mut rng = trial_rng(params.seed, dim, scale, trial);
    let (x, y) = random_pair(dim, scale, &mut rng);
    let comm_norm = x.commutator(&y).map_err(|e| e.to_string())?.op_norm();
    let a = &x + &y.scaled(C64::new(0.0, 1.0));
    let lb = lower_bound(&a);
    let (_, _, report) =
        hermitian_pair_form(&x, &y, &params.config).map_err(|e| e.to_string())?;
    let oracle_dist = if dim <= ORACLE_COLUMN_MAX_DIM {
        nearest_normal_search(&a, 24, 250).ok().map(|(_, d)| d)
    } else {
        None
    };
    let record = params.records.then(|| {
        let seed = trial_seed(params.seed, dim, scale, trial);
        serde_json::to_string(&RunRecord::new(&params.config, Some(seed), &report))
            .expect("serializable record")
    });
    Ok(Row {
        dim,
        scale,
        trial,
        comm_norm,
        distance: report.distance,
        ratio: report.ratio,
        lower_bound: lb,
        oracle_dist,
        runtime_ms: params
            .timings
            .then(|| started.elapsed().as_secs_f64() * 1e3),
        record,
    })
}

/// Run the whole grid; `skip` filters out already-completed keys (resume).
pub fn run_grid(
    params: &EnsembleParams,
    skip: &dyn Fn(usize, f64, usize) -> bool,
) -> Result<Vec<Row>, String> {
    let mut keys = Vec::new();
    for &dim in &params.dims {
        for &scale in &params.scales {
            for trial in 0..params.trials {
                if !skip(dim, scale, trial) {
                    keys.push((dim, scale, trial));
                }
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(params.jobs.max(1))
        .build()
        .map_err(|e| e.to_string())?;
    let rows: Result<Vec<Row>, String> = pool.install(|| {
        keys.par_iter()
            .map(|&(dim, scale, trial)| run_trial(params, dim, scale, trial))
            .collect()
    });
    rows
}

/// Canonical position of a key in the output order.
pub fn canonical_index(params: &EnsembleParams, dim: usize, scale: f64, trial: usize) -> Option<usize> {
    let di = params.dims.iter().position(|&d| d == dim)?;
    let si = params.scales.iter().position(|&s| s == scale)?;
    if trial >= params.trials {
        return None;
    }
    Some((di * params.scales.len() + si) * params.trials + trial)
}

/// Assemble the full CSV text from freshly computed rows and verbatim reused
/// lines (resume), in canonical order.
pub fn assemble_csv(
    params: &EnsembleParams,
    fresh: Vec<Row>,
    reused: Vec<((usize, f64, usize), String)>,
) -> String {
    let total = params.dims.len() * params.scales.len() * params.trials;
    let mut lines: Vec<Option<String>> = vec![None; total];
    for ((dim, scale, trial), line) in reused {
        if let Some(idx) = canonical_index(params, dim, scale, trial) {
            lines[idx] = Some(line);
        }
    }
    for row in fresh {
        if let Some(idx) = canonical_index(params, row.dim, row.scale, row.trial) {
            lines[idx] = Some(row.csv_line());
        }
    }
    let mut out = String::with_capacity(total * 64 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for line in lines.into_iter().flatten() {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// Parse completed keys out of an existing CSV (for `--resume`), returning
/// the raw lines so they can be reused byte-for-byte.
pub fn parse_existing(text: &str) -> Vec<((usize, f64, usize), String)> {
    let mut out = Vec::new();
    for line in text.lines().skip(1) {
        let mut fields = line.split(',');
        let (Some(dim), Some(scale), Some(trial)) = (fields.next(), fields.next(), fields.next())
        else {
            continue;
        };
        let (Ok(dim), Ok(scale), Ok(trial)) = (
            dim.parse::<usize>(),
            scale.parse::<f64>(),
            trial.parse::<usize>(),
        ) else {
            continue;
        };
        out.push(((dim, scale, trial), line.to_string()));
    }
    out
}

/// Line-delimited run records for the freshly computed rows, canonical order.
pub fn records_text(params: &EnsembleParams, rows: &[Row]) -> String {
    let mut indexed: Vec<(usize, &str)> = rows
        .iter()
        .filter_map(|r| {
            let record = r.record.as_deref()?;
            canonical_index(params, r.dim, r.scale, r.trial).map(|i| (i, record))
        })
        .collect();
    indexed.sort_by_key(|(i, _)| *i);
    let mut out = String::new();
    for (_, line) in indexed {
        out.push_str(line);
        out.push('\n');
    }
    out
}
