//! On-disk formats: the matrix interchange document and the per-run record.

use nearnormal::linalg::{C64, ComplexMatrix};
use nearnormal::pipeline::{PipelineConfig, Report};
use serde::{Deserialize, Serialize};

/// Plain structured-text matrix document with split real/imaginary arrays;
/// diffable and language-portable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, label: Option<String>) -> Self {
        let n = m.dim();
        let re = (0..n)
            .map(|i| (0..n).map(|j| m.entry(i, j).re).collect())
            .collect();
        let im = (0..n)
            .map(|i| (0..n).map(|j| m.entry(i, j).im).collect())
            .collect();
        Self { n, re, im, label }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, String> {
        if self.re.len() != self.n || self.im.len() != self.n {
            return Err(format!(
                "expected {} rows, found re: {}, im: {}",
                self.n,
                self.re.len(),
                self.im.len()
            ));
        }
        for (i, (r, im)) in self.re.iter().zip(&self.im).enumerate() {
            if r.len() != self.n || im.len() != self.n {
                return Err(format!("ragged arrays in row {i}"));
            }
            for (v, w) in r.iter().zip(im) {
                if !v.is_finite() || !w.is_finite() {
                    return Err(format!("non-finite entry in row {i}"));
                }
            }
        }
        ComplexMatrix::from_rows(
            &self
                .re
                .iter()
                .zip(&self.im)
                .map(|(r, im)| {
                    r.iter()
                        .zip(im)
                        .map(|(&a, &b)| C64::new(a, b))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        )
        .map_err(|e| e.to_string())
    }

    pub fn read(path: &std::path::Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn write(&self, path: &std::path::Path) -> Result<(), String> {
        let text = serde_json::to_string_pretty(self).expect("serializable document");
        std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Schema version of [`RunRecord`]; bump on breaking format changes.
pub const RUN_RECORD_SCHEMA: u32 = 1;

/// Serialized run report plus the tool version, config echo, and seeds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub report: serde_json::Value,
}

impl RunRecord {
    pub fn new(config: &PipelineConfig, seed: Option<u64>, report: &Report) -> Self {
        Self {
            schema_version: RUN_RECORD_SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: serde_json::to_value(config).expect("serializable config"),
            seed,
            report: serde_json::to_value(report).expect("serializable report"),
        }
    }
}
