//! Doubled-space matrices: `2n x 2n` operators carrying the block projection
//! `P = diag(I, 0)` used by the surgery stages.

use super::matrix::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// A `2n x 2n` matrix tagged with the block projection `P = diag(I, 0)`.
#[derive(Debug, Clone)]
pub struct DoubledMatrix {
    half_n: usize,
    matrix: ComplexMatrix,
}

impl DoubledMatrix {
    /// Wrap an even-dimensional matrix.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.dim();
        if n % 2 != 0 {
            return Err(Error::DimensionMismatch {
                left: n,
                right: n + 1,
            });
        }
        Ok(Self {
            half_n: n / 2,
            matrix,
        })
    }

    /// Block-diagonal embedding `diag(A, B)`.
    pub fn embed_diag(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: b.dim(),
            });
        }
        Ok(Self::from_blocks(a, &ComplexMatrix::zeros(a.dim()), &ComplexMatrix::zeros(a.dim()), b))
    }

    /// Assemble from four `n x n` blocks.
    pub fn from_blocks(
        b11: &ComplexMatrix,
        b12: &ComplexMatrix,
        b21: &ComplexMatrix,
        b22: &ComplexMatrix,
    ) -> Self {
        let n = b11.dim();
        assert!(
            b12.dim() == n && b21.dim() == n && b22.dim() == n,
            "block dimension mismatch"
        );
        let m = ComplexMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, true) => b11.entry(i, j),
            (true, false) => b12.entry(i, j - n),
            (false, true) => b21.entry(i - n, j),
            (false, false) => b22.entry(i - n, j - n),
        });
        Self { half_n: n, matrix: m }
    }

    pub fn half_n(&self) -> usize {
        self.half_n
    }

    pub fn dim(&self) -> usize {
        2 * self.half_n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Block at position `(i, j)`, each index 0 or 1.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        self.matrix.block(i, j, self.half_n)
    }

    /// The projection `P = diag(I, 0)` as a matrix.
    pub fn projection_p(&self) -> ComplexMatrix {
        let n = self.half_n;
        ComplexMatrix::from_fn(2 * n, |i, j| {
            if i == j && i < n {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Block-diagonal compression `PTP + (1-P)T(1-P)`: off-diagonal blocks
    /// zeroed, diagonal blocks kept.
    pub fn diag_p(&self) -> DoubledMatrix {
        let z = ComplexMatrix::zeros(self.half_n);
        Self::from_blocks(&self.block(0, 0), &z, &z, &self.block(1, 1))
    }

    /// `‖[P, T]‖`, which equals the distance from `T` to the block-diagonal
    /// matrices: the commutator has blocks `(0, T12; -T21, 0)`, so its norm is
    /// `max(‖T12‖, ‖T21‖)`, attained by compressing away the off-blocks.
    pub fn compute_d2(&self) -> f64 {
        self.block(0, 1).op_norm().max(self.block(1, 0).op_norm())
    }

    /// Apply an entrywise-defined map of the underlying matrix, keeping the tag.
    pub fn with_matrix(&self, matrix: ComplexMatrix) -> Result<DoubledMatrix> {
        if matrix.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                left: matrix.dim(),
                right: self.dim(),
            });
        }
        Ok(DoubledMatrix {
            half_n: self.half_n,
            matrix,
        })
    }
}

/// One sampled point of a margin check along an operator path.
#[derive(Debug, Clone)]
pub struct PathSample {
    pub t: f64,
    pub sigma_min: f64,
    pub comm_norm: f64,
}

/// Result of sampling `σ_min(G_t)` against `‖[P, G_t]‖` along a path.
///
/// When `pass` holds and `diag_p(G_0)` is invertible, the caller may conclude
/// that `diag_p(G_1)` is invertible. Sampling is a desk-scale proxy for the
/// continuous statement and is reported as such.
#[derive(Debug, Clone)]
pub struct PathMarginReport {
    pub samples: Vec<PathSample>,
    pub pass: bool,
    /// First sampled `t` where the margin failed, if any.
    pub first_failure: Option<f64>,
}

impl PathMarginReport {
    /// Smallest `σ_min(G_t) - ‖[P, G_t]‖` over the samples.
    pub fn min_margin(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.sigma_min - s.comm_norm)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Default number of path samples.
pub const PATH_SAMPLES: usize = 33;

/// Sample `σ_min(G_t)` and `‖[P, G_t]‖` on a uniform grid including endpoints;
/// passes when `σ_min(G_t) > ‖[P, G_t]‖` at every sample (the invertibility
/// margin `‖G_t^{-1}‖ < ‖[P, G_t]‖^{-1}` in singular-value form).
pub fn path_margin_check(
    path: impl Fn(f64) -> DoubledMatrix,
    samples: usize,
) -> PathMarginReport {
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(samples);
    let mut pass = true;
    let mut first_failure = None;
    for k in 0..samples {
        let t = k as f64 / (samples - 1) as f64;
        let g = path(t);
        let sigma_min = g.matrix().sigma_min();
        let comm_norm = g.compute_d2();
        let ok = sigma_min > comm_norm;
        if !ok && pass {
            pass = false;
            first_failure = Some(t);
        }
        out.push(PathSample {
            t,
            sigma_min,
            comm_norm,
        });
    }
    PathMarginReport {
        samples: out,
        pass,
        first_failure,
    }
}

/// Literal `[P, T]` for cross-checking the block-norm identity in tests.
pub fn commutator_with_p(t: &DoubledMatrix) -> ComplexMatrix {
    let p = t.projection_p();
    p.commutator(t.matrix()).expect("dimensions agree")
}

/// Embed an `n x n` matrix into the top-left block of a `2n x 2n` zero matrix.
pub fn corner_embed(a: &ComplexMatrix) -> DoubledMatrix {
    let z = ComplexMatrix::zeros(a.dim());
    DoubledMatrix::from_blocks(a, &z, &z, &z)
}
