//! Dense complex square matrices and the norms used throughout the pipeline.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Complex scalar used everywhere in this crate.
pub type C64 = Complex<f64>;

/// Dense square complex matrix with finite entries.
///
/// Every operator handled by the pipeline lives here. Construction checks
/// squareness and finiteness once; all downstream code may then assume both.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    data: DMatrix<C64>,
}

impl ComplexMatrix {
    /// Wrap an `n x n` matrix, rejecting non-square shapes and non-finite entries.
    pub fn new(data: DMatrix<C64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::DimensionMismatch {
                left: data.nrows(),
                right: data.ncols(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    /// Build from a generator; panics if the generator produces non-finite values.
    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self::new(DMatrix::from_fn(n, n, f)).expect("generator produced non-finite entries")
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: DMatrix::identity(n, n),
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    /// Build from row slices (used by tests and the matrix file parser).
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    left: n,
                    right: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[(i, j)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    /// Largest singular value (the operator norm).
    pub fn op_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.data
            .clone()
            .singular_values()
            .iter()
            .fold(0.0f64, |a, &s| a.max(s))
    }

    /// Smallest singular value.
    pub fn sigma_min(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.data
            .clone()
            .singular_values()
            .iter()
            .fold(f64::INFINITY, |a, &s| a.min(s))
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.data.clone().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }

    /// Frobenius norm. Dominates the operator norm, so it doubles as a cheap
    /// sufficient check for smallness.
    pub fn fro_norm(&self) -> f64 {
        self.data.norm()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            data: &self.data * &other.data - &other.data * &self.data,
        })
    }

    /// `[M, M*] = MM* - M*M`; its norm measures how far `M` is from normal.
    pub fn self_commutator(&self) -> Self {
        let adj = self.data.adjoint();
        Self {
            data: &self.data * &adj - &adj * &self.data,
        }
    }

    pub fn self_commutator_norm(&self) -> f64 {
        self.self_commutator().op_norm()
    }

    /// Hermitian part `(M + M*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let adj = self.data.adjoint();
        Self {
            data: (&self.data + adj) * C64::new(0.5, 0.0),
        }
    }

    /// Skew part divided by `i`, i.e. `(M - M*)/(2i)`; Hermitian.
    pub fn antihermitian_part(&self) -> Self {
        let adj = self.data.adjoint();
        Self {
            data: (&self.data - adj) * C64::new(0.0, -0.5),
        }
    }

    /// Operator norm of `M - M*`.
    pub fn hermitian_residual(&self) -> f64 {
        let adj = self.data.adjoint();
        Self {
            data: &self.data - adj,
        }
        .op_norm()
    }

    /// `‖U*U - I‖`, zero for unitary `U`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim();
        let prod = self.data.adjoint() * &self.data;
        Self {
            data: prod - DMatrix::<C64>::identity(n, n),
        }
        .op_norm()
    }

    pub fn scaled(&self, c: C64) -> Self {
        Self {
            data: &self.data * c,
        }
    }

    pub fn scaled_re(&self, c: f64) -> Self {
        self.scaled(C64::new(c, 0.0))
    }

    /// Extract the `n x n` block at block position `(bi, bj)` of a `2n x 2n` matrix.
    pub(crate) fn block(&self, bi: usize, bj: usize, half: usize) -> Self {
        Self {
            data: self.data.view((bi * half, bj * half), (half, half)).into_owned(),
        }
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        ComplexMatrix {
            data: &self.data * &rhs.data,
        }
    }
}
