//! Eigendecompositions of Hermitian and (numerically) normal matrices, and
//! the functional calculus built on top of them.

use nalgebra::{Complex, DMatrix};

use super::matrix::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// Default normality tolerance, scaled by `1 + ‖M‖²` at the call site.
///
/// Inputs reaching `eig_normal` in this pipeline are normal up to rounding;
/// a loose tolerance here would mask construction bugs upstream.
pub const NORMALITY_TOL: f64 = 1e-8;

/// Unitary diagonalisation of a (numerically) normal matrix.
///
/// Invariants, checked by [`NormalDecomposition::verify`] and exercised in
/// tests: the eigenvector matrix is unitary within `1e-10 * n`, and
/// `Q diag(λ) Q*` reconstructs the source within `1e-9 * (1 + ‖source‖)`.
#[derive(Debug, Clone)]
pub struct NormalDecomposition {
    eigenvalues: Vec<C64>,
    eigenvectors: ComplexMatrix,
    /// Measured `‖[M, M*]‖` of the decomposed matrix.
    source_residual: f64,
}

impl NormalDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[C64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn source_residual(&self) -> f64 {
        self.source_residual
    }

    /// Reassemble `Q diag(λ) Q*`.
    pub fn matrix(&self) -> ComplexMatrix {
        self.apply(|z| z).expect("identity map is finite")
    }

    /// Functional calculus: `f(M) = Q diag(f(λ)) Q*`.
    ///
    /// Fails if `f` returns a non-finite value on some eigenvalue.
    pub fn apply(&self, f: impl Fn(C64) -> C64) -> Result<ComplexMatrix> {
        let mapped = self.mapped_eigenvalues(&f)?;
        Ok(self.assemble(&mapped))
    }

    /// Functional calculus that keeps the decomposition: same eigenbasis, mapped
    /// eigenvalues. Lets chained spectral maps reuse one factorisation.
    pub fn map_eigenvalues(&self, f: impl Fn(C64) -> C64) -> Result<NormalDecomposition> {
        let mapped = self.mapped_eigenvalues(&f)?;
        Ok(NormalDecomposition {
            eigenvalues: mapped,
            eigenvectors: self.eigenvectors.clone(),
            source_residual: self.source_residual,
        })
    }

    fn mapped_eigenvalues(&self, f: &impl Fn(C64) -> C64) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(self.eigenvalues.len());
        for &l in &self.eigenvalues {
            let v = f(l);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFiniteFunction { re: l.re, im: l.im });
            }
            out.push(v);
        }
        Ok(out)
    }

    fn assemble(&self, diag: &[C64]) -> ComplexMatrix {
        let q = self.eigenvectors.inner();
        let d = DMatrix::<C64>::from_fn(diag.len(), diag.len(), |i, j| {
            if i == j { diag[i] } else { Complex::new(0.0, 0.0) }
        });
        ComplexMatrix::new(q * d * q.adjoint()).expect("functional calculus stays finite")
    }

    /// Spectral projection onto the eigenvalues satisfying `region`.
    ///
    /// Hermitian idempotent; an empty region yields the zero matrix. The rank
    /// equals the number of selected eigenvalues.
    pub fn spectral_projection(&self, region: impl Fn(C64) -> bool) -> ComplexMatrix {
        let diag: Vec<C64> = self
            .eigenvalues
            .iter()
            .map(|&l| {
                if region(l) {
                    Complex::new(1.0, 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                }
            })
            .collect();
        // Re-hermitise to kill rounding in Q diag Q*.
        self.assemble(&diag).hermitian_part()
    }

    /// Number of eigenvalues inside `region`.
    pub fn count_in(&self, region: impl Fn(C64) -> bool) -> usize {
        self.eigenvalues.iter().filter(|&&l| region(l)).count()
    }

    /// Residuals of the two decomposition invariants:
    /// `(‖Q*Q - I‖, ‖Q diag(λ) Q* - M‖)`.
    pub fn verify(&self, source: &ComplexMatrix) -> (f64, f64) {
        let unit = self.eigenvectors.unitarity_residual();
        let recon = (&self.matrix() - source).op_norm();
        (unit, recon)
    }
}

/// Sort eigenpairs ascending by real part, ties broken by imaginary part.
/// Fixes the output of every functional-calculus expression.
fn sort_pairs(values: &mut [C64], vectors: &mut DMatrix<C64>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        values[a]
            .re
            .total_cmp(&values[b].re)
            .then(values[a].im.total_cmp(&values[b].im))
    });
    let old_vals = values.to_vec();
    let old_vecs = vectors.clone();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = old_vals[src];
        vectors.set_column(dst, &old_vecs.column(src));
    }
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues come out real and
/// ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<NormalDecomposition> {
    let scale = 1.0 + h.op_norm();
    let tol = 1e-10 * scale;
    // Frobenius dominates the operator norm, so use it as a cheap first pass.
    let fro = (h.inner() - h.inner().adjoint()).norm();
    if fro > tol {
        let residual = h.hermitian_residual();
        if residual > tol {
            return Err(Error::NotHermitian {
                residual,
                tolerance: tol,
            });
        }
    }
    let herm = h.hermitian_part();
    let se = nalgebra::linalg::SymmetricEigen::new(herm.inner().clone());
    let mut values: Vec<C64> = se.eigenvalues.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut vectors = se.eigenvectors;
    sort_pairs(&mut values, &mut vectors);
    Ok(NormalDecomposition {
        eigenvalues: values,
        eigenvectors: ComplexMatrix::new(vectors)?,
        source_residual: h.self_commutator_norm(),
    })
}

/// Unitary diagonalisation of a numerically normal matrix via its Schur form.
///
/// The self-commutator must satisfy `‖[M,M*]‖ <= tol * (1 + ‖M‖²)` and the
/// strictly off-diagonal part of the triangular Schur factor must have norm
/// at most `10 sqrt(tol) (1 + ‖M‖)`; otherwise the caller fed a matrix too far
/// from normal and [`Error::NotNormal`] is returned. Eigenvalues are the
/// diagonal of the triangular factor.
pub fn eig_normal(m: &ComplexMatrix, tol: f64) -> Result<NormalDecomposition> {
    let norm = m.op_norm();
    let residual = m.self_commutator_norm();
    if residual > tol * (1.0 + norm * norm) {
        return Err(Error::NotNormal {
            residual,
            tolerance: tol * (1.0 + norm * norm),
            stage: "self-commutator pre-check",
        });
    }
    let n = m.dim();
    let schur = nalgebra::linalg::Schur::try_new(m.inner().clone(), 1e-14, 200_000)
        .ok_or(Error::NoConvergence)?;
    let (q, t) = schur.unpack();
    let mut off = DMatrix::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off[(i, j)] = t[(i, j)];
            }
        }
    }
    let off_norm = ComplexMatrix::new(off)?.op_norm();
    let off_limit = 10.0 * tol.sqrt() * (1.0 + norm);
    if off_norm > off_limit {
        return Err(Error::NotNormal {
            residual: off_norm,
            tolerance: off_limit,
            stage: "schur off-diagonal",
        });
    }
    let mut values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut vectors = q;
    sort_pairs(&mut values, &mut vectors);
    Ok(NormalDecomposition {
        eigenvalues: values,
        eigenvectors: ComplexMatrix::new(vectors)?,
        source_residual: residual,
    })
}

/// `eig_normal` with the default tolerance.
pub fn eig_normal_default(m: &ComplexMatrix) -> Result<NormalDecomposition> {
    eig_normal(m, NORMALITY_TOL)
}
