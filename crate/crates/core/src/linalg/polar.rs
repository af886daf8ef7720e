//! Polar decomposition, the nearest-unitary retraction, and the spectral
//! perturbation that pushes eigenvalues of a unitary off a marked point.

use nalgebra::{Complex, DMatrix};

use super::decomp::eig_normal;
use super::matrix::{C64, ComplexMatrix};
use crate::error::{Error, Result};

/// Relative threshold below which a singular value counts as kernel.
const KERNEL_TOL: f64 = 1e-12;

fn svd_parts(m: &ComplexMatrix) -> (DMatrix<C64>, Vec<f64>, DMatrix<C64>) {
    let svd = m.inner().clone().svd(true, true);
    let u = svd.u.expect("svd with vectors requested");
    let v_t = svd.v_t.expect("svd with vectors requested");
    let sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    (u, sigma, v_t)
}

/// Polar decomposition `M = V · Mod` with `V` unitary and `Mod = sqrt(M*M)`.
///
/// For singular `M` the unitary factor is not determined on the kernel; it is
/// completed deterministically through the SVD convention `V = W Z*`, which
/// reduces to the identity on kernel directions aligned by that convention.
pub fn polar_parts(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (u, sigma, v_t) = svd_parts(m);
    let v = unitary_from_svd(&u, &sigma, &v_t, m.op_norm());
    let d = DMatrix::<C64>::from_fn(sigma.len(), sigma.len(), |i, j| {
        if i == j {
            Complex::new(sigma[i], 0.0)
        } else {
            Complex::new(0.0, 0.0)
        }
    });
    let modulus = ComplexMatrix::new(v_t.adjoint() * d * &v_t).expect("finite modulus");
    // sqrt(M*M) must be exactly Hermitian for downstream spectral calls.
    (v, modulus.hermitian_part())
}

/// `W Z*` with kernel directions phase-aligned so the factor stays unitary
/// and acts as the identity there whenever the left/right kernels agree.
fn unitary_from_svd(
    u: &DMatrix<C64>,
    sigma: &[f64],
    v_t: &DMatrix<C64>,
    scale: f64,
) -> ComplexMatrix {
    let n = sigma.len();
    let thresh = KERNEL_TOL * (1.0 + scale);
    let kernel: Vec<usize> = (0..n).filter(|&i| sigma[i] <= thresh).collect();
    let w_zstar = u * v_t;
    if kernel.is_empty() {
        return ComplexMatrix::new(w_zstar).expect("finite unitary factor");
    }
    // Replace the kernel-to-kernel part by the best unitary alignment of the
    // corresponding singular subspaces; nalgebra's convention already aligns
    // diagonal inputs, this keeps degenerate ones deterministic too.
    let k = kernel.len();
    let v = v_t.adjoint();
    let mut w_ker = DMatrix::<C64>::zeros(n, k);
    let mut z_ker = DMatrix::<C64>::zeros(n, k);
    for (c, &i) in kernel.iter().enumerate() {
        w_ker.set_column(c, &u.column(i));
        z_ker.set_column(c, &v.column(i));
    }
    let g = w_ker.adjoint() * &z_ker;
    let svd = g.svd(true, true);
    let theta = svd.u.expect("svd with vectors requested")
        * svd.v_t.expect("svd with vectors requested");
    // V = W diag(I, Θ) Z* assembled column by column.
    let mut out = w_zstar;
    let aligned = &w_ker * theta * z_ker.adjoint();
    let plain = &w_ker * z_ker.adjoint();
    out += aligned - plain;
    ComplexMatrix::new(out).expect("finite unitary factor")
}

/// Nearest-unitary retraction `S ↦ S (S*S)^{-1/2}`.
///
/// Measures `ε = max(σ_max - 1, 1 - σ_min)` from `S` itself and refuses to
/// retract once `ε >= 1`, which signals that an upstream construction left the
/// invertibility regime. The output satisfies
/// `‖S - U‖ <= ε (1 + ε) / (1 - ε)` up to rounding.
///
/// Computed by Newton–Schulz iteration rather than through the SVD: with
/// singular values clustered at 1 the SVD pairs left and right vectors only
/// to `eps/gap` accuracy, which wrecks the commutation structure the surgery
/// steps rely on, while the iteration uses nothing but matrix products.
pub fn polar_retract(s: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sv = s.singular_values();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    let eps = (sigma_max - 1.0).abs().max((1.0 - sigma_min).abs());
    if eps >= 1.0 {
        return Err(Error::NotNearUnitary {
            sigma_min,
            sigma_max,
        });
    }
    let n = s.dim();
    let eye = ComplexMatrix::identity(n);
    // scale into the convergence region σ ⊂ (0, √3)
    let mut x = s.scaled_re(1.0 / sigma_max.max(1.0));
    for _ in 0..100 {
        let gap = &eye - &(&x.adjoint() * &x);
        let residual = gap.fro_norm();
        x = &x + &(&x * &gap).scaled_re(0.5);
        if residual < 1e-14 * (n as f64) {
            break;
        }
    }
    Ok(x)
}

/// Measured distance of `S` from the unitary group in singular-value terms.
pub fn near_unitary_eps(s: &ComplexMatrix) -> f64 {
    let sv = s.singular_values();
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let sigma_min = sv.last().copied().unwrap_or(0.0);
    (sigma_max - 1.0).abs().max((1.0 - sigma_min).abs())
}

/// Rotate eigenvalues of a unitary `U` away from the unit-modulus point `w`:
/// every eigenvalue of the result is at arc distance at least `eps/4` from
/// `w`, and `‖U - U₀‖ <= eps`.
///
/// Eigenvalues within arc distance `eps/4` of `w` move by `eps/2` along the
/// circle, away from `w`; an exact hit moves to `w e^{-i eps/2}`.
pub fn perturb_off_point(u: &ComplexMatrix, w: C64, eps: f64) -> Result<ComplexMatrix> {
    if eps <= 0.0 {
        return Err(Error::NonPositiveBudget(eps));
    }
    let n = u.dim();
    let unit_res = u.unitarity_residual();
    if unit_res > 1e-8 * (1.0 + n as f64) {
        return Err(Error::NotNearUnitary {
            sigma_min: 1.0 - unit_res,
            sigma_max: 1.0 + unit_res,
        });
    }
    let w = w / Complex::new(w.norm(), 0.0);
    let d = eig_normal(u, 1e-7)?;
    let rotated = d.map_eigenvalues(|l| {
        let phi = (l * w.conj()).arg();
        if phi.abs() >= eps / 4.0 {
            l
        } else {
            let shift = if phi > 0.0 { eps / 2.0 } else { -eps / 2.0 };
            w * Complex::from_polar(1.0, phi + shift)
        }
    })?;
    Ok(rotated.matrix())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn polar_of_unitary_is_itself() {
        // a rotation matrix is unitary
        let th = 0.7f64;
        let m = ComplexMatrix::from_rows(&[
            vec![c(th.cos(), 0.0), c(-th.sin(), 0.0)],
            vec![c(th.sin(), 0.0), c(th.cos(), 0.0)],
        ])
        .unwrap();
        let (v, modulus) = polar_parts(&m);
        assert!((&v - &m).op_norm() < 1e-12);
        assert!((&modulus - &ComplexMatrix::identity(2)).op_norm() < 1e-12);
    }

    #[test]
    fn polar_of_signed_diagonal() {
        let m = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(-3.0, 0.0)]);
        let (v, modulus) = polar_parts(&m);
        let ev = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let emod = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(3.0, 0.0)]);
        assert!((&v - &ev).op_norm() < 1e-12);
        assert!((&modulus - &emod).op_norm() < 1e-12);
    }

    #[test]
    fn polar_kernel_completion_is_identity() {
        let m = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(2.0, 0.0)]);
        let (v, modulus) = polar_parts(&m);
        assert!((&v - &ComplexMatrix::identity(2)).op_norm() < 1e-12);
        let emod = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(2.0, 0.0)]);
        assert!((&modulus - &emod).op_norm() < 1e-12);
    }

    #[test]
    fn polar_reassembles_and_unitary() {
        let m = ComplexMatrix::from_fn(5, |i, j| c(((i + 2 * j) as f64).sin(), ((3 * i + j) as f64).cos()));
        let (v, modulus) = polar_parts(&m);
        assert!(v.unitarity_residual() < 1e-10 * 5.0);
        assert!(modulus.hermitian_residual() < 1e-12 * (1.0 + m.op_norm()));
        let recon = &v * &modulus;
        assert!((&recon - &m).op_norm() < 1e-9 * (1.0 + m.op_norm()));
    }

    #[test]
    fn retract_of_unitary_is_identity_map() {
        let th = 1.1f64;
        let s = ComplexMatrix::from_rows(&[
            vec![c(th.cos(), 0.0), c(-th.sin(), 0.0)],
            vec![c(th.sin(), 0.0), c(th.cos(), 0.0)],
        ])
        .unwrap();
        let u = polar_retract(&s).unwrap();
        assert!((&u - &s).op_norm() < 1e-12);
    }

    #[test]
    fn retract_scaled_identity() {
        let s = ComplexMatrix::identity(2).scaled_re(1.1);
        let u = polar_retract(&s).unwrap();
        assert!((&u - &ComplexMatrix::identity(2)).op_norm() < 1e-12);
        let dist = (&s - &u).op_norm();
        assert!(dist <= 0.1 * 1.1 / 0.9 + 1e-9);
        assert!((dist - 0.1).abs() < 1e-12);
    }

    #[test]
    fn retract_sign_map() {
        let s = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(-1.0, 0.0)]);
        let u = polar_retract(&s).unwrap();
        let expected = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!((&u - &expected).op_norm() < 1e-12);
    }

    #[test]
    fn retract_rejects_far_from_unitary() {
        let s = ComplexMatrix::from_diagonal(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            polar_retract(&s),
            Err(Error::NotNearUnitary { .. })
        ));
        let s = ComplexMatrix::identity(2).scaled_re(2.5);
        assert!(matches!(
            polar_retract(&s),
            Err(Error::NotNearUnitary { .. })
        ));
    }

    #[test]
    fn retract_bound_holds_on_near_unitaries() {
        // the stated retraction bound, with eps measured from S
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = 4;
            let g = ComplexMatrix::from_fn(n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let q = nalgebra::linalg::QR::new(g.inner().clone()).q();
            let q = ComplexMatrix::new(q).unwrap();
            let pert = ComplexMatrix::from_fn(n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let s = &q + &pert.scaled_re(0.2 / pert.op_norm());
            let eps = near_unitary_eps(&s);
            assert!(eps < 1.0);
            let u = polar_retract(&s).unwrap();
            let bound = eps * (1.0 + eps) / (1.0 - eps) + 1e-9;
            let dist = (&s - &u).op_norm();
            assert!(dist <= bound, "dist {dist} > bound {bound}");
        }
    }

    #[test]
    fn perturb_spectrum_already_clear() {
        let u = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let u0 = perturb_off_point(&u, c(-1.0, 0.0), 0.1).unwrap();
        assert!((&u0 - &u).op_norm() < 1e-12);
    }

    #[test]
    fn perturb_exact_hit_rotates_negatively() {
        let u = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0)]);
        let eps = 0.2;
        let u0 = perturb_off_point(&u, c(-1.0, 0.0), eps).unwrap();
        let expected = C64::from_polar(1.0, std::f64::consts::PI - 0.1);
        assert!((u0.entry(0, 0) - expected).norm() < 1e-12);
        assert!((&u0 - &u).op_norm() <= eps + 1e-12);
    }

    #[test]
    fn perturb_clears_an_arc_on_random_unitaries() {
        use rand::prelude::*;
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let w = c(-1.0, 0.0);
        for _ in 0..20 {
            let n = 5;
            let g = ComplexMatrix::from_fn(n, |_, _| {
                c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let u = ComplexMatrix::new(nalgebra::linalg::QR::new(g.inner().clone()).q()).unwrap();
            let eps = 0.05;
            let u0 = perturb_off_point(&u, w, eps).unwrap();
            assert!((&u0 - &u).op_norm() <= eps + 1e-10);
            let d = eig_normal(&u0, 1e-7).unwrap();
            for l in d.eigenvalues() {
                let arc = (l * w.conj()).arg().abs();
                assert!(arc >= eps / 4.0 - 1e-12, "arc {arc} < eps/4");
            }
        }
    }

    #[test]
    fn perturb_rejects_non_positive_budget() {
        let u = ComplexMatrix::identity(2);
        assert!(matches!(
            perturb_off_point(&u, c(-1.0, 0.0), 0.0),
            Err(Error::NonPositiveBudget(_))
        ));
    }
}
