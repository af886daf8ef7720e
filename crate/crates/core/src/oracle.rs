//! Ground-truth machinery: reproducible random ensembles, a cheap triangular
//! baseline, and a brute-force nearest-normal search for tiny matrices.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, eig_normal, C64, ComplexMatrix, DoubledMatrix};

/// Largest dimension the brute-force search accepts.
pub const ORACLE_DIM_GATE: usize = 4;

/// Reproducible ensemble description: trial `(dim, scale, index)` derives its
/// generator state from `(master_seed, dim, scale, index)` only, so results
/// do not depend on scheduling or trial order.
#[derive(Debug, Clone, Serialize)]
pub struct EnsembleSpec {
    pub dims: Vec<usize>,
    pub commutator_scales: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
}

impl EnsembleSpec {
    /// The standard desk-scale ensemble.
    pub fn standard() -> Self {
        Self {
            dims: vec![4, 8, 16, 32],
            commutator_scales: vec![1e-4, 1e-3, 1e-2, 1e-1],
            trials: 25,
            master_seed: 0x6e6f726d616c, // "normal"
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trial seed.
pub fn trial_seed(master: u64, dim: usize, scale: f64, index: usize) -> u64 {
    let mut z = splitmix(master);
    z = splitmix(z ^ dim as u64);
    z = splitmix(z ^ scale.to_bits());
    z = splitmix(z ^ index as u64);
    z
}

/// Generator for trial `(dim, scale, index)` of a seeded ensemble.
pub fn trial_rng(master: u64, dim: usize, scale: f64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master, dim, scale, index))
}

/// Haar-ish random unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| {
        C64::new(gaussian(rng), gaussian(rng))
    });
    ComplexMatrix::new(nalgebra::linalg::QR::new(g.inner().clone()).q())
        .expect("finite unitary")
}

/// Random Hermitian matrix with operator norm 1.
pub fn random_hermitian_unit(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let h = g.hermitian_part();
    let norm = h.op_norm();
    h.scaled_re(1.0 / norm.max(1e-300))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller; two uniforms per call keeps the stream simple and portable.
    let u1: f64 = rng.random::<f64>().max(1e-12);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Hermitian pair drawn as a commuting pair in a random common eigenbasis
/// plus independent perturbations, rescaled so that
/// `‖[X, Y]‖ ∈ [0.5, 2] · commutator_scale` (at most 10 rescale rounds) and
/// `‖X‖, ‖Y‖ <= 1`.
pub fn random_pair(
    n: usize,
    commutator_scale: f64,
    rng: &mut ChaCha8Rng,
) -> (ComplexMatrix, ComplexMatrix) {
    let q = random_unitary(n, rng);
    let d1 = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(1.6 * rng.random::<f64>() - 0.8, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let d2 = ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            C64::new(1.6 * rng.random::<f64>() - 0.8, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let x0 = &(&q * &d1) * &q.adjoint();
    let y0 = &(&q * &d2) * &q.adjoint();
    let h1 = random_hermitian_unit(n, rng);
    let h2 = random_hermitian_unit(n, rng);
    if commutator_scale == 0.0 {
        return (x0.hermitian_part(), y0.hermitian_part());
    }
    let mut t = commutator_scale.min(0.19);
    let mut x = x0.clone();
    let mut y = y0.clone();
    for _ in 0..10 {
        x = &x0 + &h1.scaled_re(t);
        y = &y0 + &h2.scaled_re(t);
        let c = x.commutator(&y).expect("same dimension").op_norm();
        if c >= 0.5 * commutator_scale && c <= 2.0 * commutator_scale {
            break;
        }
        let update = (commutator_scale / c.max(1e-300)).clamp(0.3, 3.0);
        t = (t * update).min(0.19);
    }
    let m = x.op_norm().max(y.op_norm()).max(1.0);
    (
        x.hermitian_part().scaled_re(1.0 / m),
        y.hermitian_part().scaled_re(1.0 / m),
    )
}

/// Normal doubled matrix with the prescribed spectrum split across the two
/// diagonal blocks, conjugated by a near-identity unitary tuned so that
/// `‖[P, T]‖` lands near `comm_target`. Exactly normal by construction.
pub fn random_normal_doubled(
    spectrum: &[C64],
    comm_target: f64,
    rng: &mut ChaCha8Rng,
) -> DoubledMatrix {
    let two_n = spectrum.len();
    assert!(two_n >= 2 && two_n % 2 == 0, "spectrum length must be even");
    let n = two_n / 2;
    let q1 = random_unitary(n, rng);
    let q2 = random_unitary(n, rng);
    let da = ComplexMatrix::from_diagonal(&spectrum[..n]);
    let db = ComplexMatrix::from_diagonal(&spectrum[n..]);
    let a = &(&q1 * &da) * &q1.adjoint();
    let b = &(&q2 * &db) * &q2.adjoint();
    let t0 = DoubledMatrix::embed_diag(&a, &b).expect("same block size");
    if comm_target == 0.0 {
        return t0;
    }
    let k = random_hermitian_unit(two_n, rng);
    let dk = eig_hermitian(&k).expect("Hermitian mixer");
    let mut eps = comm_target / (1.0 + t0.matrix().op_norm());
    let mut best = t0.clone();
    for _ in 0..10 {
        let r = dk
            .apply(|z| C64::from_polar(1.0, eps * z.re))
            .expect("finite rotation");
        let t = t0
            .with_matrix(&(&r * t0.matrix()) * &r.adjoint())
            .expect("same dimension");
        let c = t.compute_d2();
        best = t;
        if c >= 0.5 * comm_target && c <= 1.5 * comm_target {
            break;
        }
        eps *= (comm_target / c.max(1e-300)).clamp(0.3, 3.0);
    }
    best
}

/// Triangular baseline: `N = Q diag(R) Q*` from the Schur form `A = Q R Q*`;
/// the distance `‖A - N‖` equals the norm of the strict upper part of `R`.
pub fn schur_baseline(a: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let n = a.dim();
    let schur = nalgebra::linalg::Schur::try_new(a.inner().clone(), 1e-14, 200_000)
        .expect("schur iteration converges");
    let (q, t) = schur.unpack();
    let diag = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| {
        if i == j {
            t[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let nmat = ComplexMatrix::new(&q * diag * q.adjoint()).expect("finite baseline");
    let dist = (a - &nmat).op_norm();
    (nmat, dist)
}

/// Hermitian angle-logarithm of a unitary: `H` with `exp(iH) = U`.
fn unitary_log(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = eig_normal(u, 1e-6)?;
    Ok(d.apply(|z| C64::new(z.arg(), 0.0))?.hermitian_part())
}

/// Pack/unpack of the search parameters: a Hermitian generator (n² reals)
/// and a complex diagonal (2n reals); `N = exp(iH) diag(μ) exp(-iH)`.
struct NormalParam {
    n: usize,
}

impl NormalParam {
    fn dim(&self) -> usize {
        self.n * self.n + 2 * self.n
    }

    fn unpack(&self, p: &[f64]) -> ComplexMatrix {
        let n = self.n;
        let mut h = vec![vec![C64::new(0.0, 0.0); n]; n];
        let mut idx = 0;
        for i in 0..n {
            h[i][i] = C64::new(p[idx], 0.0);
            idx += 1;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let v = C64::new(p[idx], p[idx + 1]);
                idx += 2;
                h[i][j] = v;
                h[j][i] = v.conj();
            }
        }
        let hmat = ComplexMatrix::from_fn(n, |i, j| h[i][j]);
        let mut mu = Vec::with_capacity(n);
        for _ in 0..n {
            mu.push(C64::new(p[idx], p[idx + 1]));
            idx += 2;
        }
        let dh = eig_hermitian(&hmat).expect("Hermitian generator");
        let u = dh
            .apply(|z| C64::from_polar(1.0, z.re))
            .expect("finite rotation");
        let dm = ComplexMatrix::from_diagonal(&mu);
        &(&u * &dm) * &u.adjoint()
    }

    fn pack(&self, h: &ComplexMatrix, mu: &[C64]) -> Vec<f64> {
        let n = self.n;
        let mut p = Vec::with_capacity(self.dim());
        for i in 0..n {
            p.push(h.entry(i, i).re);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                p.push(h.entry(i, j).re);
                p.push(h.entry(i, j).im);
            }
        }
        for &m in mu {
            p.push(m.re);
            p.push(m.im);
        }
        p
    }
}

/// Plain Nelder–Mead simplex minimisation.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    iters: usize,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += step;
        let fx = f(&x);
        simplex.push((x, fx));
    }
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let worst = simplex[d].clone();
        let mut centroid = vec![0.0; d];
        for (x, _) in &simplex[..d] {
            for k in 0..d {
                centroid[k] += x[k] / d as f64;
            }
        }
        let at = |coef: f64| -> Vec<f64> {
            (0..d)
                .map(|k| centroid[k] + coef * (worst.0[k] - centroid[k]))
                .collect()
        };
        let xr = at(-1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = at(-2.0);
            let fe = f(&xe);
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let xc = at(0.5);
            let fc = f(&xc);
            if fc < worst.1 {
                simplex[d] = (xc, fc);
            } else {
                // shrink towards the best vertex
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for k in 0..d {
                        v.0[k] = best[k] + 0.5 * (v.0[k] - best[k]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
        let spread = simplex[d].1 - simplex[0].1;
        if spread.abs() < 1e-12 {
            break;
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].clone()
}

/// Brute-force nearest-normal search over `N = U diag(μ) U*` by
/// random-restart Nelder–Mead on the unitary generator and the eigenvalues.
/// The triangular baseline is always one of the starting points, so the
/// result never exceeds it.
pub fn nearest_normal_search(
    a: &ComplexMatrix,
    restarts: usize,
    iters: usize,
) -> Result<(ComplexMatrix, f64)> {
    let n = a.dim();
    if n > ORACLE_DIM_GATE {
        return Err(Error::DimensionGate {
            n,
            max: ORACLE_DIM_GATE,
        });
    }
    let param = NormalParam { n };
    let objective = |p: &[f64]| -> f64 { (a - &param.unpack(p)).op_norm() };

    let mut starts: Vec<Vec<f64>> = Vec::new();
    // triangular baseline start
    {
        let schur = nalgebra::linalg::Schur::try_new(a.inner().clone(), 1e-14, 200_000)
            .expect("schur iteration converges");
        let (q, t) = schur.unpack();
        let qm = ComplexMatrix::new(q).expect("finite unitary");
        let mu: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
        if let Ok(h) = unitary_log(&qm) {
            starts.push(param.pack(&h, &mu));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6f7261636c65); // "oracle"
    let scale = 1.0 + a.op_norm();
    while starts.len() < restarts.max(1) {
        let h = random_hermitian_unit(n, &mut rng).scaled_re(std::f64::consts::PI * rng.random::<f64>());
        let mu: Vec<C64> = (0..n)
            .map(|_| {
                C64::new(
                    scale * (2.0 * rng.random::<f64>() - 1.0),
                    scale * (2.0 * rng.random::<f64>() - 1.0),
                )
            })
            .collect();
        starts.push(param.pack(&h, &mu));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    for s in &starts {
        let f0 = objective(s);
        if best.as_ref().is_none_or(|b| f0 < b.1) {
            best = Some((s.clone(), f0));
        }
        let (x, fx) = nelder_mead(&objective, s, 0.05 * scale, iters);
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    // polish the winner with shrinking simplices
    for step in [1e-3, 1e-5, 1e-7] {
        let (p0, _) = best.clone().expect("at least one start");
        let (x, fx) = nelder_mead(&objective, &p0, step * scale, iters);
        if best.as_ref().is_none_or(|b| fx < b.1) {
            best = Some((x, fx));
        }
    }
    let (p, dist) = best.expect("at least one start");
    Ok((param.unpack(&p), dist))
}
