//! Property-based invariants: functional calculus is a polynomial
//! homomorphism, the retraction bound, the partition identity for random
//! admissible bumps, and the convex-oracle characterisation of the
//! block-diagonal distance.

use nearnormal::linalg::{
    eig_normal, near_unitary_eps, perturb_off_point, polar_retract, C64, ComplexMatrix,
    DoubledMatrix,
};
use nearnormal::oracle::{random_normal_doubled, random_unitary, trial_rng};
use nearnormal::smooth::make_partition_bump;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functional_calculus_squares_matrices(seed in 0u64..1000, n in 2usize..16) {
        let mut rng = trial_rng(seed, n, 0.0, 0);
        let q = random_unitary(2 * ((n + 1) / 2), &mut rng);
        let m = {
            let dim = q.dim();
            let diag = ComplexMatrix::from_fn(dim, |i, j| {
                if i == j {
                    C64::from_polar(0.2 + (i as f64) * 0.3, 0.8 * i as f64)
                } else {
                    c(0.0, 0.0)
                }
            });
            &(&q * &diag) * &q.adjoint()
        };
        let d = eig_normal(&m, 1e-7).unwrap();
        let via_calculus = d.apply(|z| z * z).unwrap();
        let via_product = &m * &m;
        let norm = m.op_norm();
        prop_assert!(
            (&via_calculus - &via_product).op_norm() <= 1e-8 * (1.0 + norm * norm)
        );
    }

    #[test]
    fn retraction_satisfies_the_stated_bound(seed in 0u64..1000, pert in 0.0f64..0.45) {
        let mut rng = trial_rng(seed, 4, pert, 1);
        let q = random_unitary(4, &mut rng);
        let h = nearnormal::oracle::random_hermitian_unit(4, &mut rng);
        let s = &q + &h.scaled_re(pert);
        let eps = near_unitary_eps(&s);
        prop_assume!(eps < 1.0);
        let u = polar_retract(&s).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-10 * 4.0);
        let bound = eps * (1.0 + eps) / (1.0 - eps) + 1e-9;
        prop_assert!((&s - &u).op_norm() <= bound);
    }

    #[test]
    fn perturbation_clears_the_marked_point(seed in 0u64..1000, eps in 1e-6f64..0.5) {
        let mut rng = trial_rng(seed, 5, eps, 2);
        let u = random_unitary(5, &mut rng);
        let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (seed as f64) / 1000.0);
        let u0 = perturb_off_point(&u, w, eps).unwrap();
        prop_assert!((&u0 - &u).op_norm() <= eps + 1e-9);
        let d = eig_normal(&u0, 1e-7).unwrap();
        for l in d.eigenvalues() {
            let arc = (l * w.conj()).arg().abs();
            prop_assert!(arc >= eps / 4.0 - 1e-10);
        }
    }

    #[test]
    fn partition_identity_for_admissible_bumps(a in 0.0f64..0.45) {
        // shoulders tile exactly when a + b equals the period
        let b = 1.0 - a;
        prop_assume!(b > a + 1e-3);
        let rho = make_partition_bump(a, b, 1.0).unwrap();
        for k in 0..400 {
            let x = -1.5 + 3.0 * k as f64 / 400.0;
            let s: f64 = (-3..=3).map(|m| rho.translate_sq(x, m)).sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
        }
    }
}

/// Minimise `‖T - B‖` over block-diagonal `B` with Nelder–Mead; convexity of
/// the objective makes every local minimum global, so restarts landing at the
/// same value certify the distance.
fn block_diag_distance_oracle(t: &DoubledMatrix, iters: usize) -> f64 {
    let half = t.half_n();
    let dim_params = 2 * 2 * half * half;
    let unpack = |p: &[f64]| -> DoubledMatrix {
        let mut blocks = Vec::new();
        for k in 0..2 {
            let base = k * 2 * half * half;
            let b = ComplexMatrix::from_fn(half, |i, j| {
                let idx = base + 2 * (i * half + j);
                c(p[idx], p[idx + 1])
            });
            blocks.push(b);
        }
        DoubledMatrix::embed_diag(&blocks[0], &blocks[1]).unwrap()
    };
    let objective = |p: &[f64]| -> f64 { (t.matrix() - unpack(p).matrix()).op_norm() };

    let pack = |b: &DoubledMatrix| -> Vec<f64> {
        let mut p = Vec::with_capacity(dim_params);
        for k in 0..2 {
            let blk = b.block(k, k);
            for i in 0..half {
                for j in 0..half {
                    p.push(blk.entry(i, j).re);
                    p.push(blk.entry(i, j).im);
                }
            }
        }
        p
    };

    let mut starts = vec![pack(&t.diag_p()), vec![0.0; dim_params]];
    let mut rng = trial_rng(0xb10c, half, 0.0, 7);
    use rand::Rng;
    for _ in 0..2 {
        starts.push((0..dim_params).map(|_| rng.random::<f64>() - 0.5).collect());
    }

    let mut best = f64::INFINITY;
    for s in &starts {
        best = best.min(objective(s));
        best = best.min(nelder_mead_min(&objective, s, 0.05, iters));
    }
    best
}

fn nelder_mead_min(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> f64 {
    let d = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.to_vec(), f(x0))];
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
                let bestv = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    for k in 0..d {
                        v.0[k] = bestv[k] + 0.5 * (v.0[k] - bestv[k]);
                    }
                    v.1 = f(&v.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0].1
}

#[test]
fn block_diagonal_distance_matches_the_convex_oracle() {
    // the distance to the block-diagonal matrices is exactly ‖[P, T]‖,
    // attained by compressing away the off-diagonal blocks
    for (half, trial) in [(2usize, 0usize), (2, 1), (3, 2), (3, 3)] {
        let mut rng = trial_rng(79, 2 * half, 1e-1, trial);
        let spectrum: Vec<C64> = (0..2 * half)
            .map(|k| C64::from_polar(0.5 + 0.3 * k as f64, 1.1 * k as f64))
            .collect();
        let t = random_normal_doubled(&spectrum, 0.3, &mut rng);
        let d2 = t.compute_d2();
        let oracle = block_diag_distance_oracle(&t, 400 * half);
        assert!(
            (d2 - oracle).abs() <= 1e-6 * (1.0 + d2),
            "half_n={half}: compute_d2 {d2} vs oracle {oracle}"
        );
    }
}
