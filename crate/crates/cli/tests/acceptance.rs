//! Acceptance suite: one test per criterion, each printing a PASS or FAIL
//! line with the measured quantities (run with `--nocapture` to see the
//! lines for passing criteria).
//!
//! Criterion 4 is implemented exactly as stated and fails by construction;
//! the panic message carries the measured analysis. See the project notes on
//! gate calibration for the background.

use std::sync::OnceLock;
use std::time::Instant;

use nearnormal::extension::pinch;
use nearnormal::holecutter::{cut_many_holes, HoleSpec, SurgeryConfig};
use nearnormal::lattice::{lattice_approximate, LatticeConfig};
use nearnormal::linalg::{eig_hermitian, C64, ComplexMatrix};
use nearnormal::oracle::{
    nearest_normal_search, random_normal_doubled, random_pair, schur_baseline, trial_rng,
};
use nearnormal::pipeline::{approximate_normal, hermitian_pair_form, lower_bound, PipelineConfig};
use nearnormal::smooth::make_partition_bump;
use rayon::prelude::*;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn jordan2() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![c(0.0, 0.0), c(1.0, 0.0)],
        vec![c(0.0, 0.0), c(0.0, 0.0)],
    ])
    .unwrap()
}

/// Everything the per-run criteria need from one pipeline run.
struct Outcome {
    dim: usize,
    scale: f64,
    comm_norm: f64,
    distance: f64,
    ratio: f64,
    lower_bound: f64,
    normality_residual: f64,
    a_prime_norm: f64,
    final_pinch_comm: f64,
    pinch_scale: f64,
    spectrum_snap_residual: f64,
}

fn run_pair_trial(seed: u64, dim: usize, scale: f64, trial: usize) -> Outcome {
    let mut rng = trial_rng(seed, dim, scale, trial);
    let (x, y) = random_pair(dim, scale, &mut rng);
    let comm_norm = x.commutator(&y).unwrap().op_norm();
    let a = &x + &y.scaled(c(0.0, 1.0));
    let lb = lower_bound(&a);
    let config = PipelineConfig::default();
    let (a_prime, report) = approximate_normal(&a, &config)
        .unwrap_or_else(|e| panic!("pipeline failed on n={dim} scale={scale}: {e}"));
    // distance in the pair sense for the ratio criteria
    let xp = a_prime.hermitian_part();
    let yp = a_prime.antihermitian_part();
    let pair_distance = (&x - &xp).op_norm() + (&y - &yp).op_norm();
    let spacing = if report.lattice_spacing > 0.0 {
        report.lattice_spacing
    } else {
        1.0
    };
    let xnorm_int = xp.op_norm() / spacing;
    let ynorm_int = yp.op_norm() / spacing;
    Outcome {
        dim,
        scale,
        comm_norm,
        distance: pair_distance,
        ratio: pair_distance / comm_norm.sqrt(),
        lower_bound: lb,
        normality_residual: report.normality_residual,
        a_prime_norm: a_prime.op_norm(),
        final_pinch_comm: report.final_pinch_comm,
        pinch_scale: 1.0 + xnorm_int * ynorm_int,
        spectrum_snap_residual: report.spectrum_snap_residual,
    }
}

/// 500 random instances over n ∈ {2, 4, 8, 16} with commutator scales
/// spanning both the resolving and the saturated regime of the construction.
fn sandwich_runs() -> &'static (Vec<Outcome>, f64) {
    static RUNS: OnceLock<(Vec<Outcome>, f64)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let scales = [1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1];
        let mut keys = Vec::new();
        for &dim in &[2usize, 4, 8, 16] {
            for trial in 0..125 {
                let scale = scales[trial % scales.len()];
                keys.push((dim, scale, trial));
            }
        }
        assert_eq!(keys.len(), 500);
        let start = Instant::now();
        let outcomes: Vec<Outcome> = keys
            .par_iter()
            .map(|&(dim, scale, trial)| run_pair_trial(0xacce97, dim, scale, trial))
            .collect();
        (outcomes, start.elapsed().as_secs_f64())
    })
}

/// The standard ensemble: dims {4, 8, 16, 32}, scales {1e-4..1e-1}, 25 trials.
fn standard_runs() -> &'static (Vec<Outcome>, f64) {
    static RUNS: OnceLock<(Vec<Outcome>, f64)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let mut keys = Vec::new();
        for &dim in &[4usize, 8, 16, 32] {
            for &scale in &[1e-4, 1e-3, 1e-2, 1e-1] {
                for trial in 0..25 {
                    keys.push((dim, scale, trial));
                }
            }
        }
        let start = Instant::now();
        let outcomes: Vec<Outcome> = keys
            .par_iter()
            .map(|&(dim, scale, trial)| run_pair_trial(0x57a4da4d, dim, scale, trial))
            .collect();
        (outcomes, start.elapsed().as_secs_f64())
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[values.len() / 2]
}

#[test]
fn criterion_01_lower_bound_sandwich() {
    let (outcomes, elapsed) = sandwich_runs();
    let mut worst_margin = f64::INFINITY;
    for o in outcomes {
        let margin = o.distance - (o.lower_bound - 1e-9);
        assert!(
            margin >= 0.0,
            "criterion 1: FAIL — sandwich violated at n={} scale={} (distance {} < bound {})",
            o.dim,
            o.scale,
            o.distance,
            o.lower_bound
        );
        worst_margin = worst_margin.min(margin);
    }
    let (_, jr) = approximate_normal(&jordan2(), &PipelineConfig::default()).unwrap();
    assert!(jr.distance >= jr.lower_bound - 1e-9);
    assert!(
        *elapsed < 120.0,
        "criterion 1: FAIL — runtime {elapsed:.1}s exceeds 2 minutes"
    );
    println!(
        "criterion 1: PASS — 500 runs + jordan, min margin over bound {worst_margin:.3e}, runtime {elapsed:.1}s"
    );
}

#[test]
fn criterion_02_exact_outputs() {
    let (outcomes, _) = sandwich_runs();
    let mut worst_pinch: f64 = 0.0;
    let mut worst_snap: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for o in outcomes {
        let pinch_limit = 1e-10 * o.pinch_scale;
        assert!(
            o.final_pinch_comm <= pinch_limit,
            "criterion 2: FAIL — [X',Y'] residual {} exceeds {} (n={}, scale={})",
            o.final_pinch_comm,
            pinch_limit,
            o.dim,
            o.scale
        );
        assert!(
            o.spectrum_snap_residual <= 1e-9,
            "criterion 2: FAIL — σ(X') off the lattice by {}",
            o.spectrum_snap_residual
        );
        let norm_limit = 1e-8 * (1.0 + o.a_prime_norm * o.a_prime_norm);
        assert!(
            o.normality_residual <= norm_limit,
            "criterion 2: FAIL — normality residual {} exceeds {}",
            o.normality_residual,
            norm_limit
        );
        worst_pinch = worst_pinch.max(o.final_pinch_comm / o.pinch_scale);
        worst_snap = worst_snap.max(o.spectrum_snap_residual);
        worst_norm = worst_norm.max(o.normality_residual / (1.0 + o.a_prime_norm * o.a_prime_norm));
    }
    println!(
        "criterion 2: PASS — worst [X',Y']/scale {worst_pinch:.2e}, worst snap {worst_snap:.2e}, worst normality {worst_norm:.2e}"
    );
}

#[test]
fn criterion_03_lattice_move_bound() {
    let start = Instant::now();
    let keys: Vec<(usize, usize)> = (0..100)
        .map(|i| {
            let half = [2usize, 3, 4, 6, 8][i % 5];
            (half, i)
        })
        .collect();
    let worst: f64 = keys
        .par_iter()
        .map(|&(half, i)| {
            let comm = [1e-3, 2e-3, 4e-3][i % 3];
            let mut rng = trial_rng(0x1a771ce, 2 * half, comm, i);
            let spectrum: Vec<C64> = (0..2 * half)
                .map(|k| {
                    C64::from_polar(
                        0.3 + 1.5 * ((k * 7 + i) % 6) as f64 / 5.0,
                        0.9 * k as f64 + 0.1 * i as f64,
                    )
                })
                .collect();
            let t = random_normal_doubled(&spectrum, comm, &mut rng);
            let (_, trace) = lattice_approximate(&t, &LatticeConfig::default())
                .unwrap_or_else(|e| panic!("criterion 3: lattice failed on half_n={half}: {e}"));
            assert!(
                trace.move_total <= 3.0 + 1e-6,
                "criterion 3: FAIL — ‖T - T₀‖ = {} on half_n={half}",
                trace.move_total
            );
            trace.move_total
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    assert!(
        elapsed < 300.0,
        "criterion 3: FAIL — runtime {elapsed:.1}s exceeds 5 minutes"
    );
    println!(
        "criterion 3: PASS — 100 lattice runs, max ‖T - T₀‖ = {worst:.4} <= 3, runtime {elapsed:.1}s"
    );
}

#[test]
fn criterion_04_square_root_scaling() {
    // Stated grid: scales {1e-4, 1e-3, 1e-2, 1e-1} at n = 16; median ratio
    // spread <= 3x and log-log slope 1/2 +- 0.15. At the working scale the
    // lattice spacing s/ε exceeds ‖A‖ for every scale in this grid, so the
    // construction returns a trivially coarse approximant and the distance
    // saturates near ‖A‖ instead of scaling like s; the criterion cannot hold
    // for the construction it tests. It is asserted exactly as stated.
    let (outcomes, _) = standard_runs();
    let scales = [1e-4, 1e-3, 1e-2, 1e-1];
    let mut medians = Vec::new();
    let mut med_dist = Vec::new();
    let mut med_comm = Vec::new();
    for &s in &scales {
        let mut ratios: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.dim == 16 && o.scale == s)
            .map(|o| o.ratio)
            .collect();
        assert_eq!(ratios.len(), 25);
        medians.push(median(&mut ratios));
        let mut d: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.dim == 16 && o.scale == s)
            .map(|o| o.distance)
            .collect();
        med_dist.push(median(&mut d));
        let mut cn: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.dim == 16 && o.scale == s)
            .map(|o| o.comm_norm)
            .collect();
        med_comm.push(median(&mut cn));
    }
    let spread = medians.iter().fold(0.0f64, |a, &b| a.max(b))
        / medians.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    // least-squares slope of log(distance) against log(‖[X,Y]‖)
    let xs: Vec<f64> = med_comm.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = med_dist.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / 4.0;
    let my = ys.iter().sum::<f64>() / 4.0;
    let slope = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
    let pass = spread <= 3.0 && (slope - 0.5).abs() <= 0.15;
    let detail = format!(
        "median ratios {medians:.3?} (spread {spread:.1}x, limit 3x), log-log slope {slope:.3} (target 0.5±0.15)"
    );
    if pass {
        println!("criterion 4: PASS — {detail}");
    } else {
        println!("criterion 4: FAIL — {detail}");
        panic!(
            "criterion 4: FAIL — {detail}. The stated grid lies in the saturation regime of the \
             construction: the output lattice spacing s/ε exceeds ‖A‖ at every grid scale, so the \
             distance saturates near ‖A‖ and the ratio decays like 1/s instead of staying flat. \
             In the resolving regime (‖[X,Y]‖ <~ 1e-9 at the default ε, or any scale with \
             ‖A‖/s >~ 2/ε) the measured ratio is stable, as the companion regime test shows. \
             No admissible ε reaches the stated grid: the gates cap ε at ~0.01 while resolving \
             1e-1 would need ε beyond the retraction's invertibility regime."
        );
    }
}

#[test]
fn criterion_04_supplement_resolving_regime_scaling() {
    // Companion measurement (informational, not a stated criterion): in the resolving
    // regime the construction's ratio is flat across two decades.
    let scales = [4e-6, 1e-6, 4e-7];
    let mut medians = Vec::new();
    for (si, &scale) in scales.iter().enumerate() {
        let ratios: Vec<f64> = (0..9)
            .into_par_iter()
            .map(|trial| run_pair_trial(0x4e50, 16, scale, 100 + si * 50 + trial).ratio)
            .collect();
        let mut r = ratios;
        medians.push(median(&mut r));
    }
    let spread = medians.iter().fold(0.0f64, |a, &b| a.max(b))
        / medians.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    assert!(
        spread <= 3.0,
        "resolving-regime ratio spread {spread:.2} exceeds 3 (medians {medians:?})"
    );
    println!(
        "criterion 4 supplement: PASS — resolving-regime median ratios {medians:.2?}, spread {spread:.2}x <= 3"
    );
}

#[test]
fn criterion_05_dimension_robustness() {
    let (outcomes, _) = standard_runs();
    let scales = [1e-4, 1e-3, 1e-2, 1e-1];
    let mut lines = Vec::new();
    for &s in &scales {
        let mut r8: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.dim == 8 && o.scale == s)
            .map(|o| o.ratio)
            .collect();
        let mut r32: Vec<f64> = outcomes
            .iter()
            .filter(|o| o.dim == 32 && o.scale == s)
            .map(|o| o.ratio)
            .collect();
        assert_eq!(r8.len(), 25);
        assert_eq!(r32.len(), 25);
        let m8 = median(&mut r8);
        let m32 = median(&mut r32);
        assert!(
            m32 <= 2.0 * m8,
            "criterion 5: FAIL — scale {s}: median ratio n=32 {m32:.3} > 2x median n=8 {m8:.3}"
        );
        lines.push(format!("scale {s:.0e}: {m32:.2}/{m8:.2}"));
    }
    println!(
        "criterion 5: PASS — median ratio n=32 / n=8 within 2x at every scale ({})",
        lines.join(", ")
    );
}

#[test]
fn criterion_06_pinch_suite() {
    let bump = make_partition_bump(0.0, 1.0, 1.0).unwrap();
    let mut max_c4: f64 = 0.0;
    let mut max_c16: f64 = 0.0;
    for i in 0..200 {
        let n = if i < 100 { 4 } else { 16 };
        let scale = [1e-2, 3e-2, 1e-1][i % 3];
        let mut rng = trial_rng(0xd1a6, n, scale, i);
        let (x0, y) = random_pair(n, scale, &mut rng);
        // widen the spectrum of X so several unit bands are occupied
        let x = x0.scaled_re(3.0);
        let yp = pinch(&x, &y, &bump).unwrap();
        let d = eig_hermitian(&x).unwrap();
        for (lo, hi) in [(-10.0, 0.3), (-0.4, 1.2), (0.0, 10.0), (-2.0, 2.0)] {
            let e = d.spectral_projection(|z| z.re >= lo && z.re < hi);
            let lhs = (&(&e * &yp) * &e).op_norm();
            let rhs = (&(&e * &y) * &e).op_norm();
            assert!(
                lhs <= rhs + 1e-9,
                "criterion 6: FAIL — (d1) violated: {lhs} > {rhs} + 1e-9 (n={n}, i={i})"
            );
        }
        let cxy = x.commutator(&y).unwrap().op_norm();
        let cxyp = x.commutator(&yp).unwrap().op_norm();
        assert!(
            cxyp <= cxy + 1e-9,
            "criterion 6: FAIL — (d2) violated: {cxyp} > {cxy} + 1e-9"
        );
        let ratio = (&y - &yp).op_norm() / cxy;
        assert!(ratio.is_finite());
        if n == 4 {
            max_c4 = max_c4.max(ratio);
        } else {
            max_c16 = max_c16.max(ratio);
        }
    }
    assert!(
        max_c16 <= 2.0 * max_c4,
        "criterion 6: FAIL — (d3) constant grows with dimension: n=16 max {max_c16:.3} > 2x n=4 max {max_c4:.3}"
    );
    println!(
        "criterion 6: PASS — (d1),(d2) hold with 1e-9 slack on 200 pairs; (d3) max C: n=4 {max_c4:.3}, n=16 {max_c16:.3}"
    );
}

#[test]
fn criterion_07_many_holes_suite() {
    // one family of operators, three hole layouts on the same instance
    let layouts: [&[HoleSpec]; 3] = [
        &[HoleSpec::line(c(0.0, 0.0), 0.0)],
        &[HoleSpec::line(c(0.0, 0.0), 0.0), HoleSpec::generic(c(5.0, 0.0))],
        &[
            HoleSpec::line(c(0.0, 0.0), 0.0),
            HoleSpec::generic(c(5.0, 0.0)),
            HoleSpec::generic(c(0.0, 5.0)),
            HoleSpec::line(c(5.0, 5.0), 0.0),
        ],
    ];
    let cfg = SurgeryConfig::default();
    let start = Instant::now();
    let results: Vec<(usize, f64)> = (0..34usize)
        .into_par_iter()
        .flat_map(|i| {
            let mut rng = trial_rng(0x501e5, 16, 5e-3, i);
            // spectrum compatible with every layout: on-line points near the
            // line holes, free points near the generic ones, far fill
            use rand::Rng;
            let mut jig = || -> f64 { rng.random::<f64>() - 0.5 };
            let j: Vec<f64> = (0..6).map(|_| jig()).collect();
            let spectrum: Vec<C64> = vec![
                c(0.4 + 0.2 * j[0], 0.0),
                c(-1.3 + 0.4 * j[1], 0.0),
                c(2.2, 0.0),
                c(5.0 + 0.5 * j[2], 0.4 * j[3]),
                c(6.2, -0.6),
                c(0.3, 5.0 + 0.5 * j[4]),
                c(-0.7, 6.1),
                c(4.4 + 0.3 * j[5], 5.0),
                c(6.3, 5.0),
                c(2.5, 2.5),
            ];
            let t = random_normal_doubled(&spectrum, 5e-3, &mut rng);
            let mut out = Vec::new();
            for layout in layouts {
                let (_, report) = cut_many_holes(&t, layout, &cfg)
                    .unwrap_or_else(|e| panic!("criterion 7: cut failed (i={i}): {e}"));
                assert!(
                    report.move_norm <= 3.0 + 1e-6,
                    "criterion 7: FAIL — (f1) ‖T-T'‖ = {}",
                    report.move_norm
                );
                assert!(
                    report.min_disc_clearance >= 1.0 - 1e-6,
                    "criterion 7: FAIL — (f2) clearance {}",
                    report.min_disc_clearance
                );
                let block = report.block_residual.unwrap();
                assert!(
                    block <= 1e-8,
                    "criterion 7: FAIL — (f4) block residual {block}"
                );
                for lr in &report.line_residuals {
                    assert!(
                        *lr <= 1e-6,
                        "criterion 7: FAIL — (f6) line residual {lr}"
                    );
                }
                out.push((layout.len(), report.c_prime_meas));
            }
            out
        })
        .collect();
    let cmax = |m: usize| -> f64 {
        results
            .iter()
            .filter(|(k, _)| *k == m)
            .map(|(_, v)| *v)
            .fold(0.0f64, f64::max)
    };
    let (c1, c2, c4) = (cmax(1), cmax(2), cmax(4));
    assert!(
        c4 <= 1.25 * c1,
        "criterion 7: FAIL — commutator amplification accumulates: C'(m=4) {c4:.3} > 1.25x C'(m=1) {c1:.3}"
    );
    println!(
        "criterion 7: PASS — 102 cuts over 34 instances; (f1),(f2),(f4),(f6) hold; C' by holes: m=1 {c1:.3}, m=2 {c2:.3}, m=4 {c4:.3} (runtime {:.1}s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_08_oracle_consistency() {
    let outcomes: Vec<(f64, f64, f64, f64)> = (0..50usize)
        .into_par_iter()
        .map(|i| {
            let scale = [1e-2, 5e-2, 1e-1][i % 3];
            let mut rng = trial_rng(0x04ac1e, 2, scale, i);
            let (x, y) = random_pair(2, scale, &mut rng);
            let a = &x + &y.scaled(c(0.0, 1.0));
            let (_, oracle) = nearest_normal_search(&a, 24, 300).unwrap();
            let (_, baseline) = schur_baseline(&a);
            let lb = lower_bound(&a);
            let (_, report) = approximate_normal(&a, &PipelineConfig::default()).unwrap();
            (oracle, baseline, lb, report.distance)
        })
        .collect();
    for (i, &(oracle, baseline, lb, pipeline)) in outcomes.iter().enumerate() {
        assert!(
            oracle >= lb - 1e-6,
            "criterion 8: FAIL — oracle {oracle} beat the lower bound {lb} (i={i})"
        );
        assert!(
            oracle <= baseline + 1e-9,
            "criterion 8: FAIL — oracle {oracle} above the baseline {baseline} (i={i})"
        );
        assert!(
            pipeline >= oracle - 1e-6,
            "criterion 8: FAIL — pipeline {pipeline} beat the oracle {oracle} (i={i})"
        );
    }
    let (_, jordan_oracle) = nearest_normal_search(&jordan2(), 60, 400).unwrap();
    // upper end of the bracket is the explicit feasible point at 1/2; the
    // search sits within its own 1e-6 numerical tolerance of it
    assert!(
        (0.2 - 1e-6..=0.5 + 1e-6).contains(&jordan_oracle),
        "criterion 8: FAIL — jordan oracle {jordan_oracle} outside [0.2, 0.5]"
    );
    println!(
        "criterion 8: PASS — 50 instances consistent; jordan oracle distance {jordan_oracle:.6} in [0.2, 0.5]"
    );
}

#[test]
fn criterion_09_ensemble_determinism() {
    let dir = std::env::temp_dir().join(format!("nearnormal-acc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut files = Vec::new();
    for (tag, jobs) in [("a", "1"), ("b", "2"), ("c", "1")] {
        let path = dir.join(format!("det-{tag}.csv"));
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_nearnormal"))
            .args([
                "ensemble",
                "--dims",
                "2,4",
                "--scales",
                "1e-3,1e-2",
                "--trials",
                "3",
                "--seed",
                "41",
                "--jobs",
                jobs,
                "--csv",
                path.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success());
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(
        files[0], files[1],
        "criterion 9: FAIL — CSV bytes differ between --jobs 1 and --jobs 2"
    );
    assert_eq!(
        files[0], files[2],
        "criterion 9: FAIL — CSV bytes differ between repeated runs"
    );
    println!(
        "criterion 9: PASS — identical CSV bytes across --jobs values and repeats ({} bytes)",
        files[0].len()
    );
}

#[test]
fn criterion_10_performance() {
    // single n = 64 run
    let mut rng = trial_rng(0x9e4f, 64, 1e-5, 0);
    let (x, y) = random_pair(64, 1e-5, &mut rng);
    let start = Instant::now();
    let (_, _, report) = hermitian_pair_form(&x, &y, &PipelineConfig::default()).unwrap();
    let single = start.elapsed().as_secs_f64();
    assert!(
        single < 10.0,
        "criterion 10: FAIL — n=64 run took {single:.2}s (>= 10s)"
    );
    // full standard ensemble
    let (outcomes, ensemble_secs) = standard_runs();
    assert_eq!(outcomes.len(), 400);
    assert!(
        *ensemble_secs < 1800.0,
        "criterion 10: FAIL — standard ensemble took {ensemble_secs:.0}s (>= 30 min)"
    );
    println!(
        "criterion 10: PASS — n=64 run {single:.2}s (< 10s, distance {:.3}), standard ensemble {ensemble_secs:.1}s (< 30 min)",
        report.distance
    );
}
