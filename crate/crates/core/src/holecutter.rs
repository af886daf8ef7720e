//! Spectrum surgery: unitaries that let us remove discs from the spectrum of
//! a normal doubled operator while keeping the commutator with the block
//! projection `P` under control, and the combined many-holes-at-once cut.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    eig_normal, C64, ComplexMatrix, DoubledMatrix, NormalDecomposition,
};
use crate::smooth::{make_disc_cutoff, make_gamma_curve, make_rho12, StarCurve};

/// Normality tolerance for surgery inputs; matches the output guarantee of
/// the producing stages.
pub const SURGERY_NORMALITY_TOL: f64 = 1e-7;

/// Default gate on `‖[P, T]‖` before a cut is attempted. The admissible
/// threshold in the underlying estimates is not constructive; this default is
/// deliberately conservative and can be overridden or forced.
pub const DEFAULT_GATE: f64 = 0.05;

/// How a hole is cut: `Generic` keeps the full unit circle in the small
/// block, `Line` assumes the nearby spectrum lies on `e^{iθ}ℝ + λ` and
/// preserves that line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HoleMode {
    Generic,
    Line { theta: f64 },
}

/// A requested spectral hole.
#[derive(Debug, Clone, Copy)]
pub struct HoleSpec {
    pub center: C64,
    pub mode: HoleMode,
}

impl HoleSpec {
    pub fn generic(center: C64) -> Self {
        Self {
            center,
            mode: HoleMode::Generic,
        }
    }

    pub fn line(center: C64, theta: f64) -> Self {
        Self {
            center,
            mode: HoleMode::Line { theta },
        }
    }
}

/// Gates and verification switches shared by the surgery operations.
#[derive(Debug, Clone)]
pub struct SurgeryConfig {
    /// Gate on `‖[P, T]‖`.
    pub gate: f64,
    /// Convert gate violations into recorded margins instead of errors.
    pub force: bool,
    /// Compute the full contract residuals (several extra decompositions per
    /// hole); cheap margins are always recorded.
    pub verify: bool,
}

impl Default for SurgeryConfig {
    fn default() -> Self {
        Self {
            gate: DEFAULT_GATE,
            force: false,
            verify: true,
        }
    }
}

impl SurgeryConfig {
    fn check_gate(&self, stage: &str, measured: f64, warnings: &mut Vec<String>) -> Result<()> {
        if measured < self.gate {
            return Ok(());
        }
        if self.force {
            warnings.push(format!(
                "{stage}: gate forced, measured {measured:.3e} >= limit {:.3e}",
                self.gate
            ));
            return Ok(());
        }
        Err(Error::GateViolation {
            stage: stage.to_string(),
            measured,
            limit: self.gate,
        })
    }
}

/// Measurements of a single disc cut.
#[derive(Debug, Clone, Serialize)]
pub struct CutReport {
    /// `‖[P, T]‖` of the (shifted) input.
    pub comm_p_in: f64,
    /// `‖[P, U]‖` of the produced unitary.
    pub comm_p_u: f64,
    /// `‖[P, U]‖ / ‖[P, T]‖`; zero when the input commutator vanishes.
    pub c_meas: f64,
    /// `σ_min(diag_P U)` — the invertibility margin of the compressed unitary.
    pub diag_p_sigma_min: f64,
    /// `‖U*U - I‖`.
    pub unitarity: f64,
    /// `max_r ‖[U, Π_r]‖` over the checked radii (verify mode).
    pub commute_with_projections: Option<f64>,
    /// Agreement with the polar part of `T` on the stated spectral range
    /// (verify mode).
    pub polar_agreement: Option<f64>,
    /// Distance of the small-block spectrum from `{±e^{iθ}}` (line mode,
    /// verify mode).
    pub line_residual: Option<f64>,
    /// Gate violations recorded under `force`.
    pub forced: Vec<String>,
}

/// Measurements of a contour cut.
#[derive(Debug, Clone, Serialize)]
pub struct ContourCutTrace {
    pub comm_p_in: f64,
    /// `σ_min(diag_P(T - λI))` at the curve centre.
    pub center_margin: f64,
    /// `‖T - T₀‖`.
    pub move_norm: f64,
    /// `‖T - T₀‖ / ‖[P, T]‖`; zero when the input commutator vanishes.
    pub ratio: f64,
    /// Distance of the output spectrum from the removed point.
    pub clearance: f64,
    /// Perturbation budget used for the eigenvalue push-off.
    pub eps_budget: f64,
}

/// Report of a many-holes cut.
#[derive(Debug, Clone, Serialize)]
pub struct SurgeryReport {
    pub comm_p_in: f64,
    pub comm_p_out: f64,
    /// `‖[P, T']‖ / max(‖[P, T]‖, max_j ‖[P, U_j]‖)`.
    pub c_prime_meas: f64,
    /// `‖T - T'‖`.
    pub move_norm: f64,
    /// `min_j min_σ |σ(T') - λ_j|`; at least 1 when every hole is clean.
    pub min_disc_clearance: f64,
    /// Per-hole `min_σ |σ(T') - λ_j|`, aligned with `centers`.
    pub disc_clearances: Vec<f64>,
    /// `‖[T', T'*]‖`.
    pub normality_out: f64,
    /// `max_{r,j} ‖[T', Π_r^j]‖` and the untouched-block residual (verify).
    pub block_residual: Option<f64>,
    /// Per line-mode hole: distance of `σ(T') ∩ O₂(λ_j)` from the line.
    pub line_residuals: Vec<f64>,
    /// Per-hole reports, `None` for holes skipped as exact no-ops.
    pub holes: Vec<Option<CutReport>>,
    /// Centres as `(re, im)` pairs, for the run records.
    pub centers: Vec<(f64, f64)>,
}

fn decompose(t: &DoubledMatrix) -> Result<NormalDecomposition> {
    eig_normal(t.matrix(), SURGERY_NORMALITY_TOL)
}

/// Unit-circle point map used by both disc cuts:
/// `χ(z) = z/|z| · ρ₂²(|z|²)`, smooth because `ρ₂` vanishes near zero.
fn chi_term(pair: &crate::smooth::CutoffPair, z: C64) -> C64 {
    let r2 = z.norm_sqr();
    let w = pair.rho2_sq(r2);
    if w == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        z / C64::new(z.norm(), 0.0) * C64::new(w, 0.0)
    }
}

/// Polar factor restricted away from the kernel: `z/|z|` where `|z| >= 1/2`,
/// zero elsewhere. Agrees with any unitary polar part on the spectral ranges
/// the contracts quantify over.
fn outer_polar(z: C64) -> C64 {
    if z.norm() < 0.5 {
        C64::new(0.0, 0.0)
    } else {
        z / C64::new(z.norm(), 0.0)
    }
}

/// Invertible block-diagonal approximant of `diag_P T` together with its
/// (block-diagonal, unitary) polar part: per block, floor the singular values
/// at `tau` and reuse the singular bases.
fn floored_block_polar(t: &DoubledMatrix, tau: f64) -> (DoubledMatrix, DoubledMatrix) {
    let mut approx = Vec::with_capacity(2);
    let mut polar = Vec::with_capacity(2);
    for k in 0..2 {
        let block = t.block(k, k);
        let svd = block.inner().clone().svd(true, true);
        let u = svd.u.expect("svd vectors");
        let v_t = svd.v_t.expect("svd vectors");
        let n = block.dim();
        let floored = nalgebra::DMatrix::<C64>::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(svd.singular_values[i].max(tau), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        approx.push(ComplexMatrix::new(&u * floored * &v_t).expect("finite approximant"));
        polar.push(ComplexMatrix::new(u * v_t).expect("finite polar factor"));
    }
    (
        DoubledMatrix::embed_diag(&approx[0], &approx[1]).expect("same block size"),
        DoubledMatrix::embed_diag(&polar[0], &polar[1]).expect("same block size"),
    )
}

/// Contour cut with an already-computed decomposition of `t`.
fn contour_cut_with(
    t: &DoubledMatrix,
    d: &NormalDecomposition,
    curve: &StarCurve,
    z0: C64,
) -> Result<(DoubledMatrix, ContourCutTrace)> {
    let comm_p_in = t.compute_d2();
    // spectrum must lie on the curve
    for &l in d.eigenvalues() {
        let res = curve.radial_residual(l);
        if res > 1e-6 {
            return Err(Error::SpectrumOffCurve {
                re: l.re,
                im: l.im,
                residual: res,
            });
        }
    }
    let z0_res = curve.radial_residual(z0);
    if z0_res > 1e-6 {
        return Err(Error::SpectrumOffCurve {
            re: z0.re,
            im: z0.im,
            residual: z0_res,
        });
    }
    // centre margin: diag_P(T - λI) must be invertible
    let lambda = curve.center();
    let shifted = t
        .with_matrix(t.matrix() - &ComplexMatrix::identity(t.dim()).scaled(lambda))
        .expect("same dimension");
    let center_margin = shifted
        .diag_p()
        .matrix()
        .sigma_min();
    let scale = 1.0 + t.matrix().op_norm();
    if center_margin <= 1e-12 * scale {
        return Err(Error::GateViolation {
            stage: "contour cut: diag_P(T - centre) invertibility".into(),
            measured: center_margin,
            limit: 1e-12 * scale,
        });
    }

    // map onto the unit circle and rotate the marked point to -1
    let u0 = curve.circle_map(z0).expect("marked point away from centre");
    let gauge = -C64::new(1.0, 0.0) / u0;
    let w_rot = d.apply(|z| {
        curve
            .circle_map(z)
            .expect("spectrum away from the centre")
            * gauge
    })?;
    let w_doubled = t.with_matrix(w_rot)?;
    let s = w_doubled.diag_p();

    let eps_budget = comm_p_in.max(1e-10);
    let minus_one = C64::new(-1.0, 0.0);
    let mut blocks = Vec::with_capacity(2);
    for k in 0..2 {
        let retracted = crate::linalg::polar_retract(&s.block(k, k))?;
        let pushed = crate::linalg::perturb_off_point(&retracted, minus_one, eps_budget)?;
        // back through the inverse circle map, per block so the output is
        // block-diagonal by construction
        let db = eig_normal(&pushed.scaled(C64::new(1.0, 0.0) / gauge), 1e-7)?;
        blocks.push(db.apply(|w| curve.circle_map_inv(w / C64::new(w.norm(), 0.0)))?);
    }
    let t0 = DoubledMatrix::embed_diag(&blocks[0], &blocks[1]).expect("same block size");

    let move_norm = (t.matrix() - t0.matrix()).op_norm();
    let d0 = decompose(&t0)?;
    let clearance = d0
        .eigenvalues()
        .iter()
        .map(|&l| (l - z0).norm())
        .fold(f64::INFINITY, f64::min);
    Ok((
        t0,
        ContourCutTrace {
            comm_p_in,
            center_margin,
            move_norm,
            ratio: if comm_p_in > 0.0 {
                move_norm / comm_p_in
            } else {
                0.0
            },
            clearance,
            eps_budget,
        },
    ))
}

/// Remove a single point from the spectrum of a normal operator living on a
/// star-shaped curve, producing a block-diagonal normal operator on the same
/// curve with `‖T - T₀‖` controlled by `‖[P, T]‖`.
pub fn cut_point_on_curve(
    t: &DoubledMatrix,
    curve: &StarCurve,
    z0: C64,
) -> Result<(DoubledMatrix, ContourCutTrace)> {
    let d = decompose(t)?;
    contour_cut_with(t, &d, curve, z0)
}

#[allow(clippy::too_many_arguments)]
fn unitary_report(
    u: &ComplexMatrix,
    t: &DoubledMatrix,
    d: &NormalDecomposition,
    comm_p_in: f64,
    cfg: &SurgeryConfig,
    forced: Vec<String>,
    line_theta: Option<f64>,
    radii: &[f64],
    polar_range: impl Fn(C64) -> bool,
) -> Result<CutReport> {
    let u_doubled = t.with_matrix(u.clone())?;
    let comm_p_u = u_doubled.compute_d2();
    let diag_p_sigma_min = u_doubled.diag_p().matrix().sigma_min();
    let unitarity = u.unitarity_residual();
    let mut commute_with_projections = None;
    let mut polar_agreement = None;
    let mut line_residual = None;
    if cfg.verify {
        let mut worst: f64 = 0.0;
        for &r in radii {
            let pi = d.spectral_projection(|z| z.norm() < r);
            worst = worst.max(u.commutator(&pi)?.op_norm());
        }
        commute_with_projections = Some(worst);
        // agreement with the polar part of T on the quantified range
        let v = d.apply(outer_polar)?;
        let range_proj = d.spectral_projection(&polar_range);
        let diff = u - &v;
        polar_agreement = Some((&diff * &range_proj).op_norm());
        if let Some(theta) = line_theta {
            // compress U onto the eigenvectors of T inside O₂ and measure the
            // distance of its spectrum from {±e^{iθ}} (in the rotated frame
            // the compression is Hermitian unitary)
            let rot = C64::from_polar(1.0, -theta);
            let sel: Vec<usize> = d
                .eigenvalues()
                .iter()
                .enumerate()
                .filter(|(_, l)| l.norm() < 2.0)
                .map(|(i, _)| i)
                .collect();
            if sel.is_empty() {
                line_residual = Some(0.0);
            } else {
                let q = d.eigenvectors();
                let k = sel.len();
                let dim = t.dim();
                let qs = nalgebra::DMatrix::<C64>::from_fn(dim, k, |i, j| q.entry(i, sel[j]));
                let compressed = qs.adjoint() * u.inner() * &qs * rot;
                let herm_defect = (&compressed - compressed.adjoint()).norm();
                let se = nalgebra::linalg::SymmetricEigen::new(
                    (&compressed + compressed.adjoint()) * C64::new(0.5, 0.0),
                );
                let spec_defect = se
                    .eigenvalues
                    .iter()
                    .map(|&x| (x.abs() - 1.0).abs())
                    .fold(0.0f64, f64::max);
                line_residual = Some(spec_defect.max(herm_defect));
            }
        }
    }
    Ok(CutReport {
        comm_p_in,
        comm_p_u,
        c_meas: if comm_p_in > 0.0 {
            comm_p_u / comm_p_in
        } else {
            0.0
        },
        diag_p_sigma_min,
        unitarity,
        commute_with_projections,
        polar_agreement,
        line_residual,
        forced,
    })
}

fn cut_disc_u1_with(
    t: &DoubledMatrix,
    d: &NormalDecomposition,
    cfg: &SurgeryConfig,
) -> Result<(ComplexMatrix, CutReport)> {
    let mut forced = Vec::new();
    let delta1 = t.compute_d2();
    cfg.check_gate("generic disc cut", delta1, &mut forced)?;

    let tau = delta1.max(1e-12);
    let (_t0, v0) = floored_block_polar(t, tau);

    let pair = make_rho12();
    let r1 = d.apply(|z| C64::new(pair.rho1(z.norm_sqr()), 0.0))?.hermitian_part();
    let xi = d.apply(|z| chi_term(&pair, z))?;
    let s = &(&(&r1 * v0.matrix()) * &r1) + &xi;
    let u = crate::linalg::polar_retract(&s)?;
    let report = unitary_report(
        &u,
        t,
        d,
        delta1,
        cfg,
        forced,
        None,
        &[1.0, 1.5, 2.0, 3.0],
        |z| z.norm() >= 1.0,
    )?;
    Ok((u, report))
}

/// Generic disc cut: a unitary `U` that agrees with the polar part of `T`
/// outside the unit disc, commutes with the spectral projections `Π_r` for
/// `r >= 1`, has invertible `diag_P U`, and `‖[P, U]‖` controlled by
/// `‖[P, T]‖`.
pub fn cut_disc_u1(t: &DoubledMatrix, cfg: &SurgeryConfig) -> Result<(ComplexMatrix, CutReport)> {
    let d = decompose(t)?;
    cut_disc_u1_with(t, &d, cfg)
}

fn cut_disc_u2_with(
    t: &DoubledMatrix,
    d: &NormalDecomposition,
    theta: f64,
    cfg: &SurgeryConfig,
) -> Result<(ComplexMatrix, CutReport)> {
    let mut forced = Vec::new();
    let delta1 = t.compute_d2();
    cfg.check_gate("line disc cut", delta1, &mut forced)?;

    // line condition: spectrum inside O₃ sits on e^{iθ}ℝ
    let rot = C64::from_polar(1.0, -theta);
    let mut line_defect: f64 = 0.0;
    for &l in d.eigenvalues() {
        if l.norm() < 3.0 {
            line_defect = line_defect.max((l * rot).im.abs());
        }
    }
    if line_defect > 1e-6 {
        return Err(Error::LineCondition {
            theta,
            residual: line_defect,
            limit: 1e-6,
        });
    }

    // margins for diag_P(T ± i e^{iθ} I)
    let eye = ComplexMatrix::identity(t.dim());
    let scale = 1.0 + t.matrix().op_norm();
    for sign in [1.0, -1.0] {
        let shift = C64::from_polar(1.0, theta) * C64::new(0.0, sign);
        let m = t
            .with_matrix(t.matrix() + &eye.scaled(shift))
            .expect("same dimension")
            .diag_p()
            .matrix()
            .sigma_min();
        if m <= 1e-12 * scale {
            return Err(Error::GateViolation {
                stage: format!("line disc cut: diag_P(T {} i e^(i theta)) margin", if sign > 0.0 { "+" } else { "-" }),
                measured: m,
                limit: 1e-12 * scale,
            });
        }
    }

    // rotate the line onto ℝ, project the far spectrum onto the contour;
    // the guarded variant keeps far spectrum out of O₂ so the spectral
    // projections of T₅ and T agree there
    let curve = make_gamma_curve();
    let d_rot = d.map_eigenvalues(|z| z * rot)?;
    let d5 = d_rot.map_eigenvalues(|z| curve.guarded_projection(z))?;
    let t5 = t.with_matrix(d5.matrix())?;

    // remove the origin from the contour spectrum
    let (t0, _trace) = contour_cut_with(&t5, &d5, &curve, C64::new(0.0, 0.0))?;

    // polar part of the invertible block-diagonal T₀, per block
    let mut v0_blocks = Vec::with_capacity(2);
    for k in 0..2 {
        let b = t0.block(k, k);
        let db = eig_normal(&b, 1e-7)?;
        v0_blocks.push(db.apply(|z| z / C64::new(z.norm(), 0.0))?);
    }
    let v0 = DoubledMatrix::embed_diag(&v0_blocks[0], &v0_blocks[1]).expect("same block size");
    let re_v0 = v0.matrix().hermitian_part();

    let pair = make_rho12();
    let r1 = d5
        .apply(|z| C64::new(pair.rho1(z.norm_sqr()), 0.0))?
        .hermitian_part();
    let xi = d5.apply(|z| chi_term(&pair, z))?;
    let s = &(&(&r1 * &re_v0) * &r1) + &xi;
    let u_rot = crate::linalg::polar_retract(&s)?;

    // measurements happen in the rotated frame where the line is ℝ
    let t_rot = t.with_matrix(d_rot.matrix())?;
    let report = unitary_report(
        &u_rot,
        &t_rot,
        &d_rot,
        delta1,
        cfg,
        forced,
        Some(0.0),
        &[1.0, 1.5, 2.0],
        |z| z.norm() >= 1.0 && z.norm() < 2.0,
    )?;
    // rotate back
    let u = u_rot.scaled(C64::from_polar(1.0, theta));
    Ok((u, report))
}

/// Line disc cut: like [`cut_disc_u1`] but for spectra that cross the disc
/// along a straight line `e^{iθ}ℝ`; the small-block spectrum of the produced
/// unitary stays on `{±e^{iθ}}`.
pub fn cut_disc_u2(
    t: &DoubledMatrix,
    theta: f64,
    cfg: &SurgeryConfig,
) -> Result<(ComplexMatrix, CutReport)> {
    let d = decompose(t)?;
    cut_disc_u2_with(t, &d, theta, cfg)
}

/// Cut all requested holes in one pass:
/// `T' = Σ_j (λ_j + U_j) χ_j²(T) + T (I - Σ_j χ_j²(T))`.
///
/// Pairwise centre separation must be at least 4 so the cutoffs have disjoint
/// supports. Holes whose cutoff vanishes on the spectrum are exact no-ops and
/// are skipped. The combined move satisfies `‖T - T'‖ <= 3`, every open unit
/// disc around a centre is cleared, and `‖[P, T']‖` stays proportional to the
/// input commutator with a constant that does not accumulate per hole.
pub fn cut_many_holes(
    t: &DoubledMatrix,
    holes: &[HoleSpec],
    cfg: &SurgeryConfig,
) -> Result<(DoubledMatrix, SurgeryReport)> {
    for i in 0..holes.len() {
        for j in 0..i {
            let sep = (holes[i].center - holes[j].center).norm();
            if sep < 4.0 {
                return Err(Error::HoleSeparation {
                    i: j,
                    j: i,
                    separation: sep,
                });
            }
        }
    }
    let d = decompose(t)?;
    let chi = make_disc_cutoff();
    let comm_p_in = t.compute_d2();
    let dim = t.dim();
    let eye = ComplexMatrix::identity(dim);

    let mut acc = ComplexMatrix::zeros(dim);
    let mut chi_sum = ComplexMatrix::zeros(dim);
    let mut reports: Vec<Option<CutReport>> = Vec::with_capacity(holes.len());
    let mut max_comm_u: f64 = 0.0;
    for (j, hole) in holes.iter().enumerate() {
        let min_dist = d
            .eigenvalues()
            .iter()
            .map(|&l| (l - hole.center).norm())
            .fold(f64::INFINITY, f64::min);
        if min_dist >= 2.0 {
            reports.push(None);
            continue;
        }
        let shifted = t.with_matrix(t.matrix() - &eye.scaled(hole.center))?;
        let d_shifted = d.map_eigenvalues(|z| z - hole.center)?;
        let (u, rep) = match hole.mode {
            HoleMode::Generic => cut_disc_u1_with(&shifted, &d_shifted, cfg),
            HoleMode::Line { theta } => cut_disc_u2_with(&shifted, &d_shifted, theta, cfg),
        }
        .map_err(|e| e.at_hole(j))?;
        max_comm_u = max_comm_u.max(t.with_matrix(u.clone())?.compute_d2());
        let chi_sq = d.apply(|z| C64::new(chi.chi_sq((z - hole.center).norm()), 0.0))?;
        let shift_plus_u = &eye.scaled(hole.center) + &u;
        let term = &shift_plus_u * &chi_sq;
        acc = &acc + &term;
        chi_sum = &chi_sum + &chi_sq;
        reports.push(Some(rep));
    }
    let t_prime_mat = &acc + &(t.matrix() * &(&eye - &chi_sum));
    let t_prime = t.with_matrix(t_prime_mat)?;

    // report
    let comm_p_out = t_prime.compute_d2();
    let move_norm = (t.matrix() - t_prime.matrix()).op_norm();
    let normality_out = t_prime.matrix().self_commutator_norm();
    let d_out = eig_normal(t_prime.matrix(), SURGERY_NORMALITY_TOL)?;
    let mut min_disc_clearance = f64::INFINITY;
    let mut disc_clearances = Vec::with_capacity(holes.len());
    for hole in holes {
        let clearance = d_out
            .eigenvalues()
            .iter()
            .map(|&l| (l - hole.center).norm())
            .fold(f64::INFINITY, f64::min);
        min_disc_clearance = min_disc_clearance.min(clearance);
        disc_clearances.push(clearance);
    }
    let mut line_residuals = Vec::new();
    for hole in holes {
        if let HoleMode::Line { theta } = hole.mode {
            let rot = C64::from_polar(1.0, -theta);
            let mut worst: f64 = 0.0;
            for &l in d_out.eigenvalues() {
                if (l - hole.center).norm() < 2.0 {
                    worst = worst.max(((l - hole.center) * rot).im.abs());
                }
            }
            line_residuals.push(worst);
        }
    }
    let mut block_residual = None;
    if cfg.verify {
        let mut worst: f64 = 0.0;
        let mut pi2_sum = ComplexMatrix::zeros(dim);
        for hole in holes {
            for r in [1.0, 2.0] {
                let pi = d.spectral_projection(|z| (z - hole.center).norm() < r);
                worst = worst.max(t_prime.matrix().commutator(&pi)?.op_norm());
            }
            let pi2 = d.spectral_projection(|z| (z - hole.center).norm() < 2.0);
            pi2_sum = &pi2_sum + &pi2;
        }
        let untouched = &eye - &pi2_sum;
        worst = worst.max((&(t_prime.matrix() - t.matrix()) * &untouched).op_norm());
        block_residual = Some(worst);
    }
    let denom = comm_p_in.max(max_comm_u);
    Ok((
        t_prime,
        SurgeryReport {
            comm_p_in,
            comm_p_out,
            c_prime_meas: if denom > 0.0 { comm_p_out / denom } else { 0.0 },
            move_norm,
            min_disc_clearance,
            disc_clearances,
            normality_out,
            block_residual,
            line_residuals,
            holes: reports,
            centers: holes.iter().map(|h| (h.center.re, h.center.im)).collect(),
        },
    ))
}
