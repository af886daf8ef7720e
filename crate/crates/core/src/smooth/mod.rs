//! Smooth scalar functions used by the surgery stages: the C^∞ step, the
//! partition-of-unity bumps, the cutoff pair, the disc cutoff, the grid snap,
//! and the radial clamp.
//!
//! Everything is built from the single step `h(x) = f(x) / (f(x) + f(1-x))`
//! with `f(x) = exp(-1/x)` for positive `x`, so the partition identities turn
//! into the algebraic identity `h(u) + h(1-u) = 1`.

mod curve;

pub use curve::{make_gamma_curve, StarCurve};

use crate::error::{Error, Result};

/// The C^∞ step: 0 for `x <= 0`, 1 for `x >= 1`, nondecreasing, and
/// `h(x) + h(1-x) = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SmoothStep;

impl SmoothStep {
    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            let f = (-1.0 / x).exp();
            let g = (-1.0 / (1.0 - x)).exp();
            f / (f + g)
        }
    }
}

pub fn make_step() -> SmoothStep {
    SmoothStep
}

/// Even bump `ρ` with plateau `[-a, a]`, support `[-b, b]` and translate
/// spacing `period`; in partition mode the squared translates sum to one.
#[derive(Debug, Clone, Copy)]
pub struct BumpFamily {
    plateau: f64,
    support: f64,
    period: f64,
    step: SmoothStep,
}

impl BumpFamily {
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `ρ²(t)`: 1 on the plateau, `h((b-|t|)/(b-a))` on the shoulder, 0 outside.
    pub fn eval_sq(&self, t: f64) -> f64 {
        let t = t.abs();
        if t <= self.plateau {
            1.0
        } else if t >= self.support {
            0.0
        } else {
            self.step
                .eval((self.support - t) / (self.support - self.plateau))
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_sq(t).sqrt()
    }

    /// `ρ(x - n · period)`.
    pub fn translate(&self, x: f64, n: i64) -> f64 {
        self.eval(x - n as f64 * self.period)
    }

    pub fn translate_sq(&self, x: f64, n: i64) -> f64 {
        self.eval_sq(x - n as f64 * self.period)
    }

    /// Range of translate indices whose support can meet `[lo, hi]`.
    pub fn translate_range(&self, lo: f64, hi: f64) -> std::ops::RangeInclusive<i64> {
        let n_lo = ((lo - self.support) / self.period).floor() as i64;
        let n_hi = ((hi + self.support) / self.period).ceil() as i64;
        n_lo..=n_hi
    }

    /// Translate indices whose bump is nonzero at `x`; at most two for the
    /// partition families used here (their support is one period wide).
    pub fn active_translates(&self, x: f64) -> std::ops::RangeInclusive<i64> {
        let n_lo = ((x - self.support) / self.period).ceil() as i64;
        let n_hi = ((x + self.support) / self.period).floor() as i64;
        n_lo..=n_hi
    }
}

/// Partition bump: the shoulders of adjacent translates tile exactly, which
/// pins `a + b = period`; the two instances used downstream, `(0, 1, 1)` and
/// `(1/3, 2/3, 1)`, both satisfy it.
pub fn make_partition_bump(a: f64, b: f64, period: f64) -> Result<BumpFamily> {
    if !(a >= 0.0 && b > a && period > 0.0 && b.is_finite()) {
        return Err(Error::InvalidBump(format!(
            "need 0 <= a < b and period > 0, got a={a}, b={b}, period={period}"
        )));
    }
    if ((a + b) - period).abs() > 1e-12 * period {
        return Err(Error::InvalidBump(format!(
            "partition requires a + b = period, got a={a}, b={b}, period={period}"
        )));
    }
    Ok(BumpFamily {
        plateau: a,
        support: b,
        period,
        step: SmoothStep,
    })
}

/// Cutoff pair on the half line: `ρ₁ = 1` on `[0, 1/2]`, vanishing beyond 1,
/// with `ρ₂ = sqrt(1 - ρ₁²)` so that `ρ₁² + ρ₂² = 1` exactly.
#[derive(Debug, Clone, Copy, Default)]
pub struct CutoffPair {
    step: SmoothStep,
}

impl CutoffPair {
    pub fn rho1_sq(&self, t: f64) -> f64 {
        if t <= 0.5 {
            1.0
        } else if t >= 1.0 {
            0.0
        } else {
            self.step.eval(2.0 * (1.0 - t))
        }
    }

    pub fn rho1(&self, t: f64) -> f64 {
        self.rho1_sq(t).sqrt()
    }

    pub fn rho2_sq(&self, t: f64) -> f64 {
        1.0 - self.rho1_sq(t)
    }

    pub fn rho2(&self, t: f64) -> f64 {
        self.rho2_sq(t).sqrt()
    }
}

pub fn make_rho12() -> CutoffPair {
    CutoffPair::default()
}

/// Radial disc cutoff: 1 on `[0, 1]`, 0 on `[2, ∞)`, nonincreasing.
#[derive(Debug, Clone, Copy, Default)]
pub struct DiscCutoff {
    step: SmoothStep,
}

impl DiscCutoff {
    pub fn chi_sq(&self, r: f64) -> f64 {
        if r <= 1.0 {
            1.0
        } else if r >= 2.0 {
            0.0
        } else {
            self.step.eval(2.0 - r)
        }
    }

    pub fn chi(&self, r: f64) -> f64 {
        self.chi_sq(r).sqrt()
    }
}

pub fn make_disc_cutoff() -> DiscCutoff {
    DiscCutoff::default()
}

/// Staircase snap `ψ` with plateaus `ψ = 6k` on `[6k - 5/2, 6k + 5/2]` and a
/// 6-periodic derivative (`ψ(t + 6) = ψ(t) + 6`), plus the coordinatewise
/// plane map `g(z) = ψ(Re z) + i ψ(Im z)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GridSnap {
    step: SmoothStep,
}

impl GridSnap {
    pub fn psi(&self, t: f64) -> f64 {
        let k = (t / 6.0).round();
        let u = t - 6.0 * k;
        if u.abs() <= 2.5 {
            6.0 * k
        } else if u > 2.5 {
            6.0 * k + 6.0 * self.step.eval(u - 2.5)
        } else {
            6.0 * k - 6.0 + 6.0 * self.step.eval(u + 3.5)
        }
    }

    pub fn g(&self, z: crate::linalg::C64) -> crate::linalg::C64 {
        crate::linalg::C64::new(self.psi(z.re), self.psi(z.im))
    }
}

pub fn make_grid_snap() -> GridSnap {
    GridSnap::default()
}

/// Radial clamp: identity on the disc of radius 2, radial projection onto the
/// circle of radius 3 outside, smooth in between, fixing 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct RadialClamp {
    step: SmoothStep,
}

impl RadialClamp {
    /// The radial profile `m(r)`: `r` on `[0, 2]`, 3 beyond 3, nondecreasing.
    pub fn profile(&self, r: f64) -> f64 {
        if r <= 2.0 {
            r
        } else if r >= 3.0 {
            3.0
        } else {
            r + (3.0 - r) * self.step.eval(r - 2.0)
        }
    }

    pub fn g1(&self, z: crate::linalg::C64) -> crate::linalg::C64 {
        let r = z.norm();
        if r == 0.0 {
            return z;
        }
        z * crate::linalg::C64::new(self.profile(r) / r, 0.0)
    }
}

pub fn make_radial_clamp() -> RadialClamp {
    RadialClamp::default()
}
