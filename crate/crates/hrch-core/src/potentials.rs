//! The three canonical split double-well potentials `f = f1 + f2` and the
//! Moreau-Yosida regularization of the convex part.
//!
//! The convex parts are
//!
//! ```text
//!   regular:         f1(r) = r^4 / 4                        on R
//!   logarithmic:     f1(r) = (1+r)ln(1+r) + (1-r)ln(1-r)    on [-1, 1]
//!   double obstacle: f1(r) = indicator of [-1, 1]
//! ```
//!
//! with the smooth concave remainders `-r^2/2 + 1/4`, `-c1 r^2` (`c1 > 1`)
//! and `c2 (1 - r^2)` (`c2 > 0`). For `eps` in `(0, 1)` the resolvent
//! `J_eps = (I + eps df1)^{-1}` is single-valued and 1-Lipschitz on all of R,
//! and the regularized derivative and envelope are
//!
//! ```text
//!   f1eps'(r) = (r - J_eps(r)) / eps,
//!   f1eps(r)  = |r - J_eps(r)|^2 / (2 eps) + f1(J_eps(r)).
//! ```
//!
//! `f1eps'` is monotone, `1/eps`-Lipschitz, vanishes at the origin, is
//! dominated by the minimal section of `df1` on its domain, and the envelope
//! is squeezed between `0` and `f1`. [`check_yosida_properties`] verifies all
//! of this on a sample grid; [`zelik_constants`] fits the coercivity pair
//! `(delta0, C0)` with `f1eps'(r)(r - m0) >= delta0 |f1eps'(r)| - C0`.

use alloc::format;

use crate::error::{Error, Result};
use crate::num;

/// Which of the three canonical double-well families is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    Regular,
    Logarithmic,
    DoubleObstacle,
}

/// A split potential `f = f1 + f2` with convex `f1` and concave smooth `f2`.
///
/// `r_minus`/`r_plus` bound the effective domain of `df1`; they are infinite
/// for the regular potential and `-1`/`1` otherwise (open interval for the
/// logarithmic potential, closed for the double obstacle).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPotential {
    kind: PotentialKind,
    c1: f64,
    c2: f64,
    r_minus: f64,
    r_plus: f64,
    f2_lipschitz: f64,
}

impl SplitPotential {
    /// The regular quartic potential `f(r) = (r^2 - 1)^2 / 4`.
    pub fn regular() -> Self {
        SplitPotential {
            kind: PotentialKind::Regular,
            c1: 0.0,
            c2: 0.0,
            r_minus: f64::NEG_INFINITY,
            r_plus: f64::INFINITY,
            f2_lipschitz: 1.0,
        }
    }

    /// The logarithmic potential with `f2(r) = -c1 r^2`; requires `c1 > 1`.
    pub fn logarithmic(c1: f64) -> Result<Self> {
        if !(c1 > 1.0) {
            return Err(Error::Config(format!(
                "logarithmic potential requires c1 > 1, got {c1}"
            )));
        }
        Ok(SplitPotential {
            kind: PotentialKind::Logarithmic,
            c1,
            c2: 0.0,
            r_minus: -1.0,
            r_plus: 1.0,
            f2_lipschitz: 2.0 * c1,
        })
    }

    /// The double-obstacle potential with `f2(r) = c2 (1 - r^2)`; requires `c2 > 0`.
    pub fn double_obstacle(c2: f64) -> Result<Self> {
        if !(c2 > 0.0) {
            return Err(Error::Config(format!(
                "double-obstacle potential requires c2 > 0, got {c2}"
            )));
        }
        Ok(SplitPotential {
            kind: PotentialKind::DoubleObstacle,
            c1: 0.0,
            c2,
            r_minus: -1.0,
            r_plus: 1.0,
            f2_lipschitz: 2.0 * c2,
        })
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    pub fn r_minus(&self) -> f64 {
        self.r_minus
    }

    pub fn r_plus(&self) -> f64 {
        self.r_plus
    }

    /// Lipschitz constant of `f2'`.
    pub fn f2_lipschitz(&self) -> f64 {
        self.f2_lipschitz
    }

    /// True unless the potential is the double obstacle, whose `df1` is
    /// multivalued at the endpoints.
    pub fn has_smooth_f1(&self) -> bool {
        self.kind != PotentialKind::DoubleObstacle
    }

    /// Convex part `f1(r)`, extended by `+inf` outside its effective domain.
    pub fn f1(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Regular => 0.25 * r * r * r * r,
            PotentialKind::Logarithmic => {
                if num::abs(r) > 1.0 {
                    f64::INFINITY
                } else {
                    xlnx(1.0 + r) + xlnx(1.0 - r)
                }
            }
            PotentialKind::DoubleObstacle => {
                if num::abs(r) > 1.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
        }
    }

    /// Derivative of the convex part, defined strictly inside `(r_minus, r_plus)`
    /// for the regular and logarithmic potentials only.
    pub fn f1_prime(&self, r: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::Regular => Ok(r * r * r),
            PotentialKind::Logarithmic => {
                if r > -1.0 && r < 1.0 {
                    Ok(num::ln((1.0 + r) / (1.0 - r)))
                } else {
                    Err(Error::Domain(format!(
                        "f1' of the logarithmic potential needs r strictly inside (-1, 1), got {r}"
                    )))
                }
            }
            PotentialKind::DoubleObstacle => Err(Error::Domain(
                "f1 of the double obstacle is an indicator; its subdifferential is multivalued"
                    .into(),
            )),
        }
    }

    /// Second derivative of `f1` strictly inside the domain (used by the
    /// `eps -> 0` consistency checks).
    pub fn f1_second(&self, r: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::Regular => Ok(3.0 * r * r),
            PotentialKind::Logarithmic => {
                if r > -1.0 && r < 1.0 {
                    Ok(2.0 / (1.0 - r * r))
                } else {
                    Err(Error::Domain(format!("f1'' undefined at {r}")))
                }
            }
            PotentialKind::DoubleObstacle => Err(Error::Domain(
                "f1'' undefined for the double obstacle".into(),
            )),
        }
    }

    /// Concave smooth part `f2(r)`.
    pub fn f2(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Regular => -0.5 * r * r + 0.25,
            PotentialKind::Logarithmic => -self.c1 * r * r,
            PotentialKind::DoubleObstacle => self.c2 * (1.0 - r * r),
        }
    }

    /// Derivative of the smooth part; Lipschitz with constant [`Self::f2_lipschitz`].
    pub fn f2_prime(&self, r: f64) -> f64 {
        match self.kind {
            PotentialKind::Regular => -r,
            PotentialKind::Logarithmic => -2.0 * self.c1 * r,
            PotentialKind::DoubleObstacle => -2.0 * self.c2 * r,
        }
    }

    /// Minimal section of the subdifferential, `df1_o(r)`, for `r` in the
    /// effective domain: `f1'(r)` in the smooth cases and `0` on `[-1, 1]`
    /// for the double obstacle.
    pub fn minimal_section(&self, r: f64) -> Result<f64> {
        match self.kind {
            PotentialKind::DoubleObstacle => {
                if num::abs(r) <= 1.0 {
                    Ok(0.0)
                } else {
                    Err(Error::Domain(format!("{r} outside [-1, 1]")))
                }
            }
            _ => self.f1_prime(r),
        }
    }

    /// Resolvent `J_eps(r) = (I + eps df1)^{-1}(r)`, defined on all of R.
    ///
    /// Closed form for the double obstacle (projection onto `[-1, 1]`);
    /// safeguarded Newton with a bisection fallback otherwise. The result
    /// satisfies `|s + eps f1'(s) - r| <= newton_tol (1 + |r|)`.
    pub fn resolvent(&self, y: &YosidaParams, r: f64) -> Result<f64> {
        let eps = y.epsilon;
        match self.kind {
            PotentialKind::DoubleObstacle => Ok(r.clamp(-1.0, 1.0)),
            PotentialKind::Regular => {
                // The root of s + eps s^3 = r shares the sign of r and lies
                // between 0 and r, which brackets the Newton iteration.
                let (mut lo, mut hi) = if r >= 0.0 { (0.0, r) } else { (r, 0.0) };
                let g = |s: f64| s + eps * s * s * s - r;
                let gp = |s: f64| 1.0 + 3.0 * eps * s * s;
                newton_bracketed(g, gp, r / (1.0 + eps), &mut lo, &mut hi, y, r)
            }
            PotentialKind::Logarithmic => {
                let mut lo = -1.0 + 1e-14;
                let mut hi = 1.0 - 1e-14;
                let g = |s: f64| s + eps * num::ln((1.0 + s) / (1.0 - s)) - r;
                let gp = |s: f64| 1.0 + 2.0 * eps / (1.0 - s * s);
                let s0 = (r / (1.0 + 2.0 * eps)).clamp(lo, hi);
                newton_bracketed(g, gp, s0, &mut lo, &mut hi, y, r)
            }
        }
    }

    /// Yosida approximation `f1eps'(r) = (r - J_eps(r)) / eps`.
    pub fn yosida_prime(&self, y: &YosidaParams, r: f64) -> Result<f64> {
        Ok((r - self.resolvent(y, r)?) / y.epsilon)
    }

    /// Moreau envelope `f1eps(r) = |r - J_eps(r)|^2 / (2 eps) + f1(J_eps(r))`.
    pub fn moreau_envelope(&self, y: &YosidaParams, r: f64) -> Result<f64> {
        let j = self.resolvent(y, r)?;
        let d = r - j;
        Ok(d * d / (2.0 * y.epsilon) + self.f1(j))
    }
}

/// `x ln x` continued by 0 at the origin.
fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * num::ln(x)
    } else {
        0.0
    }
}

/// Safeguarded Newton on a strictly increasing `g` with derivative `gp`,
/// keeping the iterate inside `[lo, hi]` and falling back to bisection
/// whenever a Newton step leaves the bracket.
fn newton_bracketed<G, GP>(
    g: G,
    gp: GP,
    start: f64,
    lo: &mut f64,
    hi: &mut f64,
    y: &YosidaParams,
    r: f64,
) -> Result<f64>
where
    G: Fn(f64) -> f64,
    GP: Fn(f64) -> f64,
{
    let tol = y.newton_tol * (1.0 + num::abs(r));
    let mut s = start.clamp(*lo, *hi);
    for _ in 0..y.newton_max_iters {
        let gs = g(s);
        if num::abs(gs) <= tol {
            return Ok(s);
        }
        if gs > 0.0 {
            *hi = s;
        } else {
            *lo = s;
        }
        let step = gs / gp(s);
        let mut next = s - step;
        if !(next > *lo && next < *hi) {
            next = 0.5 * (*lo + *hi);
        }
        if next == s {
            // Bracket collapsed to machine resolution.
            return Ok(s);
        }
        s = next;
    }
    Err(Error::Convergence {
        what: "yosida resolvent",
        residual: num::abs(g(s)),
    })
}

/// Parameters of the Moreau-Yosida regularization and its resolvent solves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YosidaParams {
    pub epsilon: f64,
    pub newton_tol: f64,
    pub newton_max_iters: u32,
}

impl YosidaParams {
    /// Default tolerances: relative-absolute mix `1e-12 (1 + |r|)`, 100 iterations.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!(
                "yosida epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        Ok(YosidaParams {
            epsilon,
            newton_tol: 1e-12,
            newton_max_iters: 100,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::Config(format!("newton_tol must be positive, got {tol}")));
        }
        self.newton_tol = tol;
        Ok(self)
    }
}

/// Outcome of a single property check: worst violation over the samples and
/// whether it stays below [`PROPERTY_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyCheck {
    pub pass: bool,
    pub worst_violation: f64,
}

/// Violations beyond this are treated as genuine failures rather than
/// floating-point noise.
pub const PROPERTY_TOL: f64 = 1e-10;

impl PropertyCheck {
    fn from_worst(worst: f64) -> Self {
        PropertyCheck {
            pass: worst <= PROPERTY_TOL,
            worst_violation: worst,
        }
    }
}

/// Per-property verdicts for the Moreau-Yosida regularization on a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropertyReport {
    /// `(f1eps'(r) - f1eps'(s)) (r - s) >= 0` on consecutive sample pairs.
    pub monotone: PropertyCheck,
    /// `|f1eps'(r) - f1eps'(s)| <= |r - s| / eps` on consecutive pairs.
    pub lipschitz: PropertyCheck,
    /// `f1eps'(0) = 0`.
    pub zero_at_zero: PropertyCheck,
    /// `|f1eps'(r)| <= |df1_o(r)|` on samples inside the effective domain.
    pub dominated: PropertyCheck,
    /// `0 <= f1eps(r) <= f1(r)` everywhere.
    pub envelope: PropertyCheck,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.monotone.pass
            && self.lipschitz.pass
            && self.zero_at_zero.pass
            && self.dominated.pass
            && self.envelope.pass
    }
}

/// Verifies the defining properties of `f1eps'` and the envelope on the given
/// samples (consecutive pairs are used for the difference-quotient checks).
pub fn check_yosida_properties(
    p: &SplitPotential,
    y: &YosidaParams,
    samples: &[f64],
) -> Result<PropertyReport> {
    if samples.is_empty() {
        return Err(Error::Config("property check needs at least one sample".into()));
    }
    let mut worst_mono: f64 = 0.0;
    let mut worst_lip: f64 = 0.0;
    let mut worst_dom: f64 = 0.0;
    let mut worst_env: f64 = 0.0;

    let mut prev: Option<(f64, f64)> = None;
    for &r in samples {
        let fp = p.yosida_prime(y, r)?;
        if let Some((r0, fp0)) = prev {
            let dr = r - r0;
            if num::abs(dr) > 0.0 {
                let slope = (fp - fp0) / dr;
                worst_mono = worst_mono.max(-slope * num::abs(dr));
                worst_lip = worst_lip.max((num::abs(slope) - 1.0 / y.epsilon) * num::abs(dr));
            }
        }
        prev = Some((r, fp));

        if r >= p.r_minus && r <= p.r_plus {
            // The logarithmic minimal section is unbounded at the endpoints;
            // the comparison there is vacuous.
            if let Ok(sec) = p.minimal_section(r) {
                worst_dom = worst_dom.max(num::abs(fp) - num::abs(sec));
            }
        }

        let env = p.moreau_envelope(y, r)?;
        worst_env = worst_env.max(-env);
        let f1 = p.f1(r);
        if f1.is_finite() {
            worst_env = worst_env.max(env - f1);
        }
    }

    let at_zero = num::abs(p.yosida_prime(y, 0.0)?);

    Ok(PropertyReport {
        monotone: PropertyCheck::from_worst(worst_mono),
        lipschitz: PropertyCheck::from_worst(worst_lip),
        zero_at_zero: PropertyCheck::from_worst(at_zero),
        dominated: PropertyCheck::from_worst(worst_dom),
        envelope: PropertyCheck::from_worst(worst_env),
    })
}

/// Fits `(delta0, C0)` with `f1eps'(r)(r - m0) >= delta0 |f1eps'(r)| - C0`
/// at every sample.
///
/// `delta0` is half the distance from `m0` to the nearer domain endpoint,
/// capped at 1 on unbounded sides; `C0` is the worst sampled violation with a
/// small relative margin, so re-checking the inequality with the returned
/// pair never fails on the same samples.
pub fn zelik_constants(
    p: &SplitPotential,
    y: &YosidaParams,
    m0: f64,
    samples: &[f64],
) -> Result<(f64, f64)> {
    if !(m0 > p.r_minus() && m0 < p.r_plus()) {
        return Err(Error::Domain(format!(
            "m0 = {m0} must lie strictly inside the effective domain ({}, {})",
            p.r_minus(),
            p.r_plus()
        )));
    }
    let dist = (m0 - p.r_minus()).min(p.r_plus() - m0);
    let delta0 = (dist / 2.0).min(1.0);

    let mut worst: f64 = 0.0;
    for &r in samples {
        let fp = p.yosida_prime(y, r)?;
        worst = worst.max(delta0 * num::abs(fp) - fp * (r - m0));
    }
    let c0 = worst.max(0.0) * (1.0 + 1e-9);
    Ok((delta0, c0))
}
