//! Functionals and identity residuals evaluated along trajectories.
//!
//! The central identity comes from testing the wave equation by `d_t mu`
//! and the time derivative of the phase equation by `d_t phi`:
//!
//! ```text
//!   E(t) + int_0^t [ |grad d_t phi|^2 + int f1eps''(phi) |d_t phi|^2 ]
//!     = E(0) - int_0^t int f2''(phi) |d_t phi|^2 + int_0^t (d_t g, d_t phi),
//!   E = alpha/2 |d_t mu|^2 + 1/2 |grad mu|^2 + tau/2 |d_t phi|^2.
//! ```
//!
//! Time derivatives at nodes use centered quotients (second-order one-sided
//! at the ends); the `f''`-weighted integrals use the exact chain-rule
//! surrogate `(f'(phi^{n+1}) - f'(phi^n)) (phi^{n+1} - phi^n) / h` per step,
//! which avoids differentiating the resolvent. Everything is second-order
//! consistent with the midpoint scheme, so the residual shrinks like `dt^2`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::galerkin::{GalerkinState, SimConfig, Trajectory};
use crate::num;
use crate::potentials::PotentialKind;
use crate::spectral::{FieldCoeffs, SpectralBasis};
use crate::vch::VchTrajectory;

/// Per-node diagnostics attached to every solved trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    /// `|alpha mean(nu) + mean(phi) - (alpha mean(nu0) + m0)|`.
    pub mass_residual: f64,
    /// `alpha/2 |nu|^2 + 1/2 |grad mu|^2 + tau/2 |d_t phi|^2`.
    pub energy: f64,
    /// Running `int |grad d_t phi|^2 + int int f1eps''(phi) |d_t phi|^2`.
    pub cumulative_dissipation: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    /// Grid sup-norm of the Yosida term `f1eps'(phi)`, the proxy for `xi`.
    pub xi_proxy_supnorm: f64,
    pub grad_mu_norm: f64,
    pub laplacian_mu_norm: f64,
}

impl DiagnosticsRecord {
    pub const CSV_COLUMNS: [&'static str; 9] = [
        "t",
        "mass_residual",
        "energy",
        "cumulative_dissipation",
        "phi_min",
        "phi_max",
        "xi_proxy_supnorm",
        "grad_mu_norm",
        "laplacian_mu_norm",
    ];

    pub fn csv_values(&self) -> [f64; 9] {
        [
            self.t,
            self.mass_residual,
            self.energy,
            self.cumulative_dissipation,
            self.phi_min,
            self.phi_max,
            self.xi_proxy_supnorm,
            self.grad_mu_norm,
            self.laplacian_mu_norm,
        ]
    }
}

/// Nodal time-derivative of a coefficient series: centered quotients inside,
/// three-point one-sided at the ends (both second order). With fewer than
/// three nodes, falls back to the plain step quotient.
fn nodal_quotients(series: &[&FieldCoeffs], h: f64) -> Vec<FieldCoeffs> {
    let n = series.len();
    let dim = if n > 0 { series[0].len() } else { 0 };
    if n < 2 {
        return vec![FieldCoeffs::zeros(dim); n];
    }
    if n == 2 {
        let d = series[1].sub(series[0]).scaled(1.0 / h);
        return vec![d.clone(), d];
    }
    let mut out = Vec::with_capacity(n);
    let comb3 = |a: &FieldCoeffs, b: &FieldCoeffs, c: &FieldCoeffs, sa: f64, sb: f64, sc: f64| {
        let mut v = vec![0.0; dim];
        for k in 0..dim {
            v[k] = (sa * a.values()[k] + sb * b.values()[k] + sc * c.values()[k]) / (2.0 * h);
        }
        FieldCoeffs::from_vec(v)
    };
    out.push(comb3(series[0], series[1], series[2], -3.0, 4.0, -1.0));
    for i in 1..n - 1 {
        out.push(series[i + 1].sub(series[i - 1]).scaled(1.0 / (2.0 * h)));
    }
    out.push(comb3(series[n - 1], series[n - 2], series[n - 3], 3.0, -4.0, 1.0));
    out
}

/// Step increments of the two `f''`-weighted space-time integrals via the
/// chain-rule surrogate: returns
/// `( quad(d(f1eps' o phi) d(phi)) / h , quad(d(f2' o phi) d(phi)) / h )`.
fn chain_rule_increments(
    v0: &[f64],
    v1: &[f64],
    cfg: &SimConfig,
    basis: &SpectralBasis,
    h: f64,
) -> Result<(f64, f64)> {
    let p = &cfg.potential;
    let y = &cfg.yosida;
    let mut acc1 = 0.0;
    let mut acc2 = 0.0;
    for (&a, &b) in v0.iter().zip(v1) {
        let dv = b - a;
        acc1 += (p.yosida_prime(y, b)? - p.yosida_prime(y, a)?) * dv;
        acc2 += (p.f2_prime(b) - p.f2_prime(a)) * dv;
    }
    let w = basis.length() / basis.points() as f64;
    Ok((acc1 * w / h, acc2 * w / h))
}

/// Builds the per-node records for a solved trajectory.
pub fn compute_records(
    states: &[GalerkinState],
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<Vec<DiagnosticsRecord>> {
    let lam = basis.lambda();
    let sqrt_l = num::sqrt(basis.length());
    let h = cfg.effective_dt();

    let phis: Vec<&FieldCoeffs> = states.iter().map(|s| &s.phi).collect();
    let dphi = nodal_quotients(&phis, h);

    let inv0 = cfg.alpha * states[0].nu.values()[0] / sqrt_l + states[0].phi.values()[0] / sqrt_l;

    let mut records = Vec::with_capacity(states.len());
    let mut dissip = 0.0;
    let mut prev_grid: Option<Vec<f64>> = None;
    for (i, st) in states.iter().enumerate() {
        let grid = basis.synth(&st.phi);
        if let Some(ref v0) = prev_grid {
            let (d1, _) = chain_rule_increments(v0, &grid, cfg, basis, h)?;
            let step_quot = states[i].phi.sub(&states[i - 1].phi).scaled(1.0 / h);
            dissip += h * step_quot.norm_grad(lam) * step_quot.norm_grad(lam) + d1;
        }

        let mut phi_min = f64::INFINITY;
        let mut phi_max = f64::NEG_INFINITY;
        let mut xi_sup = 0.0_f64;
        for &v in &grid {
            phi_min = phi_min.min(v);
            phi_max = phi_max.max(v);
            xi_sup = xi_sup.max(num::abs(cfg.potential.yosida_prime(&cfg.yosida, v)?));
        }

        let inv = cfg.alpha * st.nu.values()[0] / sqrt_l + st.phi.values()[0] / sqrt_l;
        let energy = 0.5 * cfg.alpha * st.nu.norm_h() * st.nu.norm_h()
            + 0.5 * st.mu.norm_grad(lam) * st.mu.norm_grad(lam)
            + 0.5 * cfg.tau * dphi[i].norm_h() * dphi[i].norm_h();

        records.push(DiagnosticsRecord {
            t: st.t,
            mass_residual: num::abs(inv - inv0),
            energy,
            cumulative_dissipation: dissip,
            phi_min,
            phi_max,
            xi_proxy_supnorm: xi_sup,
            grad_mu_norm: st.mu.norm_grad(lam),
            laplacian_mu_norm: st.mu.norm_laplacian(lam),
        });
        prev_grid = Some(grid);
    }
    Ok(records)
}

/// Maximum over time of the mean-value invariant defect
/// `|alpha mean(nu)(t) + mean(phi)(t) - (alpha mean(nu0) + m0)|`.
/// The scheme conserves this identically at mode 1, so anything beyond
/// rounding indicates a fault.
pub fn mass_invariant_residual(traj: &Trajectory, cfg: &SimConfig) -> f64 {
    let sqrt_l = num::sqrt(cfg.length);
    let mean = |st: &GalerkinState| {
        cfg.alpha * st.nu.values()[0] / sqrt_l + st.phi.values()[0] / sqrt_l
    };
    let i0 = mean(&traj.states[0]);
    traj.states
        .iter()
        .map(|st| num::abs(mean(st) - i0))
        .fold(0.0, f64::max)
}

/// Maximum over time of `|E(t) + D(0,t) - E(0) - R(0,t)|` for the energy
/// identity above. Scales like `O(dt^2) T (problem scale)` in smooth regimes.
pub fn energy_balance_residual(
    traj: &Trajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<f64> {
    if traj.states.len() < 3 {
        return Err(Error::Config(
            "energy balance needs at least three states for the difference quotients".into(),
        ));
    }
    let lam = basis.lambda();
    let h = traj.dt;
    let states = &traj.states;

    let phis: Vec<&FieldCoeffs> = states.iter().map(|s| &s.phi).collect();
    let dphi = nodal_quotients(&phis, h);
    let energy = |i: usize| -> f64 {
        let st = &states[i];
        0.5 * cfg.alpha * st.nu.norm_h() * st.nu.norm_h()
            + 0.5 * st.mu.norm_grad(lam) * st.mu.norm_grad(lam)
            + 0.5 * cfg.tau * dphi[i].norm_h() * dphi[i].norm_h()
    };

    let dg = cfg.forcing.time_derivative_coeffs(basis);
    let e0 = energy(0);
    let mut worst = 0.0_f64;
    let mut d_acc = 0.0;
    let mut r_acc = 0.0;
    let mut prev_grid = basis.synth(&states[0].phi);
    for i in 1..states.len() {
        let grid = basis.synth(&states[i].phi);
        let (d1, d2) = chain_rule_increments(&prev_grid, &grid, cfg, basis, h)?;
        let step_quot = states[i].phi.sub(&states[i - 1].phi).scaled(1.0 / h);
        d_acc += h * step_quot.norm_grad(lam) * step_quot.norm_grad(lam) + d1;
        let dphi_step = states[i].phi.sub(&states[i - 1].phi);
        let forcing_work: f64 = dg
            .values()
            .iter()
            .zip(dphi_step.values())
            .map(|(a, b)| a * b)
            .sum();
        r_acc += -d2 + forcing_work;
        worst = worst.max(num::abs(energy(i) + d_acc - e0 - r_acc));
        prev_grid = grid;
    }
    Ok(worst)
}

/// Separation-property report: trajectory extrema of `phi` and the sup bound
/// `sup |f1'(phi)| <= |f1'(phi0)|_inf + |h|_inf` with `h = mu + g - f2'(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    /// Smallest grid value of `phi` over the whole trajectory.
    pub r_star: f64,
    /// Largest grid value.
    pub r_star_upper: f64,
    /// `sup |f1'(phi)|` over the trajectory grid; infinite if the trajectory
    /// leaves the open domain.
    pub sup_f1_prime: f64,
    /// `|f1'(phi0)|_inf + |h|_inf`.
    pub bound_rhs: f64,
    /// Slack admitted on top of the bound (10% plus a dt-order term).
    pub slack: f64,
    pub pass: bool,
}

/// Checks the separation property along a trajectory. Only meaningful for
/// potentials whose `f1` is smooth on an open domain.
pub fn separation_report(
    traj: &Trajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<SeparationReport> {
    let p = &cfg.potential;
    if p.kind() == PotentialKind::DoubleObstacle {
        return Err(Error::Domain(
            "separation bound needs f1 smooth on an open interval; the double obstacle is excluded"
                .into(),
        ));
    }

    let mut r_star = f64::INFINITY;
    let mut r_upper = f64::NEG_INFINITY;
    let mut sup_f1p = 0.0_f64;
    let mut sup_h = 0.0_f64;
    let mut inside = true;
    for st in &traj.states {
        let phi_grid = basis.synth(&st.phi);
        let mu_grid = basis.synth(&st.mu);
        let g_grid = basis.synth(&cfg.forcing.coeffs(basis, st.t));
        for ((&v, &m), &g) in phi_grid.iter().zip(&mu_grid).zip(&g_grid) {
            r_star = r_star.min(v);
            r_upper = r_upper.max(v);
            let h = m + g - p.f2_prime(v);
            sup_h = sup_h.max(num::abs(h));
            if v > p.r_minus() && v < p.r_plus() {
                sup_f1p = sup_f1p.max(num::abs(p.f1_prime(v)?));
            } else {
                inside = false;
            }
        }
    }

    let phi0_grid = basis.synth(&traj.states[0].phi);
    let mut f1p0 = 0.0_f64;
    for &v in &phi0_grid {
        f1p0 = f1p0.max(num::abs(p.f1_prime(v)?));
    }

    let bound_rhs = f1p0 + sup_h;
    let slack = 0.1 * bound_rhs + traj.dt * (1.0 + bound_rhs);
    if !inside {
        sup_f1p = f64::INFINITY;
    }
    let pass = inside && sup_f1p <= bound_rhs + slack;
    Ok(SeparationReport {
        r_star,
        r_star_upper: r_upper,
        sup_f1_prime: sup_f1p,
        bound_rhs,
        slack,
        pass,
    })
}

/// The norm bundle of the continuous-dependence estimates. The first four
/// entries are the weak bundle (with `sqrt(alpha)`-weighted `mu` distance);
/// the rest are the strong-norm variants.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormBundle {
    /// `sqrt(alpha) |mu_1 - mu_2|_{Linf(H)}`.
    pub sqrt_alpha_mu_linf_h: f64,
    /// `|grad(1 * (mu_1 - mu_2))|_{Linf(H)}` (time integral by trapezoid).
    pub grad_anti_mu_linf_h: f64,
    /// `|phi_1 - phi_2|_{Linf(H)}`.
    pub phi_linf_h: f64,
    /// `|phi_1 - phi_2|_{L2(V)}`.
    pub phi_l2_v: f64,
    /// `|mu_1 - mu_2|_{W1inf(H)}` (sup of value and quotient norms).
    pub mu_w1inf_h: f64,
    /// `|mu_1 - mu_2|_{Linf(V)}`.
    pub mu_linf_v: f64,
    /// `|phi_1 - phi_2|_{H1(H)}`.
    pub phi_h1_h: f64,
    /// `|phi_1 - phi_2|_{Linf(V)}`.
    pub phi_linf_v: f64,
    /// `|phi_1 - phi_2|_{L2(W)}`.
    pub phi_l2_w: f64,
}

impl NormBundle {
    /// Left-hand side of the weak continuous-dependence estimate.
    pub fn weak_lhs(&self) -> f64 {
        self.sqrt_alpha_mu_linf_h + self.grad_anti_mu_linf_h + self.phi_linf_h + self.phi_l2_v
    }

    /// Left-hand side of the strong (separated-regime) estimate.
    pub fn strong_lhs(&self) -> f64 {
        self.mu_w1inf_h + self.mu_linf_v + self.phi_h1_h + self.phi_linf_v + self.phi_l2_w
    }

    /// Combined `Linf(H) + L2(V)` distance of the phase fields.
    pub fn phi_combined(&self) -> f64 {
        self.phi_linf_h + self.phi_l2_v
    }
}

fn norms_from_series(
    mu_a: &[&FieldCoeffs],
    phi_a: &[&FieldCoeffs],
    mu_b: &[&FieldCoeffs],
    phi_b: &[&FieldCoeffs],
    lam: &[f64],
    dt: f64,
    alpha: f64,
) -> Result<NormBundle> {
    let n = mu_a.len();
    if mu_b.len() != n || phi_a.len() != n || phi_b.len() != n {
        return Err(Error::Shape {
            expected: n,
            got: mu_b.len().min(phi_a.len()).min(phi_b.len()),
        });
    }
    if n == 0 {
        return Ok(NormBundle::default());
    }
    let dim = mu_a[0].len();
    if mu_b[0].len() != dim || phi_a[0].len() != dim || phi_b[0].len() != dim {
        return Err(Error::Shape {
            expected: dim,
            got: mu_b[0].len(),
        });
    }

    let dmu: Vec<FieldCoeffs> = mu_a.iter().zip(mu_b).map(|(a, b)| a.sub(b)).collect();
    let dphi: Vec<FieldCoeffs> = phi_a.iter().zip(phi_b).map(|(a, b)| a.sub(b)).collect();

    let mut bundle = NormBundle::default();

    let mut anti = FieldCoeffs::zeros(dim);
    let mut mu_linf_h = 0.0_f64;
    for i in 0..n {
        mu_linf_h = mu_linf_h.max(dmu[i].norm_h());
        bundle.phi_linf_h = bundle.phi_linf_h.max(dphi[i].norm_h());
        bundle.mu_linf_v = bundle.mu_linf_v.max(dmu[i].norm_v(lam));
        bundle.phi_linf_v = bundle.phi_linf_v.max(dphi[i].norm_v(lam));
        if i > 0 {
            anti = anti.add_scaled(&dmu[i - 1].add_scaled(&dmu[i], 1.0), 0.5 * dt);
            bundle.grad_anti_mu_linf_h = bundle.grad_anti_mu_linf_h.max(anti.norm_grad(lam));
        }
    }
    bundle.sqrt_alpha_mu_linf_h = num::sqrt(alpha) * mu_linf_h;

    // time-L2 norms by trapezoid
    let trapz_sq = |f: &dyn Fn(usize) -> f64| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let v = f(i);
            acc += w * v * v;
        }
        num::sqrt(acc * dt)
    };
    bundle.phi_l2_v = trapz_sq(&|i| dphi[i].norm_v(lam));
    bundle.phi_l2_w = trapz_sq(&|i| dphi[i].norm_w(lam));

    let dmu_refs: Vec<&FieldCoeffs> = dmu.iter().collect();
    let dphi_refs: Vec<&FieldCoeffs> = dphi.iter().collect();
    let dmu_dt = nodal_quotients(&dmu_refs, dt);
    let dphi_dt = nodal_quotients(&dphi_refs, dt);
    let mut mu_dt_sup = 0.0_f64;
    for q in &dmu_dt {
        mu_dt_sup = mu_dt_sup.max(q.norm_h());
    }
    bundle.mu_w1inf_h = mu_linf_h + mu_dt_sup;
    let phi_l2_h = trapz_sq(&|i| dphi[i].norm_h());
    let dphi_l2_h = trapz_sq(&|i| dphi_dt[i].norm_h());
    bundle.phi_h1_h = phi_l2_h + dphi_l2_h;

    Ok(bundle)
}

/// Norm bundle between two relaxed trajectories on the same basis/time grid.
pub fn trajectory_norms(
    a: &Trajectory,
    b: &Trajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<NormBundle> {
    if a.states.len() != b.states.len() {
        return Err(Error::Shape {
            expected: a.states.len(),
            got: b.states.len(),
        });
    }
    let mu_a: Vec<&FieldCoeffs> = a.states.iter().map(|s| &s.mu).collect();
    let phi_a: Vec<&FieldCoeffs> = a.states.iter().map(|s| &s.phi).collect();
    let mu_b: Vec<&FieldCoeffs> = b.states.iter().map(|s| &s.mu).collect();
    let phi_b: Vec<&FieldCoeffs> = b.states.iter().map(|s| &s.phi).collect();
    norms_from_series(&mu_a, &phi_a, &mu_b, &phi_b, basis.lambda(), a.dt, cfg.alpha)
}

/// Norm bundle between a relaxed trajectory and a limit-system trajectory.
pub fn norms_vs_limit(
    a: &Trajectory,
    b: &VchTrajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<NormBundle> {
    if a.states.len() != b.states.len() {
        return Err(Error::Shape {
            expected: a.states.len(),
            got: b.states.len(),
        });
    }
    let mu_a: Vec<&FieldCoeffs> = a.states.iter().map(|s| &s.mu).collect();
    let phi_a: Vec<&FieldCoeffs> = a.states.iter().map(|s| &s.phi).collect();
    let mu_b: Vec<&FieldCoeffs> = b.states.iter().map(|s| &s.mu).collect();
    let phi_b: Vec<&FieldCoeffs> = b.states.iter().map(|s| &s.phi).collect();
    norms_from_series(&mu_a, &phi_a, &mu_b, &phi_b, basis.lambda(), a.dt, cfg.alpha)
}

/// Per-node diagnostics of a limit-system trajectory, built around the
/// dissipative energy `E = 1/2 |grad phi|^2 + int (f1eps + f2)(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VchRecord {
    pub t: f64,
    /// Mean of `phi` (conserved identically).
    pub phi_mean: f64,
    pub energy: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub grad_mu_norm: f64,
}

impl VchRecord {
    pub const CSV_COLUMNS: [&'static str; 6] =
        ["t", "phi_mean", "energy", "phi_min", "phi_max", "grad_mu_norm"];

    pub fn csv_values(&self) -> [f64; 6] {
        [
            self.t,
            self.phi_mean,
            self.energy,
            self.phi_min,
            self.phi_max,
            self.grad_mu_norm,
        ]
    }
}

fn vch_energy(
    phi: &FieldCoeffs,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<f64> {
    let lam = basis.lambda();
    let grid = basis.synth(phi);
    let mut pot = 0.0;
    for &v in &grid {
        pot += cfg.potential.moreau_envelope(&cfg.yosida, v)? + cfg.potential.f2(v);
    }
    pot *= basis.length() / basis.points() as f64;
    Ok(0.5 * phi.norm_grad(lam) * phi.norm_grad(lam) + pot)
}

/// Records for a limit-system trajectory.
pub fn compute_vch_records(
    traj: &VchTrajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<Vec<VchRecord>> {
    let lam = basis.lambda();
    let sqrt_l = num::sqrt(basis.length());
    let mut out = Vec::with_capacity(traj.states.len());
    for st in &traj.states {
        let grid = basis.synth(&st.phi);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &grid {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        out.push(VchRecord {
            t: st.t,
            phi_mean: st.phi.values()[0] / sqrt_l,
            energy: vch_energy(&st.phi, cfg, basis)?,
            phi_min: lo,
            phi_max: hi,
            grad_mu_norm: st.mu.norm_grad(lam),
        });
    }
    Ok(out)
}

/// Worst per-step defect of the discrete energy-dissipation inequality of
/// the limit system,
///
/// ```text
///   max_n [ E^{n+1} - E^n + h (|grad mu_mid|^2 + tau |dphi/h|^2) - (G, dphi) ],
/// ```
///
/// with `mu_mid` the per-step quotient reconstruction. Nonpositive up to an
/// `O(dt^2)`-sized tolerance per step.
pub fn vch_dissipation_residual(
    traj: &VchTrajectory,
    cfg: &SimConfig,
    basis: &SpectralBasis,
) -> Result<f64> {
    let lam = basis.lambda();
    let h = traj.dt;
    let mut worst = f64::NEG_INFINITY;
    let mut e_prev = vch_energy(&traj.states[0].phi, cfg, basis)?;
    for i in 1..traj.states.len() {
        let e_next = vch_energy(&traj.states[i].phi, cfg, basis)?;
        let dphi = traj.states[i].phi.sub(&traj.states[i - 1].phi);
        let mut grad_mu_mid_sq = 0.0;
        for k in 1..dphi.len() {
            let m = -dphi.values()[k] / (h * lam[k]);
            grad_mu_mid_sq += lam[k] * m * m;
        }
        let quot = dphi.scaled(1.0 / h);
        let t_mid = traj.states[i - 1].t + 0.5 * h;
        let g_mid = cfg.forcing.coeffs(basis, t_mid);
        let work: f64 = g_mid
            .values()
            .iter()
            .zip(dphi.values())
            .map(|(a, b)| a * b)
            .sum();
        let defect =
            e_next - e_prev + h * (grad_mu_mid_sq + cfg.tau * quot.norm_h() * quot.norm_h()) - work;
        worst = worst.max(defect);
        e_prev = e_next;
    }
    Ok(worst)
}

/// Smallest distance from the trajectory's grid extrema to the interval
/// endpoints, `min(r_star - r_minus, r_plus - r_star_upper)`.
pub fn separation_margin(report: &SeparationReport, r_minus: f64, r_plus: f64) -> f64 {
    (report.r_star - r_minus).min(r_plus - report.r_star_upper)
}

/// Human-readable one-line summary used by the CLI for separation output.
pub fn describe_separation(report: &SeparationReport) -> String {
    format!(
        "phi in [{:.6}, {:.6}], sup|f1'| = {:.6} vs bound {:.6} (+ slack {:.6}) => {}",
        report.r_star,
        report.r_star_upper,
        report.sup_f1_prime,
        report.bound_rhs,
        report.slack,
        if report.pass { "pass" } else { "FAIL" }
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::{solve, ForcingSpec, ForcingTerm, InitField, InitSpec};
    use crate::potentials::{SplitPotential, YosidaParams};
    use approx::assert_relative_eq;

    fn cfg() -> SimConfig {
        SimConfig {
            alpha: 0.5,
            tau: 1.0,
            yosida: YosidaParams::new(0.05).unwrap(),
            length: 1.0,
            modes: 16,
            quad_points: 32,
            dt: 1e-3,
            t_end: 0.1,
            potential: SplitPotential::regular(),
            forcing: ForcingSpec::zero(),
            init: InitSpec {
                mu0: InitField::zero(),
                nu0: InitField::zero(),
                phi0: InitField::Coeffs(alloc::vec![0.2, 0.05]),
            },
            picard_iters: 1,
        }
    }

    #[test]
    fn mass_residual_zero_traj_and_fault_injection() {
        let c = cfg();
        let mut traj = solve(&c).unwrap();
        assert!(mass_invariant_residual(&traj, &c) <= 1e-13);

        // corrupt one state: the detector sees exactly the injected defect
        let k = traj.states.len() / 2;
        traj.states[k].phi.values_mut()[0] += 1e-3;
        let got = mass_invariant_residual(&traj, &c);
        assert_relative_eq!(got, 1e-3, max_relative = 1e-6);
    }

    #[test]
    fn zero_trajectory_all_quiet() {
        let mut c = cfg();
        c.init = InitSpec::zero();
        let traj = solve(&c).unwrap();
        assert_eq!(mass_invariant_residual(&traj, &c), 0.0);
        let basis = c.build_basis().unwrap();
        assert_eq!(energy_balance_residual(&traj, &c, &basis).unwrap(), 0.0);
        for r in &traj.records {
            assert_eq!(r.energy, 0.0);
            assert_eq!(r.cumulative_dissipation, 0.0);
        }
    }

    #[test]
    fn norm_bundle_identical_and_shifted() {
        let c = cfg();
        let traj = solve(&c).unwrap();
        let basis = c.build_basis().unwrap();
        let nb = trajectory_norms(&traj, &traj, &c, &basis).unwrap();
        assert_eq!(nb.weak_lhs(), 0.0);
        assert_eq!(nb.strong_lhs(), 0.0);

        // shifting phi by a constant c moves |phi|_{Linf(H)} by exactly |c| sqrt(L)
        let mut shifted = traj.clone();
        let shift = 0.3;
        for st in &mut shifted.states {
            st.phi.values_mut()[0] += shift * num::sqrt(c.length);
        }
        let nb = trajectory_norms(&traj, &shifted, &c, &basis).unwrap();
        assert_relative_eq!(nb.phi_linf_h, shift * num::sqrt(c.length), epsilon = 1e-12);
    }

    #[test]
    fn grad_norm_identity_vs_finite_differences() {
        // |grad v|^2 = sum lambda_j c_j^2, cross-checked against second
        // differences of the synthesized field on a refined grid
        let basis = SpectralBasis::build(1.0, 6, 256).unwrap();
        let c = FieldCoeffs::from_vec(alloc::vec![0.1, 0.4, -0.2, 0.05, 0.0, 0.3]);
        let spectral = c.norm_grad(basis.lambda());

        let v = basis.synth(&c);
        let m = v.len();
        let hgrid = 1.0 / m as f64;
        // midpoint-grid derivative quadrature: centered differences
        let mut acc = 0.0;
        for i in 0..m - 1 {
            let d = (v[i + 1] - v[i]) / hgrid;
            acc += d * d * hgrid;
        }
        let fd = num::sqrt(acc);
        assert_relative_eq!(spectral, fd, max_relative = 2e-3);
    }

    #[test]
    fn separation_rejects_double_obstacle() {
        let mut c = cfg();
        c.potential = SplitPotential::double_obstacle(1.0).unwrap();
        c.quad_points = 64;
        let traj = solve(&c).unwrap();
        let basis = c.build_basis().unwrap();
        assert!(matches!(
            separation_report(&traj, &c, &basis),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn separation_constant_stationary_state() {
        // stationary constant: sup f1'(phi) equals its initial value
        let mut c = cfg();
        c.init.phi0 = InitField::Constant(0.3);
        c.forcing = ForcingSpec::zero();
        // make it truly stationary: constant states of the relaxed system
        // need mu = f'(phi0) balanced; instead just check the bound holds
        let traj = solve(&c).unwrap();
        let basis = c.build_basis().unwrap();
        let rep = separation_report(&traj, &c, &basis).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.r_star <= rep.r_star_upper);
    }

    #[test]
    fn energy_balance_richardson_ratio() {
        let mut c = cfg();
        c.t_end = 0.2;
        c.forcing = ForcingSpec::new(alloc::vec![ForcingTerm {
            amplitude: 0.1,
            mode: 1,
            c0: 1.0,
            c1: 0.5,
        }]);
        let basis = c.build_basis().unwrap();
        let r1 = energy_balance_residual(&solve(&c).unwrap(), &c, &basis).unwrap();
        let mut c2 = c.clone();
        c2.dt = c.dt / 2.0;
        let r2 = energy_balance_residual(&solve(&c2).unwrap(), &c2, &basis).unwrap();
        let ratio = r1 / r2;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "residuals {r1:e}, {r2:e}, ratio {ratio}"
        );
    }
}
