//! Time integration of the relaxed system in the eigenbasis.
//!
//! Testing the equations with `e_k` turns the PDE into the modal system
//!
//! ```text
//!   alpha mu_k'' + phi_k' + lambda_k mu_k = 0,
//!   tau phi_k' + lambda_k phi_k + N_k(phi) = mu_k + g_k,
//! ```
//!
//! where `N_k` are the Galerkin coefficients of `f1eps'(phi) + f2'(phi)`.
//! With `nu = mu'` as an unknown of its own, one step of size `h` applies
//! the implicit midpoint rule to the linear skeleton and evaluates the
//! nonlinearity at a predictor (`phi^n`, then midpoint Picard passes):
//!
//! ```text
//!   alpha (nu' - nu)/h + (phi' - phi)/h + lambda_k (mu + mu')/2 = 0
//!   (mu' - mu)/h = (nu + nu')/2
//!   tau (phi' - phi)/h + lambda_k (phi + phi')/2 + N_k = (mu + mu')/2 + g_k
//! ```
//!
//! a 3x3 linear system per mode, solved in closed form. At `k = 1`
//! (`lambda_1 = 0`) the first equation reduces to an exact conservation
//! update of `alpha nu_1 + phi_1`, which is the discrete mean-value
//! invariant. With at least one Picard pass the scheme is second order;
//! with none the predictor costs one order.

use alloc::format;
use alloc::vec::Vec;

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::num;
use crate::potentials::{PotentialKind, SplitPotential, YosidaParams};
use crate::spectral::{FieldCoeffs, SpectralBasis};

/// One term of the forcing `g(x, t) = sum a cos(k pi x / L) (c0 + c1 t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingTerm {
    pub amplitude: f64,
    /// Cosine wavenumber `k >= 0`; `k = 0` is the spatially constant term.
    pub mode: usize,
    pub c0: f64,
    pub c1: f64,
}

/// Finite sum of separable cosine-in-space, linear-in-time forcing terms.
/// Linear time dependence keeps `g` in `H^1(0, T; L^2)` and makes both the
/// midpoint value and the `L^2(0, T; L^2)` norm exactly computable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ForcingSpec {
    pub terms: Vec<ForcingTerm>,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec { terms: Vec::new() }
    }

    pub fn new(terms: Vec<ForcingTerm>) -> Self {
        ForcingSpec { terms }
    }

    /// Basis coefficient carried by wavenumber `k` on `(0, L)`:
    /// `cos(k pi x / L) = s_k e_{k+1}` with `s_0 = sqrt(L)`, `s_k = sqrt(L/2)`.
    fn shape(length: f64, mode: usize) -> f64 {
        if mode == 0 {
            num::sqrt(length)
        } else {
            num::sqrt(length / 2.0)
        }
    }

    /// Modal coefficients of `g(., t)`; wavenumbers at or above `n` are
    /// outside the Galerkin space and are dropped by the projection.
    pub fn coeffs(&self, basis: &SpectralBasis, t: f64) -> FieldCoeffs {
        let mut c = FieldCoeffs::zeros(basis.modes());
        for term in &self.terms {
            let slot = term.mode;
            if slot < basis.modes() {
                c.values_mut()[slot] +=
                    term.amplitude * (term.c0 + term.c1 * t) * Self::shape(basis.length(), term.mode);
            }
        }
        c
    }

    /// Modal coefficients of `d_t g` (constant in time).
    pub fn time_derivative_coeffs(&self, basis: &SpectralBasis) -> FieldCoeffs {
        let mut c = FieldCoeffs::zeros(basis.modes());
        for term in &self.terms {
            let slot = term.mode;
            if slot < basis.modes() {
                c.values_mut()[slot] += term.amplitude * term.c1 * Self::shape(basis.length(), term.mode);
            }
        }
        c
    }

    /// Exact `L^2(0, T; L^2(0, L))` norm. Per mode the coefficient is linear
    /// in time, `A + B t`, and `int_0^T (A + B t)^2 = A^2 T + A B T^2 + B^2 T^3 / 3`.
    pub fn norm_l2h(&self, length: f64, t_end: f64) -> f64 {
        // group terms by wavenumber first: coefficients on a shared mode add
        let mut modes: Vec<(usize, f64, f64)> = Vec::new();
        for term in &self.terms {
            let s = Self::shape(length, term.mode);
            let a = term.amplitude * term.c0 * s;
            let b = term.amplitude * term.c1 * s;
            if let Some(entry) = modes.iter_mut().find(|(m, _, _)| *m == term.mode) {
                entry.1 += a;
                entry.2 += b;
            } else {
                modes.push((term.mode, a, b));
            }
        }
        let total: f64 = modes
            .iter()
            .map(|&(_, a, b)| {
                a * a * t_end + a * b * t_end * t_end + b * b * t_end * t_end * t_end / 3.0
            })
            .sum();
        num::sqrt(total.max(0.0))
    }

    /// Appends `scale` times another forcing spec.
    pub fn add_scaled(&self, other: &ForcingSpec, scale: f64) -> ForcingSpec {
        let mut terms = self.terms.clone();
        for t in &other.terms {
            terms.push(ForcingTerm {
                amplitude: t.amplitude * scale,
                ..*t
            });
        }
        ForcingSpec { terms }
    }
}

/// Initial datum for one field: a constant, explicit coefficients, or grid
/// samples to be projected.
#[derive(Debug, Clone, PartialEq)]
pub enum InitField {
    Constant(f64),
    Coeffs(Vec<f64>),
    Samples(Vec<f64>),
}

impl InitField {
    pub fn zero() -> Self {
        InitField::Constant(0.0)
    }

    fn coeffs(&self, basis: &SpectralBasis) -> Result<FieldCoeffs> {
        match self {
            InitField::Constant(c) => {
                let mut out = FieldCoeffs::zeros(basis.modes());
                out.values_mut()[0] = c * num::sqrt(basis.length());
                Ok(out)
            }
            InitField::Coeffs(values) => {
                Ok(FieldCoeffs::from_vec(values.clone()).resized(basis.modes()))
            }
            InitField::Samples(samples) => basis.project(samples),
        }
    }
}

/// Initial data `(mu0, nu0, phi0)`; the mean `m0` of `phi0` is derived, not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct InitSpec {
    pub mu0: InitField,
    pub nu0: InitField,
    pub phi0: InitField,
}

impl InitSpec {
    pub fn zero() -> Self {
        InitSpec {
            mu0: InitField::zero(),
            nu0: InitField::zero(),
            phi0: InitField::zero(),
        }
    }
}

/// Full problem description for a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Relaxation coefficient, in `(0, 1]` for the relaxed solver.
    pub alpha: f64,
    /// Viscosity coefficient, positive.
    pub tau: f64,
    pub yosida: YosidaParams,
    /// Interval length `L`.
    pub length: f64,
    /// Galerkin modes `n`.
    pub modes: usize,
    /// Collocation points `M` (`>= 2n`; `4n` is the default for the double
    /// obstacle, whose Yosida term has kinks worth extra quadrature).
    pub quad_points: usize,
    pub dt: f64,
    pub t_end: f64,
    pub potential: SplitPotential,
    pub forcing: ForcingSpec,
    pub init: InitSpec,
    /// Midpoint Picard passes for the nonlinearity. One pass keeps the
    /// scheme second order; zero drops it to first.
    pub picard_iters: u32,
}

impl SimConfig {
    /// The recommended collocation size for a potential.
    pub fn default_quad_points(modes: usize, kind: PotentialKind) -> usize {
        match kind {
            PotentialKind::DoubleObstacle => 4 * modes,
            _ => 2 * modes,
        }
    }

    /// Default step `min(1e-3, tau/10, sqrt(alpha)/10)`, resolving the
    /// `O(1/sqrt(alpha))` oscillation of the stiff modes.
    pub fn default_dt(alpha: f64, tau: f64) -> f64 {
        1e-3_f64.min(tau / 10.0).min(num::sqrt(alpha) / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must be in (0,1], got {}",
                self.alpha
            )));
        }
        if !(self.tau > 0.0) {
            return Err(Error::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > self.dt) {
            return Err(Error::Config(format!(
                "t_end must exceed dt, got t_end = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(())
    }

    pub fn build_basis(&self) -> Result<SpectralBasis> {
        SpectralBasis::build(self.length, self.modes, self.quad_points)
    }

    /// Number of steps; `dt` is nudged to `t_end / steps` so the trajectory
    /// lands exactly on `t_end` with uniform spacing.
    pub fn steps(&self) -> usize {
        (num::round(self.t_end / self.dt) as usize).max(1)
    }

    pub fn effective_dt(&self) -> f64 {
        self.t_end / self.steps() as f64
    }
}

/// Modal state at one time: `mu`, `nu = d_t mu` and `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct GalerkinState {
    pub t: f64,
    pub mu: FieldCoeffs,
    pub nu: FieldCoeffs,
    pub phi: FieldCoeffs,
}

/// A solved run: uniformly spaced states plus per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<GalerkinState>,
    pub records: Vec<DiagnosticsRecord>,
    pub dt: f64,
}

impl Trajectory {
    pub fn terminal(&self) -> &GalerkinState {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// Projects the initial data and enforces the admissibility constraints:
/// synthesized `phi0` inside the potential domain (strictly, for the
/// logarithmic potential) and mean `m0` strictly interior.
pub fn initial_state(cfg: &SimConfig, basis: &SpectralBasis) -> Result<GalerkinState> {
    let mu = cfg.init.mu0.coeffs(basis)?;
    let nu = cfg.init.nu0.coeffs(basis)?;
    let phi = cfg.init.phi0.coeffs(basis)?;

    let p = &cfg.potential;
    if p.kind() != PotentialKind::Regular {
        let v = basis.synth(&phi);
        for &val in &v {
            let inside = match p.kind() {
                PotentialKind::Logarithmic => val > -1.0 && val < 1.0,
                _ => (-1.0..=1.0).contains(&val),
            };
            if !inside {
                return Err(Error::Config(format!(
                    "init.phi0: value {val} outside the admissible range of the {:?} potential",
                    p.kind()
                )));
            }
        }
    }
    let m0 = phi.values()[0] / num::sqrt(basis.length());
    if !(m0 > p.r_minus() && m0 < p.r_plus()) {
        return Err(Error::Config(format!(
            "init.phi0: mean value {m0} must lie strictly inside the potential domain ({}, {})",
            p.r_minus(),
            p.r_plus()
        )));
    }

    Ok(GalerkinState { t: 0.0, mu, nu, phi })
}

/// One IMEX midpoint step of size `cfg.effective_dt()`.
pub fn step(state: &GalerkinState, cfg: &SimConfig, basis: &SpectralBasis) -> Result<GalerkinState> {
    let h = cfg.effective_dt();
    step_sized(state, cfg, basis, h)
}

fn step_sized(
    state: &GalerkinState,
    cfg: &SimConfig,
    basis: &SpectralBasis,
    h: f64,
) -> Result<GalerkinState> {
    let n = basis.modes();
    let lam = basis.lambda();
    let alpha = cfg.alpha;
    let tau = cfg.tau;
    let g_mid = cfg.forcing.coeffs(basis, state.t + 0.5 * h);

    let mut phi_star = state.phi.clone();
    let mut mu_next = FieldCoeffs::zeros(n);
    let mut nu_next = FieldCoeffs::zeros(n);
    let mut phi_next = FieldCoeffs::zeros(n);

    for _pass in 0..=cfg.picard_iters {
        let nl = basis.nonlinear_term(&phi_star, &cfg.potential, &cfg.yosida)?;
        for k in 0..n {
            let l = lam[k];
            let mu = state.mu.values()[k];
            let nu = state.nu.values()[k];
            let phi = state.phi.values()[k];
            let a1 = alpha + l * h * h / 4.0;
            let c2 = tau / h + l / 2.0;
            let r1 = phi + nu * (alpha - l * h * h / 4.0) - l * h * mu;
            let r2 = (tau / h - l / 2.0) * phi + mu + (h / 4.0) * nu + g_mid.values()[k]
                - nl.values()[k];
            let y = (c2 * r1 - r2) / (h / 4.0 + c2 * a1);
            let z = r1 - a1 * y;
            nu_next.values_mut()[k] = y;
            phi_next.values_mut()[k] = z;
            mu_next.values_mut()[k] = mu + (h / 2.0) * (nu + y);
        }
        phi_star = state.phi.add_scaled(&phi_next, 1.0).scaled(0.5);
    }

    Ok(GalerkinState {
        t: state.t + h,
        mu: mu_next,
        nu: nu_next,
        phi: phi_next,
    })
}

/// Integrates the full trajectory and attaches diagnostics. Deterministic:
/// identical configs produce bit-identical trajectories.
pub fn solve(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let basis = cfg.build_basis()?;
    let steps = cfg.steps();
    let h = cfg.effective_dt();

    let mut states = Vec::with_capacity(steps + 1);
    states.push(initial_state(cfg, &basis)?);
    for i in 0..steps {
        let mut next = step_sized(states.last().unwrap(), cfg, &basis, h)?;
        // keep node times exact multiples of h
        next.t = (i + 1) as f64 * h;
        states.push(next);
    }

    let records = diagnostics::compute_records(&states, cfg, &basis)?;
    Ok(Trajectory { states, records, dt: h })
}

/// Observed temporal order from runs at `dt`, `dt/2`, `dt/4`:
/// `log2` of the ratio of successive terminal-state differences.
/// Returns NaN when the differences vanish (e.g. identically zero data).
pub fn estimate_temporal_order(cfg: &SimConfig) -> Result<f64> {
    cfg.validate()?;
    if cfg.t_end / cfg.dt < 8.0 {
        return Err(Error::Config(format!(
            "order estimation needs T/dt >= 8, got {}",
            cfg.t_end / cfg.dt
        )));
    }
    let mut terminals = Vec::new();
    for k in 0..3 {
        let mut c = cfg.clone();
        c.dt = cfg.dt / (1u32 << k) as f64;
        terminals.push(solve(&c)?.states.pop().unwrap());
    }
    let dist = |a: &GalerkinState, b: &GalerkinState| -> f64 {
        let dm = a.mu.sub(&b.mu).norm_h();
        let dn = a.nu.sub(&b.nu).norm_h();
        let dp = a.phi.sub(&b.phi).norm_h();
        num::sqrt(dm * dm + dn * dn + dp * dp)
    };
    let d1 = dist(&terminals[0], &terminals[1]);
    let d2 = dist(&terminals[1], &terminals[2]);
    if d1 == 0.0 || d2 == 0.0 {
        return Ok(f64::NAN);
    }
    Ok(num::log2(d1 / d2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base_cfg() -> SimConfig {
        SimConfig {
            alpha: 1.0,
            tau: 1.0,
            yosida: YosidaParams::new(0.05).unwrap(),
            length: 1.0,
            modes: 8,
            quad_points: 16,
            dt: 1e-2,
            t_end: 0.1,
            potential: SplitPotential::regular(),
            forcing: ForcingSpec::zero(),
            init: InitSpec::zero(),
            picard_iters: 1,
        }
    }

    #[test]
    fn zero_data_is_a_fixed_point() {
        let cfg = base_cfg();
        let traj = solve(&cfg).unwrap();
        assert_eq!(traj.states.len(), 11);
        for st in &traj.states {
            assert_eq!(st.mu.norm_h(), 0.0);
            assert_eq!(st.nu.norm_h(), 0.0);
            assert_eq!(st.phi.norm_h(), 0.0);
        }
    }

    #[test]
    fn initial_state_projects_data() {
        let mut cfg = base_cfg();
        cfg.init.phi0 = InitField::Constant(0.1);
        let basis = cfg.build_basis().unwrap();
        let st = initial_state(&cfg, &basis).unwrap();
        assert_relative_eq!(st.phi.values()[0], 0.1, epsilon = 1e-15);
        for k in 1..8 {
            assert_eq!(st.phi.values()[k], 0.0);
        }

        // a sampled eigenfunction projects onto its own slot
        let mut e2 = FieldCoeffs::zeros(8);
        e2.values_mut()[1] = 1.0;
        cfg.init.phi0 = InitField::Samples(basis.synth(&e2));
        let st = initial_state(&cfg, &basis).unwrap();
        assert_relative_eq!(st.phi.values()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn inadmissible_phi0_rejected() {
        let mut cfg = base_cfg();
        cfg.potential = SplitPotential::logarithmic(2.0).unwrap();
        cfg.init.phi0 = InitField::Constant(1.5);
        let basis = cfg.build_basis().unwrap();
        assert!(matches!(initial_state(&cfg, &basis), Err(Error::Config(_))));
    }

    #[test]
    fn mode_one_invariant_is_exact_per_step() {
        let mut cfg = base_cfg();
        cfg.init.phi0 = InitField::Constant(0.2);
        cfg.init.nu0 = InitField::Constant(0.3);
        cfg.forcing = ForcingSpec::new(alloc::vec![ForcingTerm {
            amplitude: 0.4,
            mode: 1,
            c0: 1.0,
            c1: 0.5,
        }]);
        let traj = solve(&cfg).unwrap();
        let inv = |st: &GalerkinState| cfg.alpha * st.nu.values()[0] + st.phi.values()[0];
        let i0 = inv(&traj.states[0]);
        for st in &traj.states {
            assert!(crate::num::abs(inv(st) - i0) <= 1e-13 * (1.0 + crate::num::abs(i0)));
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = base_cfg();
        cfg.alpha = 0.0;
        assert!(cfg.validate().is_err());
        cfg.alpha = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = base_cfg();
        cfg.dt = cfg.t_end;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn order_estimate_nan_for_zero_data() {
        let mut cfg = base_cfg();
        cfg.dt = 1e-2;
        cfg.t_end = 0.1;
        let order = estimate_temporal_order(&cfg).unwrap();
        assert!(order.is_nan());
    }

    #[test]
    fn forcing_l2h_norm_matches_quadrature() {
        let f = ForcingSpec::new(alloc::vec![
            ForcingTerm { amplitude: 0.5, mode: 1, c0: 1.0, c1: 0.0 },
            ForcingTerm { amplitude: 0.3, mode: 1, c0: 0.0, c1: 1.0 },
            ForcingTerm { amplitude: 0.2, mode: 0, c0: 2.0, c1: -1.0 },
        ]);
        let basis = SpectralBasis::build(1.0, 8, 16).unwrap();
        let t_end = 0.7;
        // fine trapezoid oracle in time of the modal coefficients
        let steps = 20000;
        let mut acc = 0.0;
        for i in 0..=steps {
            let t = t_end * i as f64 / steps as f64;
            let c = f.coeffs(&basis, t);
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            acc += w * c.norm_h() * c.norm_h();
        }
        acc *= t_end / steps as f64;
        assert_relative_eq!(f.norm_l2h(1.0, t_end), crate::num::sqrt(acc), epsilon = 1e-8);
    }
}
