//! Multi-run studies: the `alpha -> 0` rate sweep against the limit system,
//! continuous-dependence sweeps in the weak and strong norm bundles, the
//! `eps -> 0` Cauchy check of the Yosida regularization, and Galerkin mode
//! refinement.
//!
//! Runs inside a sweep are independent; the [`Runner`] trait lets a host
//! execute them in parallel (result assembly is order-preserving, so the
//! output is identical either way). [`SequentialRunner`] is the in-process
//! default.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::diagnostics::{self, NormBundle};
use crate::error::{Error, Result};
use crate::fit::{fit_loglog, LogLogFit};
use crate::galerkin::{self, ForcingSpec, InitField, SimConfig, Trajectory};
use crate::vch::{self, VchTrajectory};

/// Strategy for executing a batch of independent solver runs.
pub trait Runner {
    fn run_galerkin(&self, cfgs: &[SimConfig]) -> Result<Vec<Trajectory>>;
    fn run_vch(&self, cfg: &SimConfig) -> Result<VchTrajectory>;
}

/// Runs everything in order on the calling thread.
pub struct SequentialRunner;

impl Runner for SequentialRunner {
    fn run_galerkin(&self, cfgs: &[SimConfig]) -> Result<Vec<Trajectory>> {
        cfgs.iter().map(galerkin::solve).collect()
    }

    fn run_vch(&self, cfg: &SimConfig) -> Result<VchTrajectory> {
        vch::vch_solve(cfg)
    }
}

/// One row of a sweep: the swept parameter value plus the metric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub values: Vec<f64>,
}

/// A fitted power law for one metric column (absent when degenerate,
/// e.g. identically zero errors).
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnFit {
    pub column: &'static str,
    pub fit: Option<LogLogFit>,
}

/// Assembled result of a parameter sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param_name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<SweepRow>,
    pub fits: Vec<ColumnFit>,
}

impl SweepResult {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }

    pub fn fit_for(&self, name: &str) -> Option<&LogLogFit> {
        self.fits
            .iter()
            .find(|f| f.column == name)
            .and_then(|f| f.fit.as_ref())
    }

    fn fit_column(&mut self, name: &'static str) {
        let params: Vec<f64> = self.rows.iter().map(|r| r.param).collect();
        let fit = self
            .column(name)
            .and_then(|ys| fit_loglog(&params, &ys));
        self.fits.push(ColumnFit { column: name, fit });
    }
}

/// Column names of [`alpha_sweep`] results.
pub mod alpha_columns {
    pub const PHI_COMBINED: &str = "phi_err_linf_h_l2_v";
    pub const PHI_LINF_H: &str = "phi_err_linf_h";
    pub const PHI_L2_V: &str = "phi_err_l2_v";
    pub const SQRT_ALPHA_MU: &str = "sqrt_alpha_mu_linf_h";
    pub const GRAD_ANTI_MU: &str = "grad_antideriv_mu_err_linf_h";
    pub const SUP_LAPLACIAN_MU: &str = "sup_laplacian_mu";
}

/// Runs the relaxed solver at each `alpha` (strictly decreasing, at least
/// four values) against one limit-system run with identical `phi0` and `g`,
/// and fits the error-versus-`alpha` power laws. The
/// `sup_laplacian_mu` column carries `sup_t |Lap mu_alpha|` for the
/// regularity-scaling check.
pub fn alpha_sweep<R: Runner>(
    cfg_base: &SimConfig,
    alphas: &[f64],
    runner: &R,
) -> Result<SweepResult> {
    if alphas.len() < 4 {
        return Err(Error::Config(format!(
            "alpha sweep needs at least 4 values, got {}",
            alphas.len()
        )));
    }
    for w in alphas.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config("alphas must be strictly decreasing".into()));
        }
    }
    if !(alphas[0] <= 1.0 && alphas[alphas.len() - 1] > 0.0) {
        return Err(Error::Config("alphas must lie in (0, 1]".into()));
    }

    let limit = runner.run_vch(cfg_base)?;
    let cfgs: Vec<SimConfig> = alphas
        .iter()
        .map(|&a| {
            let mut c = cfg_base.clone();
            c.alpha = a;
            c
        })
        .collect();
    let trajs = runner.run_galerkin(&cfgs)?;

    let basis = cfg_base.build_basis()?;
    let mut rows = Vec::with_capacity(alphas.len());
    for (cfg, traj) in cfgs.iter().zip(&trajs) {
        let nb = diagnostics::norms_vs_limit(traj, &limit, cfg, &basis)?;
        let sup_dmu = traj
            .states
            .iter()
            .map(|st| st.mu.norm_laplacian(basis.lambda()))
            .fold(0.0, f64::max);
        rows.push(SweepRow {
            param: cfg.alpha,
            values: vec![
                nb.phi_combined(),
                nb.phi_linf_h,
                nb.phi_l2_v,
                nb.sqrt_alpha_mu_linf_h,
                nb.grad_anti_mu_linf_h,
                sup_dmu,
            ],
        });
    }

    let mut result = SweepResult {
        param_name: "alpha",
        columns: vec![
            alpha_columns::PHI_COMBINED,
            alpha_columns::PHI_LINF_H,
            alpha_columns::PHI_L2_V,
            alpha_columns::SQRT_ALPHA_MU,
            alpha_columns::GRAD_ANTI_MU,
            alpha_columns::SUP_LAPLACIAN_MU,
        ],
        rows,
        fits: Vec::new(),
    };
    result.fit_column(alpha_columns::PHI_COMBINED);
    result.fit_column(alpha_columns::SQRT_ALPHA_MU);
    result.fit_column(alpha_columns::SUP_LAPLACIAN_MU);
    Ok(result)
}

/// Additive perturbation of a data set: coefficient shapes for the initial
/// fields and a forcing spec, each scaled by the sweep magnitude.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataPerturbation {
    pub forcing: Option<ForcingSpec>,
    pub mu0: Option<Vec<f64>>,
    pub nu0: Option<Vec<f64>>,
    pub phi0: Option<Vec<f64>>,
}

impl DataPerturbation {
    pub fn forcing_only(spec: ForcingSpec) -> Self {
        DataPerturbation {
            forcing: Some(spec),
            ..Default::default()
        }
    }

    fn is_empty(&self) -> bool {
        self.forcing.is_none() && self.mu0.is_none() && self.nu0.is_none() && self.phi0.is_none()
    }

    /// The perturbed config at magnitude `delta`.
    fn apply(&self, base: &SimConfig, delta: f64) -> Result<SimConfig> {
        let mut cfg = base.clone();
        if let Some(f) = &self.forcing {
            cfg.forcing = base.forcing.add_scaled(f, delta);
        }
        let bump = |field: &InitField, shape: &Option<Vec<f64>>| -> Result<InitField> {
            match shape {
                None => Ok(field.clone()),
                Some(shape) => {
                    let base_coeffs = match field {
                        InitField::Constant(c) => {
                            let mut v = vec![0.0; cfg.modes];
                            v[0] = c * crate::num::sqrt(cfg.length);
                            v
                        }
                        InitField::Coeffs(v) => {
                            let mut v = v.clone();
                            v.resize(cfg.modes, 0.0);
                            v
                        }
                        InitField::Samples(_) => {
                            return Err(Error::Config(
                                "perturbations need coefficient-based initial data".into(),
                            ))
                        }
                    };
                    let mut out = base_coeffs;
                    for (o, s) in out.iter_mut().zip(shape) {
                        *o += delta * s;
                    }
                    Ok(InitField::Coeffs(out))
                }
            }
        };
        cfg.init.mu0 = bump(&base.init.mu0, &self.mu0)?;
        cfg.init.nu0 = bump(&base.init.nu0, &self.nu0)?;
        cfg.init.phi0 = bump(&base.init.phi0, &self.phi0)?;
        Ok(cfg)
    }

    fn shape_norm(shape: &Option<Vec<f64>>, lam: &[f64], weight: fn(f64) -> f64) -> f64 {
        match shape {
            None => 0.0,
            Some(v) => crate::num::sqrt(
                v.iter()
                    .zip(lam)
                    .map(|(c, &l)| weight(l) * c * c)
                    .sum::<f64>(),
            ),
        }
    }
}

/// Column names of the continuous-dependence sweeps.
pub mod contdep_columns {
    pub const LHS: &str = "lhs";
    pub const RHS: &str = "rhs";
    pub const RATIO: &str = "ratio";
}

fn contdep_impl<R: Runner>(
    cfg_base: &SimConfig,
    perturbation: &DataPerturbation,
    magnitudes: &[f64],
    runner: &R,
    strong: bool,
) -> Result<SweepResult> {
    if magnitudes.len() < 4 {
        return Err(Error::Config(format!(
            "continuous dependence needs at least 4 magnitudes, got {}",
            magnitudes.len()
        )));
    }
    let (lo, hi) = magnitudes
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &m| (lo.min(m), hi.max(m)));
    if lo > 0.0 && hi / lo < 100.0 {
        return Err(Error::Config(
            "continuous dependence magnitudes should span at least two decades".into(),
        ));
    }
    if perturbation.is_empty() {
        return Err(Error::Config("perturbation touches no data component".into()));
    }
    if strong && !cfg_base.potential.has_smooth_f1() {
        return Err(Error::Domain(
            "the strong continuous-dependence estimate needs f1 smooth on an open interval".into(),
        ));
    }

    let basis = cfg_base.build_basis()?;
    let lam = basis.lambda();
    let alpha = cfg_base.alpha;

    let mut cfgs = vec![cfg_base.clone()];
    for &delta in magnitudes {
        cfgs.push(perturbation.apply(cfg_base, delta)?);
    }
    let mut trajs = runner.run_galerkin(&cfgs)?;
    let base_traj = trajs.remove(0);

    if strong {
        let rep = diagnostics::separation_report(&base_traj, cfg_base, &basis)?;
        if !rep.pass {
            return Err(Error::Separation(diagnostics::describe_separation(&rep)));
        }
    }

    let id = |l: f64| 1.0 + 0.0 * l;
    let one_plus = |l: f64| 1.0 + l;
    let mut rows = Vec::with_capacity(magnitudes.len());
    for ((&delta, cfg), traj) in magnitudes.iter().zip(&cfgs[1..]).zip(&trajs) {
        if strong {
            let rep = diagnostics::separation_report(traj, cfg, &basis)?;
            if !rep.pass {
                return Err(Error::Separation(diagnostics::describe_separation(&rep)));
            }
        }
        let nb: NormBundle = diagnostics::trajectory_norms(traj, &base_traj, cfg, &basis)?;
        let g_diff = perturbation
            .forcing
            .as_ref()
            .map(|f| delta * f.norm_l2h(cfg.length, cfg.t_end))
            .unwrap_or(0.0);
        let (lhs, rhs) = if strong {
            let rhs = g_diff
                + delta * DataPerturbation::shape_norm(&perturbation.mu0, lam, one_plus)
                + delta * DataPerturbation::shape_norm(&perturbation.nu0, lam, id)
                + delta * DataPerturbation::shape_norm(&perturbation.phi0, lam, one_plus);
            (nb.strong_lhs(), rhs)
        } else {
            let sqrt_a = crate::num::sqrt(alpha);
            let rhs = g_diff
                + sqrt_a * delta * DataPerturbation::shape_norm(&perturbation.mu0, lam, id)
                + sqrt_a * delta * DataPerturbation::shape_norm(&perturbation.nu0, lam, id)
                + (1.0 + 1.0 / sqrt_a)
                    * delta
                    * DataPerturbation::shape_norm(&perturbation.phi0, lam, id);
            (nb.weak_lhs(), rhs)
        };
        let ratio = if rhs > 0.0 { lhs / rhs } else { f64::NAN };
        rows.push(SweepRow {
            param: delta,
            values: vec![lhs, rhs, ratio],
        });
    }

    let mut result = SweepResult {
        param_name: "magnitude",
        columns: vec![contdep_columns::LHS, contdep_columns::RHS, contdep_columns::RATIO],
        rows,
        fits: Vec::new(),
    };
    result.fit_column(contdep_columns::LHS);
    Ok(result)
}

/// Weak continuous-dependence sweep: for each magnitude `delta`, solves the
/// base and perturbed problems and reports the estimate's LHS, RHS and their
/// ratio (the fitted stability constant is the largest ratio).
pub fn continuous_dependence<R: Runner>(
    cfg_base: &SimConfig,
    perturbation: &DataPerturbation,
    magnitudes: &[f64],
    runner: &R,
) -> Result<SweepResult> {
    contdep_impl(cfg_base, perturbation, magnitudes, runner, false)
}

/// Strong-norm variant, valid in the separated regime only; fails with
/// `Error::Separation` when a run does not satisfy the separation bound and
/// with `Error::Domain` for the double obstacle.
pub fn continuous_dependence_strong<R: Runner>(
    cfg_base: &SimConfig,
    perturbation: &DataPerturbation,
    magnitudes: &[f64],
    runner: &R,
) -> Result<SweepResult> {
    contdep_impl(cfg_base, perturbation, magnitudes, runner, true)
}

/// Column names of [`epsilon_sweep`] results.
pub mod epsilon_columns {
    pub const CAUCHY_DIFF: &str = "phi_cauchy_diff_linf_h";
    pub const XI_PROXY: &str = "yosida_term_linf_h";
}

/// Runs the relaxed solver at each regularization `eps` (decreasing) and
/// reports consecutive Cauchy differences `|phi_{e_i} - phi_{e_{i+1}}|` (on
/// the row of the *larger* eps; NaN on the last row) plus the uniform bound
/// on the Yosida term.
pub fn epsilon_sweep<R: Runner>(
    cfg_base: &SimConfig,
    epsilons: &[f64],
    runner: &R,
) -> Result<SweepResult> {
    if epsilons.is_empty() {
        return Err(Error::Config("epsilon sweep needs at least one value".into()));
    }
    for w in epsilons.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Config("epsilons must be strictly decreasing".into()));
        }
    }
    let cfgs: Vec<SimConfig> = epsilons
        .iter()
        .map(|&e| {
            let mut c = cfg_base.clone();
            c.yosida.epsilon = e;
            c
        })
        .collect();
    for c in &cfgs {
        if !(c.yosida.epsilon > 0.0 && c.yosida.epsilon < 1.0) {
            return Err(Error::Config(format!(
                "epsilon must lie in (0, 1), got {}",
                c.yosida.epsilon
            )));
        }
    }
    let trajs = runner.run_galerkin(&cfgs)?;
    let basis = cfg_base.build_basis()?;

    let mut rows = Vec::with_capacity(epsilons.len());
    for (i, (cfg, traj)) in cfgs.iter().zip(&trajs).enumerate() {
        let diff = if i + 1 < trajs.len() {
            traj.states
                .iter()
                .zip(&trajs[i + 1].states)
                .map(|(a, b)| a.phi.sub(&b.phi).norm_h())
                .fold(0.0, f64::max)
        } else {
            f64::NAN
        };
        // Linf-in-time H-norm of the Yosida term on the grid
        let mut xi = 0.0_f64;
        for st in &traj.states {
            let grid = basis.synth(&st.phi);
            let mut sq = 0.0;
            for &v in &grid {
                let f = cfg.potential.yosida_prime(&cfg.yosida, v)?;
                sq += f * f;
            }
            xi = xi.max(crate::num::sqrt(sq * basis.length() / basis.points() as f64));
        }
        rows.push(SweepRow {
            param: cfg.yosida.epsilon,
            values: vec![diff, xi],
        });
    }

    let mut result = SweepResult {
        param_name: "epsilon",
        columns: vec![epsilon_columns::CAUCHY_DIFF, epsilon_columns::XI_PROXY],
        rows,
        fits: Vec::new(),
    };
    result.fit_column(epsilon_columns::CAUCHY_DIFF);
    Ok(result)
}

/// Column name of [`n_refinement`] results.
pub mod refine_columns {
    pub const TERMINAL_DIFF: &str = "terminal_phi_diff_prev";
}

/// Runs at each mode count `n` (strictly increasing, `M` scaled along) and
/// reports terminal-state differences between consecutive resolutions
/// (NaN on the first row). Initial data must be coefficient-based so the
/// datum is resolution-independent.
pub fn n_refinement<R: Runner>(
    cfg_base: &SimConfig,
    ns: &[usize],
    runner: &R,
) -> Result<SweepResult> {
    if ns.is_empty() {
        return Err(Error::Config("mode refinement needs at least one n".into()));
    }
    for w in ns.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Config("mode counts must be strictly increasing".into()));
        }
    }
    for field in [&cfg_base.init.mu0, &cfg_base.init.nu0, &cfg_base.init.phi0] {
        if matches!(field, InitField::Samples(_)) {
            return Err(Error::Config(
                "mode refinement needs coefficient-based initial data".into(),
            ));
        }
    }
    let ratio = cfg_base.quad_points / cfg_base.modes;
    let cfgs: Vec<SimConfig> = ns
        .iter()
        .map(|&n| {
            let mut c = cfg_base.clone();
            c.modes = n;
            c.quad_points = n * ratio.max(2);
            c
        })
        .collect();
    let trajs = runner.run_galerkin(&cfgs)?;

    let mut rows = Vec::with_capacity(ns.len());
    for (i, traj) in trajs.iter().enumerate() {
        let diff = if i == 0 {
            f64::NAN
        } else {
            let small = trajs[i - 1].terminal();
            let big = traj.terminal();
            big.phi.sub(&small.phi.resized(big.phi.len())).norm_h()
        };
        rows.push(SweepRow {
            param: ns[i] as f64,
            values: vec![diff],
        });
    }

    Ok(SweepResult {
        param_name: "n",
        columns: vec![refine_columns::TERMINAL_DIFF],
        rows,
        fits: Vec::new(),
    })
}
