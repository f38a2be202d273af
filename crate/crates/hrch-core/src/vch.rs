//! The `alpha = 0` limit system (viscous Cahn-Hilliard) in the same basis,
//! used as the reference of the `alpha` sweep.
//!
//! In modal form, `d_t phi - Lap mu = 0` gives `phi_k' = -lambda_k mu_k` for
//! `k >= 2`, which eliminates `mu`:
//!
//! ```text
//!   (tau + 1/lambda_k) phi_k' = -lambda_k phi_k - N_k + g_k,
//! ```
//!
//! advanced by Crank-Nicolson with the same explicit-predictor/Picard
//! handling of `N` as the relaxed solver. Mode 1 is conserved exactly
//! (`phi_1' = 0`), and `mu_1 = N_1 - g_1` comes from testing the second
//! equation with the constant eigenfunction. For `k >= 2` the chemical
//! potential is reconstructed from the difference quotient
//! `mu_k = -phi_k' / lambda_k` (centered at interior nodes, second-order
//! one-sided at the ends), the same quotient the dissipation diagnostic
//! uses, so the discrete energy identity stays self-consistent.

use alloc::vec::Vec;

use crate::error::Result;
use crate::galerkin::SimConfig;
use crate::spectral::{FieldCoeffs, SpectralBasis};

/// Modal state of the limit system; `mu` is the reconstructed potential.
#[derive(Debug, Clone, PartialEq)]
pub struct VchState {
    pub t: f64,
    pub phi: FieldCoeffs,
    pub mu: FieldCoeffs,
}

/// A solved limit-system run with uniformly spaced states.
#[derive(Debug, Clone)]
pub struct VchTrajectory {
    pub states: Vec<VchState>,
    pub dt: f64,
}

impl VchTrajectory {
    pub fn terminal(&self) -> &VchState {
        self.states.last().expect("trajectory has at least the initial state")
    }
}

/// One Crank-Nicolson step. The returned state carries `mu` reconstructed
/// from the backward quotient over this step; [`vch_solve`] replaces the
/// interior values with centered quotients afterwards.
pub fn vch_step(state: &VchState, cfg: &SimConfig, basis: &SpectralBasis) -> Result<VchState> {
    let h = cfg.effective_dt();
    vch_step_sized(state, cfg, basis, h)
}

fn vch_step_sized(
    state: &VchState,
    cfg: &SimConfig,
    basis: &SpectralBasis,
    h: f64,
) -> Result<VchState> {
    let n = basis.modes();
    let lam = basis.lambda();
    let tau = cfg.tau;
    let g_mid = cfg.forcing.coeffs(basis, state.t + 0.5 * h);

    let mut phi_star = state.phi.clone();
    let mut phi_next = state.phi.clone();
    for _pass in 0..=cfg.picard_iters {
        let nl = basis.nonlinear_term(&phi_star, &cfg.potential, &cfg.yosida)?;
        for k in 1..n {
            let l = lam[k];
            let beta = tau + 1.0 / l;
            let phi = state.phi.values()[k];
            phi_next.values_mut()[k] = (phi * (beta / h - l / 2.0) - nl.values()[k]
                + g_mid.values()[k])
                / (beta / h + l / 2.0);
        }
        phi_star = state.phi.add_scaled(&phi_next, 1.0).scaled(0.5);
    }

    let t_next = state.t + h;
    let mu = reconstruct_mu_backward(state, &phi_next, cfg, basis, h, t_next)?;
    Ok(VchState {
        t: t_next,
        phi: phi_next,
        mu,
    })
}

fn mu_mode_one(phi: &FieldCoeffs, cfg: &SimConfig, basis: &SpectralBasis, t: f64) -> Result<f64> {
    let nl = basis.nonlinear_term(phi, &cfg.potential, &cfg.yosida)?;
    Ok(nl.values()[0] - cfg.forcing.coeffs(basis, t).values()[0])
}

fn reconstruct_mu_backward(
    state: &VchState,
    phi_next: &FieldCoeffs,
    cfg: &SimConfig,
    basis: &SpectralBasis,
    h: f64,
    t_next: f64,
) -> Result<FieldCoeffs> {
    let lam = basis.lambda();
    let mut mu = FieldCoeffs::zeros(basis.modes());
    for k in 1..basis.modes() {
        mu.values_mut()[k] = -(phi_next.values()[k] - state.phi.values()[k]) / (h * lam[k]);
    }
    mu.values_mut()[0] = mu_mode_one(phi_next, cfg, basis, t_next)?;
    Ok(mu)
}

/// Integrates the limit system. Mass (`phi_1`) is conserved identically.
pub fn vch_solve(cfg: &SimConfig) -> Result<VchTrajectory> {
    // alpha plays no role in the limit system; validate the rest as usual.
    let mut probe = cfg.clone();
    probe.alpha = 1.0;
    probe.validate()?;
    let basis = cfg.build_basis()?;
    let steps = cfg.steps();
    let h = cfg.effective_dt();

    let init = crate::galerkin::initial_state(cfg, &basis)?;
    let mu0 = mu_mode_one(&init.phi, cfg, &basis, 0.0)?;
    let mut first = VchState {
        t: 0.0,
        phi: init.phi,
        mu: FieldCoeffs::zeros(basis.modes()),
    };
    first.mu.values_mut()[0] = mu0;

    let mut states = Vec::with_capacity(steps + 1);
    states.push(first);
    for i in 0..steps {
        let mut next = vch_step_sized(states.last().unwrap(), cfg, &basis, h)?;
        next.t = (i + 1) as f64 * h;
        states.push(next);
    }

    // centered reconstruction of mu_k (k >= 2) at the stored nodes
    let lam = basis.lambda().to_vec();
    let n = states.len();
    if n >= 3 {
        let quot = |a: &FieldCoeffs, b: &FieldCoeffs, scale: f64| -> Vec<f64> {
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y) * scale)
                .collect()
        };
        let mut dphis: Vec<Vec<f64>> = Vec::with_capacity(n);
        dphis.push({
            // second-order one-sided: (-3 f0 + 4 f1 - f2) / (2h)
            let f0 = states[0].phi.values();
            let f1 = states[1].phi.values();
            let f2 = states[2].phi.values();
            f0.iter()
                .zip(f1)
                .zip(f2)
                .map(|((a, b), c)| (-3.0 * a + 4.0 * b - c) / (2.0 * h))
                .collect()
        });
        for i in 1..n - 1 {
            dphis.push(quot(&states[i + 1].phi, &states[i - 1].phi, 1.0 / (2.0 * h)));
        }
        dphis.push({
            let f0 = states[n - 1].phi.values();
            let f1 = states[n - 2].phi.values();
            let f2 = states[n - 3].phi.values();
            f0.iter()
                .zip(f1)
                .zip(f2)
                .map(|((a, b), c)| (3.0 * a - 4.0 * b + c) / (2.0 * h))
                .collect()
        });
        for (st, dphi) in states.iter_mut().zip(&dphis) {
            for k in 1..st.mu.len() {
                st.mu.values_mut()[k] = -dphi[k] / lam[k];
            }
        }
    }

    Ok(VchTrajectory { states, dt: h })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galerkin::{ForcingSpec, InitField, InitSpec, SimConfig};
    use crate::potentials::{SplitPotential, YosidaParams};
    use approx::assert_relative_eq;

    fn cfg() -> SimConfig {
        SimConfig {
            alpha: 1.0,
            tau: 1.0,
            yosida: YosidaParams::new(0.05).unwrap(),
            length: 1.0,
            modes: 8,
            quad_points: 16,
            dt: 1e-3,
            t_end: 0.05,
            potential: SplitPotential::regular(),
            forcing: ForcingSpec::zero(),
            init: InitSpec::zero(),
            picard_iters: 1,
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let traj = vch_solve(&cfg()).unwrap();
        for st in &traj.states {
            assert_eq!(st.phi.norm_h(), 0.0);
        }
    }

    #[test]
    fn mass_is_conserved_exactly() {
        let mut c = cfg();
        c.init.phi0 = InitField::Coeffs(alloc::vec![0.2, 0.1, 0.05]);
        c.forcing = ForcingSpec::new(alloc::vec![crate::galerkin::ForcingTerm {
            amplitude: 0.3,
            mode: 1,
            c0: 1.0,
            c1: 1.0,
        }]);
        let traj = vch_solve(&c).unwrap();
        let m = traj.states[0].phi.values()[0];
        for st in &traj.states {
            assert!(crate::num::abs(st.phi.values()[0] - m) <= 1e-14);
        }
    }

    #[test]
    fn constant_state_is_stationary() {
        let mut c = cfg();
        c.init.phi0 = InitField::Constant(1.0);
        let traj = vch_solve(&c).unwrap();
        let p0 = &traj.states[0].phi;
        for st in &traj.states {
            assert!(st.phi.sub(p0).norm_h() <= 1e-12);
        }
    }

    #[test]
    fn single_mode_linear_decay_matches_scalar_ode() {
        // tiny amplitude: f'(phi) ~ f2'(phi) = -phi, so mode 2 decays like
        // exp(-lambda (lambda - 1) / (1 + tau lambda) t)
        let mut c = cfg();
        c.t_end = 0.1;
        let amp = 1e-6;
        let mut coeffs = alloc::vec![0.0; 8];
        coeffs[1] = amp;
        c.init.phi0 = InitField::Coeffs(coeffs);
        let traj = vch_solve(&c).unwrap();
        let basis = c.build_basis().unwrap();
        let l = basis.lambda()[1];
        let rate = -l * (l - 1.0) / (1.0 + c.tau * l);
        let want = amp * crate::num::exp(rate * c.t_end);
        let got = traj.terminal().phi.values()[1];
        assert_relative_eq!(got, want, max_relative = 1e-4);
    }
}
