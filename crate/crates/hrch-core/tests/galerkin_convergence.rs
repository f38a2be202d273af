//! Convergence and boundedness checks of the relaxed solver: scalar-oracle
//! equivalence for spatially homogeneous data, temporal order, Richardson
//! factors, the uniform a-priori bound, and determinism.

use hrch_core::diagnostics::mass_invariant_residual;
use hrch_core::galerkin::{
    estimate_temporal_order, solve, ForcingSpec, ForcingTerm, InitField, InitSpec, SimConfig,
};
use hrch_core::reference::{rk4_homogeneous, ScalarState};
use hrch_core::{PotentialKind, SplitPotential, YosidaParams};

fn benchmark() -> SimConfig {
    SimConfig {
        alpha: 0.5,
        tau: 1.0,
        yosida: YosidaParams::new(0.05).unwrap(),
        length: 1.0,
        modes: 32,
        quad_points: 64,
        dt: 4e-3,
        t_end: 0.5,
        potential: SplitPotential::regular(),
        forcing: ForcingSpec::new(vec![ForcingTerm {
            amplitude: 0.1,
            mode: 1,
            c0: 1.0,
            c1: 0.5,
        }]),
        init: InitSpec {
            mu0: InitField::zero(),
            nu0: InitField::zero(),
            phi0: InitField::Coeffs(vec![0.2, 0.05]),
        },
        picard_iters: 1,
    }
}

#[test]
fn homogeneous_runs_match_scalar_rk4_oracle() {
    // Mode 1 carries the whole dynamics for constant data; physical values
    // are coefficients over sqrt(L).
    for (kind, eps) in [
        (PotentialKind::Regular, 0.05),
        (PotentialKind::Logarithmic, 0.05),
        (PotentialKind::DoubleObstacle, 0.05),
    ] {
        let potential = match kind {
            PotentialKind::Regular => SplitPotential::regular(),
            PotentialKind::Logarithmic => SplitPotential::logarithmic(2.0).unwrap(),
            PotentialKind::DoubleObstacle => SplitPotential::double_obstacle(1.0).unwrap(),
        };
        let dt = 1e-3;
        let cfg = SimConfig {
            alpha: 0.5,
            tau: 1.0,
            yosida: YosidaParams::new(eps).unwrap(),
            length: 1.0,
            modes: 8,
            quad_points: 32,
            dt,
            t_end: 1.0,
            potential,
            forcing: ForcingSpec::new(vec![ForcingTerm {
                amplitude: 0.2,
                mode: 0,
                c0: 1.0,
                c1: 0.0,
            }]),
            init: InitSpec {
                mu0: InitField::Constant(0.1),
                nu0: InitField::zero(),
                phi0: InitField::Constant(0.3),
            },
            picard_iters: 1,
        };
        let traj = solve(&cfg).unwrap();
        let term = traj.terminal();

        let oracle = rk4_homogeneous(
            &cfg.potential,
            &cfg.yosida,
            cfg.alpha,
            cfg.tau,
            |_| 0.2,
            ScalarState { mu: 0.1, nu: 0.0, phi: 0.3 },
            1.0,
            1e-5,
        )
        .unwrap();

        let sqrt_l = cfg.length.sqrt();
        let err = (term.mu.values()[0] / sqrt_l - oracle.mu).abs()
            + (term.nu.values()[0] / sqrt_l - oracle.nu).abs()
            + (term.phi.values()[0] / sqrt_l - oracle.phi).abs();
        let scale = oracle.mu.abs() + oracle.nu.abs() + oracle.phi.abs();
        assert!(
            err <= 10.0 * dt * dt * scale,
            "{kind:?}: err {err:e} vs budget {:e}",
            10.0 * dt * dt * scale
        );

        // higher modes see only quadrature rounding dust for homogeneous data
        for k in 1..cfg.modes {
            assert!(term.phi.values()[k].abs() <= 1e-13);
        }
    }
}

#[test]
fn temporal_order_is_two_with_picard_correction() {
    let cfg = benchmark();
    let order = estimate_temporal_order(&cfg).unwrap();
    assert!((order - 2.0).abs() <= 0.2, "order {order}");

    // an extra corrector pass keeps the order and shrinks the constant
    let mut cfg2 = benchmark();
    cfg2.picard_iters = 2;
    let order2 = estimate_temporal_order(&cfg2).unwrap();
    assert!((order2 - 2.0).abs() <= 0.2, "order {order2}");
}

#[test]
fn richardson_terminal_difference_factor() {
    let cfg = benchmark();
    let mut cfg_half = cfg.clone();
    cfg_half.dt = cfg.dt / 2.0;
    let mut cfg_quarter = cfg.clone();
    cfg_quarter.dt = cfg.dt / 4.0;

    let t0 = solve(&cfg).unwrap();
    let t1 = solve(&cfg_half).unwrap();
    let t2 = solve(&cfg_quarter).unwrap();
    let d = |a: &hrch_core::galerkin::Trajectory, b: &hrch_core::galerkin::Trajectory| {
        a.terminal().phi.sub(&b.terminal().phi).norm_h()
    };
    let ratio = d(&t0, &t1) / d(&t1, &t2);
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn uniform_bound_stable_under_step_halving() {
    let cfg = benchmark();
    let bound = |cfg: &SimConfig| {
        let traj = solve(cfg).unwrap();
        let basis = cfg.build_basis().unwrap();
        let lam = basis.lambda();
        let mut nu_max = 0.0_f64;
        let mut grad_mu_max = 0.0_f64;
        let mut phi_max = 0.0_f64;
        let mut dphi_max = 0.0_f64;
        for (i, st) in traj.states.iter().enumerate() {
            nu_max = nu_max.max(cfg.alpha.sqrt() * st.nu.norm_h());
            grad_mu_max = grad_mu_max.max(st.mu.norm_grad(lam));
            phi_max = phi_max.max(st.phi.norm_h());
            if i > 0 {
                dphi_max = dphi_max.max(
                    st.phi.sub(&traj.states[i - 1].phi).scaled(1.0 / traj.dt).norm_h(),
                );
            }
        }
        [nu_max, grad_mu_max, phi_max, dphi_max]
    };
    let coarse = bound(&cfg);
    let mut cfg_half = cfg.clone();
    cfg_half.dt = cfg.dt / 2.0;
    let fine = bound(&cfg_half);
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(c.is_finite() && f.is_finite());
        assert!((c - f).abs() <= 0.05 * f.abs().max(1e-12), "coarse {c} fine {f}");
    }
}

#[test]
fn determinism_bitwise() {
    let cfg = benchmark();
    let a = solve(&cfg).unwrap();
    let b = solve(&cfg).unwrap();
    assert_eq!(a.states.len(), b.states.len());
    for (x, y) in a.states.iter().zip(&b.states) {
        assert_eq!(x.mu.values(), y.mu.values());
        assert_eq!(x.nu.values(), y.nu.values());
        assert_eq!(x.phi.values(), y.phi.values());
    }
}

#[test]
fn mean_value_invariant_along_forced_runs() {
    // nonzero nu0 mean and forcing on the constant mode stress the invariant
    let mut cfg = benchmark();
    cfg.init.nu0 = InitField::Constant(0.25);
    cfg.forcing = ForcingSpec::new(vec![
        ForcingTerm { amplitude: 0.3, mode: 0, c0: 1.0, c1: 1.0 },
        ForcingTerm { amplitude: 0.4, mode: 1, c0: 1.0, c1: -0.5 },
    ]);
    let traj = solve(&cfg).unwrap();
    let m0 = traj.states[0].phi.values()[0] / cfg.length.sqrt();
    let res = mass_invariant_residual(&traj, &cfg);
    assert!(res <= 1e-12 * (1.0 + m0.abs()), "residual {res:e}");

    // trajectory stays bounded and NaN-free
    for st in &traj.states {
        assert!(st.phi.norm_h().is_finite());
        assert!(st.mu.norm_h().is_finite());
    }
}

#[test]
fn galerkin_refinement_spectral_decay() {
    // doubling n changes the terminal phi by less and less for smooth data
    let mut diffs = vec![];
    let mut prev: Option<hrch_core::galerkin::Trajectory> = None;
    for n in [8usize, 16, 32] {
        let mut cfg = benchmark();
        cfg.modes = n;
        cfg.quad_points = 2 * n;
        cfg.t_end = 0.25;
        // geometric-spectrum datum so every resolution leaves a visible tail
        let rho = 0.5_f64;
        let coeffs: Vec<f64> = (0..n).map(|j| 0.15 * rho.powi(j as i32)).collect();
        cfg.init.phi0 = InitField::Coeffs(coeffs);
        let traj = solve(&cfg).unwrap();
        if let Some(p) = &prev {
            let small = p.terminal().phi.resized(n);
            diffs.push(traj.terminal().phi.sub(&small).norm_h());
        }
        prev = Some(traj);
    }
    assert!(diffs[1] < diffs[0], "diffs {diffs:?}");
}
