//! Structural checks of the limit-system solver: discrete energy
//! dissipation, exact mass conservation, and boundedness on rough data.

use hrch_core::diagnostics::vch_dissipation_residual;
use hrch_core::galerkin::{ForcingSpec, InitField, InitSpec, SimConfig};
use hrch_core::vch::vch_solve;
use hrch_core::{SplitPotential, YosidaParams};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn cfg() -> SimConfig {
    SimConfig {
        alpha: 1.0,
        tau: 1.0,
        yosida: YosidaParams::new(0.05).unwrap(),
        length: 1.0,
        modes: 32,
        quad_points: 64,
        dt: 1e-3,
        t_end: 0.5,
        potential: SplitPotential::regular(),
        forcing: ForcingSpec::zero(),
        init: InitSpec {
            mu0: InitField::zero(),
            nu0: InitField::zero(),
            phi0: InitField::Coeffs(vec![0.2, 0.1]),
        },
        picard_iters: 1,
    }
}

#[test]
fn energy_dissipates_without_forcing() {
    let c = cfg();
    let traj = vch_solve(&c).unwrap();
    let basis = c.build_basis().unwrap();
    let worst = vch_dissipation_residual(&traj, &c, &basis).unwrap();
    let tol = 10.0 * c.dt * c.dt;
    assert!(worst <= tol, "worst per-step defect {worst:e} > {tol:e}");
}

#[test]
fn mass_exactly_conserved() {
    let mut c = cfg();
    c.forcing = ForcingSpec::new(vec![hrch_core::galerkin::ForcingTerm {
        amplitude: 0.5,
        mode: 2,
        c0: 1.0,
        c1: 2.0,
    }]);
    let traj = vch_solve(&c).unwrap();
    let m = traj.states[0].phi.values()[0];
    for st in &traj.states {
        assert!((st.phi.values()[0] - m).abs() <= 1e-14);
    }
}

#[test]
fn random_smooth_data_stays_bounded() {
    let mut rng = StdRng::seed_from_u64(42);
    for _ in 0..3 {
        let mut c = cfg();
        let coeffs: Vec<f64> = (0..c.modes)
            .map(|j| rng.gen_range(-0.3..0.3) / (1.0 + (j * j) as f64))
            .collect();
        c.init.phi0 = InitField::Coeffs(coeffs);
        c.t_end = 0.2;
        let traj = vch_solve(&c).unwrap();
        let basis = c.build_basis().unwrap();
        for st in &traj.states {
            let grid = basis.synth(&st.phi);
            for v in grid {
                assert!(v.is_finite());
                assert!(v.abs() < 10.0);
            }
        }
    }
}
