//! Transform identities of the Neumann cosine basis and the dense-grid
//! oracle for the Galerkin nonlinearity.

use hrch_core::{FieldCoeffs, SpectralBasis, SplitPotential, YosidaParams};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parseval_and_roundtrip(
        coeffs in proptest::collection::vec(-2.0f64..2.0, 8),
        length in 0.5f64..4.0,
    ) {
        let basis = SpectralBasis::build(length, 8, 16).unwrap();
        let c = FieldCoeffs::from_vec(coeffs);
        let grid = basis.synth(&c);

        // Parseval: quadrature of the square equals the coefficient sum
        let quad: f64 = grid.iter().map(|v| v * v).sum::<f64>() * length / 16.0;
        let sum: f64 = c.values().iter().map(|v| v * v).sum();
        prop_assert!((quad - sum).abs() <= 1e-12 * (1.0 + sum));

        // project is a left inverse of synth
        let back = basis.project(&grid).unwrap();
        for (a, b) in back.values().iter().zip(c.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn lambda_consistency_second_differences() {
    // second differences of e_j on a refined grid reproduce -lambda_j e_j
    let length = 1.3;
    let n = 6;
    let m = 4096;
    let basis = SpectralBasis::build(length, n, m).unwrap();
    let h = length / m as f64;
    for j in 1..n {
        let mut c = FieldCoeffs::zeros(n);
        c.values_mut()[j] = 1.0;
        let v = basis.synth(&c);
        let lam = basis.lambda()[j];
        let mut worst = 0.0_f64;
        for i in 1..m - 1 {
            let d2 = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h);
            worst = worst.max((d2 + lam * v[i]).abs());
        }
        // O(h^2) with constant lambda_j^2 / 12
        let budget = lam * lam * h * h;
        assert!(worst <= budget, "mode {j}: worst {worst:e} > {budget:e}");
    }
}

/// Dense-grid oracle: midpoint quadrature of an analytic integrand against
/// the eigenfunctions, on a grid far finer than the collocation grid.
fn dense_projection(length: f64, n: usize, points: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    let w = length / points as f64;
    let mut out = vec![0.0; n];
    let c0 = 1.0 / length.sqrt();
    let c = (2.0 / length).sqrt();
    for i in 0..points {
        let x = length * (i as f64 + 0.5) / points as f64;
        let val = f(x);
        out[0] += val * c0 * w;
        for (j, o) in out.iter_mut().enumerate().skip(1) {
            *o += val * c * (core::f64::consts::PI * j as f64 * x / length).cos() * w;
        }
    }
    out
}

#[test]
fn nonlinear_term_matches_dense_grid_oracle() {
    // phi = a e_2 with a = 0.1 on (0,1): phi(x) = A cos(pi x), A = sqrt(2)/10.
    // The analytic cubic expansion phi^3 - phi has exactly two cosine modes:
    //   N_2 = (3A^3/4 - A)/sqrt(2) = -0.0985,  N_4 = (A^3/4)/sqrt(2) = 5e-4.
    let n = 8;
    let basis = SpectralBasis::build(1.0, n, 2 * n).unwrap();
    let p = SplitPotential::regular();
    let y = YosidaParams::new(1e-5).unwrap();
    let mut phi = FieldCoeffs::zeros(n);
    phi.values_mut()[1] = 0.1;

    let a = core::f64::consts::SQRT_2 / 10.0;
    let oracle = dense_projection(1.0, n, 10_000_000, |x| {
        let v = a * (core::f64::consts::PI * x).cos();
        v * v * v - v
    });
    assert!((oracle[1] - (-0.0985)).abs() < 1e-10, "oracle N2 = {}", oracle[1]);
    assert!((oracle[3] - 5e-4).abs() < 1e-10, "oracle N4 = {}", oracle[3]);

    let got = basis.nonlinear_term(&phi, &p, &y).unwrap();
    for k in 0..n {
        assert!(
            (got.values()[k] - oracle[k]).abs() <= 1e-8,
            "mode {k}: {} vs oracle {}",
            got.values()[k],
            oracle[k]
        );
    }
}
