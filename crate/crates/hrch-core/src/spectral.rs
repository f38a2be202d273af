//! Neumann-Laplacian eigenbasis on the interval `(0, L)` and the associated
//! Galerkin transforms.
//!
//! The eigenpairs of `-v'' = lambda v`, `v'(0) = v'(L) = 0` are
//!
//! ```text
//!   lambda_j = (pi (j-1) / L)^2,
//!   e_1 = L^{-1/2},   e_j(x) = sqrt(2/L) cos(pi (j-1) x / L)   (j >= 2),
//! ```
//!
//! normalized in `L^2(0, L)`. Collocation uses midpoint nodes
//! `x_m = L (m - 1/2) / M` with uniform weights `L / M`, which integrates
//! products `cos(j pi x/L) cos(k pi x/L)` exactly for `j + k < 2M`, so the
//! discrete basis is orthonormal to rounding and projection is the exact
//! left inverse of synthesis.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::num;
use crate::potentials::{SplitPotential, YosidaParams};

/// Coefficients of a field against the eigenbasis `{e_1, ..., e_n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldCoeffs {
    values: Vec<f64>,
}

impl FieldCoeffs {
    pub fn zeros(n: usize) -> Self {
        FieldCoeffs { values: vec![0.0; n] }
    }

    pub fn from_vec(values: Vec<f64>) -> Self {
        FieldCoeffs { values }
    }

    /// Truncates or zero-pads to length `n` (the spaces are nested).
    pub fn resized(&self, n: usize) -> Self {
        let mut values = self.values.clone();
        values.resize(n, 0.0);
        FieldCoeffs { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `self + scale * other`, elementwise.
    pub fn add_scaled(&self, other: &FieldCoeffs, scale: f64) -> FieldCoeffs {
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + scale * b)
            .collect();
        FieldCoeffs { values }
    }

    pub fn sub(&self, other: &FieldCoeffs) -> FieldCoeffs {
        self.add_scaled(other, -1.0)
    }

    pub fn scaled(&self, scale: f64) -> FieldCoeffs {
        FieldCoeffs {
            values: self.values.iter().map(|a| a * scale).collect(),
        }
    }

    /// `L^2` norm; Parseval makes this the grid quadrature of the square.
    pub fn norm_h(&self) -> f64 {
        num::sqrt(self.values.iter().map(|c| c * c).sum())
    }

    /// `|grad v|_{L^2}` through the eigenvalues: `sqrt(sum lambda_j c_j^2)`.
    pub fn norm_grad(&self, lambda: &[f64]) -> f64 {
        num::sqrt(
            self.values
                .iter()
                .zip(lambda)
                .map(|(c, l)| l * c * c)
                .sum(),
        )
    }

    /// Full `H^1` norm `sqrt(sum (1 + lambda_j) c_j^2)`.
    pub fn norm_v(&self, lambda: &[f64]) -> f64 {
        num::sqrt(
            self.values
                .iter()
                .zip(lambda)
                .map(|(c, l)| (1.0 + l) * c * c)
                .sum(),
        )
    }

    /// `|Lap v|_{L^2} = sqrt(sum lambda_j^2 c_j^2)`.
    pub fn norm_laplacian(&self, lambda: &[f64]) -> f64 {
        num::sqrt(
            self.values
                .iter()
                .zip(lambda)
                .map(|(c, l)| l * l * c * c)
                .sum(),
        )
    }

    /// Discrete `H^2`-type norm `sqrt(sum (1 + lambda_j^2) c_j^2)`.
    pub fn norm_w(&self, lambda: &[f64]) -> f64 {
        num::sqrt(
            self.values
                .iter()
                .zip(lambda)
                .map(|(c, l)| (1.0 + l * l) * c * c)
                .sum(),
        )
    }
}

/// Eigenpairs, collocation grid and evaluation table for `(0, L)`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    length: f64,
    n: usize,
    m: usize,
    lambda: Vec<f64>,
    grid: Vec<f64>,
    weight: f64,
    /// Row-major `e_j(x_m)`, `n x M`.
    table: Vec<f64>,
}

impl SpectralBasis {
    /// Builds the basis; requires `L > 0`, `n >= 1` and `M >= 2n`.
    pub fn build(length: f64, n: usize, m: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::Config(format!("interval length must be positive, got {length}")));
        }
        if n == 0 {
            return Err(Error::Config("need at least one mode".into()));
        }
        if m < 2 * n {
            return Err(Error::Config(format!(
                "collocation needs M >= 2n for dealiasing, got M = {m}, n = {n}"
            )));
        }
        let lambda: Vec<f64> = (0..n)
            .map(|j| {
                let k = core::f64::consts::PI * j as f64 / length;
                k * k
            })
            .collect();
        let grid: Vec<f64> = (0..m)
            .map(|i| length * (i as f64 + 0.5) / m as f64)
            .collect();
        let weight = length / m as f64;
        let mut table = vec![0.0; n * m];
        let c0 = 1.0 / num::sqrt(length);
        let c = num::sqrt(2.0 / length);
        table[..m].fill(c0);
        for j in 1..n {
            let freq = core::f64::consts::PI * j as f64 / length;
            for (i, &x) in grid.iter().enumerate() {
                table[j * m + i] = c * num::cos(freq * x);
            }
        }
        Ok(SpectralBasis {
            length,
            n,
            m,
            lambda,
            grid,
            weight,
            table,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of modes `n`.
    pub fn modes(&self) -> usize {
        self.n
    }

    /// Number of collocation points `M`.
    pub fn points(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Quadrature of a grid function: `sum_m w v(x_m)`.
    pub fn quadrature(&self, samples: &[f64]) -> f64 {
        self.weight * samples.iter().sum::<f64>()
    }

    /// `H`-orthogonal projection: `c_j = sum_m w samples_m e_j(x_m)`.
    pub fn project(&self, samples: &[f64]) -> Result<FieldCoeffs> {
        if samples.len() != self.m {
            return Err(Error::Shape {
                expected: self.m,
                got: samples.len(),
            });
        }
        let mut values = vec![0.0; self.n];
        for j in 0..self.n {
            let row = &self.table[j * self.m..(j + 1) * self.m];
            let mut acc = 0.0;
            for (e, v) in row.iter().zip(samples) {
                acc += e * v;
            }
            values[j] = acc * self.weight;
        }
        Ok(FieldCoeffs::from_vec(values))
    }

    /// Pointwise synthesis on the collocation grid.
    pub fn synth(&self, c: &FieldCoeffs) -> Vec<f64> {
        let k = c.len().min(self.n);
        let mut out = vec![0.0; self.m];
        for j in 0..k {
            let cj = c.values()[j];
            if cj == 0.0 {
                continue;
            }
            let row = &self.table[j * self.m..(j + 1) * self.m];
            for (o, e) in out.iter_mut().zip(row) {
                *o += cj * e;
            }
        }
        out
    }

    /// Galerkin coefficients of the nonlinearity:
    /// `N_k = (f1eps'(phi) + f2'(phi), e_k)` by collocation quadrature.
    pub fn nonlinear_term(
        &self,
        phi: &FieldCoeffs,
        p: &SplitPotential,
        y: &YosidaParams,
    ) -> Result<FieldCoeffs> {
        let v = self.synth(phi);
        let mut fv = vec![0.0; self.m];
        for (out, &val) in fv.iter_mut().zip(&v) {
            *out = p.yosida_prime(y, val)? + p.f2_prime(val);
        }
        self.project(&fv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues_on_pi_interval() {
        let b = SpectralBasis::build(core::f64::consts::PI, 4, 16).unwrap();
        let lam = b.lambda();
        assert_eq!(lam[0], 0.0);
        for (j, want) in [(1usize, 1.0), (2, 4.0), (3, 9.0)] {
            assert_relative_eq!(lam[j], want, epsilon = 1e-13);
        }
    }

    #[test]
    fn first_mode_is_constant() {
        let b = SpectralBasis::build(1.0, 2, 8).unwrap();
        let ones = FieldCoeffs::from_vec(alloc::vec![1.0, 0.0]);
        let v = b.synth(&ones);
        for x in v {
            assert_relative_eq!(x, 1.0, epsilon = 1e-14);
        }
        assert_relative_eq!(b.lambda()[1], core::f64::consts::PI.powi(2), epsilon = 1e-12);
    }

    #[test]
    fn discrete_orthonormality() {
        let b = SpectralBasis::build(core::f64::consts::PI, 8, 32).unwrap();
        for j in 0..8 {
            let mut cj = FieldCoeffs::zeros(8);
            cj.values_mut()[j] = 1.0;
            let c = b.project(&b.synth(&cj)).unwrap();
            for k in 0..8 {
                let want = if k == j { 1.0 } else { 0.0 };
                assert!(
                    crate::num::abs(c.values()[k] - want) <= 1e-12,
                    "({j},{k}): {}",
                    c.values()[k]
                );
            }
        }
    }

    #[test]
    fn projection_of_constant_and_zero() {
        let b = SpectralBasis::build(1.0, 6, 12).unwrap();
        let c = b.project(&alloc::vec![0.7; 12]).unwrap();
        assert_relative_eq!(c.values()[0], 0.7, epsilon = 1e-14);
        for k in 1..6 {
            assert!(crate::num::abs(c.values()[k]) < 1e-14);
        }
        let z = b.project(&alloc::vec![0.0; 12]).unwrap();
        assert_eq!(z.norm_h(), 0.0);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let b = SpectralBasis::build(1.0, 4, 8).unwrap();
        assert!(matches!(
            b.project(&alloc::vec![0.0; 7]),
            Err(Error::Shape { expected: 8, got: 7 })
        ));
        assert!(SpectralBasis::build(1.0, 4, 7).is_err());
        assert!(SpectralBasis::build(0.0, 4, 8).is_err());
    }

    #[test]
    fn nonlinear_term_of_constant_field() {
        let b = SpectralBasis::build(2.0, 5, 10).unwrap();
        let p = SplitPotential::regular();
        let y = YosidaParams::new(0.5).unwrap();
        let c = 0.3;
        let mut phi = FieldCoeffs::zeros(5);
        phi.values_mut()[0] = c * num::sqrt(2.0);
        let nl = b.nonlinear_term(&phi, &p, &y).unwrap();
        let want = (p.yosida_prime(&y, c).unwrap() + p.f2_prime(c)) * num::sqrt(2.0);
        assert_relative_eq!(nl.values()[0], want, epsilon = 1e-13);
        for k in 1..5 {
            assert!(crate::num::abs(nl.values()[k]) < 1e-13);
        }

        let zero = FieldCoeffs::zeros(5);
        let nz = b.nonlinear_term(&zero, &p, &y).unwrap();
        assert_eq!(nz.norm_h(), 0.0);
    }
}
