//! Small independent reference implementations used by the verification
//! suites: a bisection root finder and a fixed-step RK4 integrator for the
//! spatially homogeneous (single-mode) reduction of the system. These stay
//! deliberately separate from the production solvers so tests can compare
//! two routes to the same quantity.

use crate::error::{Error, Result};
use crate::num;
use crate::potentials::{SplitPotential, YosidaParams};

/// Plain bisection on a sign change; returns the midpoint once the bracket
/// is narrower than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::Domain("bisection bracket does not change sign".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if flo * fm < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// State of the homogeneous reduction in physical values:
/// `mu` (chemical potential), `nu = d_t mu`, `phi` (order parameter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarState {
    pub mu: f64,
    pub nu: f64,
    pub phi: f64,
}

/// Classical fixed-step RK4 on the spatially homogeneous system
///
/// ```text
///   alpha nu' = -phi',  mu' = nu,  tau phi' = mu + g(t) - f'(phi),
/// ```
///
/// i.e. the mode-1 dynamics written in physical values. Used as the
/// independent oracle for the time steppers.
pub fn rk4_homogeneous<G: Fn(f64) -> f64>(
    p: &SplitPotential,
    y: &YosidaParams,
    alpha: f64,
    tau: f64,
    g: G,
    start: ScalarState,
    t_end: f64,
    dt: f64,
) -> Result<ScalarState> {
    let rhs = |t: f64, s: ScalarState| -> Result<(f64, f64, f64)> {
        let fprime = p.yosida_prime(y, s.phi)? + p.f2_prime(s.phi);
        let dphi = (s.mu + g(t) - fprime) / tau;
        Ok((s.nu, -dphi / alpha, dphi))
    };
    let steps = (num::round(t_end / dt) as usize).max(1);
    let h = t_end / steps as f64;
    let mut s = start;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = rhs(t, s)?;
        let at = |k: (f64, f64, f64), w: f64| ScalarState {
            mu: s.mu + w * h * k.0,
            nu: s.nu + w * h * k.1,
            phi: s.phi + w * h * k.2,
        };
        let k2 = rhs(t + 0.5 * h, at(k1, 0.5))?;
        let k3 = rhs(t + 0.5 * h, at(k2, 0.5))?;
        let k4 = rhs(t + h, at(k3, 1.0))?;
        s.mu += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        s.nu += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        s.phi += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bisect_finds_cube_root() {
        let r = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, libm::cbrt(2.0), epsilon = 1e-12);
    }

    #[test]
    fn rk4_converges_on_linear_problem() {
        // with f' = 0 and g = 0 the system is linear; mu(t) solves
        // alpha mu'' + mu'/tau ... compare against a much finer run
        let p = SplitPotential::regular();
        let y = YosidaParams::new(0.5).unwrap();
        let s0 = ScalarState { mu: 0.5, nu: 0.0, phi: 0.1 };
        let coarse = rk4_homogeneous(&p, &y, 0.5, 1.0, |_| 0.0, s0, 0.5, 1e-2).unwrap();
        let fine = rk4_homogeneous(&p, &y, 0.5, 1.0, |_| 0.0, s0, 0.5, 1e-4).unwrap();
        assert_relative_eq!(coarse.phi, fine.phi, epsilon = 1e-7);
        assert_relative_eq!(coarse.mu, fine.mu, epsilon = 1e-7);
    }
}
