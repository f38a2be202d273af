//! Spectral-Galerkin solvers and verification diagnostics for the viscous
//! Cahn-Hilliard system with a hyperbolic relaxation term:
//!
//! ```text
//!     alpha d_tt(mu) + d_t(phi) - Lap(mu) = 0
//!     tau d_t(phi) - Lap(phi) + f'(phi)   = mu + g
//! ```
//!
//! on an interval with homogeneous Neumann conditions, where the double-well
//! potential splits as `f = f1 + f2` with convex `f1` (possibly nonsmooth)
//! and smooth concave `f2`. The nonsmooth part is handled through its
//! Moreau-Yosida regularization, and space is discretized in the Neumann
//! cosine eigenbasis, so the solvers integrate the modal ODE system exactly
//! as written down by the Faedo-Galerkin construction.
//!
//! The crate is organized around the approximation pipeline:
//!
//! * [`potentials`] - the three canonical split potentials (regular quartic,
//!   logarithmic, double obstacle), their resolvents `(I + eps df1)^{-1}`,
//!   and property checks for the regularization.
//! * [`spectral`] - eigenbasis, collocation grid, projection and synthesis,
//!   and the Galerkin coefficients of the nonlinear term.
//! * [`galerkin`] - the relaxed system integrated by a conservative IMEX
//!   midpoint scheme (`alpha` in `(0, 1]`).
//! * [`vch`] - the `alpha = 0` viscous Cahn-Hilliard limit system in the
//!   same basis, used as the reference for the `alpha` sweep.
//! * [`diagnostics`] - energy/mass identities, separation bounds and the
//!   norm bundles behind the continuous-dependence estimates.
//! * [`experiments`] - multi-run rate studies (alpha sweep, continuous
//!   dependence, epsilon sweep, mode refinement) with log-log fits.
//! * [`reference`] - small independent oracles (bisection, scalar RK4)
//!   used by the test suites.
//!
//! The crate is `no_std` (with `alloc`); all floating-point transcendentals
//! go through `libm` so results are bit-reproducible across hosts.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub(crate) mod num;

pub mod diagnostics;
pub mod experiments;
pub mod fit;
pub mod galerkin;
pub mod potentials;
pub mod reference;
pub mod spectral;
pub mod vch;

pub use error::{Error, Result};
pub use potentials::{PotentialKind, SplitPotential, YosidaParams};
pub use spectral::{FieldCoeffs, SpectralBasis};
