//! Scalar Casimir energy between two closely spaced concentric spheres and
//! half spheres, computed by direct mode summation.
//!
//! The crate is layered bottom-up:
//!
//! - [`special_fn`]: half-integer order Bessel functions (ordinary and
//!   exponentially scaled modified), small-argument Riemann zeta values and
//!   Hurwitz zeta at non-positive integers.
//! - [`quadrature`]: adaptive Gauss-Kronrod integration used by the
//!   regularization machinery.
//! - [`spectrum`]: the Dirichlet frequency equation of the spherical annulus,
//!   its roots and the evenly spaced large-frequency spectrum.
//! - [`asymptotics`]: the modified-Bessel cross product, its log-derivative,
//!   the small-gap series and the parity evidence that the high-order
//!   contribution has no real part.
//! - [`regularization`]: Abel-Plana engines and the branch-cut integral whose
//!   angular-momentum sum gives the finite energy.
//! - [`energy`]: closed-form and numeric energies, per-area values, the
//!   parallel-plate limit and the force on the gap.
//!
//! Units follow `ħ = c = 1`: lengths are in an arbitrary unit and energies
//! come out in inverse length units.

// Reference constants are quoted to the digits of their source.
#![allow(clippy::excessive_precision)]

pub mod asymptotics;
pub mod energy;
mod error;
pub mod quadrature;
pub mod regularization;
pub mod special_fn;
pub mod spectrum;

pub use error::{Error, Result};
pub use spectrum::Geometry;
