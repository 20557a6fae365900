//! Meso-scale asymptotic approximations for time-harmonic vibrations of
//! elastic membranes containing clusters of small inertial inclusions.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: integer-order Bessel functions `J_n`, `Y_n` and the Hankel
//!   function `H^(1)_n` for real arguments.
//! - [`greens`]: free-space and disk Green's functions (Helmholtz and Laplace)
//!   together with their regular parts.
//! - [`cluster`]: inclusion geometry and single-inclusion scattering strengths.
//! - [`linalg`]: dense solves and sign/log determinants.
//! - [`scatter`]: the coefficient system for point-source scattering by a
//!   cluster and the resulting approximate total field.
//! - [`interface`]: the homogenised inertial interface on the unit circle,
//!   solved by cylindrical mode matching.
//! - [`quasistatic`]: low-frequency two-term approximation built on the
//!   capacitary potential of a driven inclusion.
//! - [`eigen`]: first-eigenvalue approximation for a disk with a cluster of
//!   inclusions via a determinant equation.
//! - [`oracle`]: independent brute-force references (finite differences,
//!   boundary collocation, arbitrary-precision Bessel series).
//!
//! Data-parallel loops go through [`exec::Exec`]; with the `parallel`
//! feature disabled every loop runs sequentially with identical results.

#![warn(clippy::all)]
#![allow(clippy::too_many_arguments)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod greens;
pub mod interface;
pub mod linalg;
pub mod oracle;
pub mod quasistatic;
pub mod scatter;
pub mod specfun;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geometry::Point;
pub use num_complex::Complex64;
