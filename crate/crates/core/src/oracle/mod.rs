//! Independent brute-force references used to validate the asymptotic models.
//!
//! None of these call into the model code they check; the collocation solver
//! shares only the special functions, which have their own arbitrary-precision
//! reference in [`highprec`].

pub mod collocation;
pub mod fd;
pub mod highprec;

pub use collocation::{collocation_betas, collocation_solve, CollocationResult};
pub use fd::{fd_first_eigenpair, fd_first_eigenvalue, FdEigen, FdGrid, NodeKind};
pub use highprec::{highprec_bessel, highprec_bessel_y, highprec_j_f64, highprec_y_f64};
