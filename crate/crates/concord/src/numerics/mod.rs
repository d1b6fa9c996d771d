//! Self-contained numerical kernels: composite Gauss-Legendre quadrature,
//! normal distribution functions, a symmetric eigenvalue bound, a dense
//! feasibility simplex, and seeded randomness.

mod eigen;
mod normal;
mod quadrature;
mod random;
mod simplex;

pub use eigen::min_eigenvalue;
pub use normal::{bivariate_normal_cdf, standard_normal_cdf, standard_normal_quantile};
pub use quadrature::{integrate, integrate_with_breaks, QuadratureSpec};
pub use random::{standard_normal, uniform_open01, RandomSource};
pub use simplex::{certificate_violation, solve_feasibility, Feasibility, LpFeasibilityProblem};

use thiserror::Error;

/// Errors from the numerical kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    /// Input outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An integrand produced a non-finite value.
    #[error("integrand evaluated to a non-finite value at {at}")]
    NonFiniteEvaluation { at: f64 },
    /// An iteration failed to converge or lost its invariants.
    #[error("numerical failure: {0}")]
    Numerical(String),
}
