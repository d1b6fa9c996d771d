//! # concord
//!
//! Measures of concordance of degree one for bivariate copulas — Spearman's
//! rho, Blomqvist's beta and its generalized form, Gini's gamma and its
//! nu-mixture generalization, and arbitrary transformed rank correlations —
//! together with compatibility tests that decide whether a candidate matrix
//! of pairwise concordance values is realizable, via elliptope and
//! cut-polytope membership with constructive certificates.
//!
//! The crate is organized around five subsystems:
//!
//! * [`numerics`] — quadrature, normal CDFs, eigenvalue bounds, a
//!   feasibility simplex, and seeded randomness;
//! * [`copulas`] — parametric and empirical bivariate copulas, sampling,
//!   pseudo-observations, and cut-polytope witness components;
//! * [`distributions`] — concordance-inducing distributions and the
//!   decision procedure for transform pairs;
//! * [`concordance`] — the measures themselves, by closed form, quadrature,
//!   Monte Carlo, and plug-in estimation;
//! * [`compatibility`] — membership tests, classification, witness
//!   round-trips, and equicorrelation thresholds.
//!
//! [`io`] holds the file-format and spec-string parsers shared by the CLI
//! and the fuzz targets.

// Negated comparisons like `!(tol > 0.0)` are used throughout to reject NaN
// along with the out-of-range values; the un-negated forms let NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compatibility;
pub mod concordance;
pub mod copulas;
pub mod distributions;
pub mod io;
pub mod numerics;

pub use compatibility::{
    classify_gamma_matrix, equicorrelation_thresholds, in_cut_polytope, in_elliptope,
    witness_matrix_roundtrip, CompatibilityVerdict, CutCertificate, CutVerdict, EllipticVerdict,
    GammaClass, KappaMatrix,
};
pub use concordance::{
    beta_p, estimate, gaussian_gini_closed_form, generalized_gini_gamma, gini_gamma,
    g_transformed_rho, g_transformed_rho_monte_carlo, measure_value, Estimate, MeasureSpec,
    Method, NuMeasure,
};
pub use copulas::{pseudo_observations, witness_component_sample, BVector, Copula, EmpiricalCopula};
pub use distributions::{
    check_transform_pair, validate, ConcordanceInducing, StepQuantile, TransformPair,
    TransformVerdict,
};
pub use numerics::{QuadratureSpec, RandomSource};
