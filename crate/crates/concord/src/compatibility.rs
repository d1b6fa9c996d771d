//! Compatibility of pairwise-concordance matrices: membership in the
//! elliptope (correlation matrices) and in the cut polytope (correlation
//! matrices of symmetric Bernoulli vectors), with constructive certificates,
//! plus the classification those two bounds induce for degree-one measures.

use thiserror::Error;

use crate::concordance::{estimate, ConcordanceError, MeasureSpec};
use crate::copulas::{pseudo_observations, BVector, Copula, CopulaError};
use crate::numerics::{
    min_eigenvalue, solve_feasibility, Feasibility, LpFeasibilityProblem, NumericsError,
    RandomSource,
};
use rand::Rng;

#[derive(Debug, Error)]
pub enum CompatibilityError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("capacity error: {0}")]
    Capacity(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Concordance(#[from] ConcordanceError),
}

/// Default boundary band for membership verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A candidate matrix of pairwise concordance values: symmetric, unit
/// diagonal, off-diagonal entries in [-1, 1].
#[derive(Clone, Debug, PartialEq)]
pub struct KappaMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl KappaMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self, CompatibilityError> {
        if dim < 2 {
            return Err(CompatibilityError::Domain(
                "a kappa-matrix needs dimension at least 2".into(),
            ));
        }
        if data.len() != dim * dim {
            return Err(CompatibilityError::Domain(format!(
                "matrix buffer of length {} does not hold a {dim}x{dim} matrix",
                data.len()
            )));
        }
        for i in 0..dim {
            let d = data[i * dim + i];
            if (d - 1.0).abs() > 1e-12 {
                return Err(CompatibilityError::Domain(format!(
                    "diagonal entry ({i},{i}) must be 1 within 1e-12, got {d}"
                )));
            }
            for j in 0..dim {
                let v = data[i * dim + j];
                if !v.is_finite() {
                    return Err(CompatibilityError::Domain(
                        "matrix entries must be finite".into(),
                    ));
                }
                if i != j && !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&v) {
                    return Err(CompatibilityError::Domain(format!(
                        "off-diagonal entry ({i},{j}) must lie in [-1, 1], got {v}"
                    )));
                }
                if (v - data[j * dim + i]).abs() > 1e-12 {
                    return Err(CompatibilityError::Domain(format!(
                        "matrix is not symmetric at ({i},{j})"
                    )));
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn equicorrelation(dim: usize, rho: f64) -> Result<Self, CompatibilityError> {
        let mut data = vec![rho; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Upper triangle (i < j) in row-major order.
    fn upper_triangle(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim * (self.dim - 1) / 2);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

/// Elliptope membership verdict; the smallest eigenvalue is the witness.
#[derive(Clone, Debug, PartialEq)]
pub enum EllipticVerdict {
    Member { min_eigenvalue: f64 },
    NonMember { min_eigenvalue: f64 },
    Boundary { min_eigenvalue: f64 },
}

impl EllipticVerdict {
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            EllipticVerdict::Member { min_eigenvalue }
            | EllipticVerdict::NonMember { min_eigenvalue }
            | EllipticVerdict::Boundary { min_eigenvalue } => *min_eigenvalue,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, EllipticVerdict::Member { .. })
    }
}

/// Convex weights over the canonical b-vectors certifying cut-polytope
/// membership.
#[derive(Clone, Debug)]
pub struct CutCertificate {
    pub weights: Vec<(BVector, f64)>,
}

impl CutCertificate {
    /// Reconstruct sum w_b P^(b) and report the max-norm deviation from `p`.
    pub fn residual(&self, p: &KappaMatrix) -> f64 {
        let d = p.dim();
        let mut acc = vec![0.0f64; d * d];
        for (b, w) in &self.weights {
            for (slot, v) in acc.iter_mut().zip(b.sign_matrix()) {
                *slot += w * v;
            }
        }
        acc.iter()
            .zip(p.entries())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub enum CutVerdict {
    Member(CutCertificate),
    NonMember,
    /// Feasible only inside the 10x-relaxed tolerance band.
    Boundary,
}

impl CutVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, CutVerdict::Member(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GammaClass {
    Compatible,
    Incompatible,
    Indeterminate,
}

/// Joint classification of a candidate matrix against both bounds.
#[derive(Clone, Debug)]
pub struct CompatibilityVerdict {
    pub elliptope: EllipticVerdict,
    pub cut_polytope: CutVerdict,
    pub gamma_class: GammaClass,
    /// Context for indeterminate verdicts: the two bounds do not decide.
    pub note: Option<String>,
}

/// Membership in the elliptope: smallest eigenvalue at least `tol` is
/// Member, inside (-tol, tol) is Boundary, below is NonMember.
pub fn in_elliptope(p: &KappaMatrix, tol: f64) -> Result<EllipticVerdict, CompatibilityError> {
    if !(tol > 0.0) {
        return Err(CompatibilityError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let lambda = min_eigenvalue(p.entries(), p.dim())?;
    Ok(if lambda >= tol {
        EllipticVerdict::Member {
            min_eigenvalue: lambda,
        }
    } else if lambda > -tol {
        EllipticVerdict::Boundary {
            min_eigenvalue: lambda,
        }
    } else {
        EllipticVerdict::NonMember {
            min_eigenvalue: lambda,
        }
    })
}

const MAX_CUT_DIM: usize = 16;

/// Membership in the cut polytope by linear feasibility over the 2^(d-1)
/// sign-matrix vertices, with the convex certificate returned on success.
pub fn in_cut_polytope(p: &KappaMatrix, tol: f64) -> Result<CutVerdict, CompatibilityError> {
    if !(tol > 0.0) {
        return Err(CompatibilityError::Domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let d = p.dim();
    if d > MAX_CUT_DIM {
        return Err(CompatibilityError::Capacity(format!(
            "cut-polytope membership enumerates 2^(d-1) vertices; d = {d} exceeds the d <= {MAX_CUT_DIM} cap"
        )));
    }

    let vertices = BVector::enumerate(d);
    let columns: Vec<Vec<f64>> = vertices
        .iter()
        .map(|b| {
            let m = b.sign_matrix();
            let mut col = Vec::with_capacity(d * (d - 1) / 2);
            for i in 0..d {
                for j in (i + 1)..d {
                    col.push(m[i * d + j]);
                }
            }
            col
        })
        .collect();
    let problem = LpFeasibilityProblem::new(columns, p.upper_triangle())?;

    match solve_feasibility(&problem, tol)? {
        Feasibility::Feasible(w) => {
            let weights: Vec<(BVector, f64)> = vertices
                .into_iter()
                .zip(w)
                .filter(|(_, wi)| *wi > 0.0)
                .collect();
            let certificate = CutCertificate { weights };
            debug_assert!(certificate.residual(p) <= 10.0 * tol);
            Ok(CutVerdict::Member(certificate))
        }
        Feasibility::Infeasible { violation } => {
            if violation <= 10.0 * tol {
                Ok(CutVerdict::Boundary)
            } else {
                Ok(CutVerdict::NonMember)
            }
        }
    }
}

/// Classify a candidate matrix for a generalized Gini's gamma (or any
/// degree-one measure): realizable matrices contain the cut polytope and are
/// contained in the elliptope, so cut membership certifies compatibility,
/// elliptope exclusion certifies incompatibility, and the strip between the
/// two bounds stays undecided.
pub fn classify_gamma_matrix(p: &KappaMatrix) -> Result<CompatibilityVerdict, CompatibilityError> {
    let elliptope = in_elliptope(p, DEFAULT_TOL)?;
    let cut_polytope = in_cut_polytope(p, DEFAULT_TOL)?;
    let gamma_class = if cut_polytope.is_member() {
        GammaClass::Compatible
    } else if matches!(elliptope, EllipticVerdict::NonMember { .. }) {
        GammaClass::Incompatible
    } else {
        GammaClass::Indeterminate
    };
    let note = match gamma_class {
        GammaClass::Indeterminate => Some(
            "between the cut-polytope and elliptope bounds; the bounds are not tight, so \
             matrices here may still be realizable (do not read this as incompatible)"
                .to_string(),
        ),
        _ => None,
    };
    Ok(CompatibilityVerdict {
        elliptope,
        cut_polytope,
        gamma_class,
        note,
    })
}

/// Matrix of plug-in estimates with matching standard errors.
#[derive(Clone, Debug)]
pub struct EstimatedKappaMatrix {
    pub dim: usize,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
}

impl EstimatedKappaMatrix {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn std_error(&self, i: usize, j: usize) -> f64 {
        self.std_errors[i * self.dim + j]
    }
}

/// Sample the witness mixture copula attached to certificate weights and
/// estimate every pairwise measure. For any degree-one measure the
/// population matrix is exactly the weighted sum of vertex sign matrices, so
/// this is the constructive side of a cut-polytope certificate.
pub fn witness_matrix_roundtrip(
    weights: &[(BVector, f64)],
    spec: &MeasureSpec,
    n: usize,
    source: &RandomSource,
) -> Result<EstimatedKappaMatrix, CompatibilityError> {
    if weights.is_empty() {
        return Err(CompatibilityError::Domain(
            "witness mixture needs at least one component".into(),
        ));
    }
    let d = weights[0].0.dim();
    if weights.iter().any(|(b, _)| b.dim() != d) {
        return Err(CompatibilityError::Domain(
            "witness components must share the dimension".into(),
        ));
    }
    let total: f64 = weights.iter().map(|(_, w)| *w).sum();
    if weights.iter().any(|(_, w)| *w < 0.0) || (total - 1.0).abs() > 1e-9 {
        return Err(CompatibilityError::Domain(
            "witness weights must be a probability vector".into(),
        ));
    }
    if n < 10 {
        return Err(CompatibilityError::Domain(
            "witness round-trip needs at least 10 samples".into(),
        ));
    }

    // Draw the mixture: categorical component pick, then the shared uniform
    // down each component's sign pattern.
    let mut rng = source.rng();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut pick: f64 = rng.random::<f64>() * total;
        let mut chosen = &weights[weights.len() - 1].0;
        for (b, w) in weights {
            if pick < *w {
                chosen = b;
                break;
            }
            pick -= w;
        }
        let u = crate::numerics::uniform_open01(&mut rng);
        rows.push(
            chosen
                .bits()
                .iter()
                .map(|&bit| if bit { u } else { 1.0 - u })
                .collect(),
        );
    }

    let mut values = vec![1.0; d * d];
    let mut std_errors = vec![0.0; d * d];
    for i in 0..d {
        for j in (i + 1)..d {
            let pair: Vec<(f64, f64)> = rows.iter().map(|r| (r[i], r[j])).collect();
            let emp = match pseudo_observations(&pair)? {
                Copula::Empirical(e) => e,
                _ => unreachable!(),
            };
            let est = estimate(&emp, spec)?;
            values[i * d + j] = est.value;
            values[j * d + i] = est.value;
            let se = est.std_error.unwrap_or(0.0);
            std_errors[i * d + j] = se;
            std_errors[j * d + i] = se;
        }
    }
    Ok(EstimatedKappaMatrix {
        dim: d,
        values,
        std_errors,
    })
}

/// Smallest equicorrelation parameter admitted by each bound: the elliptope
/// threshold is the analytic -1/(d-1); the cut-polytope threshold is located
/// by bisection over the membership LP (d <= 16).
pub fn equicorrelation_thresholds(d: usize) -> Result<(f64, Option<f64>), CompatibilityError> {
    if d < 2 {
        return Err(CompatibilityError::Domain(
            "equicorrelation thresholds need dimension at least 2".into(),
        ));
    }
    let elliptope_min = -1.0 / (d as f64 - 1.0);
    if d > MAX_CUT_DIM {
        return Ok((elliptope_min, None));
    }

    // P(1) = M-vertex is always a member; P(-1) only for d = 2. Bisect on
    // the membership boundary.
    let member_at = |rho: f64| -> Result<bool, CompatibilityError> {
        let p = KappaMatrix::equicorrelation(d, rho)?;
        Ok(in_cut_polytope(&p, DEFAULT_TOL)?.is_member())
    };
    if member_at(-1.0)? {
        return Ok((elliptope_min, Some(-1.0)));
    }
    let mut lo = -1.0; // not a member
    let mut hi = 0.0; // member (the zero matrix is the uniform vertex mixture)
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if member_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((elliptope_min, Some(0.5 * (lo + hi))))
}
