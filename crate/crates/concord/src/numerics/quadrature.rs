//! Composite Gauss-Legendre quadrature on finite intervals.
//!
//! Nodes and weights are found by Newton iteration on the Legendre
//! polynomials and cached per order. All integrands in this crate are
//! piecewise smooth with at most a handful of known kinks, so a fixed-order
//! composite rule with caller-supplied panel breaks is both simpler and more
//! predictable than adaptive quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use super::NumericsError;

/// Parameters of a composite Gauss-Legendre rule.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes per panel, at least 2.
    pub order: usize,
    /// Number of uniform panels the interval is split into, at least 1.
    pub panels: usize,
    /// Absolute tolerance the caller is targeting. Informational for the
    /// fixed rule; kept so callers can propagate it into error reports.
    pub abs_tol: f64,
}

impl QuadratureSpec {
    pub fn new(order: usize, panels: usize, abs_tol: f64) -> Result<Self, NumericsError> {
        if order < 2 {
            return Err(NumericsError::Domain(format!(
                "quadrature order must be at least 2, got {order}"
            )));
        }
        if panels < 1 {
            return Err(NumericsError::Domain(
                "quadrature needs at least one panel".into(),
            ));
        }
        if !(abs_tol >= 0.0) {
            return Err(NumericsError::Domain(format!(
                "quadrature abs_tol must be nonnegative, got {abs_tol}"
            )));
        }
        Ok(Self {
            order,
            panels,
            abs_tol,
        })
    }
}

impl Default for QuadratureSpec {
    /// 64 nodes on 8 uniform panels; exact to rounding for the piecewise
    /// polynomial copula integrands and far below 1e-10 for the smooth ones.
    fn default() -> Self {
        Self {
            order: 64,
            panels: 8,
            abs_tol: 1e-12,
        }
    }
}

/// Legendre polynomial P_n and its derivative at `x`, by the three-term
/// recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
fn compute_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th root, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

type Rule = Arc<(Vec<f64>, Vec<f64>)>;

static RULE_CACHE: LazyLock<Mutex<HashMap<usize, Rule>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

fn rule(order: usize) -> Rule {
    let mut cache = RULE_CACHE.lock().unwrap();
    cache
        .entry(order)
        .or_insert_with(|| Arc::new(compute_rule(order)))
        .clone()
}

/// Integrate `f` over `[a, b]` with the composite rule described by `spec`.
///
/// A non-finite integrand value aborts with an error naming the abscissa.
pub fn integrate<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    integrate_with_breaks(&mut f, a, b, &[], spec)
}

/// Like [`integrate`], but forces panel boundaries at the given interior
/// break points (kinks of the integrand). Breaks outside `(a, b)` are
/// ignored.
pub fn integrate_with_breaks<F>(
    f: &mut F,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    if !(a <= b) {
        return Err(NumericsError::Domain(format!(
            "invalid integration interval [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }

    let mut edges: Vec<f64> = (0..=spec.panels)
        .map(|i| a + (b - a) * i as f64 / spec.panels as f64)
        .collect();
    for &bp in breaks {
        if bp > a && bp < b {
            edges.push(bp);
        }
    }
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();

    let rule = rule(spec.order);
    let (nodes, weights) = (&rule.0, &rule.1);

    let mut total = 0.0;
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut panel = 0.0;
        for (&x, &w) in nodes.iter().zip(weights.iter()) {
            let t = mid + half * x;
            let y = f(t);
            if !y.is_finite() {
                return Err(NumericsError::NonFiniteEvaluation { at: t });
            }
            panel += w * y;
        }
        total += half * panel;
    }
    Ok(total)
}
