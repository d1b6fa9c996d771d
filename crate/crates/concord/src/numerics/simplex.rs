//! Dense two-phase simplex restricted to convex-combination feasibility:
//! find w >= 0 with columns * w = rhs and sum(w) = 1.
//!
//! Phase one minimizes the total artificial infeasibility with Bland's rule
//! (lowest-index entering and leaving candidates), which rules out cycling;
//! phase two is vacuous for a pure feasibility problem, so the solver stops
//! once the artificials are driven out. Every certificate is re-substituted
//! against the caller's tolerance before it is returned.

use super::NumericsError;

/// Convex-combination feasibility problem: does `rhs` lie in the convex hull
/// of `columns`?
#[derive(Clone, Debug)]
pub struct LpFeasibilityProblem {
    /// k columns, each of length m.
    pub columns: Vec<Vec<f64>>,
    /// Right-hand side of length m.
    pub rhs: Vec<f64>,
}

impl LpFeasibilityProblem {
    pub fn new(columns: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self, NumericsError> {
        if columns.is_empty() {
            return Err(NumericsError::Domain(
                "feasibility problem needs at least one column".into(),
            ));
        }
        if rhs.is_empty() {
            return Err(NumericsError::Domain(
                "feasibility problem needs at least one constraint row".into(),
            ));
        }
        if !rhs.iter().all(|v| v.is_finite()) {
            return Err(NumericsError::Domain("rhs entries must be finite".into()));
        }
        for (idx, col) in columns.iter().enumerate() {
            if col.len() != rhs.len() {
                return Err(NumericsError::Domain(format!(
                    "column {idx} has length {} but rhs has length {}",
                    col.len(),
                    rhs.len()
                )));
            }
            if !col.iter().all(|v| v.is_finite()) {
                return Err(NumericsError::Domain(format!(
                    "column {idx} has non-finite entries"
                )));
            }
        }
        Ok(Self { columns, rhs })
    }

    fn num_cols(&self) -> usize {
        self.columns.len()
    }

    fn num_rows(&self) -> usize {
        self.rhs.len()
    }
}

/// Outcome of [`solve_feasibility`].
#[derive(Clone, Debug)]
pub enum Feasibility {
    /// Convex weights satisfying the problem within the requested tolerance.
    Feasible(Vec<f64>),
    /// No convex combination reaches `rhs`; `violation` is the max-norm
    /// residual of the best point found by phase one.
    Infeasible { violation: f64 },
}

/// Max-norm violation of the full constraint system (including sum w = 1
/// and w >= 0) at the candidate weights.
pub fn certificate_violation(problem: &LpFeasibilityProblem, weights: &[f64]) -> f64 {
    let m = problem.num_rows();
    let mut worst = 0.0f64;
    for r in 0..m {
        let mut acc = 0.0;
        for (col, &w) in problem.columns.iter().zip(weights) {
            acc += col[r] * w;
        }
        worst = worst.max((acc - problem.rhs[r]).abs());
    }
    let total: f64 = weights.iter().sum();
    worst = worst.max((total - 1.0).abs());
    for &w in weights {
        worst = worst.max(-w);
    }
    worst
}

/// Decide whether `rhs` is a convex combination of the columns.
///
/// On success the returned weights satisfy `w_i >= -tol`, `|sum w - 1| <= tol`
/// and `||columns * w - rhs||_inf <= tol`; this is checked by re-substitution
/// before returning.
pub fn solve_feasibility(
    problem: &LpFeasibilityProblem,
    tol: f64,
) -> Result<Feasibility, NumericsError> {
    if !(tol > 0.0) {
        return Err(NumericsError::Domain(format!(
            "feasibility tolerance must be positive, got {tol}"
        )));
    }

    let k = problem.num_cols();
    let m = problem.num_rows() + 1; // + convexity row
    let total = k + m; // decision variables then artificials

    // Tableau rows: m constraint rows + objective row; columns: variables,
    // artificials, rhs.
    let width = total + 1;
    let mut t = vec![0.0f64; (m + 1) * width];

    // Fill constraint rows, flipping signs so every rhs is nonnegative and
    // the artificial basis starts feasible.
    for r in 0..m {
        let (row_rhs, flip) = if r < m - 1 {
            let v = problem.rhs[r];
            (v.abs(), v < 0.0)
        } else {
            (1.0, false)
        };
        let sign = if flip { -1.0 } else { 1.0 };
        for c in 0..k {
            let coeff = if r < m - 1 { problem.columns[c][r] } else { 1.0 };
            t[r * width + c] = sign * coeff;
        }
        t[r * width + k + r] = 1.0;
        t[r * width + total] = row_rhs;
    }

    // Phase-one objective: minimize the sum of artificials. Express reduced
    // costs by subtracting each constraint row from the objective row.
    for r in 0..m {
        for c in 0..width {
            t[m * width + c] -= t[r * width + c];
        }
    }

    let mut basis: Vec<usize> = (k..total).collect();
    let pivot_eps = 1e-11;

    let max_iters = 50 * (m + k).max(64);
    for _ in 0..max_iters {
        // Bland: first column with a negative reduced cost.
        let mut entering = None;
        for c in 0..total {
            if t[m * width + c] < -pivot_eps {
                entering = Some(c);
                break;
            }
        }
        let Some(entering) = entering else { break };

        // Ratio test; ties broken by smallest basis variable index (Bland).
        let mut leaving: Option<(usize, f64)> = None;
        for r in 0..m {
            let a = t[r * width + entering];
            if a > pivot_eps {
                let ratio = t[r * width + total] / a;
                let better = match leaving {
                    None => true,
                    Some((lr, lv)) => {
                        ratio < lv - 1e-15 || (ratio <= lv + 1e-15 && basis[r] < basis[lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
        }
        let Some((pivot_row, _)) = leaving else {
            // Unbounded phase-one objective cannot happen (bounded below by
            // zero); treat as numerical failure.
            return Err(NumericsError::Numerical(
                "feasibility simplex lost boundedness".into(),
            ));
        };

        pivot(&mut t, width, m + 1, pivot_row, entering);
        basis[pivot_row] = entering;
    }

    // Extract the phase-one solution.
    let mut w = vec![0.0f64; k];
    for (r, &b) in basis.iter().enumerate() {
        if b < k {
            w[b] = t[r * width + total];
        }
    }
    // Clean tiny negative noise on basic variables.
    for v in &mut w {
        if *v < 0.0 && *v > -pivot_eps {
            *v = 0.0;
        }
    }

    let violation = certificate_violation(problem, &w);
    if violation <= tol {
        Ok(Feasibility::Feasible(w))
    } else {
        Ok(Feasibility::Infeasible { violation })
    }
}

fn pivot(t: &mut [f64], width: usize, rows: usize, pr: usize, pc: usize) {
    let p = t[pr * width + pc];
    let inv = 1.0 / p;
    for c in 0..width {
        t[pr * width + c] *= inv;
    }
    t[pr * width + pc] = 1.0;
    for r in 0..rows {
        if r == pr {
            continue;
        }
        let factor = t[r * width + pc];
        if factor == 0.0 {
            continue;
        }
        for c in 0..width {
            t[r * width + c] -= factor * t[pr * width + c];
        }
        t[r * width + pc] = 0.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    const TOL: f64 = 1e-9;

    #[test]
    fn single_matching_column() {
        let p = LpFeasibilityProblem::new(vec![vec![1.0, 2.0]], vec![1.0, 2.0]).unwrap();
        match solve_feasibility(&p, TOL).unwrap() {
            Feasibility::Feasible(w) => {
                assert_eq!(w.len(), 1);
                assert!((w[0] - 1.0).abs() < TOL);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn midpoint_of_two_columns() {
        let p =
            LpFeasibilityProblem::new(vec![vec![0.0, 1.0], vec![2.0, 3.0]], vec![1.0, 2.0]).unwrap();
        match solve_feasibility(&p, TOL).unwrap() {
            Feasibility::Feasible(w) => {
                assert!(certificate_violation(&p, &w) <= TOL);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
    }

    #[test]
    fn point_outside_hull_is_infeasible() {
        let p = LpFeasibilityProblem::new(vec![vec![0.0], vec![1.0]], vec![2.0]).unwrap();
        match solve_feasibility(&p, TOL).unwrap() {
            Feasibility::Infeasible { violation } => assert!(violation > 0.5),
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn dimension_mismatch_is_domain_error() {
        assert!(LpFeasibilityProblem::new(vec![vec![1.0, 2.0], vec![1.0]], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn random_hull_points_get_valid_certificates() {
        let mut rng = crate::numerics::RandomSource::new(99).rng();
        for trial in 0..100 {
            let m = 2 + (rng.random::<u32>() % 3) as usize;
            let k = 2 + (rng.random::<u32>() % 6) as usize;
            let columns: Vec<Vec<f64>> = (0..k)
                .map(|_| (0..m).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect())
                .collect();
            // Random convex combination with Dirichlet-ish weights.
            let raw: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
            let total: f64 = raw.iter().sum();
            let target: Vec<f64> = (0..m)
                .map(|r| {
                    columns
                        .iter()
                        .zip(&raw)
                        .map(|(col, w)| col[r] * w / total)
                        .sum()
                })
                .collect();
            let p = LpFeasibilityProblem::new(columns, target).unwrap();
            match solve_feasibility(&p, TOL).unwrap() {
                Feasibility::Feasible(w) => {
                    assert!(
                        certificate_violation(&p, &w) <= TOL,
                        "trial {trial}: certificate violates tolerance"
                    );
                }
                other => panic!("trial {trial}: expected feasible, got {other:?}"),
            }
        }
    }
}
