//! Concordance-inducing distributions and the decision procedure that tells
//! whether a pair of rank transforms defines a measure of concordance.
//!
//! A distribution qualifies when it is nondegenerate, symmetric about its
//! mean, and has a finite second moment; correlations of its quantile
//! transform of ranks then satisfy the concordance axioms. Tabulated
//! quantiles use left-continuous step interpolation between grid nodes, so
//! a table is exactly the quantile function of a discrete distribution.

use thiserror::Error;

use crate::numerics::{standard_normal_cdf, standard_normal_quantile};

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate transform: {0}")]
    DegenerateTransform(String),
}

/// Left-continuous step quantile: value `values[i]` on `(probs[i-1], probs[i]]`
/// (with `probs[-1] = 0`), extended by its end values outside the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StepQuantile {
    probs: Vec<f64>,
    values: Vec<f64>,
}

impl StepQuantile {
    pub fn new(probs: Vec<f64>, values: Vec<f64>) -> Result<Self, DistributionError> {
        if probs.len() != values.len() || probs.is_empty() {
            return Err(DistributionError::Domain(
                "quantile table needs matching, nonempty probability and value columns".into(),
            ));
        }
        for pair in probs.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(DistributionError::Domain(format!(
                    "probability nodes must be strictly increasing, got {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        if !(probs[0] > 0.0 && *probs.last().unwrap() <= 1.0) {
            return Err(DistributionError::Domain(
                "probability nodes must lie in (0, 1]".into(),
            ));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(DistributionError::Domain(
                "quantile values must be finite".into(),
            ));
        }
        for pair in values.windows(2) {
            if pair[0] > pair[1] {
                return Err(DistributionError::Domain(
                    "quantile values must be nondecreasing".into(),
                ));
            }
        }
        Ok(Self { probs, values })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn quantile(&self, u: f64) -> f64 {
        // First node whose probability covers u.
        match self
            .probs
            .binary_search_by(|p| p.partial_cmp(&u).expect("finite"))
        {
            Ok(i) => self.values[i],
            Err(i) if i < self.values.len() => self.values[i],
            Err(_) => *self.values.last().unwrap(),
        }
    }

    /// Distinct atoms with their masses; mass comes from the probability
    /// gaps, with the tail beyond the last node folded into the top atom.
    fn atoms(&self) -> Vec<(f64, f64)> {
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut prev_p = 0.0;
        for (&p, &v) in self.probs.iter().zip(&self.values) {
            let mass = p - prev_p;
            prev_p = p;
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += mass,
                _ => out.push((v, mass)),
            }
        }
        let tail = 1.0 - prev_p;
        if tail > 0.0 {
            out.last_mut().expect("nonempty").1 += tail;
        }
        out
    }
}

/// A concordance-inducing distribution, given by its quantile function.
#[derive(Clone, Debug, PartialEq)]
pub enum ConcordanceInducing {
    /// Standard uniform; induces Spearman's rho.
    Uniform01,
    /// Standard normal; induces the normal-scores rank correlation.
    StandardGaussian,
    /// Three-point distribution on {-1, 0, 1} with P(-1) = P(1) = p.
    /// At p = 1/2 the middle atom vanishes and this is the symmetric
    /// Bernoulli that induces Blomqvist's beta.
    ThreePoint { p: f64 },
    /// Arbitrary tabulated step quantile.
    Tabulated(StepQuantile),
}

/// Violations reported by [`validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum GViolation {
    /// Quantile is constant on (0, 1).
    Degenerate,
    /// Quantile fails G^-(u) + G^-(1-u) = 2 mean at some continuity point.
    Asymmetric { at: f64, deviation: f64 },
    /// Second moment is not finite.
    InfiniteSecondMoment,
}

impl ConcordanceInducing {
    pub fn three_point(p: f64) -> Result<Self, DistributionError> {
        if !(p > 0.0 && p <= 0.5) {
            return Err(DistributionError::Domain(format!(
                "three-point parameter must lie in (0, 1/2], got {p}"
            )));
        }
        Ok(ConcordanceInducing::ThreePoint { p })
    }

    /// Generalized inverse G^-(u). The endpoints follow the convention that
    /// bounded variants report their finite endpoint values while the
    /// Gaussian returns the infinities.
    pub fn quantile(&self, u: f64) -> Result<f64, DistributionError> {
        if !(0.0..=1.0).contains(&u) {
            return Err(DistributionError::Domain(format!(
                "quantile argument must lie in [0, 1], got {u}"
            )));
        }
        Ok(match self {
            ConcordanceInducing::Uniform01 => u,
            ConcordanceInducing::StandardGaussian => {
                standard_normal_quantile(u).expect("u validated")
            }
            ConcordanceInducing::ThreePoint { p } => {
                if u <= *p {
                    -1.0
                } else if u <= 1.0 - p {
                    0.0
                } else {
                    1.0
                }
            }
            ConcordanceInducing::Tabulated(t) => t.quantile(u),
        })
    }

    /// CDF of the distribution (used by the covariance quadratures).
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            ConcordanceInducing::Uniform01 => x.clamp(0.0, 1.0),
            ConcordanceInducing::StandardGaussian => standard_normal_cdf(x),
            ConcordanceInducing::ThreePoint { p } => {
                if x < -1.0 {
                    0.0
                } else if x < 0.0 {
                    *p
                } else if x < 1.0 {
                    1.0 - p
                } else {
                    1.0
                }
            }
            ConcordanceInducing::Tabulated(t) => {
                let mut cum = 0.0;
                for (v, m) in t.atoms() {
                    if v <= x {
                        cum += m;
                    } else {
                        break;
                    }
                }
                cum
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ConcordanceInducing::Uniform01 => 0.5,
            ConcordanceInducing::StandardGaussian => 0.0,
            ConcordanceInducing::ThreePoint { .. } => 0.0,
            ConcordanceInducing::Tabulated(t) => {
                t.atoms().iter().map(|(v, m)| v * m).sum()
            }
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            ConcordanceInducing::Uniform01 => 1.0 / 12.0,
            ConcordanceInducing::StandardGaussian => 1.0,
            ConcordanceInducing::ThreePoint { p } => 2.0 * p,
            ConcordanceInducing::Tabulated(t) => {
                let atoms = t.atoms();
                let mean: f64 = atoms.iter().map(|(v, m)| v * m).sum();
                atoms.iter().map(|(v, m)| (v - mean) * (v - mean) * m).sum()
            }
        }
    }

    /// Atoms (value, mass) when the distribution is discrete.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ConcordanceInducing::ThreePoint { p } => {
                if *p == 0.5 {
                    Some(vec![(-1.0, 0.5), (1.0, 0.5)])
                } else {
                    Some(vec![(-1.0, *p), (0.0, 1.0 - 2.0 * p), (1.0, *p)])
                }
            }
            ConcordanceInducing::Tabulated(t) => Some(t.atoms()),
            _ => None,
        }
    }

    /// Probability levels at which the quantile jumps; the symmetry probe
    /// grid must stay away from these.
    fn jump_levels(&self) -> Vec<f64> {
        match self {
            ConcordanceInducing::ThreePoint { p } => vec![*p, 1.0 - p],
            ConcordanceInducing::Tabulated(t) => t.probs.clone(),
            _ => Vec::new(),
        }
    }
}

/// Check membership in the class of concordance-inducing distributions:
/// nondegenerate, symmetric, finite second moment. Violations are returned,
/// not thrown; an empty list means the distribution qualifies.
pub fn validate(g: &ConcordanceInducing) -> Vec<GViolation> {
    let mut violations = Vec::new();

    let variance = g.variance();
    if !variance.is_finite() {
        violations.push(GViolation::InfiniteSecondMoment);
    }
    if variance <= 0.0 {
        violations.push(GViolation::Degenerate);
        return violations;
    }

    let mean = g.mean();
    let scale = variance.sqrt();
    let jumps = g.jump_levels();
    let away_from_jumps = |u: f64| {
        jumps
            .iter()
            .all(|&b| (u - b).abs() > 1e-7 && (1.0 - u - b).abs() > 1e-7)
    };

    const PROBE: usize = 999;
    for k in 1..=PROBE {
        let u = k as f64 / (PROBE + 1) as f64;
        if !away_from_jumps(u) {
            continue;
        }
        let lo = g.quantile(u).expect("interior");
        let hi = g.quantile(1.0 - u).expect("interior");
        if !lo.is_finite() || !hi.is_finite() {
            continue;
        }
        let deviation = (lo + hi - 2.0 * mean).abs();
        if deviation > 1e-9 * scale.max(1.0) {
            violations.push(GViolation::Asymmetric { at: u, deviation });
            break;
        }
    }

    violations
}

/// A pair of rank transforms tabulated on a common strictly increasing grid
/// of at least three interior probability nodes.
#[derive(Clone, Debug)]
pub struct TransformPair {
    grid: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
}

/// Verdict of [`check_transform_pair`].
#[derive(Clone, Debug, PartialEq)]
pub enum TransformVerdict {
    /// The pair is a measure of concordance; the induced concordance-
    /// inducing distribution is returned (standardized representative).
    IsMeasureOfConcordance(ConcordanceInducing),
    /// The transforms are not jointly monotone.
    NotMonotone,
    /// The transforms induce different distributions up to location-scale.
    DistributionsDiffer,
    /// The common induced distribution is not symmetric.
    NotSymmetric,
}

impl TransformPair {
    pub fn new(grid: Vec<f64>, g1: Vec<f64>, g2: Vec<f64>) -> Result<Self, DistributionError> {
        if grid.len() < 3 {
            return Err(DistributionError::Domain(
                "transform tables need at least 3 interior grid points".into(),
            ));
        }
        if grid.len() != g1.len() || grid.len() != g2.len() {
            return Err(DistributionError::Domain(
                "transform tables must share the probability grid".into(),
            ));
        }
        for pair in grid.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(DistributionError::Domain(
                    "probability grid must be strictly increasing".into(),
                ));
            }
        }
        if !(grid[0] > 0.0 && *grid.last().unwrap() < 1.0) {
            return Err(DistributionError::Domain(
                "grid nodes must be interior points of (0, 1)".into(),
            ));
        }
        if !g1.iter().chain(g2.iter()).all(|v| v.is_finite()) {
            return Err(DistributionError::Domain(
                "transform values must be finite".into(),
            ));
        }
        Ok(Self { grid, g1, g2 })
    }

    /// Build a pair from two separate (probability, value) tables by
    /// resampling both step functions onto the union of the grids. Step
    /// interpolation makes the resampling exact.
    pub fn from_tables(
        table1: &[(f64, f64)],
        table2: &[(f64, f64)],
    ) -> Result<Self, DistributionError> {
        let mut grid: Vec<f64> = table1.iter().chain(table2).map(|&(p, _)| p).collect();
        grid.sort_by(|a, b| a.partial_cmp(b).ok_or(()).expect("finite grid"));
        grid.dedup();
        let resample = |table: &[(f64, f64)]| -> Result<Vec<f64>, DistributionError> {
            for pair in table.windows(2) {
                if !(pair[0].0 < pair[1].0) {
                    return Err(DistributionError::Domain(
                        "table probability nodes must be strictly increasing".into(),
                    ));
                }
            }
            Ok(grid
                .iter()
                .map(|&u| {
                    let idx = table.partition_point(|&(p, _)| p < u);
                    if idx < table.len() {
                        table[idx].1
                    } else {
                        table.last().expect("nonempty").1
                    }
                })
                .collect())
        };
        if table1.is_empty() || table2.is_empty() {
            return Err(DistributionError::Domain(
                "transform tables must be nonempty".into(),
            ));
        }
        let g1 = resample(table1)?;
        let g2 = resample(table2)?;
        Self::new(grid, g1, g2)
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Trend {
    NonDecreasing,
    NonIncreasing,
    Mixed,
}

fn trend(values: &[f64]) -> Trend {
    let mut up = false;
    let mut down = false;
    for pair in values.windows(2) {
        if pair[1] > pair[0] {
            up = true;
        }
        if pair[1] < pair[0] {
            down = true;
        }
    }
    match (up, down) {
        (true, true) => Trend::Mixed,
        (false, true) => Trend::NonIncreasing,
        _ => Trend::NonDecreasing,
    }
}

/// Standardize to mean 0 and variance 1 under equal node weights.
fn standardize(values: &[f64]) -> Result<Vec<f64>, DistributionError> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(DistributionError::DegenerateTransform(
            "transform is constant on the grid, so the induced distribution is degenerate".into(),
        ));
    }
    let sd = var.sqrt();
    Ok(values.iter().map(|v| (v - mean) / sd).collect())
}

const VALUE_TOL: f64 = 1e-6;

/// Decide whether the Pearson correlation of `(g1(U), g2(V))` is a measure
/// of concordance, per the transform characterization: the transforms must
/// be jointly monotone, induce a common distribution up to location-scale,
/// and that distribution must be symmetric. Checks run in that order.
pub fn check_transform_pair(pair: &TransformPair) -> Result<TransformVerdict, DistributionError> {
    let t1 = trend(&pair.g1);
    let t2 = trend(&pair.g2);
    if t1 == Trend::Mixed || t2 == Trend::Mixed {
        return Ok(TransformVerdict::NotMonotone);
    }
    let constant1 = pair.g1.windows(2).all(|w| w[0] == w[1]);
    let constant2 = pair.g2.windows(2).all(|w| w[0] == w[1]);
    if constant1 || constant2 {
        return Err(DistributionError::DegenerateTransform(
            "a constant transform cannot induce a nondegenerate distribution".into(),
        ));
    }
    if t1 != t2 {
        // One strictly rises somewhere, the other strictly falls: the joint
        // monotonicity product condition fails.
        return Ok(TransformVerdict::NotMonotone);
    }

    // Correlation is invariant under negating both transforms, so reduce the
    // nonincreasing case to the nondecreasing one.
    let (mut g1, mut g2) = (pair.g1.clone(), pair.g2.clone());
    if t1 == Trend::NonIncreasing {
        for v in g1.iter_mut().chain(g2.iter_mut()) {
            *v = -*v;
        }
    }

    let s1 = standardize(&g1)?;
    let s2 = standardize(&g2)?;
    let max_dev = s1
        .iter()
        .zip(&s2)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    if max_dev > VALUE_TOL {
        return Ok(TransformVerdict::DistributionsDiffer);
    }

    if !standardized_quantile_is_symmetric(&pair.grid, &s1) {
        return Ok(TransformVerdict::NotSymmetric);
    }

    Ok(TransformVerdict::IsMeasureOfConcordance(recognize(
        &pair.grid, &s1,
    )))
}

/// Symmetry about zero of a standardized step quantile, respecting what the
/// grid can resolve.
///
/// Strictly monotone tables (samples of a continuous quantile) are checked
/// node against reflected node, which is exact on reflection-closed grids
/// and never lands on a jump. Tables with plateaus (discrete distributions)
/// are checked as atom lists under the probability-gap masses, where the
/// half-open step convention makes individual jump nodes one-sided; mass
/// symmetry is then resolvable only up to the local grid gap.
fn standardized_quantile_is_symmetric(grid: &[f64], values: &[f64]) -> bool {
    let m = values.len();
    let has_plateau = values.windows(2).any(|w| w[0] == w[1]);
    if !has_plateau {
        return (0..m).all(|i| (values[i] + values[m - 1 - i]).abs() <= VALUE_TOL);
    }

    // Merge plateau runs into atoms; the tail beyond the last node folds
    // into the top atom.
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    let mut prev_p = 0.0;
    for (&p, &v) in grid.iter().zip(values) {
        let mass = p - prev_p;
        prev_p = p;
        match atoms.last_mut() {
            Some(last) if last.0 == v => last.1 += mass,
            _ => atoms.push((v, mass)),
        }
    }
    if let Some(last) = atoms.last_mut() {
        last.1 += 1.0 - prev_p;
    }

    let max_gap = grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(grid[0].max(1.0 - grid[m - 1]), f64::max);
    // Centering must use the atom masses, not node counts: a jump node such
    // as u = p belongs to the lower atom under the half-open convention, so
    // node counts are lopsided by one even for exactly symmetric masses.
    let mean: f64 = atoms.iter().map(|(v, w)| v * w).sum();
    let sd: f64 = atoms
        .iter()
        .map(|(v, w)| (v - mean) * (v - mean) * w)
        .sum::<f64>()
        .sqrt();
    if sd <= 0.0 {
        return false;
    }
    let k = atoms.len();
    (0..k).all(|i| {
        let (v_lo, m_lo) = atoms[i];
        let (v_hi, m_hi) = atoms[k - 1 - i];
        (v_lo + v_hi - 2.0 * mean).abs() <= VALUE_TOL * sd.max(1.0)
            && (m_lo - m_hi).abs() <= max_gap + 1e-9
    })
}

/// Match the standardized node values against the built-in families,
/// falling back to the tabulated representative.
fn recognize(grid: &[f64], standardized: &[f64]) -> ConcordanceInducing {
    let matches = |candidate: &ConcordanceInducing| -> bool {
        let values: Vec<f64> = grid
            .iter()
            .map(|&u| candidate.quantile(u).expect("interior node"))
            .collect();
        match standardize(&values) {
            Ok(cs) => cs
                .iter()
                .zip(standardized)
                .all(|(a, b)| (a - b).abs() <= VALUE_TOL),
            Err(_) => false,
        }
    };

    if matches(&ConcordanceInducing::Uniform01) {
        return ConcordanceInducing::Uniform01;
    }
    if matches(&ConcordanceInducing::StandardGaussian) {
        return ConcordanceInducing::StandardGaussian;
    }
    // Three-point candidate: the largest node still mapping to the bottom
    // value determines p.
    let min_v = standardized.first().copied().unwrap_or(0.0);
    let p_hat = grid
        .iter()
        .zip(standardized)
        .filter(|(_, &v)| (v - min_v).abs() <= VALUE_TOL)
        .map(|(&u, _)| u)
        .fold(0.0f64, f64::max);
    if p_hat > 0.0 && p_hat <= 0.5 {
        if let Ok(candidate) = ConcordanceInducing::three_point(p_hat) {
            if matches(&candidate) {
                return candidate;
            }
        }
    }

    let step = StepQuantile::new(grid.to_vec(), standardized.to_vec())
        .expect("standardized nondecreasing values on a valid grid");
    ConcordanceInducing::Tabulated(step)
}
