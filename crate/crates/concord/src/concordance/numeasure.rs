//! Mixing measures on (0, 1/2] for generalized Gini's gamma.

use super::ConcordanceError;
use crate::numerics::{integrate_with_breaks, QuadratureSpec};

/// A Borel probability measure on (0, 1/2], either atomic or given by a
/// density. The builtin [`NuMeasure::gini_density`] is f(p) = 8p, the
/// measure whose mixture is classical Gini's gamma.
#[derive(Clone, Debug)]
pub enum NuMeasure {
    /// Point masses (p_k, w_k), weights summing to one.
    Atoms(Vec<(f64, f64)>),
    /// The linear density f(p) = 8p on (0, 1/2].
    GiniDensity,
    /// Piecewise-linear density tabulated on a strictly increasing grid
    /// inside (0, 1/2]; must integrate to one.
    DensityTable { probs: Vec<f64>, densities: Vec<f64> },
}

const MASS_TOL: f64 = 1e-10;

impl NuMeasure {
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self, ConcordanceError> {
        if atoms.is_empty() {
            return Err(ConcordanceError::Domain(
                "an atomic nu-measure needs at least one atom".into(),
            ));
        }
        let mut total = 0.0;
        for &(p, w) in &atoms {
            if !(p > 0.0 && p <= 0.5) {
                return Err(ConcordanceError::Domain(format!(
                    "nu-measure support must lie in (0, 1/2], got atom at {p}"
                )));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(ConcordanceError::Domain(format!(
                    "nu-measure weights must be nonnegative, got {w}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(ConcordanceError::Domain(format!(
                "nu-measure mass must be 1 within 1e-10, got {total}"
            )));
        }
        Ok(NuMeasure::Atoms(atoms))
    }

    pub fn gini_density() -> Self {
        NuMeasure::GiniDensity
    }

    pub fn density_table(probs: Vec<f64>, densities: Vec<f64>) -> Result<Self, ConcordanceError> {
        if probs.len() != densities.len() || probs.len() < 2 {
            return Err(ConcordanceError::Domain(
                "a density table needs at least two matching (p, f) rows".into(),
            ));
        }
        for pair in probs.windows(2) {
            if !(pair[0] < pair[1]) {
                return Err(ConcordanceError::Domain(
                    "density table nodes must be strictly increasing".into(),
                ));
            }
        }
        if !(probs[0] > 0.0 && *probs.last().unwrap() <= 0.5) {
            return Err(ConcordanceError::Domain(
                "density support must lie inside (0, 1/2]".into(),
            ));
        }
        if !densities.iter().all(|d| d.is_finite() && *d >= 0.0) {
            return Err(ConcordanceError::Domain(
                "density values must be finite and nonnegative".into(),
            ));
        }
        // Piecewise linear, so the trapezoid rule is the exact mass.
        let mut mass = 0.0;
        for i in 0..probs.len() - 1 {
            mass += 0.5 * (densities[i] + densities[i + 1]) * (probs[i + 1] - probs[i]);
        }
        if (mass - 1.0).abs() > MASS_TOL {
            return Err(ConcordanceError::Domain(format!(
                "density table mass must be 1 within 1e-10, got {mass}"
            )));
        }
        Ok(NuMeasure::DensityTable { probs, densities })
    }

    /// Support interval of the density variants.
    pub(crate) fn support(&self) -> (f64, f64) {
        match self {
            NuMeasure::Atoms(atoms) => {
                let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
                let hi = atoms.iter().map(|a| a.0).fold(0.0f64, f64::max);
                (lo, hi)
            }
            NuMeasure::GiniDensity => (0.0, 0.5),
            NuMeasure::DensityTable { probs, .. } => (probs[0], *probs.last().unwrap()),
        }
    }

    /// Interior kinks of the density, used as quadrature panel breaks.
    pub(crate) fn segment_breaks(&self) -> Vec<f64> {
        match self {
            NuMeasure::DensityTable { probs, .. } => probs[1..probs.len() - 1].to_vec(),
            _ => Vec::new(),
        }
    }

    pub(crate) fn density_at(&self, p: f64) -> f64 {
        match self {
            NuMeasure::Atoms(_) => 0.0,
            NuMeasure::GiniDensity => 8.0 * p,
            NuMeasure::DensityTable { probs, densities } => {
                if p < probs[0] || p > *probs.last().unwrap() {
                    return 0.0;
                }
                let idx = probs.partition_point(|&x| x < p).min(probs.len() - 1);
                let i = idx.max(1);
                let (p0, p1) = (probs[i - 1], probs[i]);
                let (d0, d1) = (densities[i - 1], densities[i]);
                d0 + (d1 - d0) * (p - p0) / (p1 - p0)
            }
        }
    }

    /// Atomic reduction used by the plug-in estimator: atomic measures pass
    /// through; densities are split into `k` equal-mass slices represented
    /// by their conditional means.
    pub(crate) fn discretized_atoms(&self, k: usize) -> Result<Vec<(f64, f64)>, ConcordanceError> {
        if let NuMeasure::Atoms(atoms) = self {
            return Ok(atoms.clone());
        }
        let (lo, hi) = self.support();
        let breaks = self.segment_breaks();
        let spec = QuadratureSpec::new(32, 1, 1e-13).expect("static spec");
        let cdf = |p: f64| -> f64 {
            integrate_with_breaks(&mut |t: f64| self.density_at(t), lo, p, &breaks, &spec)
                .expect("finite density")
        };

        let w = 1.0 / k as f64;
        let mut boundaries = Vec::with_capacity(k + 1);
        boundaries.push(lo);
        for j in 1..k {
            let target = j as f64 * w;
            let (mut a, mut b) = (lo, hi);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                if cdf(mid) < target {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            boundaries.push(0.5 * (a + b));
        }
        boundaries.push(hi);

        let mut atoms = Vec::with_capacity(k);
        for j in 0..k {
            let (a, b) = (boundaries[j], boundaries[j + 1]);
            let first_moment = integrate_with_breaks(
                &mut |t: f64| t * self.density_at(t),
                a,
                b,
                &breaks,
                &spec,
            )?;
            let p = (first_moment / w).clamp(f64::MIN_POSITIVE, 0.5);
            atoms.push((p, w));
        }
        Ok(atoms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_validation() {
        assert!(NuMeasure::atoms(vec![(0.2, 0.5), (0.4, 0.5)]).is_ok());
        assert!(NuMeasure::atoms(vec![(0.0, 1.0)]).is_err());
        assert!(NuMeasure::atoms(vec![(0.6, 1.0)]).is_err());
        assert!(NuMeasure::atoms(vec![(0.2, 0.7)]).is_err());
        assert!(NuMeasure::atoms(vec![(0.2, -0.1), (0.3, 1.1)]).is_err());
    }

    #[test]
    fn density_table_validation() {
        // Uniform density on (0.1, 0.4] has height 1/0.3.
        let h = 1.0 / 0.3;
        assert!(NuMeasure::density_table(vec![0.1, 0.4], vec![h, h]).is_ok());
        assert!(NuMeasure::density_table(vec![0.1, 0.4], vec![1.0, 1.0]).is_err());
        assert!(NuMeasure::density_table(vec![0.1, 0.6], vec![h, h]).is_err());
    }

    #[test]
    fn gini_density_has_unit_mass() {
        let nu = NuMeasure::gini_density();
        let spec = QuadratureSpec::default();
        let mass =
            integrate_with_breaks(&mut |p: f64| nu.density_at(p), 0.0, 0.5, &[], &spec).unwrap();
        assert!((mass - 1.0).abs() < 1e-14);
    }

    #[test]
    fn equal_mass_slices_of_gini_density() {
        // CDF is 4p^2, so slice j ends at sqrt(j / (4k)) and the conditional
        // mean of slice j is (8k/3)(b_j^3 - b_{j-1}^3).
        let nu = NuMeasure::gini_density();
        let k = 16;
        let atoms = nu.discretized_atoms(k).unwrap();
        assert_eq!(atoms.len(), k);
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (j, &(p, w)) in atoms.iter().enumerate() {
            let b0 = ((j as f64) / (4.0 * k as f64)).sqrt();
            let b1 = ((j as f64 + 1.0) / (4.0 * k as f64)).sqrt();
            let want = 8.0 * k as f64 / 3.0 * (b1.powi(3) - b0.powi(3));
            assert!((w - 1.0 / k as f64).abs() < 1e-12);
            assert!(
                (p - want).abs() < 1e-6,
                "slice {j}: conditional mean {p} vs analytic {want}"
            );
        }
    }
}
