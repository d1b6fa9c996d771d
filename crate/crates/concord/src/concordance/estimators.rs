//! Plug-in estimators on pseudo-observations: Pearson correlation of
//! quantile-transformed ranks, with delta-method standard errors.

use super::{check_p, ConcordanceError, Estimate, MeasureSpec, Method, NuMeasure};
use crate::copulas::EmpiricalCopula;
use crate::distributions::{validate, ConcordanceInducing};

/// Neumaier-compensated sum; keeps the rank-transform symmetries
/// (reflection, permutation) exact to well below 1e-12.
fn csum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

struct Correlation {
    r: f64,
    /// Influence values psi_i = x~ y~ - (r/2)(x~^2 + y~^2); their standard
    /// deviation over sqrt(n) is the delta-method standard error.
    influence: Vec<f64>,
}

fn pearson_influence(xs: &[f64], ys: &[f64]) -> Result<Correlation, ConcordanceError> {
    let n = xs.len();
    debug_assert_eq!(n, ys.len());
    let nf = n as f64;
    let mean_x = csum(xs.iter().copied()) / nf;
    let mean_y = csum(ys.iter().copied()) / nf;
    let sxx = csum(xs.iter().map(|&x| (x - mean_x) * (x - mean_x)));
    let syy = csum(ys.iter().map(|&y| (y - mean_y) * (y - mean_y)));
    if sxx <= 0.0 {
        return Err(ConcordanceError::Degenerate(
            "transformed first coordinate has zero variance (all values in one quantile cell)"
                .into(),
        ));
    }
    if syy <= 0.0 {
        return Err(ConcordanceError::Degenerate(
            "transformed second coordinate has zero variance (all values in one quantile cell)"
                .into(),
        ));
    }
    let sxy = csum(xs.iter().zip(ys).map(|(&x, &y)| (x - mean_x) * (y - mean_y)));
    let r = sxy / (sxx * syy).sqrt();

    let sd_x = (sxx / nf).sqrt();
    let sd_y = (syy / nf).sqrt();
    let mut influence = Vec::with_capacity(n);
    for (&x, &y) in xs.iter().zip(ys) {
        let xt = (x - mean_x) / sd_x;
        let yt = (y - mean_y) / sd_y;
        influence.push(xt * yt - 0.5 * r * (xt * xt + yt * yt));
    }
    Ok(Correlation { r, influence })
}

fn influence_std_error(influence: &[f64]) -> f64 {
    let n = influence.len() as f64;
    let mean = csum(influence.iter().copied()) / n;
    let var = csum(influence.iter().map(|&p| (p - mean) * (p - mean))) / n;
    (var / n).max(0.0).sqrt()
}

/// Pearson correlation and its delta-method standard error.
pub(crate) fn pearson_with_se(xs: &[f64], ys: &[f64]) -> Result<(f64, f64), ConcordanceError> {
    let corr = pearson_influence(xs, ys)?;
    let se = influence_std_error(&corr.influence);
    Ok((corr.r, se))
}

fn transformed(
    data: &EmpiricalCopula,
    g: &ConcordanceInducing,
) -> Result<(Vec<f64>, Vec<f64>), ConcordanceError> {
    let mut xs = Vec::with_capacity(data.len());
    let mut ys = Vec::with_capacity(data.len());
    for &(u, v) in data.points() {
        xs.push(g.quantile(u)?);
        ys.push(g.quantile(v)?);
    }
    Ok((xs, ys))
}

fn single_transform(
    data: &EmpiricalCopula,
    g: &ConcordanceInducing,
) -> Result<Estimate, ConcordanceError> {
    let (xs, ys) = transformed(data, g)?;
    let corr = pearson_influence(&xs, &ys)?;
    Ok(Estimate {
        value: corr.r,
        std_error: Some(influence_std_error(&corr.influence)),
        n: Some(data.len()),
        method: Method::PlugIn,
    })
}

/// Weighted mixture of three-point transformed correlations; the standard
/// error combines the per-atom influence functions sample-wise, which is the
/// delta-method variance of the weighted estimator.
fn mixture_of_betas(
    data: &EmpiricalCopula,
    atoms: &[(f64, f64)],
) -> Result<Estimate, ConcordanceError> {
    let n = data.len();
    let mut value = 0.0;
    let mut combined = vec![0.0f64; n];
    for &(p, w) in atoms {
        let g = ConcordanceInducing::three_point(p).map_err(|e| {
            ConcordanceError::Domain(format!("nu-measure atom at {p} is invalid: {e}"))
        })?;
        let (xs, ys) = transformed(data, &g)?;
        let corr = pearson_influence(&xs, &ys).map_err(|e| match e {
            ConcordanceError::Degenerate(msg) => ConcordanceError::Degenerate(format!(
                "three-point transform at p = {p}: {msg}"
            )),
            other => other,
        })?;
        value += w * corr.r;
        for (acc, psi) in combined.iter_mut().zip(&corr.influence) {
            *acc += w * psi;
        }
    }
    Ok(Estimate {
        value,
        std_error: Some(influence_std_error(&combined)),
        n: Some(n),
        method: Method::PlugIn,
    })
}

/// Plug-in estimate of a measure of concordance on pseudo-observations.
pub fn estimate(data: &EmpiricalCopula, spec: &MeasureSpec) -> Result<Estimate, ConcordanceError> {
    if data.len() < 10 {
        return Err(ConcordanceError::Domain(format!(
            "plug-in estimation needs at least 10 observations, got {}",
            data.len()
        )));
    }
    match spec {
        MeasureSpec::Spearman => single_transform(data, &ConcordanceInducing::Uniform01),
        MeasureSpec::Blomqvist => {
            single_transform(data, &ConcordanceInducing::three_point(0.5).expect("valid p"))
        }
        MeasureSpec::BetaP(p) => {
            check_p(*p)?;
            single_transform(data, &ConcordanceInducing::three_point(*p).expect("checked"))
        }
        MeasureSpec::Gini => mixture_of_betas(
            data,
            &NuMeasure::gini_density().discretized_atoms(64)?,
        ),
        MeasureSpec::GeneralizedGini(nu) => {
            mixture_of_betas(data, &nu.discretized_atoms(64)?)
        }
        MeasureSpec::GTransformed(g) => {
            let violations = validate(g);
            if !violations.is_empty() {
                return Err(ConcordanceError::Domain(format!(
                    "distribution is not concordance-inducing: {violations:?}"
                )));
            }
            single_transform(data, g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::copulas::{pseudo_observations, Copula};
    use crate::numerics::RandomSource;

    fn empirical(data: &[(f64, f64)]) -> EmpiricalCopula {
        match pseudo_observations(data).unwrap() {
            Copula::Empirical(e) => e,
            _ => unreachable!(),
        }
    }

    #[test]
    fn perfectly_concordant_data_scores_one() {
        let data: Vec<(f64, f64)> = (0..100).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let e = empirical(&data);
        let est = estimate(&e, &MeasureSpec::Spearman).unwrap();
        // Ranks coincide, so the correlation is exactly 1.
        assert_eq!(est.value, 1.0);
        let est = estimate(&e, &MeasureSpec::Gini).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn independent_data_is_within_three_sigma_most_of_the_time() {
        let specs = [
            MeasureSpec::Spearman,
            MeasureSpec::Blomqvist,
            MeasureSpec::BetaP(0.3),
            MeasureSpec::Gini,
        ];
        for spec in &specs {
            let mut inside = 0;
            let seeds = 100u64;
            for seed in 0..seeds {
                let pairs = Copula::Independence
                    .sample(2_000, &RandomSource::new(7_000 + seed))
                    .unwrap();
                let e = empirical(&pairs);
                let est = estimate(&e, spec).unwrap();
                if est.value.abs() <= 3.0 * est.std_error.unwrap() {
                    inside += 1;
                }
            }
            assert!(
                inside >= 97,
                "{spec:?}: only {inside}/{seeds} runs inside 3 standard errors"
            );
        }
    }

    #[test]
    fn small_samples_are_rejected() {
        let data: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, i as f64)).collect();
        let e = empirical(&data);
        assert!(estimate(&e, &MeasureSpec::Spearman).is_err());
    }

    #[test]
    fn all_middle_cell_data_is_degenerate() {
        // Every pseudo-observation sits strictly between p and 1-p, so the
        // three-point transform is identically zero.
        let data: Vec<(f64, f64)> = (0..20).map(|i| (i as f64, (i % 7) as f64)).collect();
        let e = empirical(&data);
        let err = estimate(&e, &MeasureSpec::BetaP(0.01)).unwrap_err();
        assert!(matches!(err, ConcordanceError::Degenerate(_)), "{err}");
    }

    #[test]
    fn plug_in_tracks_population_spearman() {
        let c = Copula::gaussian(0.8).unwrap();
        let pairs = c.sample(100_000, &RandomSource::new(31)).unwrap();
        let e = empirical(&pairs);
        let est = estimate(&e, &MeasureSpec::Spearman).unwrap();
        let pop = 6.0 / std::f64::consts::PI * (0.8f64 / 2.0).asin();
        assert!(
            (est.value - pop).abs() < 3.0 * est.std_error.unwrap(),
            "plug-in {} vs population {pop} (se {})",
            est.value,
            est.std_error.unwrap()
        );
    }

    #[test]
    fn estimator_error_shrinks_with_sample_size() {
        // Seeded consistency regression: plug-in converges to the quadrature
        // value as n grows through 1e4, 4e4, 1.6e5.
        let rho = -0.5f64;
        let c = Copula::gaussian(rho).unwrap();
        let pop = 6.0 / std::f64::consts::PI * (rho / 2.0).asin();
        let mut last_bound = f64::INFINITY;
        for (i, n) in [10_000usize, 40_000, 160_000].into_iter().enumerate() {
            let pairs = c.sample(n, &RandomSource::new(101 + i as u64)).unwrap();
            let e = empirical(&pairs);
            let est = estimate(&e, &MeasureSpec::Spearman).unwrap();
            let se = est.std_error.unwrap();
            assert!(
                (est.value - pop).abs() <= 3.0 * se,
                "n = {n}: {} vs {pop} (se {se})",
                est.value
            );
            // The 3-sigma band itself halves as n quadruples.
            assert!(3.0 * se < last_bound);
            last_bound = 3.0 * se;
        }
    }

    #[test]
    fn reflection_negates_estimates() {
        let pairs = Copula::gaussian(0.4)
            .unwrap()
            .sample(5_000, &RandomSource::new(55))
            .unwrap();
        let e = empirical(&pairs);
        let reflected: Vec<(f64, f64)> =
            e.points().iter().map(|&(u, v)| (u, 1.0 - v)).collect();
        let er = EmpiricalCopula::new(reflected).unwrap();
        for spec in [
            MeasureSpec::Spearman,
            MeasureSpec::Blomqvist,
            MeasureSpec::BetaP(0.2),
            MeasureSpec::Gini,
            MeasureSpec::GTransformed(ConcordanceInducing::StandardGaussian),
        ] {
            let a = estimate(&e, &spec).unwrap().value;
            let b = estimate(&er, &spec).unwrap().value;
            assert!(
                (a + b).abs() < 1e-12,
                "{spec:?}: reflection gave {b}, expected {}",
                -a
            );
        }
    }
}
