//! Bivariate copulas: evaluation, sampling, pseudo-observations, and the
//! comonotone/countermonotone block construction used by cut-polytope
//! witnesses.

use thiserror::Error;

use crate::numerics::{
    bivariate_normal_cdf, standard_normal, standard_normal_cdf, standard_normal_quantile,
    uniform_open01, NumericsError, RandomSource,
};
use rand::Rng;

#[derive(Debug, Error)]
pub enum CopulaError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A bivariate copula.
///
/// Construct through the checked constructors ([`Copula::gaussian`],
/// [`Copula::mixture`], [`Copula::empirical`], ...); operations assume the
/// invariants those constructors enforce.
#[derive(Clone, Debug)]
pub enum Copula {
    /// Product copula u v.
    Independence,
    /// Upper Frechet-Hoeffding bound min(u, v).
    Comonotone,
    /// Lower Frechet-Hoeffding bound max(u + v - 1, 0).
    Countermonotone,
    /// Gaussian copula with correlation in [-1, 1].
    Gaussian(f64),
    /// Convex combination of component copulas; weights sum to one.
    ConvexMixture(Vec<(f64, Copula)>),
    /// Copula of a finite sample, stored as pseudo-observations.
    Empirical(EmpiricalCopula),
}

impl Copula {
    pub fn gaussian(rho: f64) -> Result<Self, CopulaError> {
        if !(-1.0..=1.0).contains(&rho) {
            return Err(CopulaError::Domain(format!(
                "gaussian correlation must lie in [-1, 1], got {rho}"
            )));
        }
        // rho = +/-1 degenerates to the Frechet bounds; route there so the
        // bivariate CDF never sees a singular correlation matrix.
        Ok(if rho == 1.0 {
            Copula::Comonotone
        } else if rho == -1.0 {
            Copula::Countermonotone
        } else {
            Copula::Gaussian(rho)
        })
    }

    pub fn mixture(components: Vec<(f64, Copula)>) -> Result<Self, CopulaError> {
        if components.is_empty() {
            return Err(CopulaError::Domain(
                "a mixture needs at least one component".into(),
            ));
        }
        let mut total = 0.0;
        for (w, _) in &components {
            if !w.is_finite() || *w < 0.0 {
                return Err(CopulaError::Domain(format!(
                    "mixture weights must be nonnegative, got {w}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(CopulaError::Domain(format!(
                "mixture weights must sum to 1 within 1e-12, got {total}"
            )));
        }
        Ok(Copula::ConvexMixture(components))
    }

    pub fn empirical(points: Vec<(f64, f64)>) -> Result<Self, CopulaError> {
        Ok(Copula::Empirical(EmpiricalCopula::new(points)?))
    }

    /// C(u, v). Arguments must lie in the closed unit square.
    pub fn eval(&self, u: f64, v: f64) -> Result<f64, CopulaError> {
        if !(0.0..=1.0).contains(&u) || !(0.0..=1.0).contains(&v) {
            return Err(CopulaError::Domain(format!(
                "copula arguments must lie in [0, 1], got ({u}, {v})"
            )));
        }
        Ok(self.eval_unchecked(u, v))
    }

    fn eval_unchecked(&self, u: f64, v: f64) -> f64 {
        match self {
            Copula::Independence => u * v,
            Copula::Comonotone => u.min(v),
            Copula::Countermonotone => (u + v - 1.0).max(0.0),
            Copula::Gaussian(rho) => {
                if u == 0.0 || v == 0.0 {
                    0.0
                } else if u == 1.0 {
                    v
                } else if v == 1.0 {
                    u
                } else if *rho == 0.0 {
                    u * v
                } else {
                    let x = standard_normal_quantile(u).expect("u in (0,1)");
                    let y = standard_normal_quantile(v).expect("v in (0,1)");
                    bivariate_normal_cdf(x, y, *rho).expect("rho validated")
                }
            }
            Copula::ConvexMixture(parts) => parts
                .iter()
                .map(|(w, c)| w * c.eval_unchecked(u, v))
                .sum(),
            Copula::Empirical(emp) => emp.eval(u, v),
        }
    }

    /// Draw `n` pairs from the copula.
    pub fn sample(&self, n: usize, source: &RandomSource) -> Result<Vec<(f64, f64)>, CopulaError> {
        if n == 0 {
            return Err(CopulaError::Domain("sample size must be at least 1".into()));
        }
        let mut rng = source.rng();
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            out.push(self.draw(&mut rng));
        }
        Ok(out)
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        match self {
            Copula::Independence => (uniform_open01(rng), uniform_open01(rng)),
            Copula::Comonotone => {
                let u = uniform_open01(rng);
                (u, u)
            }
            Copula::Countermonotone => {
                let u = uniform_open01(rng);
                (u, 1.0 - u)
            }
            Copula::Gaussian(rho) => {
                let z1 = standard_normal(rng);
                let z2 = rho * z1 + (1.0 - rho * rho).sqrt() * standard_normal(rng);
                (standard_normal_cdf(z1), standard_normal_cdf(z2))
            }
            Copula::ConvexMixture(parts) => {
                let mut pick: f64 = rng.random();
                for (w, c) in parts {
                    if pick < *w {
                        return c.draw(rng);
                    }
                    pick -= w;
                }
                parts.last().expect("mixture nonempty").1.draw(rng)
            }
            Copula::Empirical(emp) => emp.draw(rng),
        }
    }
}

/// Pseudo-observations of a finite sample, plus their within-sample ranks.
///
/// Stores points, not a CDF grid: measure estimators transform the stored
/// values directly, while `eval` extends the rank structure multilinearly
/// (the checkerboard copula), which has exactly uniform margins.
#[derive(Clone, Debug)]
pub struct EmpiricalCopula {
    points: Vec<(f64, f64)>,
    u_ranks: Vec<f64>,
    v_ranks: Vec<f64>,
}

impl EmpiricalCopula {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, CopulaError> {
        if points.len() < 2 {
            return Err(CopulaError::Domain(
                "an empirical copula needs at least two points".into(),
            ));
        }
        for &(u, v) in &points {
            if !(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0) {
                return Err(CopulaError::Domain(format!(
                    "pseudo-observations must lie strictly inside (0, 1)^2, got ({u}, {v})"
                )));
            }
        }
        let u_ranks = average_ranks(points.iter().map(|p| p.0));
        let v_ranks = average_ranks(points.iter().map(|p| p.1));
        Ok(Self {
            points,
            u_ranks,
            v_ranks,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Multilinear (checkerboard) extension of the sample's rank structure.
    fn eval(&self, u: f64, v: f64) -> f64 {
        let n = self.points.len() as f64;
        let mut acc = 0.0;
        for i in 0..self.points.len() {
            let fu = (n * u - (self.u_ranks[i] - 1.0)).clamp(0.0, 1.0);
            let fv = (n * v - (self.v_ranks[i] - 1.0)).clamp(0.0, 1.0);
            acc += fu * fv;
        }
        acc / n
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> (f64, f64) {
        let n = self.points.len();
        let i = (rng.random::<u64>() % n as u64) as usize;
        let u = (self.u_ranks[i] - 1.0 + uniform_open01(rng)) / n as f64;
        let v = (self.v_ranks[i] - 1.0 + uniform_open01(rng)) / n as f64;
        (u, v)
    }
}

/// 1-based average ranks (ties share the mean of their rank range).
fn average_ranks<I: Iterator<Item = f64>>(values: I) -> Vec<f64> {
    let values: Vec<f64> = values.collect();
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Rank-transform raw data into an empirical copula. Ranks are averaged over
/// ties and divided by n + 1 so every pseudo-observation is interior.
pub fn pseudo_observations(data: &[(f64, f64)]) -> Result<Copula, CopulaError> {
    if data.len() < 2 {
        return Err(CopulaError::Domain(
            "pseudo-observations need at least two data points".into(),
        ));
    }
    for &(x, y) in data {
        if !x.is_finite() || !y.is_finite() {
            return Err(CopulaError::Domain(
                "data values must be finite to be ranked".into(),
            ));
        }
    }
    let n = data.len() as f64;
    let ux = average_ranks(data.iter().map(|p| p.0));
    let vy = average_ranks(data.iter().map(|p| p.1));
    let points = ux
        .into_iter()
        .zip(vy)
        .map(|(r, s)| (r / (n + 1.0), s / (n + 1.0)))
        .collect();
    Copula::empirical(points)
}

/// Binary pattern with first entry fixed to 1: the canonical representative
/// of a sign vector in {-1, +1}^d up to global flip.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BVector {
    bits: Vec<bool>,
}

impl BVector {
    pub fn new(bits: Vec<bool>) -> Result<Self, CopulaError> {
        if bits.len() < 2 {
            return Err(CopulaError::Domain(
                "a b-vector needs dimension at least 2".into(),
            ));
        }
        if !bits[0] {
            return Err(CopulaError::Domain(
                "the canonical b-vector has first entry 1".into(),
            ));
        }
        Ok(Self { bits })
    }

    pub fn dim(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// All 2^(d-1) canonical b-vectors of dimension `d`.
    pub fn enumerate(d: usize) -> Vec<BVector> {
        assert!(d >= 2, "dimension must be at least 2");
        assert!(d <= 16, "b-vector enumeration capped at d = 16");
        (0..(1u32 << (d - 1)))
            .map(|mask| {
                let mut bits = vec![true];
                for j in 0..(d - 1) {
                    bits.push(mask & (1 << j) != 0);
                }
                BVector { bits }
            })
            .collect()
    }

    /// The rank-one sign matrix (2b - 1)(2b - 1)^T, row-major.
    pub fn sign_matrix(&self) -> Vec<f64> {
        let d = self.dim();
        let s: Vec<f64> = self
            .bits
            .iter()
            .map(|&b| if b { 1.0 } else { -1.0 })
            .collect();
        let mut m = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                m[i * d + j] = s[i] * s[j];
            }
        }
        m
    }
}

/// Sample rows U b + (1 - U)(1 - b) for independent uniform U: each margin
/// is standard uniform, pairs with equal bits are comonotone and pairs with
/// opposite bits countermonotone.
pub fn witness_component_sample(
    b: &BVector,
    n: usize,
    source: &RandomSource,
) -> Result<Vec<Vec<f64>>, CopulaError> {
    if n == 0 {
        return Err(CopulaError::Domain("sample size must be at least 1".into()));
    }
    let mut rng = source.rng();
    let rows = (0..n)
        .map(|_| {
            let u = uniform_open01(&mut rng);
            b.bits
                .iter()
                .map(|&bit| if bit { u } else { 1.0 - u })
                .collect()
        })
        .collect();
    Ok(rows)
}
