//! Standard normal CDF, quantile, and the bivariate normal CDF.
//!
//! The bivariate CDF follows Drezner & Wesolowsky (1989) as refined in Genz'
//! double-precision BVND routine: Gauss-Legendre quadrature over a
//! trigonometric substitution for moderate correlation, and an asymptotic
//! expansion plus quadrature near |rho| = 1. Absolute error is around 1e-15,
//! comfortably inside the 1e-10 contract.
#![allow(clippy::excessive_precision)]

use super::NumericsError;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const SQRT_TWO_PI: f64 = 2.506628274631000502415765284811;

/// Standard normal CDF.
pub fn standard_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// P(Z > x) for standard normal Z, computed without cancellation for large x.
fn upper_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Standard normal quantile, Wichura's PPND16 rational approximations
/// (AS 241). Relative error below 1e-15 on (0, 1); the endpoints map to
/// the infinities.
pub fn standard_normal_quantile(p: f64) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NumericsError::Domain(format!(
            "normal quantile defined on [0, 1], got {p}"
        )));
    }
    if p == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if p == 1.0 {
        return Ok(f64::INFINITY);
    }

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return Ok(q * poly(&PPND_A, r) / poly(&PPND_B, r));
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let value = if r <= 5.0 {
        let r = r - 1.6;
        poly(&PPND_C, r) / poly(&PPND_D, r)
    } else {
        let r = r - 5.0;
        poly(&PPND_E, r) / poly(&PPND_F, r)
    };
    Ok(if q < 0.0 { -value } else { value })
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

const PPND_A: [f64; 8] = [
    3.3871328727963666080e0,
    1.3314166789178437745e2,
    1.9715909503065514427e3,
    1.3731693765509461125e4,
    4.5921953931549871457e4,
    6.7265770927008700853e4,
    3.3430575583588128105e4,
    2.5090809287301226727e3,
];
const PPND_B: [f64; 8] = [
    1.0,
    4.2313330701600911252e1,
    6.8718700749205790830e2,
    5.3941960214247511077e3,
    2.1213794301586595867e4,
    3.9307895800092710610e4,
    2.8729085735721942674e4,
    5.2264952788528545610e3,
];
const PPND_C: [f64; 8] = [
    1.42343711074968357734e0,
    4.63033784615654529590e0,
    5.76949722146069140550e0,
    3.64784832476320460504e0,
    1.27045825245236838258e0,
    2.41780725177450611770e-1,
    2.27238449892691845833e-2,
    7.74545014278341407640e-4,
];
const PPND_D: [f64; 8] = [
    1.0,
    2.05319162663775882187e0,
    1.67638483018380384940e0,
    6.89767334985100004550e-1,
    1.48103976427480074590e-1,
    1.51986665636164571966e-2,
    5.47593808499534494600e-4,
    1.05075007164441684324e-9,
];
const PPND_E: [f64; 8] = [
    6.65790464350110377720e0,
    5.46378491116411436990e0,
    1.78482653991729133580e0,
    2.96560571828504891230e-1,
    2.65321895265761230930e-2,
    1.24266094738807843860e-3,
    2.71155556874348757815e-5,
    2.01033439929228813265e-7,
];
const PPND_F: [f64; 8] = [
    1.0,
    5.99832206555887937690e-1,
    1.36929880922735805310e-1,
    1.48753612908506148525e-2,
    7.86869131145613259100e-4,
    1.84631831751005468180e-5,
    1.42151175831644588870e-7,
    2.04426310338993978564e-15,
];

// Gauss-Legendre abscissae/weights used by BVND (Genz' tvpack tables).
const GL_6: [(f64, f64); 3] = [
    (0.1713244923791705e0, -0.9324695142031522e0),
    (0.3607615730481384e0, -0.6612093864662647e0),
    (0.4679139345726904e0, -0.2386191860831970e0),
];
const GL_12: [(f64, f64); 6] = [
    (0.4717533638651177e-1, -0.9815606342467191e0),
    (0.1069393259953183e0, -0.9041172563704750e0),
    (0.1600783285433464e0, -0.7699026741943050e0),
    (0.2031674267230659e0, -0.5873179542866171e0),
    (0.2334925365383547e0, -0.3678314989981802e0),
    (0.2491470458134029e0, -0.1252334085114692e0),
];
const GL_20: [(f64, f64); 10] = [
    (0.1761400713915212e-1, -0.9931285991850949e0),
    (0.4060142980038694e-1, -0.9639719272779138e0),
    (0.6267204833410906e-1, -0.9122344282513259e0),
    (0.8327674157670475e-1, -0.8391169718222188e0),
    (0.1019301198172404e0, -0.7463319064601508e0),
    (0.1181945319615184e0, -0.6360536807265150e0),
    (0.1316886384491766e0, -0.5108670019508271e0),
    (0.1420961093183821e0, -0.3737060887154196e0),
    (0.1491729864726037e0, -0.2277858511416451e0),
    (0.1527533871307259e0, -0.7652652113349733e-1),
];

fn select_gl(rho_abs: f64) -> &'static [(f64, f64)] {
    if rho_abs < 0.3 {
        &GL_6
    } else if rho_abs < 0.75 {
        &GL_12
    } else {
        &GL_20
    }
}

/// P(X <= x, Y <= y) for standard bivariate normal with correlation `rho`.
pub fn bivariate_normal_cdf(x: f64, y: f64, rho: f64) -> Result<f64, NumericsError> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(NumericsError::Domain(format!(
            "correlation must lie in [-1, 1], got {rho}"
        )));
    }
    if x.is_nan() || y.is_nan() {
        return Err(NumericsError::Domain(
            "bivariate normal CDF arguments must not be NaN".into(),
        ));
    }
    // Survival-function orientation of the classical routine. The quadrature
    // can undershoot zero by an ulp in deep tails; clamp to the unit range.
    Ok(bvnd(-x, -y, rho).clamp(0.0, 1.0))
}

/// P(X > dh, Y > dk) for standard bivariate normal with correlation `r`.
///
/// This is Genz' BVND with the sign handling near r = -1 repaired: rather
/// than negating both arguments, only one sign is flipped, and the
/// complement identity bvnd(dh, dk, r) = phi(-dk) - bvnd(-dh, dk, -r)
/// recovers the answer without catastrophic cancellation.
fn bvnd(dh: f64, dk: f64, r: f64) -> f64 {
    if dh == f64::INFINITY || dk == f64::INFINITY {
        return 0.0;
    }
    if dh == f64::NEG_INFINITY {
        return upper_tail(dk);
    }
    if dk == f64::NEG_INFINITY {
        return upper_tail(dh);
    }

    if r == 0.0 {
        return upper_tail(dh) * upper_tail(dk);
    }
    if r == 1.0 {
        return upper_tail(dh.max(dk));
    }
    if r == -1.0 {
        return (upper_tail(dh) + upper_tail(dk) - 1.0).max(0.0);
    }

    if r.abs() <= 0.925 {
        let h = dh;
        let k = dk;
        let hk = h * k;
        let hs = 0.5 * (h * h + k * k);
        let asr = 0.5 * r.asin();
        let mut bvn = 0.0;
        for &(w, xn) in select_gl(r.abs()) {
            for is in [-1.0, 1.0] {
                let sn = (asr * (is * xn + 1.0)).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return bvn * asr / TWO_PI + upper_tail(h) * upper_tail(k);
    }

    // |r| > 0.925: work with |r| by flipping one argument when r < 0.
    let (h, k) = if r > 0.0 { (dh, dk) } else { (-dh, dk) };
    let hk = h * k;
    let a_s = (1.0 - r) * (1.0 + r);
    let mut a = a_s.sqrt();
    let b_s = (h - k) * (h - k);
    let c = (4.0 - hk) / 8.0;
    let d = (12.0 - hk) / 16.0;
    let asr = -0.5 * (b_s / a_s + hk);

    let mut bvn = 0.0;
    if asr > -100.0 {
        bvn = a
            * asr.exp()
            * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
    }
    if -hk < 100.0 {
        let b = b_s.sqrt();
        bvn -= (-0.5 * hk).exp()
            * SQRT_TWO_PI
            * upper_tail(b / a)
            * b
            * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
    }
    a *= 0.5;
    for &(w, xn) in &GL_20 {
        for is in [-1.0, 1.0] {
            let xq = a * (is * xn + 1.0);
            let x_s = xq * xq;
            let asr = -0.5 * (b_s / x_s + hk);
            if asr > -100.0 {
                let r_s = (1.0 - x_s).sqrt();
                bvn += a
                    * w
                    * asr.exp()
                    * ((-hk * (1.0 - r_s) / (2.0 * (1.0 + r_s))).exp() / r_s
                        - (1.0 + c * x_s * (1.0 + d * x_s)));
            }
        }
    }
    bvn /= -TWO_PI;

    if r > 0.0 {
        bvn + upper_tail(h.max(k))
    } else if k >= h {
        -bvn
    } else {
        upper_tail(dk) + upper_tail(dh) - 1.0 - bvn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomSource;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn quantile_reference_values() {
        // Reference quantiles to 16 digits.
        let cases = [
            (0.5, 0.0),
            (0.975, 1.959963984540054),
            (0.025, -1.959963984540054),
            (0.999, 3.090232306167814),
            (0.25, -0.6744897501960817),
            (1e-10, -6.361340902404056),
        ];
        for (p, z) in cases {
            let got = standard_normal_quantile(p).unwrap();
            assert!(
                (got - z).abs() < 1e-13 * (1.0 + z.abs()),
                "quantile({p}) = {got}, want {z}"
            );
        }
        assert_eq!(standard_normal_quantile(0.0).unwrap(), f64::NEG_INFINITY);
        assert_eq!(standard_normal_quantile(1.0).unwrap(), f64::INFINITY);
        assert!(standard_normal_quantile(1.5).is_err());
    }

    #[test]
    fn quantile_cdf_round_trip() {
        for i in 1..999 {
            let p = i as f64 / 999.0;
            let z = standard_normal_quantile(p).unwrap();
            assert!(
                (standard_normal_cdf(z) - p).abs() < 1e-14,
                "round trip failed at p = {p}"
            );
        }
    }

    #[test]
    fn cdf_at_origin_quadrants() {
        assert!((bivariate_normal_cdf(0.0, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((bivariate_normal_cdf(0.0, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cdf_origin_matches_arcsine_identity() {
        // P(X <= 0, Y <= 0) = 1/4 + asin(rho) / (2 pi); at rho = 1/2 this is
        // exactly 1/3. The Monte Carlo cross-check below guards the identity.
        let value = bivariate_normal_cdf(0.0, 0.0, 0.5).unwrap();
        assert!((value - 1.0 / 3.0).abs() < 1e-14);
        for rho in [-0.95f64, -0.5, -0.1, 0.3, 0.77] {
            let anchor = 0.25 + rho.asin() / TWO_PI;
            let got = bivariate_normal_cdf(0.0, 0.0, rho).unwrap();
            assert!((got - anchor).abs() < 1e-13, "rho = {rho}");
        }
    }

    #[test]
    fn cdf_origin_monte_carlo_oracle() {
        // Antithetic Monte Carlo for P(X <= 0, Y <= 0) at rho = 1/2:
        // z2 = rho z1 + sqrt(1-rho^2) w, and (z1, w) -> (-z1, -w) is the
        // antithetic pair. 10^7 pairs give a standard error near 1e-4.
        let rho: f64 = 0.5;
        let beta = (1.0 - rho * rho).sqrt();
        let mut rng = RandomSource::new(20240811).rng();
        let n = 10_000_000usize;
        let mut hits = 0u64;
        for _ in 0..n {
            let z1 = gaussian(&mut rng);
            let w = gaussian(&mut rng);
            let z2 = rho * z1 + beta * w;
            if z1 <= 0.0 && z2 <= 0.0 {
                hits += 1;
            }
            if -z1 <= 0.0 && -z2 <= 0.0 {
                hits += 1;
            }
        }
        let estimate = hits as f64 / (2 * n) as f64;
        assert!(
            (estimate - 1.0 / 3.0).abs() < 5e-4,
            "monte carlo estimate {estimate} too far from 1/3"
        );
    }

    fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (TWO_PI * u2).cos()
    }

    #[test]
    fn degenerate_correlations() {
        // rho = 1: P(X <= x, Y <= y) = Phi(min(x, y)); rho = -1: max(...).
        let x = 0.7;
        let y = -0.2;
        let hi = bivariate_normal_cdf(x, y, 1.0).unwrap();
        assert!((hi - standard_normal_cdf(y)).abs() < 1e-15);
        let lo = bivariate_normal_cdf(x, y, -1.0).unwrap();
        let expect = (standard_normal_cdf(x) + standard_normal_cdf(y) - 1.0).max(0.0);
        assert!((lo - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_rho() {
        assert!(bivariate_normal_cdf(0.0, 0.0, 1.2).is_err());
        assert!(bivariate_normal_cdf(0.0, 0.0, f64::NAN).is_err());
    }

    #[test]
    fn matches_complement_identities_on_grid() {
        // P(X<=x, Y<=y; rho) + P(X<=x, Y<=-y; -rho) = Phi(x), including the
        // repaired near-singular branch |rho| > 0.925.
        for &rho in &[-0.999, -0.95, -0.6, -0.2, 0.33, 0.8, 0.93, 0.9999] {
            for i in -8..=8 {
                for j in -8..=8 {
                    let x = i as f64 / 2.0;
                    let y = j as f64 / 2.0;
                    let lhs = bivariate_normal_cdf(x, y, rho).unwrap()
                        + bivariate_normal_cdf(x, -y, -rho).unwrap();
                    let rhs = standard_normal_cdf(x);
                    assert!(
                        (lhs - rhs).abs() < 1e-14,
                        "identity failed at x={x} y={y} rho={rho}: {lhs} vs {rhs}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_in_arguments(
            x in -4.0..4.0f64,
            y in -4.0..4.0f64,
            rho in -1.0..1.0f64,
        ) {
            let a = bivariate_normal_cdf(x, y, rho).unwrap();
            let b = bivariate_normal_cdf(y, x, rho).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn monotone_in_each_argument(
            x in -3.0..3.0f64,
            y in -3.0..3.0f64,
            rho in -0.99..0.99f64,
        ) {
            let base = bivariate_normal_cdf(x, y, rho).unwrap();
            prop_assert!(bivariate_normal_cdf(x + 0.25, y, rho).unwrap() >= base - 1e-15);
            prop_assert!(bivariate_normal_cdf(x, y + 0.25, rho).unwrap() >= base - 1e-15);
            prop_assert!(bivariate_normal_cdf(x, y, (rho + 0.005).min(1.0)).unwrap() >= base - 1e-15);
        }
    }
}
