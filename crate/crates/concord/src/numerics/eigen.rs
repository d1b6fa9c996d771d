//! Smallest eigenvalue of a small dense symmetric matrix.
//!
//! Cyclic Jacobi rotations; the matrices here are correlation matrices of
//! dimension at most a few dozen, where Jacobi is simple and accurate to
//! near machine precision.

use super::NumericsError;

const SYMMETRY_TOL: f64 = 1e-12;

/// Smallest eigenvalue of the symmetric `dim x dim` matrix stored row-major
/// in `data`. Input must be symmetric within 1e-12 entrywise.
pub fn min_eigenvalue(data: &[f64], dim: usize) -> Result<f64, NumericsError> {
    if dim == 0 || data.len() != dim * dim {
        return Err(NumericsError::Domain(format!(
            "matrix buffer of length {} does not hold a {dim}x{dim} matrix",
            data.len()
        )));
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let a = data[i * dim + j];
            let b = data[j * dim + i];
            if !a.is_finite() || !b.is_finite() {
                return Err(NumericsError::Domain("matrix entries must be finite".into()));
            }
            if (a - b).abs() > SYMMETRY_TOL {
                return Err(NumericsError::Domain(format!(
                    "matrix is not symmetric: entry ({i},{j}) = {a} vs ({j},{i}) = {b}"
                )));
            }
        }
    }

    // Work on the symmetrized copy so the iteration sees an exactly
    // symmetric matrix.
    let mut a = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            a[i * dim + j] = 0.5 * (data[i * dim + j] + data[j * dim + i]);
        }
    }

    let scale: f64 = a
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..dim {
            for j in (i + 1)..dim {
                off = off.max(a[i * dim + j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                let apq = a[p * dim + q];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let app = a[p * dim + p];
                let aqq = a[q * dim + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }

    Ok((0..dim)
        .map(|i| a[i * dim + i])
        .fold(f64::INFINITY, f64::min))
}
