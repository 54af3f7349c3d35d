use num_complex::Complex;

use super::{hermitian_eigen, CMat};
use crate::{Error, Real, Result};

/// Real 3x3 matrix, row-major.
pub type RealMatrix3<T> = [[T; 3]; 3];

/// Eigenvalues of a real symmetric 3x3 matrix, descending.
///
/// Uses the trigonometric solution of the characteristic cubic. When the
/// cubic is within `1e-12` of a repeated root the roots lose accuracy, so the
/// Jacobi solver takes over.
pub fn sym3_eigenvalues<T: Real>(m: &RealMatrix3<T>) -> Result<[T; 3]> {
    let mut defect = T::zero();
    let mut scale = T::zero();
    for i in 0..3 {
        for j in 0..3 {
            defect = defect.max((m[i][j] - m[j][i]).abs());
            scale = scale.max(m[i][j].abs());
        }
    }
    if !(defect <= T::tol(1e-10) * scale.max(T::one())) {
        return Err(Error::NotSymmetric(defect.to_f64().unwrap_or(f64::NAN)));
    }

    let p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
    let three = T::lit(3.0);
    let q = (m[0][0] + m[1][1] + m[2][2]) / three;
    if p1 == T::zero() {
        let mut d = [m[0][0], m[1][1], m[2][2]];
        d.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        return Ok(d);
    }
    let d0 = m[0][0] - q;
    let d1 = m[1][1] - q;
    let d2 = m[2][2] - q;
    let p2 = d0 * d0 + d1 * d1 + d2 * d2 + T::lit(2.0) * p1;
    let p = (p2 / T::lit(6.0)).sqrt();
    // det((m - qI) / p) / 2
    let b = [[d0 / p, m[0][1] / p, m[0][2] / p], [m[1][0] / p, d1 / p, m[1][2] / p], [
        m[2][0] / p,
        m[2][1] / p,
        d2 / p,
    ]];
    let r = (b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]))
        / T::lit(2.0);

    if r.abs() >= T::one() - T::tol(1e-12) {
        return jacobi_fallback(m);
    }
    let phi = r.acos() / three;
    let two_pi_3 = T::lit(2.0) * T::PI() / three;
    let e1 = q + T::lit(2.0) * p * phi.cos();
    let e3 = q + T::lit(2.0) * p * (phi + two_pi_3).cos();
    let e2 = three * q - e1 - e3;
    let mut out = [e1, e2, e3];
    out.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

fn jacobi_fallback<T: Real>(m: &RealMatrix3<T>) -> Result<[T; 3]> {
    let mut c = CMat::<T, 3>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            // symmetrize so the Hermitian check cannot trip on an accepted input
            let v = (m[i][j] + m[j][i]) / T::lit(2.0);
            c.m[i][j] = Complex::new(v, T::zero());
        }
    }
    Ok(hermitian_eigen(&c)?.eigenvalues)
}
