use num_complex::Complex;

use super::CMat;
use crate::{Error, Real, Result};

/// Unitary factor `Q` of `g = Q R`, with the diagonal of `R` real and
/// positive.
///
/// That phase convention makes `Q` unique, which is what turns a Ginibre
/// matrix into a Haar-distributed unitary. Modified Gram-Schmidt with one
/// reorthogonalization pass.
pub fn unitarize<T: Real, const P: usize>(g: &CMat<T, P>) -> Result<CMat<T, P>> {
    let mut cols: [[Complex<T>; P]; P] = std::array::from_fn(|j| std::array::from_fn(|i| g.m[i][j]));
    let mut r_diag = [T::zero(); P];

    for j in 0..P {
        for _pass in 0..2 {
            for k in 0..j {
                let mut proj = Complex::new(T::zero(), T::zero());
                for i in 0..P {
                    proj = proj + cols[k][i].conj() * cols[j][i];
                }
                for i in 0..P {
                    let qki = cols[k][i];
                    cols[j][i] = cols[j][i] - qki * proj;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::SingularInput);
        }
        r_diag[j] = norm;
        for z in cols[j].iter_mut() {
            *z = *z / norm;
        }
    }

    let largest = r_diag.iter().fold(T::zero(), |a, &b| a.max(b));
    let smallest = r_diag.iter().fold(T::infinity(), |a, &b| a.min(b));
    if smallest <= T::tol(1e-12) * largest {
        return Err(Error::SingularInput);
    }

    let mut q = CMat::zeros();
    for j in 0..P {
        for i in 0..P {
            q.m[i][j] = cols[j][i];
        }
    }
    Ok(q)
}
