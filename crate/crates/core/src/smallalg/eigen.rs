use num_complex::Complex;

use super::CMat;
use crate::{Error, Real, Result};

const MAX_SWEEPS: usize = 64;

/// Eigendecomposition of a small Hermitian matrix.
///
/// `eigenvalues` are sorted in descending order and column `k` of
/// `eigenvectors` belongs to `eigenvalues[k]`, so that
/// `m = U diag(lambda) U^dagger`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianEigen<T, const P: usize> {
    pub eigenvalues: [T; P],
    pub eigenvectors: CMat<T, P>,
}

impl<T: Real, const P: usize> HermitianEigen<T, P> {
    /// `U diag(f(lambda)) U^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> CMat<T, P> {
        let u = &self.eigenvectors;
        let d: [T; P] = std::array::from_fn(|k| f(self.eigenvalues[k]));
        let mut out = CMat::zeros();
        for i in 0..P {
            for j in i..P {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..P {
                    acc = acc + u.m[i][k] * u.m[j][k].conj() * d[k];
                }
                out.m[i][j] = acc;
                out.m[j][i] = acc.conj();
            }
            out.m[i][i].im = T::zero();
        }
        out
    }

    pub fn reconstruct(&self) -> CMat<T, P> {
        self.reconstruct_with(|x| x)
    }
}

/// Hermitian eigensolver by cyclic complex Jacobi rotations.
///
/// Rejects inputs whose largest entrywise deviation from Hermiticity exceeds
/// `1e-10` (scaled to the working precision).
pub fn hermitian_eigen<T: Real, const P: usize>(m: &CMat<T, P>) -> Result<HermitianEigen<T, P>> {
    jacobi::<T, P, true>(m)
}

/// Eigenvalues only, descending; same algorithm and validation as
/// [`hermitian_eigen`] without accumulating the eigenvectors.
pub fn hermitian_eigenvalues<T: Real, const P: usize>(m: &CMat<T, P>) -> Result<[T; P]> {
    Ok(jacobi::<T, P, false>(m)?.eigenvalues)
}

fn jacobi<T: Real, const P: usize, const VECTORS: bool>(m: &CMat<T, P>) -> Result<HermitianEigen<T, P>> {
    let defect = m.hermitian_defect();
    if !(defect <= T::tol(1e-10)) {
        return Err(Error::NotHermitian(defect.to_f64().unwrap_or(f64::NAN)));
    }
    let mut a = m.hermitian_part();
    let mut v = CMat::<T, P>::identity();

    let total: T = a
        .m
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm_sqr())
        .sum();
    let floor = T::epsilon() * T::epsilon() * total;

    let mut converged = P < 2;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..P {
            for q in (p + 1)..P {
                off += a.m[p][q].norm_sqr();
            }
        }
        if off <= floor || off == T::zero() {
            converged = true;
            break;
        }
        for p in 0..P {
            for q in (p + 1)..P {
                rotate::<T, P, VECTORS>(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::ConvergenceFailure("Hermitian Jacobi iteration"));
    }

    let diag: [T; P] = std::array::from_fn(|i| a.m[i][i].re);
    let mut order: [usize; P] = std::array::from_fn(|i| i);
    // stable, so equal eigenvalues keep the order the rotations produced
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap_or(std::cmp::Ordering::Equal));

    let eigenvalues = std::array::from_fn(|k| diag[order[k]]);
    let mut eigenvectors = CMat::zeros();
    if !VECTORS {
        return Ok(HermitianEigen { eigenvalues, eigenvectors });
    }
    for (k, &src) in order.iter().enumerate() {
        for i in 0..P {
            eigenvectors.m[i][k] = v.m[i][src];
        }
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`; accumulates into `v`.
#[inline]
fn rotate<T: Real, const P: usize, const VECTORS: bool>(a: &mut CMat<T, P>, v: &mut CMat<T, P>, p: usize, q: usize) {
    assert!(p < q && q < P);
    let apq = a.m[p][q];
    let mag = apq.norm_sqr().sqrt();
    if mag == T::zero() {
        return;
    }
    let app = a.m[p][p].re;
    let aqq = a.m[q][q].re;
    // Skip rotations that cannot change the diagonal at working precision.
    let tiny = T::epsilon() * T::lit(0.01);
    if mag <= tiny * (app.abs() + aqq.abs()) {
        a.m[p][q] = Complex::new(T::zero(), T::zero());
        a.m[q][p] = Complex::new(T::zero(), T::zero());
        return;
    }
    // phase that makes the (p, q) entry real and positive
    let e = apq.unscale(mag);
    let ec = e.conj();
    let theta = (aqq - app) / (T::lit(2.0) * mag);
    let t = if theta >= T::zero() {
        T::one() / (theta + (theta * theta + T::one()).sqrt())
    } else {
        -T::one() / (-theta + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let (ecs, ecc, es, ecp) = (ec.scale(s), ec.scale(c), e.scale(s), e.scale(c));

    // J = [[c, s], [-s conj(e), c conj(e)]] acting on columns (p, q).
    // A <- A J
    for k in 0..P {
        let akp = a.m[k][p];
        let akq = a.m[k][q];
        a.m[k][p] = akp.scale(c) - akq * ecs;
        a.m[k][q] = akp.scale(s) + akq * ecc;
    }
    // A <- J^dagger A
    for k in 0..P {
        let apk = a.m[p][k];
        let aqk = a.m[q][k];
        a.m[p][k] = apk.scale(c) - aqk * es;
        a.m[q][k] = apk.scale(s) + aqk * ecp;
    }
    a.m[p][q] = Complex::new(T::zero(), T::zero());
    a.m[q][p] = Complex::new(T::zero(), T::zero());
    a.m[p][p].im = T::zero();
    a.m[q][q].im = T::zero();
    if !VECTORS {
        return;
    }
    for k in 0..P {
        let vkp = v.m[k][p];
        let vkq = v.m[k][q];
        v.m[k][p] = vkp.scale(c) - vkq * ecs;
        v.m[k][q] = vkp.scale(s) + vkq * ecc;
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
///
/// Eigenvalues down to `-1e-10 * trace` are treated as rounding noise and
/// clamped to zero; anything more negative is rejected.
pub fn hermitian_sqrt<T: Real, const P: usize>(m: &CMat<T, P>) -> Result<CMat<T, P>> {
    let eig = hermitian_eigen(m)?;
    sqrt_from_eigen(&eig, m.trace().re)
}

pub(crate) fn sqrt_from_eigen<T: Real, const P: usize>(
    eig: &HermitianEigen<T, P>,
    trace: T,
) -> Result<CMat<T, P>> {
    let smallest = eig.eigenvalues[P - 1];
    if smallest < -T::tol(1e-10) * trace.abs() {
        return Err(Error::NotPsd(smallest.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(eig.reconstruct_with(|x| x.max(T::zero()).sqrt()))
}
