//! Exact-size dense linear algebra for the 2x2, 3x3 and 4x4 matrices that
//! appear in two-qubit state computations.

mod eigen;
mod qr;
mod sym3;

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex;

use crate::Real;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, hermitian_sqrt, HermitianEigen};
pub(crate) use eigen::sqrt_from_eigen as eigen_sqrt;
pub use qr::unitarize;
pub use sym3::{sym3_eigenvalues, RealMatrix3};

/// Dense `P x P` complex matrix stored row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat<T, const P: usize> {
    pub m: [[Complex<T>; P]; P],
}

pub type ComplexMatrix2<T> = CMat<T, 2>;
pub type ComplexMatrix4<T> = CMat<T, 4>;

impl<T: Real, const P: usize> Default for CMat<T, P> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<T: Real, const P: usize> CMat<T, P> {
    pub fn zeros() -> Self {
        Self {
            m: [[Complex::new(T::zero(), T::zero()); P]; P],
        }
    }

    pub fn identity() -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            out.m[i][i] = Complex::new(T::one(), T::zero());
        }
        out
    }

    pub fn from_rows(m: [[Complex<T>; P]; P]) -> Self {
        Self { m }
    }

    /// Builds a matrix from real-valued rows.
    pub fn from_real(rows: [[T; P]; P]) -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            for j in 0..P {
                out.m[i][j] = Complex::new(rows[i][j], T::zero());
            }
        }
        out
    }

    pub fn from_diag(d: [T; P]) -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            out.m[i][i] = Complex::new(d[i], T::zero());
        }
        out
    }

    pub fn from_complex_diag(d: [Complex<T>; P]) -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            out.m[i][i] = d[i];
        }
        out
    }

    /// Matrix with every entry equal to one.
    pub fn ones() -> Self {
        Self {
            m: [[Complex::new(T::one(), T::zero()); P]; P],
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            for j in 0..P {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros();
        for i in 0..P {
            for j in 0..P {
                out.m[i][j] = self.m[j][i];
            }
        }
        out
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for z in row.iter_mut() {
                *z = *z * s;
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        (0..P).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.m[i][i]
        })
    }

    pub fn frobenius_norm(&self) -> T {
        self.m
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<T>()
            .sqrt()
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..P {
            for j in i..P {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm_sqr());
            }
        }
        worst.sqrt()
    }

    /// Replaces the matrix by `(m + m^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        let mut out = *self;
        for i in 0..P {
            out.m[i][i] = Complex::new(self.m[i][i].re, T::zero());
            for j in (i + 1)..P {
                let z = (self.m[i][j] + self.m[j][i].conj()) * half;
                out.m[i][j] = z;
                out.m[j][i] = z.conj();
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.m
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Converts entries to another scalar type.
    pub fn cast<U: Real>(&self) -> CMat<U, P> {
        let mut out = CMat::<U, P>::zeros();
        for i in 0..P {
            for j in 0..P {
                let z = self.m[i][j];
                out.m[i][j] = Complex::new(
                    U::from(z.re).expect("finite"),
                    U::from(z.im).expect("finite"),
                );
            }
        }
        out
    }
}

impl<T: Real, const P: usize> Index<(usize, usize)> for CMat<T, P> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.m[i][j]
    }
}

impl<T: Real, const P: usize> IndexMut<(usize, usize)> for CMat<T, P> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.m[i][j]
    }
}

impl<T: Real, const P: usize> Mul for CMat<T, P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<T: Real, const P: usize> Mul<&CMat<T, P>> for &CMat<T, P> {
    type Output = CMat<T, P>;
    fn mul(self, rhs: &CMat<T, P>) -> CMat<T, P> {
        let mut out = CMat::zeros();
        for i in 0..P {
            for k in 0..P {
                let a = self.m[i][k];
                for j in 0..P {
                    out.m[i][j] = out.m[i][j] + a * rhs.m[k][j];
                }
            }
        }
        out
    }
}

impl<T: Real, const P: usize> Add for CMat<T, P> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..P {
            for j in 0..P {
                self.m[i][j] = self.m[i][j] + rhs.m[i][j];
            }
        }
        self
    }
}

impl<T: Real, const P: usize> Sub for CMat<T, P> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..P {
            for j in 0..P {
                self.m[i][j] = self.m[i][j] - rhs.m[i][j];
            }
        }
        self
    }
}

/// Kronecker product of two 2x2 matrices, first factor on the high index bit.
pub fn kron2<T: Real>(a: &ComplexMatrix2<T>, b: &ComplexMatrix2<T>) -> ComplexMatrix4<T> {
    let mut out = ComplexMatrix4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.m[2 * i + k][2 * j + l] = a.m[i][j] * b.m[k][l];
                }
            }
        }
    }
    out
}

/// Pauli matrices `[sigma_x, sigma_y, sigma_z]`, with `sigma_y = [[0, -i], [i, 0]]`.
pub fn pauli<T: Real>() -> [ComplexMatrix2<T>; 3] {
    let o = T::zero();
    let l = T::one();
    let c = |re, im| Complex::new(re, im);
    [
        CMat::from_rows([[c(o, o), c(l, o)], [c(l, o), c(o, o)]]),
        CMat::from_rows([[c(o, o), c(o, -l)], [c(o, l), c(o, o)]]),
        CMat::from_rows([[c(l, o), c(o, o)], [c(o, o), c(-l, o)]]),
    ]
}

/// The spin-flip operator `sigma_y (x) sigma_y`.
pub fn sigma_yy<T: Real>() -> ComplexMatrix4<T> {
    let s = pauli::<T>();
    kron2(&s[1], &s[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_yy_is_real_antidiagonal() {
        let s = sigma_yy::<f64>();
        let expected = CMat::from_real([
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]);
        assert_eq!(s, expected);
    }

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = pauli::<f64>();
        let i2 = ComplexMatrix2::<f64>::identity();
        for p in [x, y, z] {
            assert!((&p * &p - i2).frobenius_norm() < 1e-15);
        }
        // xy = iz
        let iz = z.scale(1.0);
        let mut iz_c = iz;
        for row in iz_c.m.iter_mut() {
            for e in row.iter_mut() {
                *e = *e * Complex::new(0.0, 1.0);
            }
        }
        assert!((&x * &y - iz_c).frobenius_norm() < 1e-15);
    }
}
