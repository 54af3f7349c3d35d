//! Reduced polarization density matrices and their entanglement measures.
//!
//! Basis convention: index `2*s + t`, where `s` is the polarization of
//! photon 1 and `t` that of photon 2, with `+` mapped to 0 and `-` to 1.
//! Gram matrices of the four amplitude vectors use the same layout, so
//! entry `(2*x + y, 2*x' + y')` of `a` is the overlap of `u_{xy}` with
//! `u_{x'y'}`.

use num_complex::Complex;
use serde::Serialize;

use crate::smallalg::{hermitian_eigen, hermitian_eigenvalues, pauli, sigma_yy, sym3_eigenvalues, CMat, ComplexMatrix4};
use crate::smallalg::HermitianEigen;
use crate::{Error, Real, Result};

const PLUS: usize = 0;
const MINUS: usize = 1;

#[inline]
fn idx(x: usize, y: usize) -> usize {
    2 * x + y
}

/// Hermitian positive-semidefinite overlap matrix of scattering amplitudes.
///
/// `P = 4`: rows/columns ordered `++, +-, -+, --`. `P = 2`: the
/// polarization-conserving diagonal block, ordered `+, -`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GramMatrix<T, const P: usize> {
    g: CMat<T, P>,
}

impl<T: Real, const P: usize> GramMatrix<T, P> {
    /// Wraps a Hermitian matrix. Positivity is not rechecked here: Gram
    /// matrices built from amplitudes are PSD by construction.
    pub fn new(g: CMat<T, P>) -> Result<Self> {
        let defect = g.hermitian_defect();
        if !(defect <= T::tol(1e-12) * g.frobenius_norm().max(T::one())) {
            return Err(Error::NotHermitian(defect.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            g: g.hermitian_part(),
        })
    }

    pub(crate) fn from_hermitian(g: CMat<T, P>) -> Self {
        Self { g }
    }

    pub fn identity() -> Self {
        Self { g: CMat::identity() }
    }

    /// Rank-one Gram matrix of unscattered light: every entry equals one.
    pub fn ones() -> Self {
        Self { g: CMat::ones() }
    }

    pub fn matrix(&self) -> &CMat<T, P> {
        &self.g
    }

    pub fn into_matrix(self) -> CMat<T, P> {
        self.g
    }

    pub fn trace(&self) -> T {
        self.g.trace().re
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.g.m[i][j]
    }
}

impl<T: Real> GramMatrix<T, 4> {
    /// Gram matrix of a beam that reaches the detector unscattered, in a
    /// single mode with its polarization intact: `u_{++} = u_{--} = e_1`,
    /// `u_{+-} = u_{-+} = 0`.
    pub fn unscattered() -> Self {
        let mut g = CMat::zeros();
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                g.m[i][j] = Complex::new(T::one(), T::zero());
            }
        }
        Self { g }
    }
}

impl<T: Real> GramMatrix<T, 2> {
    /// Conserving-block Gram matrix of an unscattered beam: all ones.
    pub fn unscattered() -> Self {
        Self::ones()
    }
}

/// Normalized two-qubit density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    rho: ComplexMatrix4<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity up to rounding.
    pub fn new(rho: ComplexMatrix4<T>) -> Result<Self> {
        let defect = rho.hermitian_defect();
        if !(defect <= T::tol(1e-10)) {
            return Err(Error::NotHermitian(defect.to_f64().unwrap_or(f64::NAN)));
        }
        let tr = rho.trace().re;
        if !((tr - T::one()).abs() <= T::tol(1e-12)) {
            return Err(Error::InvalidArgument {
                field: "rho",
                reason: format!("trace {} is not 1", tr),
            });
        }
        let rho = rho.hermitian_part();
        let eig = hermitian_eigenvalues(&rho)?;
        if eig[3] < -T::tol(1e-10) {
            return Err(Error::NotPsd(eig[3].to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { rho })
    }

    /// Normalizes `z_rho` by its trace, rejecting traces at or below `floor`.
    fn normalized(z_rho: ComplexMatrix4<T>, floor: T) -> Result<Self> {
        let z = z_rho.trace().re;
        if !(z > floor) {
            return Err(Error::DegenerateNormalization(z.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self {
            rho: z_rho.scale(T::one() / z).hermitian_part(),
        })
    }

    /// Projector onto a pure state; `psi` is normalized first.
    pub fn pure(psi: [Complex<T>; 4]) -> Result<Self> {
        let mut m = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.m[i][j] = psi[i] * psi[j].conj();
            }
        }
        Self::normalized(m, T::zero())
    }

    /// `(|+-> + |-+>)/sqrt(2)`, the unscattered Bell pair.
    pub fn bell() -> Self {
        let h = T::FRAC_1_SQRT_2();
        let z = Complex::new(T::zero(), T::zero());
        Self::pure([z, Complex::new(h, T::zero()), Complex::new(h, T::zero()), z]).expect("normalized")
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix4::identity().scale(T::lit(0.25)),
        }
    }

    /// `p |psi><psi| + (1 - p) I/4` with `psi` the Bell pair above.
    pub fn werner(p: T) -> Self {
        let rho = Self::bell().rho.scale(p) + Self::maximally_mixed().rho.scale(T::one() - p);
        Self { rho }
    }

    pub fn matrix(&self) -> &ComplexMatrix4<T> {
        &self.rho
    }

    /// `W rho W^dagger` for a unitary `W`.
    pub fn rotated(&self, w: &ComplexMatrix4<T>) -> Self {
        Self {
            rho: (&(w * &self.rho) * &w.adjoint()).hermitian_part(),
        }
    }
}

/// Reduced density matrix when both photons are scattered.
pub fn rho_two_beam<T: Real>(a: &GramMatrix<T, 4>, b: &GramMatrix<T, 4>) -> Result<DensityMatrix<T>> {
    let (p, m) = (PLUS, MINUS);
    let mut z_rho = ComplexMatrix4::zeros();
    for s in 0..2 {
        for t in 0..2 {
            for s2 in 0..2 {
                for t2 in 0..2 {
                    z_rho.m[idx(s, t)][idx(s2, t2)] = a.at(idx(p, s), idx(p, s2)) * b.at(idx(m, t), idx(m, t2))
                        + a.at(idx(m, s), idx(m, s2)) * b.at(idx(p, t), idx(p, t2))
                        + a.at(idx(m, s), idx(p, s2)) * b.at(idx(p, t), idx(m, t2))
                        + a.at(idx(p, s), idx(m, s2)) * b.at(idx(m, t), idx(p, t2));
                }
            }
        }
    }
    DensityMatrix::normalized(z_rho, T::lit(1e-14) * a.trace() * b.trace())
}

/// Reduced density matrix when only photon 1 is scattered: a relabeling of
/// `a` with the second index flipped.
pub fn rho_single_beam<T: Real>(a: &GramMatrix<T, 4>) -> Result<DensityMatrix<T>> {
    let mut z_rho = ComplexMatrix4::zeros();
    for s in 0..2 {
        for t in 0..2 {
            for s2 in 0..2 {
                for t2 in 0..2 {
                    z_rho.m[idx(s, t)][idx(s2, t2)] = a.at(idx(1 - t, s), idx(1 - t2, s2));
                }
            }
        }
    }
    DensityMatrix::normalized(z_rho, T::zero())
}

/// Reduced density matrix for polarization-conserving scattering, from the
/// 2x2 Gram blocks `A_{st} = a_{ss,tt}` and `B_{st} = b_{ss,tt}`.
///
/// Only the `|+->`, `|-+>` block is populated.
pub fn rho_pol_conserving<T: Real>(a: &GramMatrix<T, 2>, b: &GramMatrix<T, 2>) -> Result<DensityMatrix<T>> {
    let mut z_rho = ComplexMatrix4::zeros();
    for s in 0..2 {
        for s2 in 0..2 {
            z_rho.m[idx(s, 1 - s)][idx(s2, 1 - s2)] = a.at(s, s2) * b.at(1 - s, 1 - s2);
        }
    }
    DensityMatrix::normalized(z_rho, T::lit(1e-14) * a.trace() * b.trace())
}

/// Spectrum of `rho (sy x sy) rho* (sy x sy)`, descending, clamped at zero.
///
/// Evaluated as the spectrum of the Hermitian matrix
/// `sqrt(rho) rho~ sqrt(rho)`, which coincides with the product's.
pub fn wootters_spectrum<T: Real>(rho: &DensityMatrix<T>) -> Result<[T; 4]> {
    let eig = hermitian_eigen(&rho.rho)?;
    wootters_from_eigen(rho, &eig)
}

fn wootters_from_eigen<T: Real>(rho: &DensityMatrix<T>, eig: &HermitianEigen<T, 4>) -> Result<[T; 4]> {
    let sqrt_rho = crate::smallalg::eigen_sqrt(eig, T::one())?;
    let flip = sigma_yy::<T>();
    let tilde = &(&flip * &rho.rho.conj()) * &flip;
    let m = (&(&sqrt_rho * &tilde) * &sqrt_rho).hermitian_part();
    let lambdas = hermitian_eigenvalues(&m)?;
    // rounding noise in a vanishing eigenvalue would be amplified by the
    // square root taken downstream; treat it as an exact zero
    let floor = T::tol(0.0) * lambdas[0].abs();
    Ok(lambdas.map(|l| if l > floor { l } else { T::zero() }))
}

fn concurrence_from_lambdas<T: Real>(l: &[T; 4]) -> T {
    let r = l.map(|x| x.sqrt());
    (r[0] - r[1] - r[2] - r[3]).max(T::zero()).min(T::one())
}

/// Wootters concurrence.
pub fn concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(concurrence_from_lambdas(&wootters_spectrum(rho)?))
}

/// Correlation matrix `R_kl = Tr rho (sigma_k x sigma_l)`.
pub fn correlation_matrix<T: Real>(rho: &DensityMatrix<T>) -> [[T; 3]; 3] {
    let s = pauli::<T>();
    // each Pauli matrix has one nonzero per column: row `flip[k](col)`
    let flip = |k: usize, c: usize| if k == 2 { c } else { 1 - c };
    let mut r = [[T::zero(); 3]; 3];
    for k in 0..3 {
        for l in 0..3 {
            let mut acc = T::zero();
            for a in 0..2 {
                for b in 0..2 {
                    let (fa, fb) = (flip(k, a), flip(l, b));
                    acc += (rho.rho.m[idx(a, b)][idx(fa, fb)] * s[k].m[fa][a] * s[l].m[fb][b]).re;
                }
            }
            r[k][l] = acc;
        }
    }
    r
}

/// Maximal CHSH value `2 sqrt(u1 + u2)`, with `u1 >= u2` the two largest
/// eigenvalues of `R^T R`.
pub fn chsh_max<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    let r = correlation_matrix(rho);
    let mut rtr = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let v = (0..3).map(|k| r[k][i] * r[k][j]).sum::<T>();
            rtr[i][j] = v;
            rtr[j][i] = v;
        }
    }
    let u = sym3_eigenvalues(&rtr)?;
    let e = T::lit(2.0) * (u[0] + u[1]).max(T::zero()).sqrt();
    Ok(e.min(T::lit(2.0) * T::SQRT_2()))
}

/// `sqrt(max(0, E^2/4 - 1))` for a CHSH maximum `E`.
pub fn pseudo_concurrence_from_chsh<T: Real>(e: T) -> T {
    (e * e / T::lit(4.0) - T::one()).max(T::zero()).sqrt()
}

pub fn pseudo_concurrence<T: Real>(rho: &DensityMatrix<T>) -> Result<T> {
    Ok(pseudo_concurrence_from_chsh(chsh_max(rho)?))
}

/// Concurrence for polarization-conserving scattering of both photons, in
/// closed form. Equal to the pseudo-concurrence for such states.
pub fn concurrence_pol_closed_form<T: Real>(a: &GramMatrix<T, 2>, b: &GramMatrix<T, 2>) -> Result<T> {
    let den = a.at(PLUS, PLUS).re * b.at(MINUS, MINUS).re + a.at(MINUS, MINUS).re * b.at(PLUS, PLUS).re;
    if !(den > T::lit(1e-14) * a.trace() * b.trace()) {
        return Err(Error::DegenerateNormalization(den.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((T::lit(2.0) * a.at(PLUS, MINUS).norm() * b.at(PLUS, MINUS).norm() / den).min(T::one()))
}

/// Closed-form concurrence when only photon 1 is scattered, conserving
/// polarization.
pub fn concurrence_pol_single_beam<T: Real>(a: &GramMatrix<T, 2>) -> Result<T> {
    let tr = a.trace();
    if !(tr > T::zero()) {
        return Err(Error::DegenerateNormalization(tr.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((T::lit(2.0) * a.at(PLUS, MINUS).norm() / tr).min(T::one()))
}

/// Upper bound on the concurrence over the unitary orbit of a spectrum
/// `l1 >= l2 >= l3 >= l4`, without the clamp at zero.
#[inline]
pub(crate) fn unitary_orbit_concurrence_bound<T: Real>(l: &[T; 4]) -> T {
    l[0] - l[2] - T::lit(2.0) * (l[1] * l[3]).max(T::zero()).sqrt()
}

/// Concurrence, CHSH maximum and pseudo-concurrence of one state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Measures<T> {
    pub concurrence: T,
    pub chsh_max: T,
    pub pseudo_concurrence: T,
}

impl<T: Real> Measures<T> {
    /// Evaluates all three measures.
    ///
    /// The concurrence can never exceed `l1 - l3 - 2 sqrt(l2 l4)` in terms of
    /// the spectrum of `rho`; when that bound is not positive the concurrence
    /// is zero and the second eigendecomposition is skipped.
    pub fn evaluate(rho: &DensityMatrix<T>) -> Result<Self> {
        let spectrum = hermitian_eigenvalues(&rho.rho)?.map(|x| x.max(T::zero()));
        let concurrence = if unitary_orbit_concurrence_bound(&spectrum) <= T::zero() {
            T::zero()
        } else {
            concurrence(rho)?
        };
        let chsh_max = chsh_max(rho)?;
        Ok(Self {
            concurrence,
            chsh_max,
            pseudo_concurrence: pseudo_concurrence_from_chsh(chsh_max),
        })
    }

    /// Checks `C' <= C` and `2 sqrt(2) C <= E <= 2 sqrt(1 + C^2)` with slack
    /// `tol`. Returns the name of the first violated relation.
    pub fn check_bounds(&self, tol: T) -> std::result::Result<(), &'static str> {
        let two = T::lit(2.0);
        let c = self.concurrence;
        if self.pseudo_concurrence > c + tol {
            return Err("pseudo-concurrence exceeds concurrence");
        }
        if two * T::SQRT_2() * c > self.chsh_max + tol {
            return Err("CHSH maximum below 2 sqrt(2) C");
        }
        if self.chsh_max > two * (T::one() + c * c).sqrt() + tol {
            return Err("CHSH maximum above 2 sqrt(1 + C^2)");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        Complex::new(re, im)
    }

    fn gram4_from(v: &[f64], n: usize) -> GramMatrix<f64, 4> {
        let w: Vec<C> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        let mut g = ComplexMatrix4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                g.m[i][j] = (0..n).map(|k| w[i * n + k] * w[j * n + k].conj()).sum();
            }
        }
        GramMatrix::new(g).unwrap()
    }

    fn gram2_from(v: &[f64], n: usize) -> GramMatrix<f64, 2> {
        let w: Vec<C> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        let mut g = CMat::<f64, 2>::zeros();
        for i in 0..2 {
            for j in 0..2 {
                g.m[i][j] = (0..n).map(|k| w[i * n + k] * w[j * n + k].conj()).sum();
            }
        }
        GramMatrix::new(g).unwrap()
    }

    fn dist(a: &DensityMatrix<f64>, b: &ComplexMatrix4<f64>) -> f64 {
        (*a.matrix() - *b).frobenius_norm()
    }

    #[test]
    fn isotropic_grams_give_maximally_mixed_state() {
        let id = GramMatrix::<f64, 4>::identity();
        let rho = rho_two_beam(&id, &id).unwrap();
        assert!(dist(&rho, &ComplexMatrix4::identity().scale(0.25)) < 1e-15);
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
        assert_eq!(chsh_max(&rho).unwrap(), 0.0);
    }

    #[test]
    fn unscattered_pair_is_bell_state() {
        let free = GramMatrix::<f64, 4>::unscattered();
        let bell = DensityMatrix::<f64>::bell();
        let rho = rho_two_beam(&free, &free).unwrap();
        assert!(dist(&rho, bell.matrix()) < 1e-15);
        assert!((concurrence(&rho).unwrap() - 1.0).abs() < 1e-12);
        let single = rho_single_beam(&free).unwrap();
        assert!(dist(&single, bell.matrix()) < 1e-15);
        let ones2 = GramMatrix::<f64, 2>::ones();
        let cons = rho_pol_conserving(&ones2, &ones2).unwrap();
        assert!(dist(&cons, bell.matrix()) < 1e-15);
    }

    #[test]
    fn all_ones_gram_is_a_product_state() {
        // every amplitude vector equal: Psi is uniform, |+x>|+x>
        let ones = GramMatrix::<f64, 4>::ones();
        let uniform = ComplexMatrix4::ones().scale(0.25);
        let two = rho_two_beam(&ones, &ones).unwrap();
        let one = rho_single_beam(&ones).unwrap();
        assert!(dist(&two, &uniform) < 1e-15);
        assert!(dist(&one, &uniform) < 1e-15);
        assert!(concurrence(&two).unwrap() < 1e-7);
    }

    #[test]
    fn single_beam_of_identity_is_mixed() {
        let rho = rho_single_beam(&GramMatrix::<f64, 4>::identity()).unwrap();
        assert!(dist(&rho, &ComplexMatrix4::identity().scale(0.25)) < 1e-15);
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn conserving_identity_blocks() {
        let id = GramMatrix::<f64, 2>::identity();
        let rho = rho_pol_conserving(&id, &id).unwrap();
        let expected = ComplexMatrix4::from_diag([0.0, 0.5, 0.5, 0.0]);
        assert!(dist(&rho, &expected) < 1e-15);
        assert_eq!(concurrence(&rho).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_normalization_is_reported() {
        let zero = GramMatrix::<f64, 4>::new(ComplexMatrix4::zeros()).unwrap();
        assert!(matches!(rho_two_beam(&zero, &zero), Err(Error::DegenerateNormalization(_))));
        assert!(matches!(rho_single_beam(&zero), Err(Error::DegenerateNormalization(_))));
        let z2 = GramMatrix::<f64, 2>::new(CMat::zeros()).unwrap();
        assert!(matches!(rho_pol_conserving(&z2, &z2), Err(Error::DegenerateNormalization(_))));
        assert!(matches!(concurrence_pol_closed_form(&z2, &z2), Err(Error::DegenerateNormalization(_))));
    }

    #[test]
    fn bell_and_maximally_mixed_measures() {
        let bell = DensityMatrix::<f64>::bell();
        let m = Measures::evaluate(&bell).unwrap();
        assert!((m.concurrence - 1.0).abs() < 1e-12);
        assert!((m.chsh_max - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((m.pseudo_concurrence - 1.0).abs() < 1e-12);
        let mixed = Measures::evaluate(&DensityMatrix::<f64>::maximally_mixed()).unwrap();
        assert_eq!(mixed, Measures { concurrence: 0.0, chsh_max: 0.0, pseudo_concurrence: 0.0 });
    }

    #[test]
    fn correlation_matrix_matches_kronecker_definition() {
        use crate::smallalg::kron2;
        let a = gram4_from(&[0.3, -1.1, 0.7, 0.2, -0.4, 0.9, 1.3, -0.6, 0.1, 0.5, -0.8, 1.2, 0.6, -0.2, 0.4, -1.0], 2);
        let b = gram4_from(&[1.0, 0.2, -0.3, 0.8, 0.5, -0.7, 0.4, 0.1, -0.9, 0.6, 0.3, -0.5, 0.2, 1.1, -0.4, 0.7], 2);
        let rho = rho_two_beam(&a, &b).unwrap();
        let s = pauli::<f64>();
        let r = correlation_matrix(&rho);
        for k in 0..3 {
            for l in 0..3 {
                let direct = (rho.matrix() * &kron2(&s[k], &s[l])).trace();
                assert!((direct.re - r[k][l]).abs() < 1e-14 && direct.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn werner_state_measures() {
        // Werner concurrence (3p - 1)/2; R = diag(p, p, -p) up to signs so
        // E = 2 sqrt(2) p and C' = sqrt(2 p^2 - 1).
        let w = DensityMatrix::<f64>::werner(0.8);
        assert!((concurrence(&w).unwrap() - 0.7).abs() < 1e-12);
        assert!((chsh_max(&w).unwrap() - 2.0 * 2f64.sqrt() * 0.8).abs() < 1e-12);
        assert!((pseudo_concurrence(&w).unwrap() - 0.28f64.sqrt()).abs() < 1e-12);
        assert!((pseudo_concurrence(&w).unwrap() - 0.52915).abs() < 1e-5);
        let r = correlation_matrix(&w);
        for k in 0..3 {
            for l in 0..3 {
                let expected = if k == l { 0.8 } else { 0.0 };
                assert!((r[k][l].abs() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn werner_concurrence_against_decomposition_search() {
        // The Werner state is an equal mixture of the Bell pair with weight
        // (3p+1)/4 and three orthogonal Bell states with weight (1-p)/4; the
        // concurrence of that specific ensemble, 2 * max weight - 1, upper
        // bounds C, and for Bell-diagonal states it is tight.
        for &p in &[0.4, 0.6, 0.8, 0.95] {
            let top = (3.0 * p + 1.0) / 4.0;
            let expected = (2.0 * top - 1.0f64).max(0.0);
            let w = DensityMatrix::<f64>::werner(p);
            assert!((concurrence(&w).unwrap() - expected).abs() < 1e-12, "p = {p}");
        }
    }

    #[test]
    fn clamp_branch_of_pseudo_concurrence() {
        // separable product state |+-><+-|: E = 2, C' = 0
        let z = c(0.0, 0.0);
        let prod = DensityMatrix::pure([z, c(1.0, 0.0), z, z]).unwrap();
        assert!((chsh_max(&prod).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(pseudo_concurrence(&prod).unwrap(), 0.0);
        assert_eq!(pseudo_concurrence_from_chsh(1.5), 0.0);
    }

    #[test]
    fn pol_closed_forms() {
        let ones = GramMatrix::<f64, 2>::ones();
        assert_eq!(concurrence_pol_closed_form(&ones, &ones).unwrap(), 1.0);
        assert_eq!(concurrence_pol_single_beam(&ones).unwrap(), 1.0);
        let diag = GramMatrix::new(CMat::from_diag([2.0, 3.0])).unwrap();
        assert_eq!(concurrence_pol_closed_form(&diag, &ones).unwrap(), 0.0);
        assert_eq!(concurrence_pol_single_beam(&diag).unwrap(), 0.0);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ComplexMatrix4::<f64>::identity()).is_err());
        assert!(DensityMatrix::new(ComplexMatrix4::<f64>::from_diag([1.5, 0.0, 0.0, -0.5])).is_err());
        assert!(DensityMatrix::new(ComplexMatrix4::<f64>::from_diag([0.5, 0.25, 0.25, 0.0])).is_ok());
    }

    #[test]
    fn f32_pipeline() {
        let w = DensityMatrix::<f32>::werner(0.8);
        let m = Measures::evaluate(&w).unwrap();
        assert!((m.concurrence - 0.7).abs() < 1e-4);
        assert!((m.chsh_max - 2.0 * 2f32.sqrt() * 0.8).abs() < 1e-4);
    }

    /// Eq.-by-eq. evaluation of the two-beam density matrix straight from the
    /// amplitude vectors, as a double contraction over mode indices.
    fn rho_two_beam_from_amplitudes(u: &[Vec<C>; 4], v: &[Vec<C>; 4]) -> ComplexMatrix4<f64> {
        // u[2x+y][n] = u^x_{n y}
        let n1 = u[0].len();
        let n2 = v[0].len();
        let mut z = ComplexMatrix4::zeros();
        let mut total = 0.0;
        for s in 0..2 {
            for t in 0..2 {
                for s2 in 0..2 {
                    for t2 in 0..2 {
                        let mut acc = c(0.0, 0.0);
                        for n in 0..n1 {
                            for m in 0..n2 {
                                let psi = u[s][n] * v[2 + t][m] + u[2 + s][n] * v[t][m];
                                let psi2 = u[s2][n] * v[2 + t2][m] + u[2 + s2][n] * v[t2][m];
                                acc += psi * psi2.conj();
                            }
                        }
                        z.m[2 * s + t][2 * s2 + t2] = acc;
                    }
                }
            }
        }
        for i in 0..4 {
            total += z.m[i][i].re;
        }
        z.scale(1.0 / total)
    }

    fn split(v: &[f64], n: usize) -> [Vec<C>; 4] {
        let w: Vec<C> = v.chunks(2).map(|p| c(p[0], p[1])).collect();
        std::array::from_fn(|i| w[i * n..(i + 1) * n].to_vec())
    }

    proptest! {
        #[test]
        fn two_beam_matches_amplitude_contraction(
            va in prop::collection::vec(-2.0f64..2.0, 16),
            vb in prop::collection::vec(-2.0f64..2.0, 16),
        ) {
            let (a, b) = (gram4_from(&va, 2), gram4_from(&vb, 2));
            let rho = rho_two_beam(&a, &b).unwrap();
            let oracle = rho_two_beam_from_amplitudes(&split(&va, 2), &split(&vb, 2));
            prop_assert!(dist(&rho, &oracle) < 1e-12);
        }

        #[test]
        fn single_beam_is_spectrum_preserving(va in prop::collection::vec(-2.0f64..2.0, 24)) {
            let a = gram4_from(&va, 3);
            let rho = rho_single_beam(&a).unwrap();
            let lr = hermitian_eigen(rho.matrix()).unwrap().eigenvalues;
            let la = hermitian_eigen(&a.matrix().scale(1.0 / a.trace())).unwrap().eigenvalues;
            for k in 0..4 {
                prop_assert!((lr[k] - la[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn unscattered_second_beam_reduces_to_single_beam(va in prop::collection::vec(-2.0f64..2.0, 24)) {
            let a = gram4_from(&va, 3);
            let two = rho_two_beam(&a, &GramMatrix::<f64, 4>::unscattered()).unwrap();
            let one = rho_single_beam(&a).unwrap();
            prop_assert!(dist(&two, one.matrix()) < 1e-12);
        }

        #[test]
        fn conserving_closed_form_matches_pipeline(
            va in prop::collection::vec(-2.0f64..2.0, 12),
            vb in prop::collection::vec(-2.0f64..2.0, 12),
        ) {
            let (a, b) = (gram2_from(&va, 3), gram2_from(&vb, 3));
            let rho = rho_pol_conserving(&a, &b).unwrap();
            let closed = concurrence_pol_closed_form(&a, &b).unwrap();
            prop_assert!((concurrence(&rho).unwrap() - closed).abs() < 1e-10);
            prop_assert!((pseudo_concurrence(&rho).unwrap() - closed).abs() < 1e-10);
            let ones = GramMatrix::<f64, 2>::ones();
            prop_assert!((concurrence_pol_single_beam(&a).unwrap() - concurrence_pol_closed_form(&a, &ones).unwrap()).abs() < 1e-12);
            // only the |+->, |-+> block is populated
            for i in 0..4 {
                for j in 0..4 {
                    if !((i == 1 || i == 2) && (j == 1 || j == 2)) {
                        prop_assert_eq!(rho.matrix().m[i][j], c(0.0, 0.0));
                    }
                }
            }
        }

        #[test]
        fn pure_states_saturate_upper_chsh_bound(v in prop::collection::vec(-1.0f64..1.0, 8)) {
            let psi: [C; 4] = std::array::from_fn(|i| c(v[2 * i], v[2 * i + 1]));
            prop_assume!(psi.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3);
            let rho = DensityMatrix::pure(psi).unwrap();
            let m = Measures::evaluate(&rho).unwrap();
            prop_assert!((m.chsh_max - 2.0 * (1.0 + m.concurrence.powi(2)).sqrt()).abs() < 1e-9);
            // pure-state concurrence 2|ad - bc| after normalization
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            let direct = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm() / norm;
            prop_assert!((m.concurrence - direct).abs() < 1e-9);
        }

        #[test]
        fn fast_evaluation_matches_full_pipeline(va in prop::collection::vec(-2.0f64..2.0, 16), vb in prop::collection::vec(-2.0f64..2.0, 16)) {
            let rho = rho_two_beam(&gram4_from(&va, 2), &gram4_from(&vb, 2)).unwrap();
            let m = Measures::evaluate(&rho).unwrap();
            prop_assert!((m.concurrence - concurrence(&rho).unwrap()).abs() < 1e-12);
            prop_assert!(m.check_bounds(1e-9).is_ok());
        }

        #[test]
        fn wootters_spectrum_matches_trace_powers(va in prop::collection::vec(-2.0f64..2.0, 16), vb in prop::collection::vec(-2.0f64..2.0, 16)) {
            // power sums of the non-Hermitian product must equal those of the
            // computed spectrum, and be real
            let rho = rho_two_beam(&gram4_from(&va, 2), &gram4_from(&vb, 2)).unwrap();
            let flip = sigma_yy::<f64>();
            let tilde = &(&flip * &rho.matrix().conj()) * &flip;
            let prod = rho.matrix() * &tilde;
            let lambdas = wootters_spectrum(&rho).unwrap();
            let mut power = prod;
            for k in 1..=4 {
                let tr = power.trace();
                let expected: f64 = lambdas.iter().map(|l| l.powi(k)).sum();
                prop_assert!(tr.im.abs() < 1e-9);
                prop_assert!((tr.re - expected).abs() < 1e-9);
                power = &power * &prod;
            }
        }
    }
}
