//! Random scattering amplitudes and the Gram matrices built from them.
//!
//! Real and imaginary parts of every amplitude are independent standard
//! normals (variance 1 per real component). The probability density of an
//! amplitude matrix `W` is then proportional to `exp(-c Tr W W^dagger)` with
//! `c = 1/2`, and `W W^dagger` follows the Laguerre (complex Wishart)
//! distribution. The orthonormality of the full amplitude vectors over all
//! `M` modes is neglected, which is accurate when the detected mode count is
//! much smaller than `M`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::qstate::GramMatrix;
use crate::smallalg::{hermitian_eigen, unitarize, CMat};
use crate::{Error, Real, Result};

/// Weight `c` in `exp(-c Tr W W^dagger)` for unit variance per real part.
pub const GAUSSIAN_WEIGHT_C: f64 = 0.5;

/// Identity of the random generator behind [`RngStream`]. Bumped whenever
/// the mapping from `(seed, stream_id)` to numbers changes.
pub const RNG_ALGORITHM: &str = "chacha8-rand_chacha0.9-seed_from_u64-stream-v1";

pub type StreamRng = ChaCha8Rng;

/// Addressable random stream: a ChaCha8 generator keyed by `seed` with its
/// 64-bit stream counter set to `stream_id`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Amplitudes of one medium restricted to the detected modes: `P` rows
/// (`++, +-, -+, --` for `P = 4`; `+, -` for `P = 2`) by `n_modes` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeMatrix<T, const P: usize> {
    n_modes: usize,
    w: Vec<Complex<T>>,
}

impl<T: Real, const P: usize> AmplitudeMatrix<T, P> {
    /// Row-major entries, `P * n_modes` of them.
    pub fn from_entries(n_modes: usize, w: Vec<Complex<T>>) -> Result<Self> {
        if n_modes == 0 {
            return Err(Error::InvalidArgument {
                field: "n_modes",
                reason: "must be at least 1".into(),
            });
        }
        if w.len() != P * n_modes {
            return Err(Error::InvalidArgument {
                field: "w",
                reason: format!("expected {} entries, got {}", P * n_modes, w.len()),
            });
        }
        Ok(Self { n_modes, w })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.w[i * self.n_modes..(i + 1) * self.n_modes]
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.w
    }
}

/// Draws a `P x n_modes` matrix of i.i.d. complex Gaussians.
pub fn sample_amplitudes<T, const P: usize, R>(n_modes: usize, rng: &mut R) -> Result<AmplitudeMatrix<T, P>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    if n_modes == 0 {
        return Err(Error::InvalidArgument {
            field: "n_modes",
            reason: "must be at least 1".into(),
        });
    }
    let w = (0..P * n_modes)
        .map(|_| {
            let re: T = StandardNormal.sample(rng);
            let im: T = StandardNormal.sample(rng);
            Complex::new(re, im)
        })
        .collect();
    Ok(AmplitudeMatrix { n_modes, w })
}

/// `W W^dagger`.
pub fn gram<T: Real, const P: usize>(w: &AmplitudeMatrix<T, P>) -> GramMatrix<T, P> {
    let mut g = CMat::<T, P>::zeros();
    for i in 0..P {
        let ri = w.row(i);
        for j in i..P {
            let rj = w.row(j);
            let mut acc = Complex::new(T::zero(), T::zero());
            for (x, y) in ri.iter().zip(rj) {
                acc = acc + *x * y.conj();
            }
            g.m[i][j] = acc;
            g.m[j][i] = acc.conj();
        }
        g.m[i][i].im = T::zero();
    }
    GramMatrix::from_hermitian(g)
}

/// Nonzero eigenvalues of a Laguerre-distributed `P x P` matrix with
/// `n_modes` degrees of freedom, descending; `min(P, n_modes)` of them.
///
/// Samples the Gaussian amplitudes and diagonalizes their Gram matrix, which
/// realizes the Laguerre unitary ensemble exactly.
pub fn sample_laguerre_eigenvalues<T, const P: usize, R>(n_modes: usize, rng: &mut R) -> Result<Vec<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let g = gram(&sample_amplitudes::<T, P, R>(n_modes, rng)?);
    let eig = hermitian_eigen(g.matrix())?;
    Ok(eig.eigenvalues[..P.min(n_modes)]
        .iter()
        .map(|&x| x.max(T::zero()))
        .collect())
}

/// Haar-distributed `P x P` unitary: the Q factor of a Ginibre matrix with
/// the positive-diagonal-R convention.
pub fn sample_haar_unitary<T, const P: usize, R>(rng: &mut R) -> CMat<T, P>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    loop {
        let mut g = CMat::<T, P>::zeros();
        for row in g.m.iter_mut() {
            for z in row.iter_mut() {
                *z = Complex::new(StandardNormal.sample(rng), StandardNormal.sample(rng));
            }
        }
        // singular draws have probability zero; redraw if one shows up
        if let Ok(q) = unitarize(&g) {
            return q;
        }
    }
}

/// `U diag(lambda) U^dagger`, with `lambda` padded by zeros up to `P`.
pub fn assemble_gram<T: Real, const P: usize>(eigenvalues: &[T], u: &CMat<T, P>) -> Result<GramMatrix<T, P>> {
    if eigenvalues.len() > P {
        return Err(Error::InvalidArgument {
            field: "eigenvalues",
            reason: format!("at most {P} values allowed, got {}", eigenvalues.len()),
        });
    }
    let mut g = CMat::<T, P>::zeros();
    for i in 0..P {
        for j in i..P {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (k, &l) in eigenvalues.iter().enumerate() {
                acc = acc + u.m[i][k] * u.m[j][k].conj() * l;
            }
            g.m[i][j] = acc;
            g.m[j][i] = acc.conj();
        }
        g.m[i][i].im = T::zero();
    }
    Ok(GramMatrix::from_hermitian(g))
}
