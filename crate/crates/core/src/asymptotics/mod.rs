//! Large-N behavior of the averaged entanglement measures.
//!
//! For polarization-mixing disorder the rescaled Gram eigenvalues
//! `a_n = 2N (1 + alpha_n)` have density `~ exp(-N f(alpha))` with the rate
//! function `f(alpha) = sum_n [alpha_n - ln(1 + alpha_n)]`. A nonzero
//! concurrence needs a large fluctuation away from `alpha = 0`, so the
//! average decays as `exp(-N min f)` over the region where the measure can be
//! positive. For single-beam scattering that region follows from the maximal
//! concurrence and pseudo-concurrence over a unitary orbit, which depend on
//! the spectrum only; [`decay_constant_a`] and [`decay_constant_b`] solve the
//! two minimizations numerically.
//!
//! For polarization-conserving disorder the decay is algebraic.

pub mod optimize;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::ensembles::RngStream;
use crate::montecarlo::McEstimate;
use crate::{Beams, Error, Mixing, Real, Result};
use optimize::{minimize_constrained, Options};

/// `3 ln 3 - 4 ln 2`, the single-beam concurrence decay rate.
pub fn a_closed_form() -> f64 {
    3.0 * 3f64.ln() - 4.0 * 2f64.ln()
}

/// `ln(11 + 5 sqrt 5) - ln 2`, the single-beam pseudo-concurrence decay rate.
pub fn b_closed_form() -> f64 {
    (11.0 + 5.0 * 5f64.sqrt()).ln() - 2f64.ln()
}

/// Minimizer of the concurrence problem: `(1, -1/3, -1/3, -1/3)`.
pub fn alpha_opt_a_closed_form() -> [f64; 4] {
    [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]
}

/// Minimizer of the pseudo-concurrence problem.
pub fn alpha_opt_b_closed_form() -> [f64; 4] {
    let (r2, r5) = (2f64.sqrt(), 5f64.sqrt());
    [
        0.5 * (-1.0 + 2.0 * r2 + r5),
        0.5 * (1.0 - r5),
        0.5 * (1.0 - r5),
        0.5 * (-1.0 - 2.0 * r2 + r5),
    ]
}

/// Empirical two-beam concurrence decay rate, read off finite-N numerics.
/// No closed form or amplitude is known.
pub const TWO_BEAM_MIXING_RATE: f64 = 3.3;

/// Rescaled eigenvalues `alpha_n`, each `> -1`, sorted descending.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RescaledSpectrum<T> {
    alpha: [T; 4],
}

impl<T: Real> RescaledSpectrum<T> {
    pub fn new(mut alpha: [T; 4]) -> Result<Self> {
        check_domain(&alpha)?;
        alpha.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        Ok(Self { alpha })
    }

    /// From Gram eigenvalues `a_n = 2N (1 + alpha_n)`.
    pub fn from_eigenvalues(eigenvalues: [T; 4], n_modes: usize) -> Result<Self> {
        let scale = T::lit(2.0 * n_modes as f64);
        Self::new(eigenvalues.map(|a| a / scale - T::one()))
    }

    pub fn alpha(&self) -> &[T; 4] {
        &self.alpha
    }

    pub fn rate(&self) -> T {
        self.alpha.iter().map(|&a| a - a.ln_1p()).sum()
    }
}

fn check_domain<T: Real>(alpha: &[T; 4]) -> Result<()> {
    if let Some(bad) = alpha.iter().find(|&&a| !(a > -T::one())) {
        return Err(Error::DomainError(format!("alpha = {bad} is not > -1")));
    }
    Ok(())
}

/// `f(alpha) = sum_n [alpha_n - ln(1 + alpha_n)]`.
pub fn rate_function<T: Real>(alpha: &[T; 4]) -> Result<T> {
    check_domain(alpha)?;
    Ok(alpha.iter().map(|&a| a - a.ln_1p()).sum())
}

fn check_spectrum<T: Real>(l: &[T; 4]) -> Result<()> {
    if l.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::OrderViolation);
    }
    if !(l[3] >= T::zero()) {
        return Err(Error::DomainError("eigenvalues must be nonnegative".into()));
    }
    Ok(())
}

fn concurrence_orbit_expr<T: Real>(l: &[T; 4]) -> T {
    l[0] - l[2] - T::lit(2.0) * (l[1] * l[3]).sqrt()
}

fn pseudo_orbit_expr<T: Real>(l: &[T; 4]) -> T {
    let two = T::lit(2.0);
    let total = l[0] + l[1] + l[2] + l[3];
    two * (l[0] - l[3]).powi(2) + two * (l[1] - l[2]).powi(2) - total * total
}

/// Largest concurrence of any state `W rho W^dagger` with `rho` of spectrum
/// `l1 >= l2 >= l3 >= l4`: `max(0, l1 - l3 - 2 sqrt(l2 l4))`.
pub fn max_concurrence_over_unitaries<T: Real>(l: &[T; 4]) -> Result<T> {
    check_spectrum(l)?;
    Ok(concurrence_orbit_expr(l).max(T::zero()))
}

/// Largest pseudo-concurrence over the unitary orbit of a spectrum:
/// `sqrt(max(0, 2(l1 - l4)^2 + 2(l2 - l3)^2 - (sum l)^2))`.
pub fn max_pseudo_concurrence_over_unitaries<T: Real>(l: &[T; 4]) -> Result<T> {
    check_spectrum(l)?;
    Ok(pseudo_orbit_expr(l).max(T::zero()).sqrt())
}

/// Minimizing fluctuation of the rescaled spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalFluctuation {
    pub alpha_opt: RescaledSpectrum<f64>,
    /// Minimal rate function value, the decay constant.
    pub rate: f64,
    /// Constraint value at the optimum (zero on the boundary).
    pub constraint: f64,
}

/// Outcome of a multistart minimization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Multistart {
    pub best: OptimalFluctuation,
    /// One entry per start, in start order.
    pub starts: Vec<OptimalFluctuation>,
}

impl Multistart {
    /// Largest componentwise distance of any start's minimizer from the best.
    pub fn spread(&self) -> f64 {
        self.starts
            .iter()
            .flat_map(|s| s.alpha_opt.alpha.iter().zip(self.best.alpha_opt.alpha.iter()).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max)
    }
}

pub const DEFAULT_STARTS: usize = 10;
pub const DEFAULT_START_SEED: u64 = 0x5eed;

fn sorted_desc(x: &[f64; 4]) -> ([f64; 4], [usize; 4]) {
    let mut order = [0, 1, 2, 3];
    order.sort_by(|&i, &j| x[j].partial_cmp(&x[i]).unwrap_or(std::cmp::Ordering::Equal));
    (order.map(|i| x[i]), order)
}

/// Constraint on `alpha`, evaluated at the sorted `Lambda = 1 + alpha`, with
/// its gradient pulled back through the sort.
fn orbit_constraint(kind: Measure, x: &[f64; 4]) -> (f64, [f64; 4]) {
    if x.iter().any(|&a| !(a > -1.0)) {
        return (f64::NAN, [f64::NAN; 4]);
    }
    let (s, order) = sorted_desc(x);
    let l = s.map(|a| 1.0 + a);
    let (value, grad_sorted) = match kind {
        Measure::Concurrence => {
            let root = (l[1] * l[3]).sqrt();
            (concurrence_orbit_expr(&l), [1.0, -l[3] / root, -1.0, -l[1] / root])
        }
        Measure::PseudoConcurrence => {
            let total: f64 = l.iter().sum();
            let d14 = 4.0 * (l[0] - l[3]);
            let d23 = 4.0 * (l[1] - l[2]);
            (
                pseudo_orbit_expr(&l),
                [d14 - 2.0 * total, d23 - 2.0 * total, -d23 - 2.0 * total, -d14 - 2.0 * total],
            )
        }
    };
    let mut grad = [0.0; 4];
    for (k, &i) in order.iter().enumerate() {
        grad[i] = grad_sorted[k];
    }
    (value, grad)
}

fn rate_with_gradient(x: &[f64; 4]) -> (f64, [f64; 4]) {
    if x.iter().any(|&a| !(a > -1.0)) {
        return (f64::INFINITY, [f64::NAN; 4]);
    }
    let value = x.iter().map(|&a| a - a.ln_1p()).sum();
    (value, x.map(|a| a / (1.0 + a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Measure {
    Concurrence,
    PseudoConcurrence,
}

/// Deterministic feasible starting points drawn uniformly from `(-0.95, 4)^4`.
fn feasible_starts(kind: Measure, n_starts: usize, seed: u64) -> Vec<[f64; 4]> {
    let mut rng = RngStream::new(seed, kind as u64).rng();
    let mut out = Vec::with_capacity(n_starts);
    while out.len() < n_starts {
        let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-0.95..4.0));
        if orbit_constraint(kind, &x).0 > 0.0 {
            out.push(x);
        }
    }
    out
}

fn solve(kind: Measure, n_starts: usize, seed: u64) -> Result<Multistart> {
    if n_starts == 0 {
        return Err(Error::InvalidArgument { field: "n_starts", reason: "must be at least 1".into() });
    }
    let opts = Options::default();
    let constraint = |x: &[f64; 4]| orbit_constraint(kind, x);
    let mut starts = Vec::with_capacity(n_starts);
    for x0 in feasible_starts(kind, n_starts, seed) {
        let sol = minimize_constrained(&rate_with_gradient, &constraint, x0, &opts);
        if !sol.converged || sol.constraint.abs() > 1e-8 {
            return Err(Error::ConvergenceFailure("optimal-fluctuation minimization"));
        }
        starts.push(OptimalFluctuation {
            alpha_opt: RescaledSpectrum::new(sol.x)?,
            rate: sol.value,
            constraint: sol.constraint,
        });
    }
    // best value wins; earlier start on ties
    let best = starts
        .iter()
        .copied()
        .reduce(|best, s| if s.rate < best.rate { s } else { best })
        .expect("n_starts >= 1");
    Ok(Multistart { best, starts })
}

/// Concurrence decay constant for single-beam scattering: the minimum of
/// `f(alpha)` subject to `Lambda1 - Lambda3 - 2 sqrt(Lambda2 Lambda4) >= 0`,
/// `Lambda = 1 + alpha` sorted descending.
pub fn decay_constant_a() -> Result<OptimalFluctuation> {
    Ok(decay_constant_a_multistart(DEFAULT_STARTS, DEFAULT_START_SEED)?.best)
}

pub fn decay_constant_a_multistart(n_starts: usize, seed: u64) -> Result<Multistart> {
    solve(Measure::Concurrence, n_starts, seed)
}

/// Pseudo-concurrence decay constant for single-beam scattering: the
/// minimum of `f(alpha)` subject to
/// `2(Lambda1 - Lambda4)^2 + 2(Lambda2 - Lambda3)^2 - (sum Lambda)^2 >= 0`.
pub fn decay_constant_b() -> Result<OptimalFluctuation> {
    Ok(decay_constant_b_multistart(DEFAULT_STARTS, DEFAULT_START_SEED)?.best)
}

pub fn decay_constant_b_multistart(n_starts: usize, seed: u64) -> Result<Multistart> {
    solve(Measure::PseudoConcurrence, n_starts, seed)
}

/// Exact average concurrence for polarization-conserving scattering of one
/// beam: `(sqrt(pi)/2) Gamma(N + 1/2) / Gamma(N + 1)`.
pub fn exact_mean_concurrence_single_conserving(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument { field: "n", reason: "must be at least 1".into() });
    }
    let x = n as f64;
    let log_ratio = libm::lgamma(x + 0.5) - libm::lgamma(x + 1.0);
    Ok(0.5 * std::f64::consts::PI.sqrt() * log_ratio.exp())
}

/// An asymptotic prediction for one measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Prediction {
    /// The predicted average itself.
    Value { value: f64 },
    /// `average ~ exp(-rate N)` with unknown amplitude; `relative` is
    /// `exp(-rate N)`.
    Exponential { rate: f64, relative: f64 },
    /// No prediction available.
    Unknown,
}

/// Asymptotic predictions for one scattering class at `N1 = N2 = n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Asymptote {
    pub concurrence: Prediction,
    pub pseudo_concurrence: Prediction,
}

/// Large-N predictions:
/// conserving/both `pi/(4N)`, conserving/single `(sqrt(pi)/2)/sqrt(N)`,
/// mixing/single `exp(-A N)` and `exp(-B N)`, mixing/both `exp(-3.3 N)` for
/// the concurrence only.
pub fn asymptote(mixing: Mixing, beams: Beams, n: usize) -> Result<Asymptote> {
    if n == 0 {
        return Err(Error::InvalidArgument { field: "n", reason: "must be at least 1".into() });
    }
    let x = n as f64;
    let exp = |rate: f64| Prediction::Exponential { rate, relative: (-rate * x).exp() };
    Ok(match (mixing, beams) {
        (Mixing::PolarizationConserving, Beams::Both) => {
            let v = Prediction::Value { value: std::f64::consts::FRAC_PI_4 / x };
            Asymptote { concurrence: v, pseudo_concurrence: v }
        }
        (Mixing::PolarizationConserving, Beams::Single) => {
            let v = Prediction::Value { value: 0.5 * std::f64::consts::PI.sqrt() / x.sqrt() };
            Asymptote { concurrence: v, pseudo_concurrence: v }
        }
        (Mixing::PolarizationMixing, Beams::Single) => Asymptote {
            concurrence: exp(a_closed_form()),
            pseudo_concurrence: exp(b_closed_form()),
        },
        (Mixing::PolarizationMixing, Beams::Both) => Asymptote {
            concurrence: exp(TWO_BEAM_MIXING_RATE),
            pseudo_concurrence: Prediction::Unknown,
        },
    })
}

/// Leading-order coefficient of the two-beam polarization-conserving
/// average, `N <C>`, from the Gaussian limit of the Laguerre ensemble.
///
/// Writes `A = 2N (1 + a)`, `B = 2N (1 + b)` with `a`, `b` 2x2 Hermitian
/// matrices of density `exp(-N Tr a a^dagger / 2)`: diagonal entries have
/// variance `1/N`, real and imaginary parts of the off-diagonal entry have
/// variance `1/(2N)`. To leading order the closed-form concurrence is
/// `|a_{+-}| |b_{+-}|`; the estimate is of `N` times that, whose exact value
/// is `pi/4`.
pub fn gaussian_fluctuation_mean_conserving_both(n: usize, n_samples: u64, seed: u64) -> Result<McEstimate> {
    if n == 0 || n_samples < 2 {
        return Err(Error::InvalidArgument { field: "n", reason: "need n >= 1 and at least 2 samples".into() });
    }
    let x = n as f64;
    let diag = Normal::new(0.0, (1.0 / x).sqrt()).expect("positive sigma");
    let off = Normal::new(0.0, (0.5 / x).sqrt()).expect("positive sigma");
    let mut rng = RngStream::new(seed, 0).rng();
    let draw_offdiag = |rng: &mut _| -> f64 {
        // diagonal entries do not enter at leading order but are part of the draw
        let _d1: f64 = diag.sample(rng);
        let _d2: f64 = diag.sample(rng);
        let re: f64 = off.sample(rng);
        let im: f64 = off.sample(rng);
        re.hypot(im)
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..n_samples {
        let v = x * draw_offdiag(&mut rng) * draw_offdiag(&mut rng);
        sum += v;
        sum_sq += v * v;
    }
    let nf = n_samples as f64;
    let mean = sum / nf;
    let var = ((sum_sq - sum * mean) / (nf - 1.0)).max(0.0);
    Ok(McEstimate { mean, stderr: (var / nf).sqrt(), n_samples, n_discarded: 0 })
}
