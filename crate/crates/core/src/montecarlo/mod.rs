//! Monte Carlo estimates of the ensemble-averaged concurrence and
//! pseudo-concurrence.
//!
//! Samples are processed in fixed blocks of [`BLOCK_SIZE`]; block `k` draws
//! from `RngStream { seed, stream_id: k }`. Block results are merged in block
//! order, so an estimate depends only on `(scenario, n_samples, seed)` and
//! never on the number of worker threads.

mod fit;

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{gram, sample_amplitudes, RngStream, StreamRng};
use crate::qstate::{rho_pol_conserving, rho_single_beam, rho_two_beam, DensityMatrix, GramMatrix, Measures};
use crate::{Beams, Error, Mixing, Result, Scenario};

pub use fit::{fit_decay, DecayFit, DecayModel, FitPoint};

pub const BLOCK_SIZE: u64 = 8192;

/// Largest tolerated fraction of discarded (degenerate) samples.
pub const MAX_DISCARD_FRACTION: f64 = 1e-6;

/// Sample mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n_samples)`.
    pub stderr: f64,
    pub n_samples: u64,
    /// Draws rejected for a degenerate normalization.
    pub n_discarded: u64,
}

impl McEstimate {
    /// True when the discard rate is high enough to question the estimate.
    pub fn flagged(&self) -> bool {
        self.n_discarded as f64 > MAX_DISCARD_FRACTION * self.n_samples.max(1) as f64
    }

    /// Builds an estimate from compensated sums of `x` and `x^2`.
    fn from_sums(sum: f64, sum_sq: f64, n: u64, n_discarded: u64) -> Self {
        let (mean, stderr) = if n == 0 {
            (f64::NAN, f64::NAN)
        } else if n == 1 {
            (sum, f64::NAN)
        } else {
            let nf = n as f64;
            let mean = sum / nf;
            let var = ((sum_sq - sum * mean) / (nf - 1.0)).max(0.0);
            (mean, (var / nf).sqrt())
        };
        Self {
            mean,
            stderr,
            n_samples: n,
            n_discarded,
        }
    }
}

/// Averages of both measures for one scenario.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub concurrence: McEstimate,
    pub pseudo_concurrence: McEstimate,
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[derive(Clone, Copy, Debug, Default)]
struct BlockStats {
    c: CompensatedSum,
    c_sq: CompensatedSum,
    cp: CompensatedSum,
    cp_sq: CompensatedSum,
    n: u64,
    discarded: u64,
}

/// Draws one reduced density matrix for `scenario`.
///
/// Returns `Ok(None)` for a draw whose normalization is degenerate.
pub fn draw_state(scenario: &Scenario, rng: &mut StreamRng) -> Result<Option<DensityMatrix<f64>>> {
    let rho = match (scenario.mixing, scenario.beams) {
        (Mixing::PolarizationMixing, Beams::Both) => {
            let a = gram(&sample_amplitudes::<f64, 4, _>(scenario.n1, rng)?);
            let b = gram(&sample_amplitudes::<f64, 4, _>(scenario.n2, rng)?);
            rho_two_beam(&a, &b)
        }
        (Mixing::PolarizationMixing, Beams::Single) => {
            let a = gram(&sample_amplitudes::<f64, 4, _>(scenario.n1, rng)?);
            rho_single_beam(&a)
        }
        (Mixing::PolarizationConserving, Beams::Both) => {
            let a = gram(&sample_amplitudes::<f64, 2, _>(scenario.n1, rng)?);
            let b = gram(&sample_amplitudes::<f64, 2, _>(scenario.n2, rng)?);
            rho_pol_conserving(&a, &b)
        }
        (Mixing::PolarizationConserving, Beams::Single) => {
            let a = gram(&sample_amplitudes::<f64, 2, _>(scenario.n1, rng)?);
            rho_pol_conserving(&a, &GramMatrix::<f64, 2>::unscattered())
        }
    };
    match rho {
        Ok(rho) => Ok(Some(rho)),
        Err(Error::DegenerateNormalization(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn run_block(scenario: &Scenario, seed: u64, block: u64, count: u64) -> Result<BlockStats> {
    let mut rng = RngStream::new(seed, block).rng();
    let mut stats = BlockStats::default();
    for i in 0..count {
        let Some(rho) = draw_state(scenario, &mut rng)? else {
            stats.discarded += 1;
            continue;
        };
        let m = Measures::evaluate(&rho)?;
        if cfg!(debug_assertions) && i % 100 == 0 {
            debug_check(scenario, &rho, &m);
        }
        stats.c.add(m.concurrence);
        stats.c_sq.add(m.concurrence * m.concurrence);
        stats.cp.add(m.pseudo_concurrence);
        stats.cp_sq.add(m.pseudo_concurrence * m.pseudo_concurrence);
        stats.n += 1;
    }
    Ok(stats)
}

fn debug_check(scenario: &Scenario, rho: &DensityMatrix<f64>, m: &Measures<f64>) {
    if let Err(what) = m.check_bounds(1e-9) {
        panic!("{what} for {scenario:?}: {m:?}, rho = {rho:?}");
    }
    if scenario.mixing == Mixing::PolarizationConserving {
        assert!(
            (m.concurrence - m.pseudo_concurrence).abs() <= 1e-10,
            "C != C' for polarization-conserving state: {m:?}"
        );
    }
}

/// Monte Carlo averages of the concurrence and pseudo-concurrence.
///
/// The result is bit-identical for any `workers >= 1`.
pub fn estimate(scenario: &Scenario, n_samples: u64, seed: u64, workers: usize) -> Result<Estimate> {
    scenario.validate()?;
    if n_samples == 0 {
        return Err(Error::InvalidArgument { field: "n_samples", reason: "must be at least 1".into() });
    }
    if workers == 0 {
        return Err(Error::InvalidArgument { field: "workers", reason: "must be at least 1".into() });
    }
    let n_blocks = n_samples.div_ceil(BLOCK_SIZE);
    let block_len = |k: u64| BLOCK_SIZE.min(n_samples - k * BLOCK_SIZE);

    let blocks: Vec<BlockStats> = if workers == 1 {
        (0..n_blocks)
            .map(|k| run_block(scenario, seed, k, block_len(k)))
            .collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument { field: "workers", reason: e.to_string() })?;
        pool.install(|| {
            (0..n_blocks)
                .into_par_iter()
                .map(|k| run_block(scenario, seed, k, block_len(k)))
                .collect::<Result<Vec<_>>>()
        })?
    };

    let mut total = BlockStats::default();
    for b in &blocks {
        total.c.add(b.c.value());
        total.c_sq.add(b.c_sq.value());
        total.cp.add(b.cp.value());
        total.cp_sq.add(b.cp_sq.value());
        total.n += b.n;
        total.discarded += b.discarded;
    }
    Ok(Estimate {
        concurrence: McEstimate::from_sums(total.c.value(), total.c_sq.value(), total.n, total.discarded),
        pseudo_concurrence: McEstimate::from_sums(total.cp.value(), total.cp_sq.value(), total.n, total.discarded),
    })
}

/// One row of a sweep over the detected mode count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub concurrence: McEstimate,
    pub pseudo_concurrence: McEstimate,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed used for the sweep row at mode count `n`.
pub fn row_seed(seed: u64, n: usize) -> u64 {
    splitmix64(seed ^ splitmix64(n as u64))
}

/// Estimates at `N1 = N2 = N` for every `N` in `n_values`. Each row uses
/// its own seed derived from `(seed, N)`, so rows are reproducible alone.
pub fn sweep(template: &Scenario, n_values: &[usize], n_samples: u64, seed: u64, workers: usize) -> Result<Vec<SweepRow>> {
    if n_values.is_empty() {
        return Err(Error::InvalidArgument { field: "n_values", reason: "must not be empty".into() });
    }
    n_values
        .iter()
        .map(|&n| {
            let scenario = template.with_modes(n);
            let e = estimate(&scenario, n_samples, row_seed(seed, n), workers)?;
            Ok(SweepRow {
                n,
                concurrence: e.concurrence,
                pseudo_concurrence: e.pseudo_concurrence,
            })
        })
        .collect()
}
