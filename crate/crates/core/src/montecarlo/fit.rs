use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayModel {
    /// `mean = amplitude * exp(rate * N)`
    Exponential,
    /// `mean = amplitude * N^power`
    Algebraic,
}

/// One averaged point of a decay curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitPoint {
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Weighted least-squares fit of `ln(mean)` against `N` or `ln N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    /// Slope: the (negative) decay rate or the power.
    pub rate_or_power: f64,
    pub amplitude: f64,
    /// Covariance of `(ln amplitude, slope)`.
    pub covariance: [[f64; 2]; 2],
    /// `None` with fewer than three rows.
    pub chi2_per_dof: Option<f64>,
    pub n_range: (usize, usize),
    pub rows_used: Vec<usize>,
    /// Rows with `mean <= 3 * stderr`, too noisy to enter the fit.
    pub rows_excluded: Vec<usize>,
    /// False when some used row had zero standard error and the fit fell
    /// back to equal weights.
    pub weighted: bool,
}

/// Fits a decay law to the rows with `mean > 3 * stderr`.
///
/// Weights are `1 / var(ln mean)` with `var(ln mean) = (stderr / mean)^2`.
/// If any usable row has a zero standard error (an exact table) all rows get
/// equal weight and the covariance is scaled by the residual variance.
pub fn fit_decay(points: &[FitPoint], model: DecayModel) -> Result<DecayFit> {
    let (used, excluded): (Vec<&FitPoint>, Vec<&FitPoint>) = points
        .iter()
        .partition(|p| p.mean > 0.0 && p.mean.is_finite() && p.mean > 3.0 * p.stderr);
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable rows (mean > 3 stderr), at least 3 required",
            used.len()
        )));
    }
    let weighted = used.iter().all(|p| p.stderr > 0.0);
    let xs: Vec<f64> = used
        .iter()
        .map(|p| match model {
            DecayModel::Exponential => p.n as f64,
            DecayModel::Algebraic => (p.n as f64).ln(),
        })
        .collect();
    let ys: Vec<f64> = used.iter().map(|p| p.mean.ln()).collect();
    let ws: Vec<f64> = used
        .iter()
        .map(|p| if weighted { (p.mean / p.stderr).powi(2) } else { 1.0 })
        .collect();

    let s: f64 = ws.iter().sum();
    let sx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * x).sum();
    let sy: f64 = ws.iter().zip(&ys).map(|(w, y)| w * y).sum();
    let xbar = sx / s;
    let ybar = sy / s;
    let sxx: f64 = ws.iter().zip(&xs).map(|(w, x)| w * (x - xbar).powi(2)).sum();
    let sxy: f64 = ws.iter().zip(xs.iter().zip(&ys)).map(|(w, (x, y))| w * (x - xbar) * (y - ybar)).sum();
    if !(sxx > 0.0) {
        return Err(Error::InsufficientData("all usable rows share one N".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;

    let chi2: f64 = ws
        .iter()
        .zip(xs.iter().zip(&ys))
        .map(|(w, (x, y))| w * (y - intercept - slope * x).powi(2))
        .sum();
    let dof = used.len() - 2;
    let chi2_per_dof = (dof > 0).then(|| chi2 / dof as f64);

    // (X^T W X)^{-1} for the design [1, x]
    let var_slope = 1.0 / sxx;
    let var_intercept = 1.0 / s + xbar * xbar / sxx;
    let cov = -xbar / sxx;
    let scale = if weighted { 1.0 } else { chi2_per_dof.unwrap_or(0.0) };

    let ns: Vec<usize> = used.iter().map(|p| p.n).collect();
    Ok(DecayFit {
        model,
        rate_or_power: slope,
        amplitude: intercept.exp(),
        covariance: [[var_intercept * scale, cov * scale], [cov * scale, var_slope * scale]],
        chi2_per_dof,
        n_range: (*ns.iter().min().unwrap_or(&0), *ns.iter().max().unwrap_or(&0)),
        rows_used: ns,
        rows_excluded: excluded.iter().map(|p| p.n).collect(),
        weighted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(f: impl Fn(f64) -> f64, ns: &[usize]) -> Vec<FitPoint> {
        ns.iter().map(|&n| FitPoint { n, mean: f(n as f64), stderr: 0.0 }).collect()
    }

    #[test]
    fn recovers_exponential_generator() {
        let t = table(|n| (-0.523 * n).exp(), &[1, 2, 3, 4, 5, 6]);
        let fit = fit_decay(&t, DecayModel::Exponential).unwrap();
        assert!((fit.rate_or_power + 0.523).abs() < 1e-9);
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
        assert!(!fit.weighted);
        assert_eq!(fit.n_range, (1, 6));
    }

    #[test]
    fn recovers_power_law() {
        let t = table(|n| std::f64::consts::FRAC_PI_4 / n, &[8, 16, 32, 64]);
        let fit = fit_decay(&t, DecayModel::Algebraic).unwrap();
        assert!((fit.rate_or_power + 1.0).abs() < 1e-9);
        assert!((fit.amplitude - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }

    #[test]
    fn weighted_fit_and_exclusions() {
        let mut t: Vec<FitPoint> = (1..=5)
            .map(|n| {
                let m = 2.0 * (-0.5 * n as f64).exp();
                FitPoint { n, mean: m, stderr: 0.01 * m }
            })
            .collect();
        t.push(FitPoint { n: 6, mean: 1e-3, stderr: 1e-3 });
        let fit = fit_decay(&t, DecayModel::Exponential).unwrap();
        assert!(fit.weighted);
        assert_eq!(fit.rows_excluded, vec![6]);
        assert!((fit.rate_or_power + 0.5).abs() < 1e-12);
        assert!(fit.chi2_per_dof.unwrap() < 1e-20);
        // slope variance: 1 / sum w (x - xbar)^2 with w = 1e4
        assert!((fit.covariance[1][1] - 1.0 / (1e4 * 10.0)).abs() < 1e-15);
    }

    #[test]
    fn too_few_rows() {
        let t = vec![
            FitPoint { n: 1, mean: 0.5, stderr: 0.01 },
            FitPoint { n: 2, mean: 0.2, stderr: 0.01 },
            FitPoint { n: 3, mean: 0.01, stderr: 0.01 },
        ];
        assert!(matches!(fit_decay(&t, DecayModel::Exponential), Err(Error::InsufficientData(_))));
    }
}
