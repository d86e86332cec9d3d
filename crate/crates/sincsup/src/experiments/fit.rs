//! Aggregation of trial records and least-squares fitting of the candidate
//! growth laws.

use serde::Serialize;

use super::TrialRecord;
use crate::error::{Error, Result};

/// The candidate scaling laws for mean sup vs n. Every model is linear in
/// its regressor, so ordinary least squares has a closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingModel {
    /// α·√(ln n) + β
    SqrtLog,
    /// α·ln ln n + β
    Loglog,
    /// α·√(n ln n) + β
    SqrtNlog,
    /// β
    Constant,
}

/// Canonical model order, used for export layout and tie-breaking.
pub const MODEL_ORDER: [ScalingModel; 4] = [
    ScalingModel::SqrtLog,
    ScalingModel::Loglog,
    ScalingModel::SqrtNlog,
    ScalingModel::Constant,
];

impl ScalingModel {
    pub fn regressor(self, n: f64) -> f64 {
        match self {
            ScalingModel::SqrtLog => n.ln().sqrt(),
            ScalingModel::Loglog => n.ln().ln(),
            ScalingModel::SqrtNlog => (n * n.ln()).sqrt(),
            ScalingModel::Constant => 0.0,
        }
    }

    fn rank(self) -> usize {
        MODEL_ORDER
            .iter()
            .position(|&m| m == self)
            .expect("every model is in MODEL_ORDER")
    }
}

impl std::fmt::Display for ScalingModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ScalingModel::SqrtLog => "sqrt_log",
            ScalingModel::Loglog => "loglog",
            ScalingModel::SqrtNlog => "sqrt_nlog",
            ScalingModel::Constant => "constant",
        })
    }
}

impl std::str::FromStr for ScalingModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt_log" => Ok(ScalingModel::SqrtLog),
            "loglog" => Ok(ScalingModel::Loglog),
            "sqrt_nlog" => Ok(ScalingModel::SqrtNlog),
            "constant" => Ok(ScalingModel::Constant),
            other => Err(Error::validation(format!(
                "unknown scaling model {other:?} (expected sqrt_log, loglog, sqrt_nlog, or constant)"
            ))),
        }
    }
}

/// A fitted growth law on (n, mean) points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub model: ScalingModel,
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    pub rss: f64,
}

/// Sample mean, standard error, and count of `sup_lower` over the records at
/// level n. Needs at least two records to estimate a standard error.
pub fn aggregate(records: &[TrialRecord], n: usize) -> Result<(f64, f64, usize)> {
    let values: Vec<f64> = records.iter().filter(|r| r.n == n).map(|r| r.sup_lower).collect();
    let count = values.len();
    if count < 2 {
        return Err(Error::validation(format!(
            "aggregate needs ≥ 2 records at n = {n}, found {count}"
        )));
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64;
    Ok((mean, (var / count as f64).sqrt(), count))
}

/// Unweighted ordinary least squares of the means against the model's
/// regressor. r² is clipped to [0, 1], and data with no variation at all
/// (total sum of squares below 1e−30) count as perfectly explained.
pub fn fit_scaling(points: &[(usize, f64)], model: ScalingModel) -> Result<ScalingFit> {
    if points.len() < 3 {
        return Err(Error::validation(format!(
            "fit_scaling needs ≥ 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(n, _)) = points.iter().find(|&&(n, _)| n < 16) {
        return Err(Error::validation(format!(
            "fit_scaling needs every n ≥ 16, got {n}"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| model.regressor(n as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let len = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / len;
    let y_mean = ys.iter().sum::<f64>() / len;

    let (alpha, beta) = if model == ScalingModel::Constant {
        (0.0, y_mean)
    } else {
        let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
        if sxx < 1e-30 {
            return Err(Error::validation(
                "degenerate regressor: no variation across the points",
            ));
        }
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - x_mean) * (y - y_mean)).sum();
        let alpha = sxy / sxx;
        (alpha, y_mean - alpha * x_mean)
    };

    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (alpha * x + beta);
            r * r
        })
        .sum();
    let tss: f64 = ys.iter().map(|y| (y - y_mean) * (y - y_mean)).sum();
    let r_squared = if tss < 1e-30 { 1.0 } else { (1.0 - rss / tss).clamp(0.0, 1.0) };

    Ok(ScalingFit { model, alpha, beta, r_squared, rss })
}

/// Picks the fit with the smallest residual sum of squares. Fits within
/// 1e−12 of the best are treated as tied, and the tie resolves to the model
/// latest in [`MODEL_ORDER`] — so when every candidate explains the data
/// equally well (e.g. exactly flat means, which every sloped model also
/// interpolates), the parsimonious constant law is reported rather than a
/// spurious growth law.
pub fn select_model(fits: &[ScalingFit]) -> Result<ScalingFit> {
    if fits.len() < 2 {
        return Err(Error::validation(format!(
            "select_model needs ≥ 2 candidate fits, got {}",
            fits.len()
        )));
    }
    let best = fits.iter().map(|f| f.rss).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(Error::validation("select_model: no fit has a finite rss"));
    }
    let winner = fits
        .iter()
        .filter(|f| f.rss <= best + 1e-12)
        .max_by_key(|f| f.model.rank())
        .expect("at least the best fit survives the filter");
    Ok(winner.clone())
}
