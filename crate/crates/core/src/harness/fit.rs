use crate::error::{Error, Result};

use super::scan::{CoherentRow, ScanRow};

/// Power-law fit `I ≈ c · n̄^exponent` in log-log space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
}

/// Least-squares slope of `log(value)` against `log(abscissa)`.
///
/// Needs at least four points, all with positive abscissa and value.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 points, got {}", points.len())));
    }
    let mut logs = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::InvalidArgument(format!("nonpositive point ({x}, {y}) in log-log fit")));
        }
        logs.push((x.ln(), y.ln()));
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all abscissae are equal".into()));
    }
    let exponent = sxy / sxx;
    Ok(ScalingFit { exponent, prefactor: (my - exponent * mx).exp(), points: logs.len() })
}

/// Scaling exponent of a scan against the mean excitation number.
///
/// Rows with `n̄ = 0` are skipped. With `subtract_vacuum` the model's `I(|0⟩)` is removed
/// from each value first. The oracle column is used when `use_oracle` is set, otherwise the
/// perturbative one.
pub fn fit_scaling(rows: &[ScanRow], subtract_vacuum: bool, use_oracle: bool) -> Result<ScalingFit> {
    let mut points = Vec::new();
    for r in rows.iter().filter(|r| r.avg_n > 0.0) {
        let value = if use_oracle {
            r.qfi_oracle.ok_or_else(|| Error::InvalidArgument("scan has no oracle column".into()))?
        } else {
            r.qfi_perturb
        };
        let shift = if subtract_vacuum { r.vacuum_term } else { 0.0 };
        points.push((r.avg_n, value - shift));
    }
    fit_power_law(&points)
}

/// Scaling exponent of a coherent-state scan against its mean excitation number.
pub fn fit_coherent_scaling(rows: &[CoherentRow], subtract_vacuum: bool) -> Result<ScalingFit> {
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.avg_n > 0.0)
        .map(|r| (r.avg_n, r.qfi_oracle - if subtract_vacuum { r.vacuum_term } else { 0.0 }))
        .collect();
    fit_power_law(&points)
}
