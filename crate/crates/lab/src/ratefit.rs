//! Log-log least squares for rate exponents.

use anyhow::{bail, Result};
use serde::Serialize;

/// Ordinary least squares of `log(value)` on `log(eps)`: `value ~ eps^slope`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope (0 when the fit is exact)
    pub stderr: f64,
    /// root-mean-square residual in log space
    pub residual: f64,
    pub n: usize,
}

pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        bail!("rate fit needs at least 3 points, got {}", points.len());
    }
    for &(eps, value) in points {
        if !(eps > 0.0) || !(value > 0.0) {
            bail!("rate fit needs positive samples, got ({eps}, {value})");
        }
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        bail!("rate fit needs at least two distinct eps values");
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let residual = (ssr / n).sqrt();
    let stderr = if points.len() > 2 { (ssr / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    Ok(RateFit { slope, intercept, stderr, residual, n: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law_is_recovered() {
        let pts: Vec<(f64, f64)> =
            (1..=5).map(|i| (0.5f64.powi(i), 0.5f64.powi(i).powf(0.25))).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope - 0.25).abs() <= 1e-12);
        assert!(fit.residual <= 1e-12);
        assert!(fit.stderr <= 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let pts: Vec<(f64, f64)> = (1..=4).map(|i| (0.5f64.powi(i), 3.0)).collect();
        let fit = fit_rate(&pts).unwrap();
        assert!(fit.slope.abs() <= 1e-12);
    }

    #[test]
    fn noisy_sixth_root_fits_within_two_percent() {
        // value = 3 eps^{1/6} (1 + 0.01 * alternating noise)
        let pts: Vec<(f64, f64)> = (1..=8)
            .map(|i| {
                let eps = 0.5f64.powi(i);
                let noise = if i % 2 == 0 { 0.01 } else { -0.01 };
                (eps, 3.0 * eps.powf(1.0 / 6.0) * (1.0 + noise))
            })
            .collect();
        let fit = fit_rate(&pts).unwrap();
        assert!((fit.slope - 1.0 / 6.0).abs() <= 0.02, "slope {}", fit.slope);
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(fit_rate(&[(0.5, 1.0), (0.25, 1.0)]).is_err());
        assert!(fit_rate(&[(0.5, 1.0), (0.25, -1.0), (0.125, 1.0)]).is_err());
        assert!(fit_rate(&[(0.5, 0.0), (0.25, 1.0), (0.125, 1.0)]).is_err());
        assert!(fit_rate(&[(0.5, 1.0), (0.5, 2.0), (0.5, 3.0)]).is_err());
    }
}
