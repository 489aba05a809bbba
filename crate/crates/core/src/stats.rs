//! Sample means with standard errors, and log-log scaling fits.

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile used for checkpoint confidence intervals.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

impl MeanEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let mut acc = RunningMean::default();
        for &x in samples {
            acc.push(x);
        }
        acc.estimate()
    }

    pub fn ci_half_width(&self) -> f64 {
        Z95 * self.stderr
    }

    /// "estimate ≤ bound" with a `k`-standard-error one-sided slack.
    pub fn at_most(&self, bound: f64, k: f64) -> bool {
        self.mean <= bound + k * self.stderr
    }

    /// "estimate ≥ bound" with a `k`-standard-error one-sided slack.
    pub fn at_least(&self, bound: f64, k: f64) -> bool {
        self.mean - k * self.stderr >= bound
    }
}

/// Welford accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunningMean {
    n: usize,
    mean: f64,
    m2: f64,
}

impl RunningMean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn estimate(&self) -> MeanEstimate {
        let stderr = if self.n >= 2 {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        } else {
            0.0
        };
        MeanEstimate { mean: self.mean, stderr, n: self.n }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Half-width of the 95% Student-t interval on the slope.
    pub slope_ci: f64,
    pub points: usize,
}

impl ScalingFit {
    pub fn contains(&self, lo: f64, hi: f64) -> bool {
        self.slope >= lo && self.slope <= hi
    }
}

/// Least-squares fit of `log value` against `log x`. Needs at least four
/// points, all positive.
pub fn fit_scaling(series: &[(f64, f64)]) -> Result<ScalingFit> {
    if series.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs at least 4 points, got {}",
            series.len()
        )));
    }
    if let Some(&(x, y)) = series.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs positive values, got ({x}, {y})"
        )));
    }
    let n = series.len() as f64;
    let xs: Vec<f64> = series.iter().map(|(x, _)| x.ln()).collect();
    let ys: Vec<f64> = series.iter().map(|(_, y)| y.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("scaling fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let slope_stderr = (rss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof)
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(Z95);
    Ok(ScalingFit { slope, intercept, slope_stderr, slope_ci: t * slope_stderr, points: series.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let sqrt: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 2f64.powi(k).sqrt())).collect();
        let fit = fit_scaling(&sqrt).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-10);
        let lin: Vec<(f64, f64)> = (4..10).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(k))).collect();
        assert!((fit_scaling(&lin).unwrap().slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]).is_err());
        assert!(fit_scaling(&[(1.0, 1.0), (2.0, 0.0), (3.0, 3.0), (4.0, 4.0)]).is_err());
    }

    #[test]
    fn running_mean_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.0];
        let est = MeanEstimate::from_samples(&xs);
        let mean = xs.iter().sum::<f64>() / 5.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 4.0;
        assert!((est.mean - mean).abs() < 1e-12);
        assert!((est.stderr - (var / 5.0).sqrt()).abs() < 1e-12);
        assert_eq!(MeanEstimate::from_samples(&[2.0, 2.0]).stderr, 0.0);
    }
}
