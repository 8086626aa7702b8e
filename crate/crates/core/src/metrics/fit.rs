use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    /// Full width of the 95% Student-t confidence interval of the slope.
    pub ci_width: f64,
}

pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), found: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument(format!("power-law fit needs at least 3 points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("power-law fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let dof = n - 2.0;
    let se = (rss / dof / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, dof).map_err(|e| Error::InvalidArgument(e.to_string()))?.inverse_cdf(0.975);
    Ok(PowerLawFit { slope, intercept, ci_width: 2.0 * t * se })
}
