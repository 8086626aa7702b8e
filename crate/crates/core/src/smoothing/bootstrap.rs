use serde::{Deserialize, Serialize};

use super::local::{ls_density, running_sup};
use super::weights::WeightFamily;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::lax::{is_admissible, DEFAULT_ADMISSIBILITY};
use crate::metrics::{fit_power_law, PowerLawFit};
use crate::scalar::{lit, Scalar};
use crate::spectral::{sobolev_kappa_norm_sq, KappaParam};

/// Multiple of `R^2` at which the bootstrap quantity counts as escaped.
pub const HORIZON_FACTOR: f64 = 10.0;

/// The bootstrap quantity `B_T = sup_t ||u||^2_{H^{-1}_kappa} + ||u||^2_{LS_kappa} / 4`
/// on one trajectory window, with the fitted constant of the closing inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRecord {
    /// Length of the time window.
    pub t: f64,
    pub kappa: f64,
    pub sup_h1k: f64,
    pub ls_sq: f64,
    pub b_t: f64,
    /// Size of the initial data.
    pub r: f64,
    pub epsilon: f64,
    /// Every snapshot satisfied the admissibility condition.
    pub admissible: bool,
    /// Smallest `C` with `B_T <= C R^2 + C (eps + (T kappa^2)^{1/4} + kappa^{-2}) B_T`;
    /// `None` when `B_T = 0` or the window is not admissible.
    pub fitted_c: Option<f64>,
}

/// Evaluates `B_T` on the whole stored window.
pub fn bootstrap_audit<T: Scalar>(
    traj: &Trajectory<T>,
    kappa: KappaParam<T>,
    r: f64,
    epsilon: f64,
    weights: &WeightFamily<T>,
) -> Result<BootstrapRecord> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let h = if traj.len() > 1 { traj.save_interval()?.abs() } else { T::zero() };
    let sup_h1k = traj
        .snapshots()
        .iter()
        .map(|u| sobolev_kappa_norm_sq(u, -T::one(), kappa))
        .fold(T::zero(), T::max)
        .to_f64_lossy();
    let density = ls_density(traj, kappa, weights)?;
    let ls_sq = running_sup(&density, h).last().copied().unwrap_or_else(T::zero).to_f64_lossy();
    let admissible = traj.snapshots().iter().all(|u| is_admissible(u, kappa, lit(DEFAULT_ADMISSIBILITY)));
    let t = (traj.times()[traj.len() - 1] - traj.times()[0]).abs().to_f64_lossy();
    let k = kappa.get().to_f64_lossy();
    let b_t = sup_h1k + ls_sq / 4.0;
    let fitted_c = (admissible && b_t > 0.0).then(|| {
        let smallness = epsilon + (t * k * k).powf(0.25) + k.powi(-2);
        b_t / (r * r + smallness * b_t)
    });
    Ok(BootstrapRecord { t, kappa: k, sup_h1k, ls_sq, b_t, r, epsilon, admissible, fitted_c })
}

/// First stored time at which `B_t` exceeds `HORIZON_FACTOR * R^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HorizonRecord {
    pub r: f64,
    /// Elapsed time at escape, or the full window length when censored.
    pub horizon: f64,
    /// The diagnostics stayed below the threshold for the whole window.
    pub censored: bool,
}

pub fn apriori_horizon<T: Scalar>(
    traj: &Trajectory<T>,
    kappa: KappaParam<T>,
    r: f64,
    weights: &WeightFamily<T>,
) -> Result<HorizonRecord> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let h = if traj.len() > 1 { traj.save_interval()?.abs() } else { T::zero() };
    let density = ls_density(traj, kappa, weights)?;
    let ls = running_sup(&density, h);
    let threshold = HORIZON_FACTOR * r * r;
    let t0 = traj.times()[0];
    let mut sup = 0.0f64;
    for (k, u) in traj.snapshots().iter().enumerate() {
        sup = sup.max(sobolev_kappa_norm_sq(u, -T::one(), kappa).to_f64_lossy());
        let b = sup + ls[k].to_f64_lossy() / 4.0;
        let elapsed = (traj.times()[k] - t0).abs().to_f64_lossy();
        if !u.check_finite("state").is_ok() || b > threshold || traj.records().get(k).is_some_and(|rec| rec.diverged) {
            return Ok(HorizonRecord { r, horizon: elapsed, censored: false });
        }
    }
    let span = (traj.times()[traj.len() - 1] - t0).abs().to_f64_lossy();
    Ok(HorizonRecord { r, horizon: span, censored: true })
}

/// Log-log slope of the horizon against `R` over the uncensored records.
pub fn horizon_slope(records: &[HorizonRecord]) -> Option<PowerLawFit> {
    let (rs, hs): (Vec<f64>, Vec<f64>) =
        records.iter().filter(|h| !h.censored && h.horizon > 0.0).map(|h| (h.r, h.horizon)).unzip();
    fit_power_law(&rs, &hs).ok()
}
