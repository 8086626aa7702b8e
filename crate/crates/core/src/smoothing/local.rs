use rayon::prelude::*;

use super::weights::WeightFamily;
use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{derivative, sobolev_kappa_norm_sq, KappaParam};

/// Trapezoid weights for `n` samples spaced by `h`.
pub(crate) fn trapezoid_weights<T: Scalar>(n: usize, h: T) -> Vec<T> {
    if n == 1 {
        return vec![T::zero()];
    }
    let mut w = vec![h; n];
    w[0] = h / lit(2.0);
    w[n - 1] = h / lit(2.0);
    w
}

fn time_step<T: Scalar>(traj: &Trajectory<T>) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if traj.len() == 1 {
        return Ok(T::zero());
    }
    Ok(traj.save_interval()?.abs())
}

/// `||psi_{x0} u'(t)||^2_{H^{-1}_kappa}` for every snapshot (rows) and center (columns).
pub fn ls_density<T: Scalar>(
    traj: &Trajectory<T>,
    kappa: KappaParam<T>,
    weights: &WeightFamily<T>,
) -> Result<Vec<Vec<T>>> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    if !traj.grid().same_as(weights.grid()) {
        return Err(Error::GridMismatch);
    }
    let psis = weights.psi_all();
    traj.snapshots()
        .par_iter()
        .map(|u| {
            let du = derivative(u, 1)?;
            Ok(psis.iter().map(|p| sobolev_kappa_norm_sq(&p.pointwise(&du), -T::one(), kappa)).collect())
        })
        .collect()
}

/// Running `max_{x0} int_0^t density dt` after each snapshot (trapezoid in time).
pub(crate) fn running_sup<T: Scalar>(density: &[Vec<T>], h: T) -> Vec<T> {
    let centers = density.first().map_or(0, Vec::len);
    let mut acc = vec![T::zero(); centers];
    let mut out = Vec::with_capacity(density.len());
    out.push(T::zero());
    for k in 1..density.len() {
        for (c, a) in acc.iter_mut().enumerate() {
            *a = *a + h / lit(2.0) * (density[k - 1][c] + density[k][c]);
        }
        out.push(acc.iter().copied().fold(T::zero(), T::max));
    }
    out
}

/// Local smoothing norm `max_{x0} ||psi_{x0} u'||_{L^2_t H^{-1}_kappa}` over the
/// stored time window, with the trapezoid rule on snapshots.
pub fn ls_norm<T: Scalar>(traj: &Trajectory<T>, kappa: KappaParam<T>, weights: &WeightFamily<T>) -> Result<T> {
    let h = time_step(traj)?;
    let density = ls_density(traj, kappa, weights)?;
    Ok(running_sup(&density, h).last().copied().unwrap_or_else(T::zero).sqrt())
}

/// Fraction of each grid cell `[x_i - dx/2, x_i + dx/2)` inside the periodic window `|x - x0| < 1`.
fn window_weights<T: Scalar>(traj: &Trajectory<T>, x0: T) -> Vec<T> {
    let grid = traj.grid();
    let dx = grid.dx();
    let half = dx / lit(2.0);
    (0..grid.points())
        .map(|i| {
            let d = grid.periodic_offset(grid.x(i), x0);
            let lo = (d - half).max(-T::one());
            let hi = (d + half).min(T::one());
            (hi - lo).max(T::zero())
        })
        .collect()
}

/// `max_{x0} int int_{|x - x0| < 1} u^2 dx dt` over the stored window.
pub fn local_mass<T: Scalar>(traj: &Trajectory<T>, weights: &WeightFamily<T>) -> Result<T> {
    let h = time_step(traj)?;
    if !traj.grid().same_as(weights.grid()) {
        return Err(Error::GridMismatch);
    }
    let tw = trapezoid_weights(traj.len(), h);
    let squares: Vec<Vec<T>> = traj.snapshots().iter().map(|u| u.samples().iter().map(|&v| v * v).collect()).collect();
    let best = weights
        .centers()
        .par_iter()
        .map(|&x0| {
            let win = window_weights(traj, x0);
            squares
                .iter()
                .zip(&tw)
                .map(|(sq, &w)| w * sq.iter().zip(&win).map(|(&a, &b)| a * b).sum::<T>())
                .sum::<T>()
        })
        .collect::<Vec<T>>()
        .into_iter()
        .fold(T::zero(), T::max);
    Ok(best)
}

/// `max_t ||u(t)||^2_{H^{-1}_kappa}` over the snapshots.
pub fn sup_h1k_sq<T: Scalar>(traj: &Trajectory<T>, kappa: KappaParam<T>) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(traj
        .snapshots()
        .iter()
        .map(|u| sobolev_kappa_norm_sq(u, -T::one(), kappa))
        .fold(T::zero(), T::max))
}
