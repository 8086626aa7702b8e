use rayon::prelude::*;

use super::coefficients::CoefficientSet;
use super::equation::perturbation_spectrum;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::lax::{is_admissible, minimal_admissible_kappa, rho_alpha_with, LaxResolvent, DEFAULT_ADMISSIBILITY};
use crate::scalar::{lit, Scalar};
use crate::spectral::{dealiased_product, dealiased_product_spectrum, derivative, KappaParam, RealField};

/// Physical-space perturbation `(a1 u')' + a2 u^2 + a3 u' + a4 u` at time `t`.
pub fn perturbation<T: Scalar>(u: &RealField<T>, t: T, coeffs: &CoefficientSet<T>) -> Result<RealField<T>> {
    if !u.grid().same_as(coeffs.grid()) {
        return Err(Error::GridMismatch);
    }
    let u_hat = u.spectrum();
    let u2 = dealiased_product_spectrum(u.grid(), &u_hat, &u_hat);
    Ok(RealField::from_spectrum(u.grid(), perturbation_spectrum(coeffs, &u_hat, &u2, t)?))
}

/// `\int [-a1 (u')^2 + a2 u^3 - a3' u^2 / 2 + a4 u^2] dx`, the growth rate of `\int u^2/2`.
pub fn l2_growth_rate<T: Scalar>(u: &RealField<T>, t: T, coeffs: &CoefficientSet<T>) -> Result<T> {
    let du = derivative(u, 1)?;
    let u2 = dealiased_product(u, u);
    let mut total = T::zero();
    if let Some(a1) = coeffs.sample(1, t)? {
        total = total - a1.pointwise(&du).pointwise(&du).integral();
    }
    if let Some(a2) = coeffs.sample(2, t)? {
        total = total + a2.pointwise(&u2).pointwise(u).integral();
    }
    if let Some(a3) = coeffs.sample(3, t)? {
        total = total - derivative(&a3, 1)?.pointwise(&u2).integral() / lit(2.0);
    }
    if let Some(a4) = coeffs.sample(4, t)? {
        total = total + a4.pointwise(&u2).integral();
    }
    Ok(total)
}

/// Centered-difference check of the `L^2` balance law at interior snapshots,
/// normalized by `max(1, \int u^2/2)`. Returns `(t_i, residual_i)`.
pub fn l2_identity_residual<T: Scalar>(traj: &Trajectory<T>, coeffs: &CoefficientSet<T>) -> Result<Vec<(T, T)>> {
    if traj.len() < 3 {
        return Err(Error::TooFewSnapshots { needed: 3, found: traj.len() });
    }
    let h = traj.save_interval()?;
    let half_mass: Vec<T> = traj.snapshots().iter().map(|u| u.l2_norm_sq() / lit(2.0)).collect();
    (1..traj.len() - 1)
        .map(|i| {
            let t = traj.times()[i];
            let u = &traj.snapshots()[i];
            let rate = (half_mass[i + 1] - half_mass[i - 1]) / (h + h);
            let balance = l2_growth_rate(u, t, coeffs)?;
            Ok((t, (rate - balance).abs() / half_mass[i].max(T::one())))
        })
        .collect()
}

fn check_snapshots_admissible<T: Scalar>(traj: &Trajectory<T>, kappa: KappaParam<T>) -> Result<()> {
    let constant = lit::<T>(DEFAULT_ADMISSIBILITY);
    for (u, &t) in traj.snapshots().iter().zip(traj.times()) {
        if !is_admissible(u, kappa, constant) {
            let required = minimal_admissible_kappa(u, constant).map(|k| k.get().to_f64_lossy()).unwrap_or(f64::INFINITY);
            return Err(Error::KappaTooSmall { kappa: kappa.get().to_f64_lossy(), t: t.to_f64_lossy(), required });
        }
    }
    Ok(())
}

/// `alpha(t)` at every snapshot.
pub fn alpha_series<T: Scalar>(traj: &Trajectory<T>, kappa: KappaParam<T>) -> Result<Vec<T>> {
    check_snapshots_admissible(traj, kappa)?;
    traj.snapshots()
        .par_iter()
        .map(|u| {
            if u.max_abs() == T::zero() {
                return Ok(T::zero());
            }
            let res = LaxResolvent::new(u, kappa)?;
            Ok(rho_alpha_with(&res)?.alpha)
        })
        .collect()
}

/// `|alpha(t) - alpha(0)| / max(alpha(0), 1e-14)` at every snapshot.
pub fn alpha_drift<T: Scalar>(traj: &Trajectory<T>, kappa: KappaParam<T>) -> Result<Vec<T>> {
    let alpha = alpha_series(traj, kappa)?;
    let a0 = alpha[0];
    let scale = a0.max(lit(1e-14));
    Ok(alpha.iter().map(|&a| (a - a0).abs() / scale).collect())
}

/// `\int d rho|_u(P) dx` at every snapshot, `P` the gKdV perturbation.
pub fn microlaw_rates<T: Scalar>(traj: &Trajectory<T>, coeffs: &CoefficientSet<T>, kappa: KappaParam<T>) -> Result<Vec<T>> {
    check_snapshots_admissible(traj, kappa)?;
    traj.snapshots()
        .par_iter()
        .zip(traj.times().par_iter())
        .map(|(u, &t)| {
            let p = perturbation(u, t, coeffs)?;
            if p.max_abs() == T::zero() {
                return Ok(T::zero());
            }
            let res = LaxResolvent::new(u, kappa)?;
            Ok(res.drho(&p).integral())
        })
        .collect()
}

/// Time integral of uniformly sampled values: composite Simpson when the
/// sample count is odd, trapezoid otherwise.
pub fn integrate_uniform<T: Scalar>(values: &[T], h: T) -> T {
    let n = values.len();
    if n < 2 {
        return T::zero();
    }
    if n % 2 == 1 && n >= 3 {
        let mut s = values[0] + values[n - 1];
        for (i, &v) in values.iter().enumerate().take(n - 1).skip(1) {
            s = s + v * if i % 2 == 1 { lit(4.0) } else { lit(2.0) };
        }
        return s * h / lit(3.0);
    }
    let inner: T = values[1..n - 1].iter().copied().sum();
    (inner + (values[0] + values[n - 1]) / lit(2.0)) * h
}

/// `\int_0^T \int d rho|_u(P) dx dt` over the whole trajectory.
pub fn integrated_microlaw<T: Scalar>(traj: &Trajectory<T>, coeffs: &CoefficientSet<T>, kappa: KappaParam<T>) -> Result<T> {
    let h = traj.save_interval()?;
    Ok(integrate_uniform(&microlaw_rates(traj, coeffs, kappa)?, h))
}
