use num_complex::Complex;
use rayon::prelude::*;

use super::coefficients::CoefficientSet;
use super::equation::{Evolution, GkdvEquation};
use super::trajectory::{diagnose, DiagnosticRecord, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{RealField, TorusGrid};

/// States whose sup norm exceeds this are treated as blown up.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

/// Default step `0.4 / xi_max^3`.
pub fn default_dt<T: Scalar>(grid: &TorusGrid<T>) -> T {
    lit::<T>(0.4) / grid.xi_max().powi(3)
}

/// Integrating-factor RK4 with fixed step `dt` (negative steps run backward).
pub struct Ifrk4<T: Scalar> {
    dt: T,
    half: Vec<Complex<T>>,
    full: Vec<Complex<T>>,
}

impl<T: Scalar> Ifrk4<T> {
    pub fn new<E: Evolution<T> + ?Sized>(eq: &E, dt: T) -> Self {
        let two = lit::<T>(2.0);
        let half: Vec<Complex<T>> = eq
            .dispersion()
            .into_iter()
            .map(|w| {
                let th = w * dt / two;
                Complex::new(th.cos(), th.sin())
            })
            .collect();
        let full = half.iter().map(|e| e * e).collect();
        Self { dt, half, full }
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// Advances the spectrum from `t` to `t + dt` in place.
    pub fn advance<E: Evolution<T> + ?Sized>(&self, eq: &E, u_hat: &mut [Complex<T>], t: T) -> Result<()> {
        let dt = self.dt;
        let two = lit::<T>(2.0);
        let th = t + dt / two;
        let scaled = |v: Vec<Complex<T>>| -> Vec<Complex<T>> { v.into_iter().map(|c| c * dt).collect() };
        let a = scaled(eq.explicit_spectrum(u_hat, t)?);
        let arg: Vec<_> = (0..u_hat.len()).map(|k| self.half[k] * (u_hat[k] + a[k] / two)).collect();
        let b = scaled(eq.explicit_spectrum(&arg, th)?);
        let arg: Vec<_> = (0..u_hat.len()).map(|k| self.half[k] * u_hat[k] + b[k] / two).collect();
        let c = scaled(eq.explicit_spectrum(&arg, th)?);
        let arg: Vec<_> = (0..u_hat.len()).map(|k| self.full[k] * u_hat[k] + self.half[k] * c[k]).collect();
        let d = scaled(eq.explicit_spectrum(&arg, t + dt)?);
        let six = lit::<T>(6.0);
        for k in 0..u_hat.len() {
            u_hat[k] = self.full[k] * u_hat[k]
                + (self.full[k] * a[k] + self.half[k] * (b[k] + c[k]) * two + d[k]) / six;
        }
        Ok(())
    }
}

/// Fails with `Diverged` if the spectrum is non-finite or the state exceeds the threshold.
fn check_state<T: Scalar>(grid: &TorusGrid<T>, u_hat: &[Complex<T>], t: T) -> Result<()> {
    let diverged = Error::Diverged { t: t.to_f64_lossy() };
    // sum |c_k| / N bounds max |u|; only transform when the cheap bound trips
    let bound = u_hat.iter().map(|c| c.norm()).sum::<T>() / T::from_count(grid.points());
    if !bound.is_finite() {
        return Err(diverged);
    }
    if bound > lit(DIVERGENCE_THRESHOLD) {
        let u = grid.inverse_real(u_hat.to_vec());
        if u.iter().any(|v| v.abs() > lit(DIVERGENCE_THRESHOLD)) {
            return Err(diverged);
        }
    }
    Ok(())
}

/// One IFRK4 step of the gKdV equation.
pub fn step<T: Scalar>(u: &RealField<T>, t: T, dt: T, coeffs: &CoefficientSet<T>) -> Result<RealField<T>> {
    if !u.grid().same_as(coeffs.grid()) {
        return Err(Error::GridMismatch);
    }
    let eq = GkdvEquation::new(coeffs.clone());
    step_with(&eq, u, t, dt)
}

pub fn step_with<T: Scalar, E: Evolution<T> + ?Sized>(eq: &E, u: &RealField<T>, t: T, dt: T) -> Result<RealField<T>> {
    if u.check_finite("state").is_err() {
        return Err(Error::Diverged { t: t.to_f64_lossy() });
    }
    let mut u_hat = u.spectrum();
    Ifrk4::new(eq, dt).advance(eq, &mut u_hat, t)?;
    check_state(u.grid(), &u_hat, t + dt)?;
    Ok(RealField::from_spectrum(u.grid(), u_hat))
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub t0: f64,
    /// Steps between stored snapshots; the final state is always stored.
    pub save_every: usize,
    /// Spectral parameters monitored in the diagnostic records.
    pub kappas: Vec<f64>,
    pub admissibility: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { t0: 0.0, save_every: 1, kappas: Vec::new(), admissibility: crate::lax::DEFAULT_ADMISSIBILITY }
    }
}

impl SolveOptions {
    /// Snapshot stride giving at least `records` snapshots over `steps` steps.
    pub fn stride_for(steps: usize, records: usize) -> usize {
        (steps / records.max(1)).max(1)
    }
}

/// Number of steps and the adjusted step that lands exactly on `duration`.
pub fn step_count<T: Scalar>(duration: T, dt: T) -> Result<(usize, T)> {
    if duration == T::zero() {
        return Ok((0, dt));
    }
    if !(dt.abs() > T::zero()) || duration.signum() != dt.signum() || !duration.is_finite() {
        return Err(Error::InvalidArgument("time step must be nonzero and point toward the final time".into()));
    }
    let steps = (duration / dt).round().to_usize().unwrap_or(0).max(1);
    Ok((steps, duration / T::from_count(steps)))
}

/// Integrates the gKdV equation from `0` to `duration`.
pub fn solve<T: Scalar>(
    u0: &RealField<T>,
    duration: T,
    dt: T,
    coeffs: &CoefficientSet<T>,
    save_every: usize,
) -> Result<Trajectory<T>> {
    if !u0.grid().same_as(coeffs.grid()) {
        return Err(Error::GridMismatch);
    }
    let eq = GkdvEquation::new(coeffs.clone());
    let opts = SolveOptions { save_every, ..SolveOptions::default() };
    solve_with(&eq, u0, duration, dt, &opts)
}

/// Integrates any [`Evolution`]. Divergence does not fail the call: the
/// offending state is stored with a record marked `diverged` and the run stops.
pub fn solve_with<T: Scalar, E: Evolution<T> + ?Sized>(
    eq: &E,
    u0: &RealField<T>,
    duration: T,
    dt: T,
    opts: &SolveOptions,
) -> Result<Trajectory<T>> {
    u0.check_finite("initial state")?;
    let (steps, dt) = step_count(duration, dt)?;
    let grid = u0.grid();
    let t0 = lit::<T>(opts.t0);
    let stepper = Ifrk4::new(eq, dt);
    let stride = opts.save_every.max(1);
    let mut times = vec![t0];
    let mut snapshots = vec![u0.clone()];
    let mut u_hat = u0.spectrum();
    let mut halted = None;
    for n in 0..steps {
        let t = t0 + dt * T::from_count(n);
        let t_next = t0 + dt * T::from_count(n + 1);
        let outcome = stepper.advance(eq, &mut u_hat, t).and_then(|_| check_state(grid, &u_hat, t_next));
        if let Err(e) = outcome {
            match e {
                Error::Diverged { .. } => {
                    log::warn!("integration diverged at t = {}", t_next);
                    halted = Some(t_next);
                    times.push(t_next);
                    snapshots.push(RealField::from_spectrum(grid, u_hat.clone()));
                    break;
                }
                other => return Err(other),
            }
        }
        if (n + 1) % stride == 0 || n + 1 == steps {
            times.push(t_next);
            snapshots.push(RealField::from_spectrum(grid, u_hat.clone()));
        }
    }
    let kappas = opts.kappas.clone();
    let admissibility = opts.admissibility;
    let last = snapshots.len() - 1;
    let records: Vec<DiagnosticRecord> = snapshots
        .par_iter()
        .zip(times.par_iter())
        .enumerate()
        .map(|(i, (u, &t))| diagnose(u, t, &kappas, admissibility, halted.is_some() && i == last))
        .collect();
    Ok(Trajectory::from_parts(grid, times, snapshots, records, kappas, dt, halted))
}
