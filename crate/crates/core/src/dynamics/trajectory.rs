use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lax::{is_admissible, rho_alpha, GreensMethod};
use crate::scalar::{lit, Scalar};
use crate::spectral::{sobolev_kappa_norm, KappaParam, RealField, TorusGrid};

/// Monitored quantities of one stored state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub mass: f64,
    pub momentum: f64,
    /// `alpha(kappa)` per monitored kappa; `None` where kappa is not admissible
    /// for the state or the evaluation failed.
    pub alpha: Vec<Option<f64>>,
    /// `||u||_{H^{-1}_kappa}` at the first monitored kappa (kappa = 1 if none).
    pub h1k_norm: f64,
    pub max_abs: f64,
    pub diverged: bool,
}

pub(crate) fn diagnose<T: Scalar>(
    u: &RealField<T>,
    t: T,
    kappas: &[f64],
    admissibility: f64,
    diverged: bool,
) -> DiagnosticRecord {
    let first = KappaParam::new(lit::<T>(kappas.first().copied().unwrap_or(1.0))).unwrap_or_else(|_| {
        KappaParam::new(T::one()).expect("one is admissible")
    });
    let finite = u.check_finite("state").is_ok();
    let alpha = kappas
        .iter()
        .map(|&k| {
            let kappa = KappaParam::new(lit::<T>(k)).ok()?;
            if diverged || !finite || !is_admissible(u, kappa, lit(admissibility)) {
                return None;
            }
            rho_alpha(u, kappa, GreensMethod::Direct).ok().map(|d| d.alpha.to_f64_lossy())
        })
        .collect();
    DiagnosticRecord {
        t: t.to_f64_lossy(),
        mass: u.integral().to_f64_lossy(),
        momentum: (u.l2_norm_sq() / lit(2.0)).to_f64_lossy(),
        alpha,
        h1k_norm: sobolev_kappa_norm(u, -T::one(), first).to_f64_lossy(),
        max_abs: u.max_abs().to_f64_lossy(),
        diverged: diverged || !finite,
    }
}

/// Stored states of a run. Times are strictly monotone in the direction of
/// integration (decreasing for runs with a negative step).
#[derive(Clone, Debug)]
pub struct Trajectory<T: Scalar> {
    grid: TorusGrid<T>,
    times: Vec<T>,
    snapshots: Vec<RealField<T>>,
    records: Vec<DiagnosticRecord>,
    kappas: Vec<f64>,
    dt: T,
    halted_at: Option<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub(crate) fn from_parts(
        grid: &TorusGrid<T>,
        times: Vec<T>,
        snapshots: Vec<RealField<T>>,
        records: Vec<DiagnosticRecord>,
        kappas: Vec<f64>,
        dt: T,
        halted_at: Option<T>,
    ) -> Self {
        Self { grid: grid.clone(), times, snapshots, records, kappas, dt, halted_at }
    }

    /// Builds a trajectory from externally produced snapshots, computing records.
    pub fn from_snapshots(times: Vec<T>, snapshots: Vec<RealField<T>>, kappas: Vec<f64>, dt: T) -> Result<Self> {
        let first = snapshots.first().ok_or(Error::EmptyTrajectory)?;
        if times.len() != snapshots.len() {
            return Err(Error::LengthMismatch { expected: times.len(), found: snapshots.len() });
        }
        for s in &snapshots {
            first.check_grid(s)?;
        }
        let dir = if times.len() > 1 { (times[1] - times[0]).signum() } else { T::one() };
        if times.windows(2).any(|w| !((w[1] - w[0]) * dir > T::zero())) {
            return Err(Error::NonMonotoneTimes);
        }
        let grid = first.grid().clone();
        let records = snapshots
            .iter()
            .zip(&times)
            .map(|(u, &t)| diagnose(u, t, &kappas, crate::lax::DEFAULT_ADMISSIBILITY, false))
            .collect();
        Ok(Self { grid, times, snapshots, records, kappas, dt, halted_at: None })
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn snapshots(&self) -> &[RealField<T>] {
        &self.snapshots
    }

    pub fn records(&self) -> &[DiagnosticRecord] {
        &self.records
    }

    pub fn kappas(&self) -> &[f64] {
        &self.kappas
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    pub fn halted_at(&self) -> Option<T> {
        self.halted_at
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> &RealField<T> {
        self.snapshots.last().expect("trajectory holds the initial state")
    }

    /// The first `count` stored states with their records.
    pub fn prefix(&self, count: usize) -> Result<Self> {
        if count == 0 || count > self.len() {
            return Err(Error::InvalidArgument(format!("cannot keep {count} of {} snapshots", self.len())));
        }
        Ok(Self {
            grid: self.grid.clone(),
            times: self.times[..count].to_vec(),
            snapshots: self.snapshots[..count].to_vec(),
            records: self.records[..count].to_vec(),
            kappas: self.kappas.clone(),
            dt: self.dt,
            halted_at: self.halted_at.filter(|_| count == self.len()),
        })
    }

    /// The common save interval, or `NonuniformSaveInterval`.
    pub fn save_interval(&self) -> Result<T> {
        if self.times.len() < 2 {
            return Err(Error::TooFewSnapshots { needed: 2, found: self.times.len() });
        }
        let h = self.times[1] - self.times[0];
        let tol = lit::<T>(1e-9) * h.abs();
        if self.times.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > tol) {
            return Err(Error::NonuniformSaveInterval);
        }
        Ok(h)
    }
}
