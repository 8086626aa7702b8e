use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{derivative, RealField, TorusGrid, TrigInterpolant};

/// Default spacing of centers, in grid points.
pub const DEFAULT_CENTER_STRIDE: usize = 4;
const WIDTH: f64 = 6.0;
const IMAGES: i32 = 3;

/// Translates `sech((x - x0)/6)` over a subsampled grid of centers.
#[derive(Clone, Debug)]
pub struct WeightFamily<T: Scalar> {
    grid: TorusGrid<T>,
    centers: Vec<usize>,
}

impl<T: Scalar> WeightFamily<T> {
    /// Centers on every grid point (`stride = 1`) or every `stride`-th point.
    pub fn new(grid: &TorusGrid<T>, stride: usize) -> Result<Self> {
        if stride == 0 || stride > grid.points() {
            return Err(Error::InvalidArgument(format!("center stride {stride} out of range")));
        }
        Ok(Self { grid: grid.clone(), centers: (0..grid.points()).step_by(stride).collect() })
    }

    pub fn with_default_stride(grid: &TorusGrid<T>) -> Self {
        Self::new(grid, DEFAULT_CENTER_STRIDE.min(grid.points())).expect("default stride fits")
    }

    /// Centers at explicit grid indices.
    pub fn at_indices(grid: &TorusGrid<T>, centers: Vec<usize>) -> Result<Self> {
        if centers.is_empty() || centers.iter().any(|&c| c >= grid.points()) {
            return Err(Error::InvalidArgument("center indices must be nonempty and on the grid".into()));
        }
        Ok(Self { grid: grid.clone(), centers })
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn center_indices(&self) -> &[usize] {
        &self.centers
    }

    pub fn centers(&self) -> Vec<T> {
        self.centers.iter().map(|&i| self.grid.x(i)).collect()
    }

    /// Spacing between consecutive centers, used as the quadrature weight in `z`.
    pub fn center_spacing(&self) -> T {
        self.grid.length() / T::from_count(self.centers.len())
    }

    /// `sech((x - x0)/6)` summed over periodic images.
    pub fn psi(&self, center: usize) -> RealField<T> {
        localized_psi(&self.grid, self.grid.x(self.centers[center]))
    }

    /// The switch function `phi` with `phi' = psi^2` and `phi(x0) = 0`.
    pub fn phi(&self, center: usize) -> SwitchFunction<T> {
        SwitchFunction::new(&self.psi(center), self.grid.x(self.centers[center]))
    }

    pub fn psi_all(&self) -> Vec<RealField<T>> {
        (0..self.centers.len()).into_par_iter().map(|c| self.psi(c)).collect()
    }
}

pub fn localized_psi<T: Scalar>(grid: &TorusGrid<T>, x0: T) -> RealField<T> {
    let width = lit::<T>(WIDTH);
    RealField::from_fn(grid, |x| {
        (-IMAGES..=IMAGES)
            .map(|n| ((x - x0 - lit::<T>(n as f64) * grid.length()) / width).cosh().recip())
            .sum()
    })
}

/// Antiderivative of `psi^2` on the torus: a linear ramp with the mean slope
/// plus a periodic part. On the line this is `6 tanh((x - x0)/6)`.
#[derive(Clone, Debug)]
pub struct SwitchFunction<T: Scalar> {
    periodic: RealField<T>,
    slope: T,
    x0: T,
}

impl<T: Scalar> SwitchFunction<T> {
    fn new(psi: &RealField<T>, x0: T) -> Self {
        let grid = psi.grid();
        let sq = psi.pointwise(psi);
        let slope = sq.integral() / grid.length();
        let mut spec = sq.spectrum();
        let xi = grid.wavenumbers();
        spec[0] = Complex::new(T::zero(), T::zero());
        let nyq = grid.nyquist_index();
        for (k, c) in spec.iter_mut().enumerate().skip(1) {
            *c = if k == nyq { Complex::new(T::zero(), T::zero()) } else { *c / Complex::new(T::zero(), xi[k]) };
        }
        let periodic = RealField::from_spectrum(grid, spec);
        let mut out = Self { periodic, slope, x0 };
        // pin phi(x0) = 0 using the trigonometric interpolant of the periodic part
        let offset = TrigInterpolant::new(&out.periodic).eval(x0);
        out.periodic = out.periodic.map(|v| v - offset);
        out
    }

    /// Values on the grid cell `[-L/2, L/2)` (the ramp is not periodic).
    pub fn values(&self) -> RealField<T> {
        let grid = self.periodic.grid();
        let slope = self.slope;
        let x0 = self.x0;
        let ramp = RealField::from_fn(grid, |x| slope * (x - x0));
        &self.periodic + &ramp
    }

    /// `phi'`, computed spectrally on the periodic part.
    pub fn derivative(&self) -> RealField<T> {
        let d = derivative(&self.periodic, 1).expect("order 1");
        d.map(|v| v + self.slope)
    }

    pub fn slope(&self) -> T {
        self.slope
    }
}
