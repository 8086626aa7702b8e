use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use super::grid::TorusGrid;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Real samples on a [`TorusGrid`].
///
/// Arithmetic operators require both operands on the same grid and panic
/// otherwise; use [`RealField::check_grid`] first when that is not known.
#[derive(Clone, Debug)]
pub struct RealField<T: Scalar> {
    grid: TorusGrid<T>,
    samples: Vec<T>,
}

impl<T: Scalar> RealField<T> {
    pub fn new(grid: &TorusGrid<T>, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(Error::LengthMismatch { expected: grid.points(), found: samples.len() });
        }
        Ok(Self { grid: grid.clone(), samples })
    }

    pub fn zeros(grid: &TorusGrid<T>) -> Self {
        Self::constant(grid, T::zero())
    }

    pub fn constant(grid: &TorusGrid<T>, value: T) -> Self {
        Self { grid: grid.clone(), samples: vec![value; grid.points()] }
    }

    pub fn from_fn(grid: &TorusGrid<T>, f: impl Fn(T) -> T) -> Self {
        let samples = (0..grid.points()).map(|i| f(grid.x(i))).collect();
        Self { grid: grid.clone(), samples }
    }

    /// Builds a field from spectral data (FFT order, unnormalized DFT convention).
    pub fn from_spectrum(grid: &TorusGrid<T>, spectrum: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(spectrum.len(), grid.points());
        Self { grid: grid.clone(), samples: grid.inverse_real(spectrum) }
    }

    #[inline]
    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    #[inline]
    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn check_grid(&self, other: &Self) -> Result<()> {
        if self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        if self.samples.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what))
        }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { grid: self.grid.clone(), samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Self {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Self { grid: self.grid.clone(), samples }
    }

    /// Pointwise product without dealiasing.
    pub fn pointwise(&self, other: &Self) -> Self {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    /// Rectangle-rule integral, spectrally accurate for smooth periodic data.
    pub fn integral(&self) -> T {
        self.samples.iter().copied().sum::<T>() * self.grid.dx()
    }

    pub fn l2_norm_sq(&self) -> T {
        self.samples.iter().map(|&v| v * v).sum::<T>() * self.grid.dx()
    }

    pub fn l2_norm(&self) -> T {
        self.l2_norm_sq().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.samples.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.samples.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn distance_sup(&self, other: &Self) -> T {
        self.zip_map(other, |a, b| a - b).max_abs()
    }

    /// Unnormalized DFT in FFT order.
    pub fn spectrum(&self) -> Vec<Complex<T>> {
        self.grid.forward(&self.samples)
    }

    /// Samples of the continuum transform `(2 pi)^{-1/2} \int f e^{-i x xi} dx`
    /// at the grid wavenumbers, phase referenced to the left edge of the box.
    pub fn continuum_spectrum(&self) -> Vec<Complex<T>> {
        let scale = self.grid.dx() / lit::<T>(2.0 * std::f64::consts::PI).sqrt();
        self.spectrum().into_iter().map(|c| c * scale).collect()
    }
}

impl<'a, T: Scalar> Add for &'a RealField<T> {
    type Output = RealField<T>;
    fn add(self, rhs: Self) -> RealField<T> {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl<'a, T: Scalar> Sub for &'a RealField<T> {
    type Output = RealField<T>;
    fn sub(self, rhs: Self) -> RealField<T> {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl<'a, T: Scalar> Mul<T> for &'a RealField<T> {
    type Output = RealField<T>;
    fn mul(self, rhs: T) -> RealField<T> {
        self.scale(rhs)
    }
}

impl<'a, T: Scalar> Neg for &'a RealField<T> {
    type Output = RealField<T>;
    fn neg(self) -> RealField<T> {
        self.map(|v| -v)
    }
}
