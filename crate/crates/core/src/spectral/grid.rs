use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Periodic grid on `[-L/2, L/2)` with `N` equispaced points.
///
/// Sample `i` sits at `x_i = -L/2 + i * dx`. Wavenumbers are stored in the
/// standard FFT order `[0, 1, .., N/2-1, -N/2, .., -1] * 2 pi / L`; index
/// `N/2` is the Nyquist mode. Cloning is cheap: FFT plans are shared.
#[derive(Clone)]
pub struct TorusGrid<T: Scalar> {
    inner: Arc<GridInner<T>>,
}

struct GridInner<T: Scalar> {
    length: T,
    points: usize,
    dx: T,
    wavenumbers: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    padded_forward: Arc<dyn Fft<T>>,
    padded_inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> TorusGrid<T> {
    pub fn new(length: T, points: usize) -> Result<Self> {
        if !(length > T::zero()) || !length.is_finite() {
            return Err(Error::InvalidLength(length.to_f64_lossy()));
        }
        if points % 2 == 1 {
            return Err(Error::OddPointCount(points));
        }
        if points < 8 {
            return Err(Error::TooFewPoints(points));
        }
        let dx = length / T::from_count(points);
        let scale = T::TAU() / length;
        let half = points / 2;
        let wavenumbers = (0..points)
            .map(|j| {
                let k = if j < half { j as f64 } else { j as f64 - points as f64 };
                lit::<T>(k) * scale
            })
            .collect();
        let mut planner = FftPlanner::new();
        let padded = padded_len(points);
        Ok(Self {
            inner: Arc::new(GridInner {
                length,
                points,
                dx,
                wavenumbers,
                forward: planner.plan_fft_forward(points),
                inverse: planner.plan_fft_inverse(points),
                padded_forward: planner.plan_fft_forward(padded),
                padded_inverse: planner.plan_fft_inverse(padded),
            }),
        })
    }

    #[inline]
    pub fn length(&self) -> T {
        self.inner.length
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.inner.points
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.inner.dx
    }

    /// Spacing of the discrete frequencies, `2 pi / L`.
    #[inline]
    pub fn dxi(&self) -> T {
        T::TAU() / self.inner.length
    }

    /// Largest resolved frequency `pi / dx` (the Nyquist frequency).
    #[inline]
    pub fn xi_max(&self) -> T {
        T::PI() / self.inner.dx
    }

    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.inner.points / 2
    }

    /// Wavenumbers in FFT order.
    #[inline]
    pub fn wavenumbers(&self) -> &[T] {
        &self.inner.wavenumbers
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        -self.inner.length / lit(2.0) + T::from_count(i) * self.inner.dx
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.points()).map(|i| self.x(i)).collect()
    }

    /// Signed periodic distance `x - y` folded into `[-L/2, L/2)`.
    pub fn periodic_offset(&self, x: T, y: T) -> T {
        let l = self.length();
        let d = x - y;
        d - l * ((d + l / lit(2.0)) / l).floor()
    }

    /// Unnormalized DFT of real samples.
    pub fn forward(&self, samples: &[T]) -> Vec<Complex<T>> {
        debug_assert_eq!(samples.len(), self.points());
        let mut buf: Vec<Complex<T>> = samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.inner.forward.process(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        self.inner.forward.process(buf);
    }

    /// Normalized inverse DFT in place (includes the `1/N`).
    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        self.inner.inverse.process(buf);
        let scale = T::one() / T::from_count(self.points());
        for v in buf.iter_mut() {
            *v = *v * scale;
        }
    }

    /// Normalized inverse DFT keeping the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex<T>>) -> Vec<T> {
        self.inverse_in_place(&mut spectrum);
        spectrum.into_iter().map(|c| c.re).collect()
    }

    pub(crate) fn padded_points(&self) -> usize {
        padded_len(self.points())
    }

    pub(crate) fn padded_forward(&self, buf: &mut [Complex<T>]) {
        self.inner.padded_forward.process(buf);
    }

    pub(crate) fn padded_inverse(&self, buf: &mut [Complex<T>]) {
        self.inner.padded_inverse.process(buf);
    }

    /// Same length and point count.
    pub fn same_as(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.points() == other.points() && self.length() == other.length())
    }

    /// Integer mode number of FFT slot `j`.
    #[inline]
    pub fn mode(&self, j: usize) -> isize {
        let n = self.points();
        if j < n / 2 {
            j as isize
        } else {
            j as isize - n as isize
        }
    }
}

impl<T: Scalar> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl<T: Scalar> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("length", &self.length())
            .field("points", &self.points())
            .field("dx", &self.dx())
            .finish()
    }
}

/// Size of the 3/2 zero-padded grid used for dealiased products.
fn padded_len(points: usize) -> usize {
    3 * points / 2
}
