use num_complex::Complex;

use super::field::RealField;
use super::grid::TorusGrid;
use super::kappa::KappaParam;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Real Fourier symbol `m(xi_k)` sampled at the grid wavenumbers (FFT order).
#[derive(Clone, Debug)]
pub struct FourierMultiplier<T: Scalar> {
    grid: TorusGrid<T>,
    symbol: Vec<T>,
}

impl<T: Scalar> FourierMultiplier<T> {
    pub fn new(grid: &TorusGrid<T>, symbol: Vec<T>) -> Result<Self> {
        if symbol.len() != grid.points() {
            return Err(Error::LengthMismatch { expected: grid.points(), found: symbol.len() });
        }
        if symbol.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("multiplier symbol"));
        }
        Ok(Self { grid: grid.clone(), symbol })
    }

    pub fn from_fn(grid: &TorusGrid<T>, m: impl Fn(T) -> T) -> Result<Self> {
        Self::new(grid, grid.wavenumbers().iter().map(|&xi| m(xi)).collect())
    }

    /// `(xi^2 + kappa^2)^{-1}`, the free resolvent `(-d^2 + kappa^2)^{-1}`.
    pub fn free_resolvent(grid: &TorusGrid<T>, kappa: KappaParam<T>) -> Self {
        let k2 = kappa.get() * kappa.get();
        let symbol = grid.wavenumbers().iter().map(|&xi| T::one() / (xi * xi + k2)).collect();
        Self { grid: grid.clone(), symbol }
    }

    /// `-d^2 + kappa^2`.
    pub fn free_operator(grid: &TorusGrid<T>, kappa: KappaParam<T>) -> Self {
        let k2 = kappa.get() * kappa.get();
        let symbol = grid.wavenumbers().iter().map(|&xi| xi * xi + k2).collect();
        Self { grid: grid.clone(), symbol }
    }

    /// `(xi^2 + 4 kappa^2)^s`.
    pub fn sobolev_weight(grid: &TorusGrid<T>, s: T, kappa: KappaParam<T>) -> Self {
        let k2 = (kappa.get() + kappa.get()).powi(2);
        let symbol = grid.wavenumbers().iter().map(|&xi| (xi * xi + k2).powf(s)).collect();
        Self { grid: grid.clone(), symbol }
    }

    pub fn symbol(&self) -> &[T] {
        &self.symbol
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    /// Pointwise product of symbols; commutative by construction.
    pub fn compose(&self, other: &Self) -> Self {
        assert!(self.grid.same_as(&other.grid), "multipliers live on different grids");
        let symbol = self.symbol.iter().zip(&other.symbol).map(|(&a, &b)| a * b).collect();
        Self { grid: self.grid.clone(), symbol }
    }

    pub fn apply_spectrum(&self, spectrum: &mut [Complex<T>]) {
        for (c, &m) in spectrum.iter_mut().zip(&self.symbol) {
            *c = *c * m;
        }
    }

    pub fn apply(&self, f: &RealField<T>) -> RealField<T> {
        assert!(self.grid.same_as(f.grid()), "multiplier and field live on different grids");
        let mut spec = f.spectrum();
        self.apply_spectrum(&mut spec);
        RealField::from_spectrum(f.grid(), spec)
    }
}

/// Spectral derivative of the given order; the Nyquist mode is dropped for odd orders.
pub fn derivative<T: Scalar>(f: &RealField<T>, order: u32) -> Result<RealField<T>> {
    f.check_finite("derivative input")?;
    let mut spec = f.spectrum();
    derivative_spectrum(f.grid(), &mut spec, order);
    Ok(RealField::from_spectrum(f.grid(), spec))
}

/// Multiplies spectral data by `(i xi)^order` in place.
pub fn derivative_spectrum<T: Scalar>(grid: &TorusGrid<T>, spec: &mut [Complex<T>], order: u32) {
    if order == 0 {
        return;
    }
    let unit = match order % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    };
    for (c, &xi) in spec.iter_mut().zip(grid.wavenumbers()) {
        *c = *c * unit * xi.powi(order as i32);
    }
    if order % 2 == 1 {
        spec[grid.nyquist_index()] = Complex::new(T::zero(), T::zero());
    }
}

pub fn apply_free_resolvent<T: Scalar>(f: &RealField<T>, kappa: KappaParam<T>) -> RealField<T> {
    FourierMultiplier::free_resolvent(f.grid(), kappa).apply(f)
}
