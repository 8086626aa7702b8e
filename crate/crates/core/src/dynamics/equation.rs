use num_complex::Complex;

use super::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{dealiased_product_spectrum, derivative_spectrum, RealField, TorusGrid};

/// Evolution `u_t = i omega(d) u + E(u, t)` split into an exactly integrated
/// dispersive part and an explicit remainder, both in Fourier space.
pub trait Evolution<T: Scalar>: Send + Sync {
    fn grid(&self) -> &TorusGrid<T>;

    /// Real dispersion relation `omega(xi_k)` in FFT order.
    fn dispersion(&self) -> Vec<T>;

    /// Explicit part of the right side given the spectrum of `u`.
    fn explicit_spectrum(&self, u_hat: &[Complex<T>], t: T) -> Result<Vec<Complex<T>>>;
}

/// `u_t = -u''' + 6 u u' + (a1 u')' + a2 u^2 + a3 u' + a4 u`.
#[derive(Clone, Debug)]
pub struct GkdvEquation<T: Scalar> {
    coeffs: CoefficientSet<T>,
}

impl<T: Scalar> GkdvEquation<T> {
    pub fn new(coeffs: CoefficientSet<T>) -> Self {
        Self { coeffs }
    }

    pub fn coefficients(&self) -> &CoefficientSet<T> {
        &self.coeffs
    }
}

/// `xi^3` with the Nyquist entry zeroed, the dispersion of `-d^3`.
pub fn airy_dispersion<T: Scalar>(grid: &TorusGrid<T>, scale: T) -> Vec<T> {
    let mut w: Vec<T> = grid.wavenumbers().iter().map(|&xi| scale * xi * xi * xi).collect();
    w[grid.nyquist_index()] = T::zero();
    w
}

pub(crate) fn add_scaled<T: Scalar>(acc: &mut [Complex<T>], term: &[Complex<T>], s: T) {
    for (a, &b) in acc.iter_mut().zip(term) {
        *a = *a + b * s;
    }
}

/// Spectrum of the perturbation `(a1 u')' + a2 u^2 + a3 u' + a4 u`, with
/// `u2_hat` the dealiased spectrum of `u^2`.
pub(crate) fn perturbation_spectrum<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    u_hat: &[Complex<T>],
    u2_hat: &[Complex<T>],
    t: T,
) -> Result<Vec<Complex<T>>> {
    let grid = coeffs.grid();
    let n = grid.points();
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    if coeffs.is_zero() {
        return Ok(out);
    }
    let mut du = u_hat.to_vec();
    derivative_spectrum(grid, &mut du, 1);
    if let Some(a1) = coeffs.sample(1, t)? {
        let mut flux = dealiased_product_spectrum(grid, &a1.spectrum(), &du);
        derivative_spectrum(grid, &mut flux, 1);
        add_scaled(&mut out, &flux, T::one());
    }
    if let Some(a2) = coeffs.sample(2, t)? {
        add_scaled(&mut out, &dealiased_product_spectrum(grid, &a2.spectrum(), u2_hat), T::one());
    }
    if let Some(a3) = coeffs.sample(3, t)? {
        add_scaled(&mut out, &dealiased_product_spectrum(grid, &a3.spectrum(), &du), T::one());
    }
    if let Some(a4) = coeffs.sample(4, t)? {
        add_scaled(&mut out, &dealiased_product_spectrum(grid, &a4.spectrum(), u_hat), T::one());
    }
    Ok(out)
}

impl<T: Scalar> Evolution<T> for GkdvEquation<T> {
    fn grid(&self) -> &TorusGrid<T> {
        self.coeffs.grid()
    }

    fn dispersion(&self) -> Vec<T> {
        airy_dispersion(self.grid(), T::one())
    }

    fn explicit_spectrum(&self, u_hat: &[Complex<T>], t: T) -> Result<Vec<Complex<T>>> {
        let grid = self.grid();
        let u2 = dealiased_product_spectrum(grid, u_hat, u_hat);
        let mut out = perturbation_spectrum(&self.coeffs, u_hat, &u2, t)?;
        let mut flux = u2;
        derivative_spectrum(grid, &mut flux, 1);
        add_scaled(&mut out, &flux, lit(3.0));
        Ok(out)
    }
}

/// Right side of the gKdV equation in physical space.
pub fn gkdv_rhs<T: Scalar>(u: &RealField<T>, t: T, coeffs: &CoefficientSet<T>) -> Result<RealField<T>> {
    if u.check_finite("state").is_err() {
        return Err(Error::Diverged { t: t.to_f64_lossy() });
    }
    if !u.grid().same_as(coeffs.grid()) {
        return Err(Error::GridMismatch);
    }
    let eq = GkdvEquation::new(coeffs.clone());
    let u_hat = u.spectrum();
    let mut out = eq.explicit_spectrum(&u_hat, t)?;
    let omega = eq.dispersion();
    for ((o, &w), &c) in out.iter_mut().zip(&omega).zip(&u_hat) {
        *o = *o + c * Complex::new(T::zero(), w);
    }
    Ok(RealField::from_spectrum(u.grid(), out))
}
