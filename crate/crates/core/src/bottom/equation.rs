use num_complex::Complex;

use super::profile::BottomProfile;
use crate::dynamics::{airy_dispersion, add_scaled, Evolution};
use crate::error::Result;
use crate::scalar::{lit, Scalar};
use crate::spectral::{dealiased_product_spectrum, derivative_spectrum, TorusGrid};

/// `u_t = -b^5 u''' + 6 u u' - 4 b u' - 6 b' u` on the `x`-grid.
///
/// The dispersive part `-beta u'''` with `beta = max b^5` is integrated
/// exactly; the remainder `-(b^5 - beta) u'''` is explicit.
#[derive(Clone, Debug)]
pub struct VariableBottomEquation<T: Scalar> {
    grid: TorusGrid<T>,
    beta: T,
    remainder_hat: Vec<Complex<T>>,
    depth_hat: Vec<Complex<T>>,
    slope_hat: Vec<Complex<T>>,
}

impl<T: Scalar> VariableBottomEquation<T> {
    pub fn new(profile: &BottomProfile<T>) -> Self {
        let b5 = profile.depth().map(|b| b.powi(5));
        let beta = b5.max();
        Self {
            grid: profile.grid().clone(),
            beta,
            remainder_hat: b5.map(|v| v - beta).spectrum(),
            depth_hat: profile.depth().spectrum(),
            slope_hat: profile.depth_derivative(1).spectrum(),
        }
    }

    pub fn beta(&self) -> T {
        self.beta
    }
}

impl<T: Scalar> Evolution<T> for VariableBottomEquation<T> {
    fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn dispersion(&self) -> Vec<T> {
        airy_dispersion(&self.grid, self.beta)
    }

    fn explicit_spectrum(&self, u_hat: &[Complex<T>], _t: T) -> Result<Vec<Complex<T>>> {
        let g = &self.grid;
        let mut du = u_hat.to_vec();
        derivative_spectrum(g, &mut du, 1);
        let mut d3 = u_hat.to_vec();
        derivative_spectrum(g, &mut d3, 3);
        let mut out = dealiased_product_spectrum(g, &self.remainder_hat, &d3);
        for o in out.iter_mut() {
            *o = -*o;
        }
        let mut flux = dealiased_product_spectrum(g, u_hat, u_hat);
        derivative_spectrum(g, &mut flux, 1);
        add_scaled(&mut out, &flux, lit(3.0));
        add_scaled(&mut out, &dealiased_product_spectrum(g, &self.depth_hat, &du), lit(-4.0));
        add_scaled(&mut out, &dealiased_product_spectrum(g, &self.slope_hat, u_hat), lit(-6.0));
        Ok(out)
    }
}
