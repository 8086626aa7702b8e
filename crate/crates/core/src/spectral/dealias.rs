use num_complex::Complex;

use super::field::RealField;
use super::grid::TorusGrid;
use crate::scalar::Scalar;

/// Product of two fields given by their spectra, computed on the 3/2 padded
/// grid and truncated back (the 2/3 rule). Returns the product spectrum.
///
/// Input Nyquist modes are split evenly between `+-N/2`; the output Nyquist
/// mode is zeroed since it collects the only alias the padding does not remove.
pub fn dealiased_product_spectrum<T: Scalar>(
    grid: &TorusGrid<T>,
    a: &[Complex<T>],
    b: &[Complex<T>],
) -> Vec<Complex<T>> {
    let n = grid.points();
    let m = grid.padded_points();
    let mut pa = pad(grid, a);
    let mut pb = pad(grid, b);
    grid.padded_inverse(&mut pa);
    grid.padded_inverse(&mut pb);
    // unnormalized transforms: samples are n * f on the padded grid, and the
    // coarse coefficient is n/m times the padded one
    for (x, y) in pa.iter_mut().zip(&pb) {
        *x = Complex::new(x.re * y.re, T::zero());
    }
    grid.padded_forward(&mut pa);
    let scale = T::one() / (T::from_count(n) * T::from_count(m));
    let half = n / 2;
    let mut out = vec![Complex::new(T::zero(), T::zero()); n];
    for j in (0..n).filter(|&j| j != half) {
        let src = if j < half { j } else { m - (n - j) };
        out[j] = pa[src] * scale;
    }
    out
}

fn pad<T: Scalar>(grid: &TorusGrid<T>, spec: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = grid.points();
    let m = grid.padded_points();
    let half = n / 2;
    let mut out = vec![Complex::new(T::zero(), T::zero()); m];
    for j in 0..half {
        out[j] = spec[j];
    }
    for j in half + 1..n {
        out[m - (n - j)] = spec[j];
    }
    let two = T::one() + T::one();
    let nyq = spec[half] / two;
    out[half] = nyq;
    out[m - half] = nyq;
    out
}

/// Dealiased pointwise product of two fields.
pub fn dealiased_product<T: Scalar>(a: &RealField<T>, b: &RealField<T>) -> RealField<T> {
    assert!(a.grid().same_as(b.grid()), "fields live on different grids");
    let spec = dealiased_product_spectrum(a.grid(), &a.spectrum(), &b.spectrum());
    RealField::from_spectrum(a.grid(), spec)
}
