use num_complex::Complex;

use crate::scalar::{lit, Scalar};
use crate::spectral::{KappaParam, RealField, TorusGrid};

/// Green's function of `-d^2 + kappa^2` on the torus at offset `x`:
/// `cosh(kappa (L/2 - |x|)) / (2 kappa sinh(kappa L / 2))`, written without overflow.
pub fn periodic_free_kernel<T: Scalar>(grid: &TorusGrid<T>, kappa: KappaParam<T>, x: T) -> T {
    let k = kappa.get();
    let l = grid.length();
    let r = grid.periodic_offset(x, T::zero()).abs();
    let two = lit::<T>(2.0);
    ((-k * r).exp() + (-k * (l - r)).exp()) / (two * k * (T::one() - (-k * l).exp()))
}

/// First column of the circulant matrix that realizes a real multiplier pointwise:
/// `(M f)_i = sum_j col[i - j] f_j`.
pub fn circulant_column<T: Scalar>(grid: &TorusGrid<T>, symbol: impl Fn(T) -> T) -> Vec<T> {
    let spec: Vec<Complex<T>> =
        grid.wavenumbers().iter().map(|&xi| Complex::new(symbol(xi), T::zero())).collect();
    grid.inverse_real(spec)
}

/// `sum_j col[i - j] f_j` computed through the FFT.
pub fn circular_convolve<T: Scalar>(grid: &TorusGrid<T>, col: &[T], f: &RealField<T>) -> RealField<T> {
    let a = grid.forward(col);
    let b = f.spectrum();
    let spec = a.into_iter().zip(b).map(|(x, y)| x * y).collect();
    RealField::from_spectrum(grid, spec)
}

/// `h_1 = -kappa^{-1} R0(2 kappa) u`.
pub fn h1_field<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>) -> RealField<T> {
    let k = kappa.get();
    let four_k2 = lit::<T>(4.0) * k * k;
    crate::spectral::FourierMultiplier::from_fn(u.grid(), |xi| -T::one() / (k * (xi * xi + four_k2)))
        .expect("finite symbol")
        .apply(u)
}

/// `R0(2 kappa) f`.
pub(crate) fn doubled_resolvent<T: Scalar>(f: &RealField<T>, kappa: KappaParam<T>) -> RealField<T> {
    crate::spectral::apply_free_resolvent(f, kappa.doubled())
}
