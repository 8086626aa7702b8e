use super::field::RealField;
use super::kappa::KappaParam;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// `\int |hat f|^2 w(xi) dxi` with the torus quadrature: `sum_k |hat f_k|^2 w_k * 2pi/L`.
pub fn weighted_spectral_sq<T: Scalar>(f: &RealField<T>, weight: impl Fn(T) -> T) -> T {
    let grid = f.grid();
    let spec = f.spectrum();
    // |dx/sqrt(2pi) DFT|^2 * 2pi/L = dx^2/L |DFT|^2
    let scale = grid.dx() * grid.dx() / grid.length();
    spec.iter()
        .zip(grid.wavenumbers())
        .map(|(c, &xi)| c.norm_sqr() * weight(xi))
        .sum::<T>()
        * scale
}

/// Squared `H^s_kappa` norm with symbol `(xi^2 + 4 kappa^2)^s`.
pub fn sobolev_kappa_norm_sq<T: Scalar>(f: &RealField<T>, s: T, kappa: KappaParam<T>) -> T {
    let k2 = lit::<T>(4.0) * kappa.get() * kappa.get();
    if s == T::zero() {
        return weighted_spectral_sq(f, |_| T::one());
    }
    weighted_spectral_sq(f, |xi| (xi * xi + k2).powf(s))
}

pub fn sobolev_kappa_norm<T: Scalar>(f: &RealField<T>, s: T, kappa: KappaParam<T>) -> T {
    sobolev_kappa_norm_sq(f, s, kappa).sqrt()
}

/// Standard inhomogeneous norm with symbol `(1 + xi^2)^s`.
pub fn sobolev_norm<T: Scalar>(f: &RealField<T>, s: T) -> T {
    weighted_spectral_sq(f, |xi| (T::one() + xi * xi).powf(s)).sqrt()
}

/// `||f||_inf / (kappa^{-1/2} ||f||_{H^1_kappa})`; at most `1/2` on the line.
pub fn linf_embedding_ratio<T: Scalar>(f: &RealField<T>, kappa: KappaParam<T>) -> Result<T> {
    let h1 = sobolev_kappa_norm(f, T::one(), kappa);
    if !(h1 > T::zero()) {
        return Err(Error::DivisionByZeroNorm);
    }
    Ok(f.max_abs() * kappa.get().sqrt() / h1)
}

/// Real `L^2` pairing `\int f h dx`.
pub fn pairing<T: Scalar>(f: &RealField<T>, h: &RealField<T>) -> T {
    assert!(f.grid().same_as(h.grid()), "fields live on different grids");
    f.samples().iter().zip(h.samples()).map(|(&a, &b)| a * b).sum::<T>() * f.grid().dx()
}
