//! Periodic grid, FFT-backed fields and multipliers, and the kappa-adapted Sobolev norms.

mod dealias;
mod field;
mod grid;
mod interp;
mod kappa;
mod multiplier;
mod norms;
mod random;

pub use dealias::{dealiased_product, dealiased_product_spectrum};
pub use field::RealField;
pub use grid::TorusGrid;
pub use interp::TrigInterpolant;
pub use kappa::KappaParam;
pub use multiplier::{apply_free_resolvent, derivative, derivative_spectrum, FourierMultiplier};
pub use norms::{
    linf_embedding_ratio, pairing, sobolev_kappa_norm, sobolev_kappa_norm_sq, sobolev_norm,
    weighted_spectral_sq,
};
pub use random::colored_field;

/// `make_grid(L, N)`.
pub fn make_grid<T: crate::Scalar>(length: T, points: usize) -> crate::Result<TorusGrid<T>> {
    TorusGrid::new(length, points)
}
