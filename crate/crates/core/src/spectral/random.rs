use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::RealField;
use super::grid::TorusGrid;
use super::kappa::KappaParam;
use super::norms::sobolev_kappa_norm;
use crate::scalar::{lit, Scalar};

/// Seeded random real field with `|hat u(xi)| ~ (xi^2 + 4 kappa^2)^{-1/2}` on
/// modes `|k| <= N/3` and uniformly random phases, scaled to the requested
/// `H^{-1}_kappa` norm. Identical seeds give identical fields.
pub fn colored_field<T: Scalar>(
    grid: &TorusGrid<T>,
    kappa: KappaParam<T>,
    h_minus_one_norm: T,
    seed: u64,
) -> RealField<T> {
    let n = grid.points();
    let cutoff = n / 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k2 = lit::<T>(4.0) * kappa.get() * kappa.get();
    let mut spec = vec![Complex::new(T::zero(), T::zero()); n];
    let xi = grid.wavenumbers();
    let sign: f64 = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    spec[0] = Complex::new(lit::<T>(sign) / k2.sqrt(), T::zero());
    for j in 1..=cutoff.min(n / 2 - 1) {
        let amp = T::one() / (xi[j] * xi[j] + k2).sqrt();
        let phase = lit::<T>(rng.gen::<f64>() * std::f64::consts::TAU);
        let c = Complex::new(amp * phase.cos(), amp * phase.sin());
        spec[j] = c;
        spec[n - j] = c.conj();
    }
    let f = RealField::from_spectrum(grid, spec);
    let norm = sobolev_kappa_norm(&f, -T::one(), kappa);
    f.scale(h_minus_one_norm / norm)
}
