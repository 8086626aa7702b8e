use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lax::{circulant_column, DenseOperator};
use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use crate::spectral::{sobolev_kappa_norm, KappaParam, RealField};

/// Hilbert-Schmidt norm `(\iint |K|^2 dx dy)^{1/2}`.
pub fn hs_norm<T: Scalar>(op: &DenseOperator<T>) -> T {
    op.kernel().frobenius() * op.grid().dx()
}

/// `tr(AB) = \iint K_A(x,y) K_B(y,x) dy dx`.
pub fn trace_product<T: Scalar>(a: &DenseOperator<T>, b: &DenseOperator<T>) -> T {
    let n = a.kernel().dim();
    let (ka, kb) = (a.kernel(), b.kernel());
    let dx = a.grid().dx();
    let s: T = (0..n)
        .into_par_iter()
        .map(|i| ka.row(i).iter().enumerate().map(|(j, &v)| v * kb.get(j, i)).sum::<T>())
        .collect::<Vec<T>>()
        .into_iter()
        .sum();
    s * dx * dx
}

/// Dense operator `sqrt(R0) f sqrt(R0)` with `sqrt(R0)` the multiplier `(xi^2 + kappa^2)^{-1/2}`.
pub fn sandwiched_potential<T: Scalar>(f: &RealField<T>, kappa: KappaParam<T>) -> DenseOperator<T> {
    let grid = f.grid();
    let k2 = kappa.get() * kappa.get();
    let symbol: Vec<T> = grid.wavenumbers().iter().map(|&xi| (xi * xi + k2).sqrt().recip()).collect();
    let col = circulant_column(grid, |xi| (xi * xi + k2).sqrt().recip());
    let mut m = DenseMatrix::circulant(&col);
    let fs = f.samples();
    let inv_dx = grid.dx().recip();
    // row_i(S diag(f) S) is the multiplier applied to row_i(S) .* f (S is symmetric)
    m.rows_mut().for_each(|row| {
        let mut buf: Vec<Complex<T>> = row.iter().zip(fs).map(|(&a, &b)| Complex::new(a * b, T::zero())).collect();
        grid.forward_in_place(&mut buf);
        for (c, &s) in buf.iter_mut().zip(&symbol) {
            *c = *c * s;
        }
        grid.inverse_in_place(&mut buf);
        for (v, c) in row.iter_mut().zip(buf) {
            *v = c.re * inv_dx;
        }
    });
    DenseOperator::new(grid, m)
}

/// Relative gap between the HS norm of `sqrt(R0) f sqrt(R0)` and `kappa^{-1/2} ||f||_{H^{-1}_kappa}`.
pub fn verify_hs_identity<T: Scalar>(f: &RealField<T>, kappa: KappaParam<T>) -> Result<T> {
    let target = sobolev_kappa_norm(f, -T::one(), kappa) / kappa.get().sqrt();
    if !(target > T::zero()) {
        return Err(Error::DivisionByZeroNorm);
    }
    let hs = hs_norm(&sandwiched_potential(f, kappa));
    Ok((hs - target).abs() / target)
}
