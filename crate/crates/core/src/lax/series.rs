use num_complex::Complex;
use rayon::prelude::*;

use super::free::{circulant_column, h1_field};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::{lit, Scalar};
use crate::spectral::{sobolev_kappa_norm, KappaParam, RealField};

pub const DEFAULT_MAX_TERMS: usize = 40;

/// Upper bound on the operator norm of `R0^{1/2} u R0^{1/2}`: the smaller of the
/// Hilbert-Schmidt bound `kappa^{-1/2} ||u||_{H^{-1}_kappa}` and `||u||_inf / kappa^2`.
pub fn contraction_ratio<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>) -> T {
    let k = kappa.get();
    let hs = sobolev_kappa_norm(u, -T::one(), kappa) / k.sqrt();
    hs.min(u.max_abs() / (k * k))
}

/// Dense collocation terms `h_l = (-1)^l diag((P0 U)^l P0) / dx` for `l = 1..=count`.
///
/// The `l = 1` term carries an `O(xi_max^{-3})` truncation error; higher terms
/// converge like `xi_max^{-5}` or faster.
pub fn collocation_series_terms<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    count: usize,
) -> Vec<RealField<T>> {
    let mut out = Vec::with_capacity(count);
    let mut stepper = SeriesStepper::new(u, kappa);
    for _ in 0..count {
        out.push(stepper.next_term());
    }
    out
}

struct SeriesStepper<'a, T: Scalar> {
    u: &'a RealField<T>,
    symbol: Vec<T>,
    rows: DenseMatrix<T>,
    order: usize,
}

impl<'a, T: Scalar> SeriesStepper<'a, T> {
    fn new(u: &'a RealField<T>, kappa: KappaParam<T>) -> Self {
        let grid = u.grid();
        let k2 = kappa.get() * kappa.get();
        let symbol: Vec<T> = grid.wavenumbers().iter().map(|&xi| T::one() / (xi * xi + k2)).collect();
        let column = circulant_column(grid, |xi| T::one() / (xi * xi + k2));
        Self { u, symbol, rows: DenseMatrix::circulant(&column), order: 0 }
    }

    /// Advances `M <- M U P0` row by row (`P0` is symmetric, so each row is
    /// multiplied by the free resolvent symbol) and returns the next `h_l`.
    fn next_term(&mut self) -> RealField<T> {
        let grid = self.u.grid();
        let u = self.u.samples();
        let symbol = &self.symbol;
        self.rows.rows_mut().for_each(|row| {
            let mut buf: Vec<Complex<T>> =
                row.iter().zip(u).map(|(&m, &w)| Complex::new(m * w, T::zero())).collect();
            grid.forward_in_place(&mut buf);
            for (c, &s) in buf.iter_mut().zip(symbol) {
                *c = *c * s;
            }
            grid.inverse_in_place(&mut buf);
            for (v, c) in row.iter_mut().zip(buf) {
                *v = c.re;
            }
        });
        self.order += 1;
        let sign = if self.order % 2 == 0 { T::one() } else { -T::one() };
        let scale = sign / grid.dx();
        let diag = self.rows.diagonal().into_iter().map(|v| v * scale).collect();
        RealField::new(grid, diag).expect("grid sized")
    }
}

/// Diagonal Green's function by the resolvent series.
///
/// The first-order term is taken in closed form; terms `l >= 2` come from the
/// dense collocation products. Stops once the sup norm of the newest term is
/// below `tol`; `u = 0` stops after the first term, so `terms_used = 1`.
pub fn greens_diagonal_series<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    max_terms: usize,
    tol: T,
) -> Result<(RealField<T>, usize)> {
    u.check_finite("potential")?;
    let ratio = contraction_ratio(u, kappa);
    if ratio > lit(0.5) {
        return Err(Error::SeriesNotContracting { ratio: ratio.to_f64_lossy() });
    }
    let base = T::one() / (kappa.get() + kappa.get());
    let h1 = h1_field(u, kappa);
    let mut last = h1.max_abs();
    let mut g = h1.map(|v| v + base);
    let mut used = 1;
    if last < tol {
        return Ok((g, used));
    }
    let mut stepper = SeriesStepper::new(u, kappa);
    stepper.next_term();
    while used < max_terms {
        let term = stepper.next_term();
        used += 1;
        last = term.max_abs();
        g = &g + &term;
        if last < tol {
            return Ok((g, used));
        }
    }
    Err(Error::NoConvergence { terms: used, last: last.to_f64_lossy() })
}
