use rayon::prelude::*;

use super::free::{circulant_column, circular_convolve, doubled_resolvent, h1_field, periodic_free_kernel};
use super::operator::DenseOperator;
use crate::error::{Error, Result};
use crate::linalg::{condition_ratio, DenseMatrix, LuFactors};
use crate::scalar::{lit, Scalar};
use crate::spectral::{KappaParam, RealField, TorusGrid};

/// Forward matrices with `sigma_min / sigma_max` below this are rejected.
pub const SINGULARITY_RATIO: f64 = 1e-10;

/// Resolvent of the Lax operator `-d^2 + u + kappa^2` on the grid.
///
/// The spectral collocation matrices `P0` (free) and `Pu` (perturbed) are
/// kept in pointwise form (`(P f)_i = sum_j P_ij f_j`); their difference is the
/// smooth part of the kernel. The free part, whose kernel has a kink on the
/// diagonal, is always handled in closed form so that diagonals converge
/// spectrally: the first-order term `h_1` is evaluated as a multiplier and
/// only the higher-order remainder is read off the dense matrices.
#[derive(Clone, Debug)]
pub struct LaxResolvent<T: Scalar> {
    potential: RealField<T>,
    kappa: KappaParam<T>,
    free_column: Vec<T>,
    perturbation: DenseMatrix<T>,
    greens: RealField<T>,
}

impl<T: Scalar> LaxResolvent<T> {
    pub fn new(u: &RealField<T>, kappa: KappaParam<T>) -> Result<Self> {
        u.check_finite("potential")?;
        let grid = u.grid();
        let k2 = kappa.get() * kappa.get();
        let free_column = circulant_column(grid, |xi| T::one() / (xi * xi + k2));
        let forward_column = circulant_column(grid, |xi| xi * xi + k2);
        let mut forward = DenseMatrix::circulant(&forward_column);
        forward.add_diagonal(u.samples());
        let lu = LuFactors::new(&forward)?;
        // The forward matrix is symmetric with spectrum inside
        // [kappa^2 + min u, xi_max^2 + kappa^2 + max u]; estimate only when that is inconclusive.
        let lower = k2 + u.min();
        let upper = grid.xi_max() * grid.xi_max() + k2 + u.max();
        let ratio = if lower > T::zero() && lower / upper >= lit(SINGULARITY_RATIO) {
            lower / upper
        } else {
            condition_ratio(&forward, &lu)
        };
        if ratio < lit(SINGULARITY_RATIO) {
            return Err(Error::NearSingularOperator { ratio: ratio.to_f64_lossy() });
        }
        let n = grid.points();
        let mut perturbation = lu.inverse();
        perturbation.rows_mut().enumerate().for_each(|(i, row)| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v - free_column[(i + n - j) % n];
            }
        });
        let greens = renormalized_diagonal(u, kappa, &free_column, &perturbation);
        Ok(Self { potential: u.clone(), kappa, free_column, perturbation, greens })
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        self.potential.grid()
    }

    pub fn kappa(&self) -> KappaParam<T> {
        self.kappa
    }

    pub fn potential(&self) -> &RealField<T> {
        &self.potential
    }

    /// Diagonal Green's function `g`.
    pub fn greens(&self) -> &RealField<T> {
        &self.greens
    }

    /// Collocation pair `(P0, Pu)` in pointwise form, `Pu = (P0^{-1} + diag u)^{-1}`.
    pub fn collocation_pair(&self) -> (DenseMatrix<T>, DenseMatrix<T>) {
        let p0 = DenseMatrix::circulant(&self.free_column);
        let pu = self.perturbation.zip_map(&p0, |a, b| a + b);
        (p0, pu)
    }

    /// Resolvent as an integral operator: periodic free kernel plus the smooth
    /// perturbation, with the diagonal set to `g`.
    pub fn operator(&self) -> DenseOperator<T> {
        let grid = self.grid().clone();
        let dx = grid.dx();
        let kappa = self.kappa;
        let g = self.greens.samples();
        let kernel = DenseMatrix::from_fn(grid.points(), |i, j| {
            if i == j {
                g[i]
            } else {
                periodic_free_kernel(&grid, kappa, grid.x(i) - grid.x(j)) + self.perturbation.get(i, j) / dx
            }
        });
        DenseOperator::new(self.grid(), kernel)
    }

    /// Directional derivative of `g`: `-\int G(x,y) f(y) G(y,x) dy`.
    pub fn dg(&self, f: &RealField<T>) -> RealField<T> {
        let grid = self.grid();
        let n = grid.points();
        let inv_dx = T::one() / grid.dx();
        let lead = h1_field(f, self.kappa);
        let pd = &self.perturbation;
        let c = &self.free_column;
        let fs = f.samples();
        let samples: Vec<T> = (0..n)
            .into_par_iter()
            .map(|i| {
                let row = pd.row(i);
                let mut acc = T::zero();
                for j in 0..n {
                    let p = row[j];
                    acc = acc + (p * p + (p + p) * c[(i + n - j) % n]) * fs[j];
                }
                lead.samples()[i] - acc * inv_dx
            })
            .collect();
        RealField::new(grid, samples).expect("grid sized")
    }

    /// Directional derivative of `rho`: `dg / (2 g^2) + 2 kappa R0(2 kappa) f`.
    pub fn drho(&self, f: &RealField<T>) -> RealField<T> {
        let dg = self.dg(f);
        let two_k = self.kappa.get() + self.kappa.get();
        let local = doubled_resolvent(f, self.kappa);
        let two = lit::<T>(2.0);
        let tmp = dg.zip_map(&self.greens, |d, g| d / (two * g * g));
        tmp.zip_map(&local, |a, b| a + two_k * b)
    }
}

/// `g = 1/(2 kappa) + h_1 + (diag(Pu - P0)/dx - h_1^collocation)`.
fn renormalized_diagonal<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    free_column: &[T],
    perturbation: &DenseMatrix<T>,
) -> RealField<T> {
    let grid = u.grid();
    let inv_dx = T::one() / grid.dx();
    let squared: Vec<T> = free_column.iter().map(|&c| c * c).collect();
    let h1_colloc = circular_convolve(grid, &squared, u);
    let h1 = h1_field(u, kappa);
    let base = T::one() / (kappa.get() + kappa.get());
    let samples = (0..grid.points())
        .map(|i| base + h1.samples()[i] + (perturbation.get(i, i) + h1_colloc.samples()[i]) * inv_dx)
        .collect();
    RealField::new(grid, samples).expect("grid sized")
}

pub fn build_lax_resolvent<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>) -> Result<DenseOperator<T>> {
    Ok(LaxResolvent::new(u, kappa)?.operator())
}

pub fn greens_diagonal_direct<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>) -> Result<RealField<T>> {
    Ok(LaxResolvent::new(u, kappa)?.greens)
}

pub fn dg_directional<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    f: &RealField<T>,
) -> Result<RealField<T>> {
    u.check_grid(f)?;
    Ok(LaxResolvent::new(u, kappa)?.dg(f))
}

pub fn drho_directional<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    f: &RealField<T>,
) -> Result<RealField<T>> {
    u.check_grid(f)?;
    let res = LaxResolvent::new(u, kappa)?;
    check_positive(res.greens())?;
    Ok(res.drho(f))
}

pub(crate) fn check_positive<T: Scalar>(g: &RealField<T>) -> Result<()> {
    let min = g.min();
    if min > T::zero() {
        Ok(())
    } else {
        Err(Error::NonPositiveGreens { min: min.to_f64_lossy() })
    }
}
