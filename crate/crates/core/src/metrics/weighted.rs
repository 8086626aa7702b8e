use crate::lax::DenseOperator;
use crate::linalg::power_iteration;
use crate::scalar::{lit, Scalar};
use crate::spectral::{FourierMultiplier, KappaParam, RealField, TorusGrid};

/// Linear map on grid functions together with its `L^2` adjoint.
pub trait LinearOperator<T: Scalar>: Sync {
    fn grid(&self) -> &TorusGrid<T>;
    fn apply(&self, f: &RealField<T>) -> RealField<T>;
    fn apply_adjoint(&self, f: &RealField<T>) -> RealField<T>;
}

impl<T: Scalar> LinearOperator<T> for DenseOperator<T> {
    fn grid(&self) -> &TorusGrid<T> {
        DenseOperator::grid(self)
    }

    fn apply(&self, f: &RealField<T>) -> RealField<T> {
        DenseOperator::apply(self, f)
    }

    fn apply_adjoint(&self, f: &RealField<T>) -> RealField<T> {
        let dx = self.grid().dx();
        let samples = self.kernel().transpose_matvec(f.samples()).into_iter().map(|v| v * dx).collect();
        RealField::new(self.grid(), samples).expect("kernel matches grid")
    }
}

impl<T: Scalar> LinearOperator<T> for FourierMultiplier<T> {
    fn grid(&self) -> &TorusGrid<T> {
        FourierMultiplier::grid(self)
    }

    fn apply(&self, f: &RealField<T>) -> RealField<T> {
        FourierMultiplier::apply(self, f)
    }

    fn apply_adjoint(&self, f: &RealField<T>) -> RealField<T> {
        FourierMultiplier::apply(self, f)
    }
}

/// The space `H^s_kappa`, normed by the weight `(xi^2 + 4 kappa^2)^{s/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedSpace<T: Scalar> {
    pub s: T,
    pub kappa: KappaParam<T>,
}

impl<T: Scalar> WeightedSpace<T> {
    pub fn new(s: T, kappa: KappaParam<T>) -> Self {
        Self { s, kappa }
    }

    /// Multiplier `(xi^2 + 4 kappa^2)^{p s / 2}`.
    pub fn weight(&self, grid: &TorusGrid<T>, power: T) -> FourierMultiplier<T> {
        FourierMultiplier::sobolev_weight(grid, power * self.s / lit(2.0), self.kappa)
    }
}

/// Largest singular value of `W_to A W_from^{-1}` by power iteration.
pub fn weighted_op_norm<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    from: WeightedSpace<T>,
    to: WeightedSpace<T>,
) -> T {
    weighted_op_norm_with(op, from, to, 20_000, lit(1e-13))
}

/// [`weighted_op_norm`] with an explicit iteration budget and stopping tolerance
/// on the Rayleigh quotient.
pub fn weighted_op_norm_with<T: Scalar, A: LinearOperator<T> + ?Sized>(
    op: &A,
    from: WeightedSpace<T>,
    to: WeightedSpace<T>,
    max_iter: usize,
    rel_tol: T,
) -> T {
    let grid = op.grid();
    let w_to = to.weight(grid, T::one());
    let w_from_inv = from.weight(grid, -T::one());
    let n = grid.points();
    power_iteration(
        n,
        |v| {
            let f = RealField::new(grid, v.to_vec()).expect("sized");
            let forward = w_to.apply(&op.apply(&w_from_inv.apply(&f)));
            w_from_inv.apply(&op.apply_adjoint(&w_to.apply(&forward))).into_samples()
        },
        max_iter,
        rel_tol,
    )
}
