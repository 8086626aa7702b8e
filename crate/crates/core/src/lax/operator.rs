use crate::linalg::DenseMatrix;
use crate::scalar::Scalar;
use crate::spectral::{RealField, TorusGrid};

/// Integral operator on the grid with kernel `K`: `(Af)(x_i) = sum_j K_ij f(x_j) dx`.
#[derive(Clone, Debug)]
pub struct DenseOperator<T: Scalar> {
    grid: TorusGrid<T>,
    kernel: DenseMatrix<T>,
}

impl<T: Scalar> DenseOperator<T> {
    pub fn new(grid: &TorusGrid<T>, kernel: DenseMatrix<T>) -> Self {
        assert_eq!(kernel.dim(), grid.points(), "kernel does not match grid");
        Self { grid: grid.clone(), kernel }
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn kernel(&self) -> &DenseMatrix<T> {
        &self.kernel
    }

    pub fn into_kernel(self) -> DenseMatrix<T> {
        self.kernel
    }

    pub fn apply(&self, f: &RealField<T>) -> RealField<T> {
        let dx = self.grid.dx();
        let samples = self.kernel.matvec(f.samples()).into_iter().map(|v| v * dx).collect();
        RealField::new(&self.grid, samples).expect("kernel matches grid")
    }

    pub fn diagonal(&self) -> RealField<T> {
        RealField::new(&self.grid, self.kernel.diagonal()).expect("kernel matches grid")
    }

    /// `max |K - K^T| / max |K|`.
    pub fn relative_asymmetry(&self) -> T {
        let scale = self.kernel.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        self.kernel.symmetry_defect() / scale
    }
}
