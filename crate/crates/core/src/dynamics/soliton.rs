use crate::scalar::{lit, Scalar};
use crate::spectral::{RealField, TorusGrid};

/// `-2 c^2 sech^2(c (x - x0 - 4 c^2 t))`, an exact solution of `u_t = -u''' + 6 u u'`.
pub fn soliton<T: Scalar>(grid: &TorusGrid<T>, c: T, x0: T, t: T) -> RealField<T> {
    let center = x0 + lit::<T>(4.0) * c * c * t;
    RealField::from_fn(grid, |x| {
        let s = T::one() / (c * grid.periodic_offset(x, center)).cosh();
        -lit::<T>(2.0) * c * c * s * s
    })
}
