use std::io::Write;

use super::profile::BottomProfile;
use crate::dynamics::{Coefficient, CoefficientMeta, CoefficientSet};
use crate::error::Result;
use crate::scalar::{lit, Scalar};
use crate::spectral::RealField;

/// Speed of the moving frame in the change of variables `u = b^{5/3} v(t, y(x) - 4t)`.
pub const FRAME_SPEED: f64 = 4.0;

/// The coefficients `a2, a3, a4` as functions of `x` (before composing with `y^{-1}`).
pub fn coefficient_fields<T: Scalar>(profile: &BottomProfile<T>) -> [RealField<T>; 3] {
    let b = profile.depth();
    let (d1, d2, d3) = (profile.depth_derivative(1), profile.depth_derivative(2), profile.depth_derivative(3));
    let n = b.len();
    let c = |v: f64| lit::<T>(v);
    let at = |f: &dyn Fn(T, T, T, T) -> T| {
        let s = (0..n).map(|i| f(b.samples()[i], d1.samples()[i], d2.samples()[i], d3.samples()[i])).collect();
        RealField::new(profile.grid(), s).expect("profile grid")
    };
    let a2 = at(&|b, b1, _, _| c(10.0) * b.powf(c(2.0 / 3.0)) * b1);
    let a3 = at(&|b, b1, b2, _| {
        c(5.0 / 9.0) * b.powf(c(4.0 / 3.0)) * b1 * b1 - c(10.0 / 3.0) * b.powf(c(7.0 / 3.0)) * b2
            + c(4.0) * (T::one() - b.powf(c(-2.0 / 3.0)))
    });
    let a4 = at(&|b, b1, b2, b3| {
        c(10.0 / 27.0) * b * b * b1 * b1 * b1 - c(10.0 / 3.0) * b * b * b * b1 * b2 - c(5.0 / 3.0) * b.powi(4) * b3
            - c(38.0 / 3.0) * b1
    });
    [a2, a3, a4]
}

/// gKdV coefficients on the `y`-grid for the variable-bottom model.
///
/// `a_j(t, s) = A_j(y^{-1}(s + 4t))`: in the moving frame the bottom travels
/// with speed 4, so the coefficients are stored as traveling profiles.
pub fn synth_coefficients<T: Scalar>(profile: &BottomProfile<T>) -> Result<CoefficientSet<T>> {
    let [a2, a3, a4] = coefficient_fields(profile);
    let v = lit::<T>(FRAME_SPEED);
    let travel = |f: &RealField<T>| -> Result<Coefficient<T>> {
        Ok(Coefficient::Traveling { profile: profile.compose_inverse(f)?, velocity: v })
    };
    let meta = CoefficientMeta { delta: None, smoothness: 1, label: "variable bottom".into() };
    CoefficientSet::new(profile.y_grid(), [Coefficient::Zero, travel(&a2)?, travel(&a3)?, travel(&a4)?], meta)
}

/// Rows `y,a2,a3,a4` of the coefficients at `t = 0` (`a1` is identically zero).
pub fn write_coefficients_csv<T: Scalar, W: Write>(set: &CoefficientSet<T>, mut w: W) -> Result<()> {
    let grid = set.grid();
    let fields: Vec<Option<RealField<T>>> = (2..=4).map(|j| set.sample(j, T::zero())).collect::<Result<_>>()?;
    writeln!(w, "y,a2,a3,a4")?;
    for i in 0..grid.points() {
        let v = |f: &Option<RealField<T>>| f.as_ref().map_or(0.0, |f| f.samples()[i].to_f64_lossy());
        writeln!(w, "{:e},{:e},{:e},{:e}", grid.x(i).to_f64_lossy(), v(&fields[0]), v(&fields[1]), v(&fields[2]))?;
    }
    Ok(())
}
