use super::density::current_j;
use super::resolvent::{check_positive, LaxResolvent};
use crate::dynamics::{gkdv_rhs, perturbation, CoefficientSet};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectral::{derivative, KappaParam, RealField};

/// `|| d rho(F) + j' - d rho(P) || / max(1, ||j'||)` with `F` the full gKdV
/// right side and `P` its perturbation part; zero in the continuum since
/// `d rho(-u''' + 6 u u') = -j'`.
pub fn microlaw_residual<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    coeffs: &CoefficientSet<T>,
    t: T,
) -> Result<T> {
    if u.max_abs() == T::zero() {
        return Ok(T::zero());
    }
    let res = LaxResolvent::new(u, kappa)?;
    check_positive(res.greens())?;
    let full = gkdv_rhs(u, t, coeffs)?;
    let p = perturbation(u, t, coeffs)?;
    let j = current_j(u, kappa, res.greens())?;
    let dj = derivative(&j, 1)?;
    let lhs = &(&res.drho(&full) + &dj) - &res.drho(&p);
    Ok(lhs.l2_norm() / dj.l2_norm().max(T::one()))
}
