use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{sobolev_kappa_norm_sq, KappaParam, RealField};

/// Default constant in the admissibility condition `kappa >= 1 + C ||u||^2_{H^{-1}_kappa}`.
pub const DEFAULT_ADMISSIBILITY: f64 = 10.0;

/// `kappa - 1 - C ||u||^2_{H^{-1}_kappa}`; nonnegative when admissible.
pub fn admissibility_margin<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>, constant: T) -> T {
    kappa.get() - T::one() - constant * sobolev_kappa_norm_sq(u, -T::one(), kappa)
}

pub fn is_admissible<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>, constant: T) -> bool {
    admissibility_margin(u, kappa, constant) >= T::zero()
}

/// Smallest admissible `kappa`, the root of `kappa = 1 + C ||u||^2_{H^{-1}_kappa}`.
///
/// The right side decreases in `kappa`, so the root is unique; found by bisection.
pub fn minimal_admissible_kappa<T: Scalar>(u: &RealField<T>, constant: T) -> Result<KappaParam<T>> {
    let margin = |k: T| admissibility_margin(u, KappaParam::new(k).expect("k >= 1"), constant);
    let mut lo = T::one();
    if margin(lo) >= T::zero() {
        return KappaParam::new(lo);
    }
    let mut hi = lit::<T>(2.0);
    while margin(hi) < T::zero() {
        hi = hi + hi;
        if !hi.is_finite() || hi > lit(1e12) {
            return Err(Error::InvalidArgument("no admissible kappa".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo + hi) / lit(2.0);
        if margin(mid) >= T::zero() {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= lit::<T>(1e-14) * hi {
            break;
        }
    }
    KappaParam::new(hi)
}
