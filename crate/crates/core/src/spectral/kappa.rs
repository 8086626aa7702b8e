use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Spectral parameter `kappa >= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct KappaParam<T: Scalar>(T);

impl<T: Scalar> KappaParam<T> {
    pub fn new(kappa: T) -> Result<Self> {
        if !kappa.is_finite() || kappa < T::one() {
            return Err(Error::KappaBelowOne(kappa.to_f64_lossy()));
        }
        Ok(Self(kappa))
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }

    /// The same parameter doubled, as used for the `R0(2 kappa)` terms.
    #[inline]
    pub fn doubled(self) -> Self {
        Self(self.0 + self.0)
    }
}
