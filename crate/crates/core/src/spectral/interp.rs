use num_complex::Complex;

use super::field::RealField;
use crate::scalar::Scalar;

/// Band-limited trigonometric interpolant of a periodic field, evaluable anywhere.
#[derive(Clone, Debug)]
pub struct TrigInterpolant<T: Scalar> {
    // c_k for k = 0..=N/2, with the Nyquist coefficient halved
    coeffs: Vec<Complex<T>>,
    origin: T,
    length: T,
}

impl<T: Scalar> TrigInterpolant<T> {
    pub fn new(f: &RealField<T>) -> Self {
        let grid = f.grid();
        let n = grid.points();
        let spec = f.spectrum();
        let inv_n = T::one() / T::from_count(n);
        let mut coeffs: Vec<Complex<T>> = spec[..=n / 2].iter().map(|&c| c * inv_n).collect();
        coeffs[n / 2] = coeffs[n / 2] / (T::one() + T::one());
        Self { coeffs, origin: grid.x(0), length: grid.length() }
    }

    fn series(&self, x: T, derivative: bool) -> T {
        let theta = T::TAU() * (x - self.origin) / self.length;
        let step = Complex::new(theta.cos(), theta.sin());
        let two = T::one() + T::one();
        let base = T::TAU() / self.length;
        let mut z = Complex::new(T::one(), T::zero());
        let mut acc = if derivative { T::zero() } else { self.coeffs[0].re };
        let last = self.coeffs.len() - 1;
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            z = z * step;
            if k % 64 == 0 {
                // refresh to keep the recurrence from drifting
                let th = theta * T::from_count(k);
                z = Complex::new(th.cos(), th.sin());
            }
            let term = *c * z;
            acc = acc
                + if derivative {
                    if k == last {
                        T::zero()
                    } else {
                        -two * term.im * base * T::from_count(k)
                    }
                } else {
                    two * term.re
                };
        }
        acc
    }

    pub fn eval(&self, x: T) -> T {
        self.series(x, false)
    }

    /// Derivative of the interpolant (Nyquist term excluded, matching the spectral derivative).
    pub fn eval_derivative(&self, x: T) -> T {
        self.series(x, true)
    }

    pub fn eval_many(&self, xs: &[T]) -> Vec<T> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}
