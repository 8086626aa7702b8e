use rayon::prelude::*;

use super::profile::BottomProfile;
use super::synth::FRAME_SPEED;
use crate::error::Result;
use crate::scalar::{lit, Scalar};
use crate::spectral::{RealField, TrigInterpolant};

/// Fraction of energy above two thirds of the band that triggers an aliasing warning.
pub const OUT_OF_BAND_LIMIT: f64 = 1e-6;

/// A resampled field with its out-of-band energy fraction.
#[derive(Clone, Debug)]
pub struct Transformed<T: Scalar> {
    pub field: RealField<T>,
    pub out_of_band: f64,
}

impl<T: Scalar> Transformed<T> {
    /// The result has significant energy near the band edge, so the resampling may alias.
    pub fn aliased(&self) -> bool {
        self.out_of_band > OUT_OF_BAND_LIMIT
    }

    fn new(field: RealField<T>, what: &str) -> Self {
        let spec = field.spectrum();
        let n = spec.len();
        let cut = n / 3;
        let total: f64 = spec.iter().map(|c| c.norm_sqr().to_f64_lossy()).sum();
        let high: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| (*k).min(n - *k) > cut)
            .map(|(_, c)| c.norm_sqr().to_f64_lossy())
            .sum();
        let out_of_band = if total > 0.0 { high / total } else { 0.0 };
        if out_of_band > OUT_OF_BAND_LIMIT {
            log::warn!("{what}: out-of-band energy fraction {out_of_band:.2e} exceeds {OUT_OF_BAND_LIMIT:e}; aliasing likely");
        }
        Self { field, out_of_band }
    }
}

/// `u(t, x) = b^{5/3}(x) v(t, y(x) - 4t)`, from the `y`-grid to the `x`-grid.
pub fn transform_forward<T: Scalar>(v: &RealField<T>, t: T, profile: &BottomProfile<T>) -> Result<Transformed<T>> {
    v.check_grid(&RealField::zeros(profile.y_grid()))?;
    let interp = TrigInterpolant::new(v);
    let shift = lit::<T>(FRAME_SPEED) * t;
    let p = lit::<T>(5.0 / 3.0);
    let samples: Vec<T> = profile
        .y_samples()
        .par_iter()
        .zip(profile.depth().samples())
        .map(|(&y, &b)| b.powf(p) * interp.eval(y - shift))
        .collect();
    Ok(Transformed::new(RealField::new(profile.grid(), samples)?, "forward transform"))
}

/// `v(t, s) = b^{-5/3} u(t, x)` at `x = y^{-1}(s + 4t)`, from the `x`-grid to the `y`-grid.
pub fn transform_backward<T: Scalar>(u: &RealField<T>, t: T, profile: &BottomProfile<T>) -> Result<Transformed<T>> {
    u.check_grid(&RealField::zeros(profile.grid()))?;
    let weighted = u.zip_map(profile.depth(), |u, b| u * b.powf(lit(-5.0 / 3.0)));
    let interp = TrigInterpolant::new(&weighted);
    let shift = lit::<T>(FRAME_SPEED) * t;
    let grid = profile.y_grid();
    let samples: Vec<T> =
        (0..grid.points()).into_par_iter().map(|j| interp.eval(profile.y_inverse(grid.x(j) + shift))).collect();
    Ok(Transformed::new(RealField::new(grid, samples)?, "backward transform"))
}
