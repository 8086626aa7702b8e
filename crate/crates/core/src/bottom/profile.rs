use std::io::BufRead;
use std::path::Path;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{derivative, RealField, TorusGrid, TrigInterpolant};

/// Default lower bound on the depth `1 - c`.
pub const DEFAULT_DEPTH_MARGIN: f64 = 0.1;
const NEWTON_MAX_ITER: usize = 60;

/// Bottom elevation `c`, the depth factor `b = sqrt(1 - c)` with three
/// derivatives, and the stretched coordinate `y(x) = int_0^x b^{-5/3}`.
///
/// On the torus `y` is a ramp with the mean slope of `b^{-5/3}` plus a
/// periodic part, so it maps the `x`-circle of length `L` onto a `y`-circle of
/// length `slope * L` with the same number of points.
#[derive(Clone, Debug)]
pub struct BottomProfile<T: Scalar> {
    grid: TorusGrid<T>,
    y_grid: TorusGrid<T>,
    elevation: RealField<T>,
    depth: RealField<T>,
    depth_derivatives: [RealField<T>; 3],
    slope: T,
    periodic: TrigInterpolant<T>,
    y_samples: Vec<T>,
    margin: T,
}

impl<T: Scalar> BottomProfile<T> {
    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn y_grid(&self) -> &TorusGrid<T> {
        &self.y_grid
    }

    pub fn elevation(&self) -> &RealField<T> {
        &self.elevation
    }

    /// `b = sqrt(1 - c)`.
    pub fn depth(&self) -> &RealField<T> {
        &self.depth
    }

    /// `b^{(order)}` for `order` in `1..=3`.
    pub fn depth_derivative(&self, order: usize) -> &RealField<T> {
        &self.depth_derivatives[order - 1]
    }

    pub fn margin(&self) -> T {
        self.margin
    }

    /// Mean of `b^{-5/3}`, the ratio of the `y` and `x` circle lengths.
    pub fn stretch(&self) -> T {
        self.slope
    }

    /// `y(x_i)` on the `x`-grid.
    pub fn y_samples(&self) -> &[T] {
        &self.y_samples
    }

    pub fn y(&self, x: T) -> T {
        self.slope * x + self.periodic.eval(x)
    }

    pub fn y_prime(&self, x: T) -> T {
        self.slope + self.periodic.eval_derivative(x)
    }

    /// `y^{-1}` by Newton's method from the linear guess `Y / slope`.
    pub fn y_inverse(&self, target: T) -> T {
        let mut x = target / self.slope;
        let tol = lit::<T>(1e-15);
        for _ in 0..NEWTON_MAX_ITER {
            let step = (self.y(x) - target) / self.y_prime(x);
            x = x - step;
            if step.abs() <= tol * (T::one() + x.abs()) {
                break;
            }
        }
        x
    }

    /// `(min y', max y')` on the grid.
    pub fn jacobian_bounds(&self) -> (T, T) {
        let w = self.depth.map(|b| b.powf(lit(-5.0 / 3.0)));
        (w.min(), w.max())
    }

    /// `f o y^{-1}` sampled on the `y`-grid, for `f` on the `x`-grid.
    pub fn compose_inverse(&self, f: &RealField<T>) -> Result<RealField<T>> {
        f.check_grid(&RealField::zeros(&self.grid))?;
        let interp = TrigInterpolant::new(f);
        let samples: Vec<T> =
            (0..self.y_grid.points()).into_par_iter().map(|j| interp.eval(self.y_inverse(self.y_grid.x(j)))).collect();
        RealField::new(&self.y_grid, samples)
    }

    /// `g o y` sampled on the `x`-grid, for `g` on the `y`-grid.
    pub fn compose(&self, g: &RealField<T>) -> Result<RealField<T>> {
        g.check_grid(&RealField::zeros(&self.y_grid))?;
        let interp = TrigInterpolant::new(g);
        let samples: Vec<T> = self.y_samples.par_iter().map(|&y| interp.eval(y)).collect();
        RealField::new(&self.grid, samples)
    }
}

/// Builds the profile for elevation `c`, requiring `1 - c >= margin` everywhere.
pub fn build_profile<T: Scalar>(c: &RealField<T>, margin: T) -> Result<BottomProfile<T>> {
    c.check_finite("bottom elevation")?;
    if !(margin > T::zero() && margin < T::one()) {
        return Err(Error::InvalidArgument(format!("depth margin must lie in (0, 1), got {}", margin.to_f64_lossy())));
    }
    let min_depth = c.map(|v| T::one() - v).min();
    if min_depth < margin {
        return Err(Error::BottomTooShallow { min_depth: min_depth.to_f64_lossy(), margin: margin.to_f64_lossy() });
    }
    let grid = c.grid().clone();
    let depth = c.map(|v| (T::one() - v).sqrt());
    let depth_derivatives = [derivative(&depth, 1)?, derivative(&depth, 2)?, derivative(&depth, 3)?];
    let speed = depth.map(|b| b.powf(lit(-5.0 / 3.0)));
    let slope = speed.integral() / grid.length();
    let mut spec = speed.spectrum();
    let xi = grid.wavenumbers();
    let nyq = grid.nyquist_index();
    let zero = Complex::new(T::zero(), T::zero());
    for (k, s) in spec.iter_mut().enumerate() {
        *s = if k == 0 || k == nyq { zero } else { *s / Complex::new(T::zero(), xi[k]) };
    }
    let raw = RealField::from_spectrum(&grid, spec);
    let pin = TrigInterpolant::new(&raw).eval(T::zero());
    let periodic_field = raw.map(|v| v - pin);
    let periodic = TrigInterpolant::new(&periodic_field);
    let y_samples: Vec<T> =
        grid.coordinates().iter().zip(periodic_field.samples()).map(|(&x, &p)| slope * x + p).collect();
    if y_samples.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("bottom profile is under-resolved: y(x) is not increasing on the grid".into()));
    }
    let y_grid = TorusGrid::new(slope * grid.length(), grid.points())?;
    Ok(BottomProfile {
        grid,
        y_grid,
        elevation: c.clone(),
        depth,
        depth_derivatives,
        slope,
        periodic,
        y_samples,
        margin,
    })
}

/// Where a bottom profile comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BottomSource {
    /// `amplitude * sech^2(x / width)`, summed over periodic images.
    Sech2 { amplitude: f64, width: f64 },
    Constant { value: f64 },
    /// Two whitespace- or comma-separated columns `x c` on the grid points.
    File { path: String },
}

impl BottomSource {
    pub fn elevation<T: Scalar>(&self, grid: &TorusGrid<T>) -> Result<RealField<T>> {
        match self {
            Self::Sech2 { amplitude, width } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidArgument(format!("sech2 width must be positive, got {width}")));
                }
                let (a, w) = (lit::<T>(*amplitude), lit::<T>(*width));
                Ok(RealField::from_fn(grid, |x| {
                    (-3i32..=3)
                        .map(|n| {
                            let s = ((x - lit::<T>(n as f64) * grid.length()) / w).cosh().recip();
                            a * s * s
                        })
                        .sum()
                }))
            }
            Self::Constant { value } => Ok(RealField::constant(grid, lit(*value))),
            Self::File { path } => load_elevation(Path::new(path), grid),
        }
    }
}

/// Reads `x c` rows; the `x` column must match the grid points.
pub fn load_elevation<T: Scalar>(path: &Path, grid: &TorusGrid<T>) -> Result<RealField<T>> {
    let file = std::fs::File::open(path)?;
    let mut values = Vec::with_capacity(grid.points());
    let tol = 1e-9 * grid.length().to_f64_lossy();
    for (line_no, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('x') {
            continue;
        }
        let cols: Vec<&str> = trimmed.split(|ch: char| ch == ',' || ch.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let parse = |s: &str| {
            s.parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), line_no + 1)))
        };
        if cols.len() != 2 {
            return Err(Error::Parse(format!("{}:{}: expected 2 columns, found {}", path.display(), line_no + 1, cols.len())));
        }
        let (x, c) = (parse(cols[0])?, parse(cols[1])?);
        let i = values.len();
        if i >= grid.points() || (x - grid.x(i).to_f64_lossy()).abs() > tol {
            return Err(Error::Parse(format!(
                "{}:{}: x = {x} does not match grid point {i}",
                path.display(),
                line_no + 1
            )));
        }
        values.push(lit::<T>(c));
    }
    RealField::new(grid, values)
}
