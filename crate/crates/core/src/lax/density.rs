use std::io::Write;

use serde::{Deserialize, Serialize};

use super::free::doubled_resolvent;
use super::resolvent::{check_positive, LaxResolvent};
use super::series::{greens_diagonal_series, DEFAULT_MAX_TERMS};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{dealiased_product, derivative, KappaParam, RealField};

/// Pointwise floor below which a computed density counts as negative.
pub const DENSITY_FLOOR: f64 = -1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GreensMethod {
    Direct,
    Series { max_terms: usize, tol: f64 },
}

impl GreensMethod {
    pub fn series() -> Self {
        Self::Series { max_terms: DEFAULT_MAX_TERMS, tol: 1e-11 }
    }

    fn label(&self) -> &'static str {
        match self {
            Self::Direct => "direct",
            Self::Series { .. } => "series",
        }
    }
}

/// Diagonal Green's function and the quantities built from it at one `kappa`.
#[derive(Clone, Debug)]
pub struct GreensData<T: Scalar> {
    pub kappa: KappaParam<T>,
    pub method: GreensMethod,
    pub g: RealField<T>,
    pub one_over_g: RealField<T>,
    pub rho: RealField<T>,
    pub alpha: T,
    pub j: RealField<T>,
    /// 0 for the direct method.
    pub series_terms_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensSummary {
    pub kappa: f64,
    pub alpha: f64,
    pub method: String,
    pub terms_used: usize,
}

impl<T: Scalar> GreensData<T> {
    pub fn summary(&self) -> GreensSummary {
        GreensSummary {
            kappa: self.kappa.get().to_f64_lossy(),
            alpha: self.alpha.to_f64_lossy(),
            method: self.method.label().to_string(),
            terms_used: self.series_terms_used,
        }
    }

    /// Whitespace separated columns `x g rho j`, one grid point per line.
    pub fn write_columns(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "# x g rho j")?;
        let grid = self.g.grid();
        for i in 0..grid.points() {
            writeln!(
                out,
                "{:.17e} {:.17e} {:.17e} {:.17e}",
                grid.x(i),
                self.g.samples()[i],
                self.rho.samples()[i],
                self.j.samples()[i]
            )?;
        }
        Ok(())
    }
}

/// `rho = -1/(2g) + kappa + 2 kappa R0(2 kappa) u`.
pub fn density_from_greens<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>, g: &RealField<T>) -> RealField<T> {
    let k = kappa.get();
    let two = lit::<T>(2.0);
    let local = doubled_resolvent(u, kappa);
    g.zip_map(&local, |gv, r| -T::one() / (two * gv) + k + two * k * r)
}

/// `j = (4 kappa^3 g - 2 kappa^2 + u)/g + 2 kappa R0(2 kappa)(u'' - 3u^2)`.
pub fn current_j<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>, g: &RealField<T>) -> Result<RealField<T>> {
    u.check_grid(g)?;
    check_positive(g)?;
    let k = kappa.get();
    let two = lit::<T>(2.0);
    let four = lit::<T>(4.0);
    let u2 = dealiased_product(u, u);
    let source = derivative(u, 2)?.zip_map(&u2, |a, b| a - lit::<T>(3.0) * b);
    let local = doubled_resolvent(&source, kappa);
    let mut out = g.zip_map(u, |gv, uv| (four * k * k * k * gv - two * k * k + uv) / gv);
    for (o, &l) in out.samples_mut().iter_mut().zip(local.samples()) {
        *o = *o + two * k * l;
    }
    Ok(out)
}

fn check_density<T: Scalar>(rho: &RealField<T>) -> Result<()> {
    let min = rho.min();
    if min < lit(DENSITY_FLOOR) {
        return Err(Error::NegativeDensity { min: min.to_f64_lossy() });
    }
    Ok(())
}

/// Assembles `GreensData` from an already computed `g`.
pub fn greens_data_from<T: Scalar>(
    u: &RealField<T>,
    kappa: KappaParam<T>,
    g: RealField<T>,
    method: GreensMethod,
    series_terms_used: usize,
) -> Result<GreensData<T>> {
    check_positive(&g)?;
    let rho = density_from_greens(u, kappa, &g);
    check_density(&rho)?;
    let alpha = rho.integral();
    let j = current_j(u, kappa, &g)?;
    let one_over_g = g.map(|v| T::one() / v);
    Ok(GreensData { kappa, method, g, one_over_g, rho, alpha, j, series_terms_used })
}

pub fn rho_alpha<T: Scalar>(u: &RealField<T>, kappa: KappaParam<T>, method: GreensMethod) -> Result<GreensData<T>> {
    match method {
        GreensMethod::Direct => {
            let res = LaxResolvent::new(u, kappa)?;
            greens_data_from(u, kappa, res.greens().clone(), method, 0)
        }
        GreensMethod::Series { max_terms, tol } => {
            let (g, used) = greens_diagonal_series(u, kappa, max_terms, lit(tol))?;
            greens_data_from(u, kappa, g, method, used)
        }
    }
}

/// Same as [`rho_alpha`] with the direct method, reusing a built resolvent.
pub fn rho_alpha_with<T: Scalar>(res: &LaxResolvent<T>) -> Result<GreensData<T>> {
    greens_data_from(res.potential(), res.kappa(), res.greens().clone(), GreensMethod::Direct, 0)
}
