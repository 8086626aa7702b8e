use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::fit_power_law;
use super::weighted::{weighted_op_norm_with, LinearOperator, WeightedSpace};
use crate::error::{Error, Result};
use crate::lax::periodic_free_kernel;
use crate::scalar::{lit, Scalar};
use crate::spectral::{derivative, KappaParam, RealField, TorusGrid};

/// Power-iteration budget and Rayleigh-quotient tolerance for audit norms.
pub const AUDIT_MAX_ITER: usize = 4000;
pub const AUDIT_TOL: f64 = 1e-9;
/// Largest `kappa * dx` for which the free kernel `e^{-kappa|x|}` is resolved.
pub const MAX_KAPPA_DX: f64 = 0.5;
/// Audits fail when the slope confidence interval is wider than this.
pub const MAX_CI_WIDTH: f64 = 0.3;
/// Slack allowed around the expected exponent.
pub const SLOPE_TOLERANCE: f64 = 0.15;

/// Which weighted-commutator operator to audit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommutatorVariant {
    /// `w R0 (1/w)` on `L^2`.
    Plain,
    /// `w R0 (1/w)` from `H^{-1}_kappa` to `H^1_kappa`.
    PlainSobolev,
    /// `w d R0 (1/w)` on `L^2`.
    WithDerivative,
    /// `(1/psi)(R0 psi^2 R0 - psi R0^2 psi)(1/psi)` from `H^{-2}_kappa` to `H^2_kappa`.
    Double,
    /// `(1/psi)(R0 d psi^2 R0 d - psi R0^2 d^2 psi)(1/psi)` from `H^{-2}_kappa` to `H^2_kappa`.
    DoubleDerivative,
}

impl CommutatorVariant {
    pub const ALL: [Self; 5] = [Self::Plain, Self::PlainSobolev, Self::WithDerivative, Self::Double, Self::DoubleDerivative];

    /// Claimed decay exponent in `kappa`.
    pub fn expected_slope(self) -> f64 {
        match self {
            Self::Plain | Self::Double => -2.0,
            Self::WithDerivative => -1.0,
            Self::PlainSobolev | Self::DoubleDerivative => 0.0,
        }
    }

    /// Whether the claim is a sharp rate (checked two-sided) or only an upper bound.
    pub fn two_sided(self) -> bool {
        matches!(self, Self::Plain | Self::WithDerivative)
    }

    /// Sobolev indices `(from, to)`.
    pub fn spaces(self) -> (f64, f64) {
        match self {
            Self::Plain | Self::WithDerivative => (0.0, 0.0),
            Self::PlainSobolev => (-1.0, 1.0),
            Self::Double | Self::DoubleDerivative => (-2.0, 2.0),
        }
    }

    fn single(self) -> bool {
        matches!(self, Self::Plain | Self::PlainSobolev | Self::WithDerivative)
    }
}

/// `sech(x/6)` summed over periodic images `n L`, `|n| <= 3`, raised to `power`.
pub fn psi_weight<T: Scalar>(grid: &TorusGrid<T>, power: u32) -> RealField<T> {
    let six = lit::<T>(6.0);
    RealField::from_fn(grid, |x| {
        let s: T = (-3i32..=3)
            .map(|n| ((x - lit::<T>(n as f64) * grid.length()) / six).cosh().recip())
            .sum();
        s.powi(power as i32)
    })
}

/// Measured admissibility of `psi^power` as a slowly varying weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightCheck {
    /// `max (|w'| + |w''|) / w`; admissible when at most 1.
    pub derivative_ratio: f64,
    /// `max ln(w(y)/w(x)) / |x - y|` over sampled pairs; admissible when at most 1/2.
    pub growth_rate: f64,
}

pub fn weight_admissibility<T: Scalar>(grid: &TorusGrid<T>, power: u32) -> Result<WeightCheck> {
    let w = psi_weight(grid, power);
    let d1 = derivative(&w, 1)?;
    let d2 = derivative(&w, 2)?;
    let ws = w.samples();
    let derivative_ratio = (0..ws.len())
        .map(|i| ((d1.samples()[i].abs() + d2.samples()[i].abs()) / ws[i]).to_f64_lossy())
        .fold(0.0, f64::max);
    let stride = (ws.len() / 256).max(1);
    let idx: Vec<usize> = (0..ws.len()).step_by(stride).collect();
    let growth_rate = idx
        .par_iter()
        .map(|&i| {
            idx.iter()
                .filter(|&&j| j != i)
                .map(|&j| {
                    let d = grid.periodic_offset(grid.x(i), grid.x(j)).abs().to_f64_lossy();
                    (ws[j] / ws[i]).to_f64_lossy().ln() / d
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    Ok(WeightCheck { derivative_ratio, growth_rate })
}

fn apply_complex<T: Scalar>(f: &RealField<T>, symbol: &[Complex<T>]) -> RealField<T> {
    let mut spec = f.spectrum();
    for (c, s) in spec.iter_mut().zip(symbol) {
        *c = *c * s;
    }
    RealField::from_spectrum(f.grid(), spec)
}

/// Matrix-free commutator operator. Inputs are first projected to
/// `|xi| <= xi_max / 2`, so weights and multipliers act without aliasing.
struct CommutatorOperator<T: Scalar> {
    grid: TorusGrid<T>,
    variant: CommutatorVariant,
    weight: RealField<T>,
    inv_weight: RealField<T>,
    psi: RealField<T>,
    psi_sq: RealField<T>,
    inv_psi: RealField<T>,
    projection: Vec<Complex<T>>,
    resolvent: Vec<Complex<T>>,
    resolvent_sq: Vec<Complex<T>>,
    d_resolvent: Vec<Complex<T>>,
    d_resolvent_adj: Vec<Complex<T>>,
    d2_resolvent_sq: Vec<Complex<T>>,
}

impl<T: Scalar> CommutatorOperator<T> {
    fn new(grid: &TorusGrid<T>, variant: CommutatorVariant, power: u32, kappa: KappaParam<T>) -> Self {
        let psi = psi_weight(grid, 1);
        let weight = if variant.single() { psi_weight(grid, power) } else { psi.clone() };
        let k2 = kappa.get() * kappa.get();
        let half = grid.xi_max() / lit(2.0);
        let nyq = grid.nyquist_index();
        let real = |v: T| Complex::new(v, T::zero());
        let xi = grid.wavenumbers();
        let dsym: Vec<Complex<T>> = xi
            .iter()
            .enumerate()
            .map(|(k, &x)| if k == nyq { real(T::zero()) } else { Complex::new(T::zero(), x) })
            .collect();
        let r0: Vec<T> = xi.iter().map(|&x| (x * x + k2).recip()).collect();
        Self {
            grid: grid.clone(),
            variant,
            inv_weight: weight.map(|v| v.recip()),
            weight,
            psi_sq: psi.pointwise(&psi),
            inv_psi: psi.map(|v| v.recip()),
            psi,
            projection: xi.iter().map(|&x| real(if x.abs() <= half { T::one() } else { T::zero() })).collect(),
            resolvent: r0.iter().map(|&r| real(r)).collect(),
            resolvent_sq: r0.iter().map(|&r| real(r * r)).collect(),
            d_resolvent: r0.iter().zip(&dsym).map(|(&r, &d)| d * r).collect(),
            d_resolvent_adj: r0.iter().zip(&dsym).map(|(&r, &d)| -d * r).collect(),
            d2_resolvent_sq: r0.iter().zip(&dsym).map(|(&r, &d)| d * d * r * r).collect(),
        }
    }

    /// The symmetric double-commutator core `B`.
    fn core(&self, h: &RealField<T>) -> RealField<T> {
        match self.variant {
            CommutatorVariant::Double => {
                let a = apply_complex(&self.psi_sq.pointwise(&apply_complex(h, &self.resolvent)), &self.resolvent);
                let b = self.psi.pointwise(&apply_complex(&self.psi.pointwise(h), &self.resolvent_sq));
                &a - &b
            }
            _ => {
                let a = apply_complex(&self.psi_sq.pointwise(&apply_complex(h, &self.d_resolvent)), &self.d_resolvent);
                let b = self.psi.pointwise(&apply_complex(&self.psi.pointwise(h), &self.d2_resolvent_sq));
                &a - &b
            }
        }
    }
}

impl<T: Scalar> LinearOperator<T> for CommutatorOperator<T> {
    fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    fn apply(&self, f: &RealField<T>) -> RealField<T> {
        let p = apply_complex(f, &self.projection);
        match self.variant {
            CommutatorVariant::Plain | CommutatorVariant::PlainSobolev => {
                self.weight.pointwise(&apply_complex(&self.inv_weight.pointwise(&p), &self.resolvent))
            }
            CommutatorVariant::WithDerivative => {
                self.weight.pointwise(&apply_complex(&self.inv_weight.pointwise(&p), &self.d_resolvent))
            }
            _ => self.inv_psi.pointwise(&self.core(&self.inv_psi.pointwise(&p))),
        }
    }

    fn apply_adjoint(&self, f: &RealField<T>) -> RealField<T> {
        let inner = match self.variant {
            CommutatorVariant::Plain | CommutatorVariant::PlainSobolev => {
                self.inv_weight.pointwise(&apply_complex(&self.weight.pointwise(f), &self.resolvent))
            }
            CommutatorVariant::WithDerivative => {
                self.inv_weight.pointwise(&apply_complex(&self.weight.pointwise(f), &self.d_resolvent_adj))
            }
            _ => self.inv_psi.pointwise(&self.core(&self.inv_psi.pointwise(f))),
        };
        apply_complex(&inner, &self.projection)
    }
}

/// `L^1 -> L^1` and `L^inf -> L^inf` norms of the sampled kernel of `w R0 (1/w)`
/// (or `w d R0 (1/w)`), from column and row sums.
pub fn schur_norms<T: Scalar>(
    grid: &TorusGrid<T>,
    variant: CommutatorVariant,
    power: u32,
    kappa: KappaParam<T>,
) -> Option<(f64, f64)> {
    if !matches!(variant, CommutatorVariant::Plain | CommutatorVariant::WithDerivative) {
        return None;
    }
    let w = psi_weight(grid, power);
    let ws = w.samples();
    let n = grid.points();
    let dx = grid.dx();
    let k = kappa.get();
    let l = grid.length();
    let kernel = |i: usize, j: usize| -> T {
        let d = grid.periodic_offset(grid.x(i), grid.x(j));
        match variant {
            CommutatorVariant::Plain => periodic_free_kernel(grid, kappa, d),
            _ => {
                if i == j {
                    return T::zero();
                }
                let r = d.abs();
                let slope = (-(-k * r).exp() + (-k * (l - r)).exp()) / (lit::<T>(2.0) * (T::one() - (-k * l).exp()));
                slope * d.signum()
            }
        }
    };
    let row_max = (0..n)
        .into_par_iter()
        .map(|i| ((0..n).map(|j| kernel(i, j).abs() / ws[j]).sum::<T>() * ws[i] * dx).to_f64_lossy())
        .reduce(|| 0.0, f64::max);
    let col_max = (0..n)
        .into_par_iter()
        .map(|j| ((0..n).map(|i| kernel(i, j).abs() * ws[i]).sum::<T>() / ws[j] * dx).to_f64_lossy())
        .reduce(|| 0.0, f64::max);
    Some((col_max, row_max))
}

/// Measured `kappa`-scaling of one weighted commutator estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub variant: CommutatorVariant,
    pub weight_power: u32,
    pub kappas: Vec<f64>,
    pub norms: Vec<f64>,
    pub slope: f64,
    /// Full width of the 95% confidence interval of the slope.
    pub ci: f64,
    pub expected_slope: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schur_l1: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schur_linf: Option<Vec<f64>>,
    pub note: String,
}

impl ScalingReport {
    pub fn slope_ok(&self) -> bool {
        let e = self.expected_slope;
        if CommutatorVariant::two_sided(self.variant) {
            (self.slope - e).abs() <= SLOPE_TOLERANCE
        } else {
            self.slope <= e + SLOPE_TOLERANCE
        }
    }

    pub fn passes(&self) -> bool {
        self.slope_ok() && self.ci <= MAX_CI_WIDTH
    }
}

/// Norms of the chosen commutator for each `kappa`, and the fitted log-log slope.
pub fn commutator_scaling_audit<T: Scalar>(
    grid: &TorusGrid<T>,
    power: u32,
    variant: CommutatorVariant,
    kappas: &[f64],
    with_schur: bool,
) -> Result<ScalingReport> {
    if !(1..=3).contains(&power) {
        return Err(Error::InvalidArgument(format!("weight power must be 1, 2 or 3, got {power}")));
    }
    if kappas.len() < 4 {
        return Err(Error::InvalidArgument(format!("scaling audits need at least 4 kappa values, got {}", kappas.len())));
    }
    if kappas.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("kappa values must be strictly increasing".into()));
    }
    let dx = grid.dx().to_f64_lossy();
    for &k in kappas {
        if !(1.0..=64.0).contains(&k) {
            return Err(Error::InvalidArgument(format!("kappa {k} outside [1, 64]")));
        }
        if k * dx > MAX_KAPPA_DX {
            return Err(Error::UnresolvedKernel { kappa_dx: k * dx });
        }
    }
    let (s_from, s_to) = variant.spaces();
    let results: Vec<(f64, Option<(f64, f64)>)> = kappas
        .par_iter()
        .map(|&k| {
            let kappa = KappaParam::new(lit::<T>(k))?;
            let op = CommutatorOperator::new(grid, variant, power, kappa);
            let norm = weighted_op_norm_with(
                &op,
                WeightedSpace::new(lit(s_from), kappa),
                WeightedSpace::new(lit(s_to), kappa),
                AUDIT_MAX_ITER,
                lit(AUDIT_TOL),
            );
            let schur = if with_schur { schur_norms(grid, variant, power, kappa) } else { None };
            Ok((norm.to_f64_lossy(), schur))
        })
        .collect::<Result<_>>()?;
    let norms: Vec<f64> = results.iter().map(|r| r.0).collect();
    let fit = fit_power_law(kappas, &norms)?;
    let schur: Option<Vec<(f64, f64)>> = results.iter().map(|r| r.1).collect();
    Ok(ScalingReport {
        variant,
        weight_power: power,
        kappas: kappas.to_vec(),
        norms,
        slope: fit.slope,
        ci: fit.ci_width,
        expected_slope: variant.expected_slope(),
        schur_l1: schur.as_ref().map(|v| v.iter().map(|p| p.0).collect()),
        schur_linf: schur.as_ref().map(|v| v.iter().map(|p| p.1).collect()),
        note: "asymptotic slope from a least-squares fit; small kappa may be preasymptotic".into(),
    })
}
