use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::weights::WeightFamily;
use crate::dynamics::CoefficientSet;
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::RealField;

/// Which form of the coefficient hypotheses to measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisMode {
    /// `int ||psi_z a_j|| dz` in the norms of the local smoothing theorem.
    Integral,
    /// Smallest `delta` with `|a_j| + |a_j'| <= delta (1 + x^2)^{-1}`.
    Pointwise,
}

/// Measured hypothesis value for one coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    /// 1-based coefficient index.
    pub index: usize,
    /// The measured value; `None` in pointwise mode when the coefficient does not decay.
    pub value: Option<f64>,
    /// `(H^1 alternative, W^{1,inf} alternative)` in integral mode, where the hypothesis offers both.
    pub alternatives: Option<(f64, f64)>,
    /// `(1 + x^2)(|a| + |a'|)` peaks at the edge of the domain, so the value grows with `L`.
    pub non_decaying: bool,
    /// `x` (pointwise) or `z` (integral) positions of `profile`.
    pub positions: Vec<f64>,
    pub profile: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub mode: HypothesisMode,
    pub times: Vec<f64>,
    pub coefficients: Vec<CoefficientCheck>,
}

impl HypothesisReport {
    /// Largest measured value among `a_1, a_2, a_3`; infinite if one does not decay.
    pub fn epsilon(&self) -> f64 {
        self.coefficients
            .iter()
            .filter(|c| c.index <= 3)
            .map(|c| if c.non_decaying { f64::INFINITY } else { c.value.unwrap_or(f64::INFINITY) })
            .fold(0.0, f64::max)
    }

    /// Rows `coefficient,position,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "coefficient,{},value", match self.mode {
            HypothesisMode::Integral => "z",
            HypothesisMode::Pointwise => "x",
        })?;
        for c in &self.coefficients {
            for (p, v) in c.positions.iter().zip(&c.profile) {
                writeln!(w, "a{},{p:e},{v:e}", c.index)?;
            }
        }
        Ok(())
    }
}

/// Fourth-order finite-difference derivative that does not assume periodicity
/// (one-sided stencils at the ends), so non-periodic profiles cause no Gibbs ringing.
pub fn nonperiodic_derivative<T: Scalar>(f: &RealField<T>) -> RealField<T> {
    let s = f.samples();
    let n = s.len();
    let c = |v: f64| lit::<T>(v);
    let inv = (c(12.0) * f.grid().dx()).recip();
    let out = (0..n)
        .map(|i| {
            let d = if i >= 2 && i + 2 < n {
                s[i - 2] - c(8.0) * s[i - 1] + c(8.0) * s[i + 1] - s[i + 2]
            } else if i == 0 {
                c(-25.0) * s[0] + c(48.0) * s[1] - c(36.0) * s[2] + c(16.0) * s[3] - c(3.0) * s[4]
            } else if i == 1 {
                c(-3.0) * s[0] - c(10.0) * s[1] + c(18.0) * s[2] - c(6.0) * s[3] + s[4]
            } else if i == n - 1 {
                c(25.0) * s[n - 1] - c(48.0) * s[n - 2] + c(36.0) * s[n - 3] - c(16.0) * s[n - 4] + c(3.0) * s[n - 5]
            } else {
                c(3.0) * s[n - 1] + c(10.0) * s[n - 2] - c(18.0) * s[n - 3] + c(6.0) * s[n - 4] - s[n - 5]
            };
            d * inv
        })
        .collect();
    RealField::new(f.grid(), out).expect("same grid")
}

struct SpaceNorms {
    sup: f64,
    h1: f64,
    w1inf: f64,
}

fn space_norms<T: Scalar>(f: &RealField<T>) -> SpaceNorms {
    let d = nonperiodic_derivative(f);
    SpaceNorms {
        sup: f.max_abs().to_f64_lossy(),
        h1: (f.l2_norm_sq() + d.l2_norm_sq()).sqrt().to_f64_lossy(),
        w1inf: (f.max_abs() + d.max_abs()).to_f64_lossy(),
    }
}

fn pointwise_profile<T: Scalar>(samples: &[RealField<T>]) -> Vec<f64> {
    let grid = samples[0].grid();
    let mut best = vec![0.0f64; grid.points()];
    for a in samples {
        let d = nonperiodic_derivative(a);
        for (i, b) in best.iter_mut().enumerate() {
            let x = grid.x(i).to_f64_lossy();
            let v = (a.samples()[i].abs() + d.samples()[i].abs()).to_f64_lossy() * (1.0 + x * x);
            *b = b.max(v);
        }
    }
    best
}

fn peaks_at_edge(profile: &[f64]) -> bool {
    let n = profile.len();
    let edge = [profile[0], profile[1], profile[n - 2], profile[n - 1]].into_iter().fold(0.0, f64::max);
    let inner = profile[2..n - 2].iter().copied().fold(0.0, f64::max);
    edge > 0.0 && edge >= inner
}

/// Measures the coefficient hypotheses on the time grid `times`.
///
/// In integral mode the `L^2_t` norm of `a_3` uses the trapezoid rule over
/// `times`; a single time sample is read as a window of unit length.
pub fn hypothesis_check<T: Scalar>(
    coeffs: &CoefficientSet<T>,
    mode: HypothesisMode,
    times: &[T],
    weights: &WeightFamily<T>,
) -> Result<HypothesisReport> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("hypothesis check needs at least one time".into()));
    }
    if !coeffs.grid().same_as(weights.grid()) {
        return Err(Error::GridMismatch);
    }
    let grid = coeffs.grid();
    let xs: Vec<f64> = grid.coordinates().iter().map(|x| x.to_f64_lossy()).collect();
    let zs: Vec<f64> = weights.centers().iter().map(|z| z.to_f64_lossy()).collect();
    let dz = weights.center_spacing().to_f64_lossy();
    let ts: Vec<f64> = times.iter().map(|t| t.to_f64_lossy()).collect();
    let time_weights: Vec<f64> = if ts.len() == 1 {
        vec![1.0]
    } else {
        (0..ts.len())
            .map(|k| (ts[(k + 1).min(ts.len() - 1)] - ts[k.saturating_sub(1)]).abs() / 2.0)
            .collect()
    };
    let psis = weights.psi_all();
    let mut checks = Vec::with_capacity(4);
    for index in 1..=4 {
        let samples: Vec<RealField<T>> = times
            .iter()
            .map(|&t| coeffs.sample(index, t))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let positions = match mode {
            HypothesisMode::Integral if index < 4 => zs.clone(),
            HypothesisMode::Integral => Vec::new(),
            HypothesisMode::Pointwise => xs.clone(),
        };
        if samples.is_empty() {
            let profile = vec![0.0; positions.len()];
            let alternatives = (mode == HypothesisMode::Integral && index != 2).then_some((0.0, 0.0));
            checks.push(CoefficientCheck { index, value: Some(0.0), alternatives, non_decaying: false, positions, profile });
            continue;
        }
        let pointwise = pointwise_profile(&samples);
        let non_decaying = peaks_at_edge(&pointwise);
        let check = match mode {
            HypothesisMode::Pointwise => {
                let delta = pointwise.iter().copied().fold(0.0, f64::max);
                CoefficientCheck {
                    index,
                    value: (!non_decaying).then_some(delta),
                    alternatives: None,
                    non_decaying,
                    positions,
                    profile: pointwise,
                }
            }
            HypothesisMode::Integral if index == 4 => {
                let norms: Vec<SpaceNorms> = samples.iter().map(space_norms).collect();
                let h1 = norms.iter().map(|n| n.h1).fold(0.0, f64::max);
                let w1 = norms.iter().map(|n| n.w1inf).fold(0.0, f64::max);
                CoefficientCheck {
                    index,
                    value: Some(h1.min(w1)),
                    alternatives: Some((h1, w1)),
                    non_decaying,
                    positions,
                    profile: Vec::new(),
                }
            }
            HypothesisMode::Integral => {
                // per center: (sup alternative, H^1 alternative, W^{1,inf} alternative)
                let per_center: Vec<(f64, f64, f64)> = psis
                    .par_iter()
                    .map(|psi| {
                        let norms: Vec<SpaceNorms> = samples.iter().map(|a| space_norms(&psi.pointwise(a))).collect();
                        if index == 3 {
                            let l2t = |f: &dyn Fn(&SpaceNorms) -> f64| {
                                norms.iter().zip(&time_weights).map(|(n, w)| w * f(n).powi(2)).sum::<f64>().sqrt()
                            };
                            (l2t(&|n| n.sup), l2t(&|n| n.h1), l2t(&|n| n.w1inf))
                        } else {
                            let sup = |f: &dyn Fn(&SpaceNorms) -> f64| norms.iter().map(f).fold(0.0, f64::max);
                            (sup(&|n| n.sup), sup(&|n| n.h1), sup(&|n| n.w1inf))
                        }
                    })
                    .collect();
                if index == 2 {
                    let profile: Vec<f64> = per_center.iter().map(|p| p.0).collect();
                    let value = profile.iter().sum::<f64>() * dz;
                    CoefficientCheck { index, value: Some(value), alternatives: None, non_decaying, positions, profile }
                } else {
                    let h1 = per_center.iter().map(|p| p.1).sum::<f64>() * dz;
                    let w1 = per_center.iter().map(|p| p.2).sum::<f64>() * dz;
                    let profile: Vec<f64> = per_center.iter().map(|p| if h1 <= w1 { p.1 } else { p.2 }).collect();
                    CoefficientCheck {
                        index,
                        value: Some(h1.min(w1)),
                        alternatives: Some((h1, w1)),
                        non_decaying,
                        positions,
                        profile,
                    }
                }
            }
        };
        checks.push(check);
    }
    Ok(HypothesisReport { mode, times: ts, coefficients: checks })
}
