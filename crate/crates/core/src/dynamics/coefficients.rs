use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spectral::{RealField, TorusGrid};

/// Time-dependent field `t -> a(t, .)`.
pub type Sampler<T> = Arc<dyn Fn(T) -> RealField<T> + Send + Sync>;

/// One coefficient of the gKdV perturbation.
#[derive(Clone)]
pub enum Coefficient<T: Scalar> {
    Zero,
    Static(RealField<T>),
    /// `a(t, x) = profile(x + velocity * t)`, shifted spectrally.
    Traveling { profile: RealField<T>, velocity: T },
    Dynamic(Sampler<T>),
}

impl<T: Scalar> fmt::Debug for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::Static(_) => write!(f, "Static"),
            Self::Traveling { velocity, .. } => write!(f, "Traveling({velocity})"),
            Self::Dynamic(_) => write!(f, "Dynamic"),
        }
    }
}

impl<T: Scalar> Coefficient<T> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    /// `None` for an identically zero coefficient.
    pub fn sample(&self, t: T) -> Option<RealField<T>> {
        match self {
            Self::Zero => None,
            Self::Static(f) => Some(f.clone()),
            Self::Traveling { profile, velocity } => Some(translate(profile, *velocity * t)),
            Self::Dynamic(s) => Some(s(t)),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::Static(_) => "static",
            Self::Traveling { .. } => "traveling",
            Self::Dynamic(_) => "dynamic",
        }
    }
}

/// `x -> f(x + shift)` via the Fourier phase `e^{i xi shift}`.
pub fn translate<T: Scalar>(f: &RealField<T>, shift: T) -> RealField<T> {
    let grid = f.grid();
    let mut spec = f.spectrum();
    for (c, &xi) in spec.iter_mut().zip(grid.wavenumbers()) {
        let th = xi * shift;
        *c = *c * Complex::new(th.cos(), th.sin());
    }
    spec[grid.nyquist_index()] = Complex::new(spec[grid.nyquist_index()].re, T::zero());
    RealField::from_spectrum(grid, spec)
}

/// What is known or claimed about the coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMeta {
    /// Claimed decay constant `delta` in `|a| + |a'| <= delta / (1 + x^2)`.
    pub delta: Option<f64>,
    /// Number of spatial derivatives the samplers resolve.
    pub smoothness: u32,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDescriptor {
    pub kinds: [String; 4],
    pub meta: CoefficientMeta,
}

/// Coefficients `a1..a4` of `(a1 u')' + a2 u^2 + a3 u' + a4 u` on a shared grid.
#[derive(Clone, Debug)]
pub struct CoefficientSet<T: Scalar> {
    grid: TorusGrid<T>,
    coeffs: [Coefficient<T>; 4],
    pub meta: CoefficientMeta,
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn zero(grid: &TorusGrid<T>) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: [Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Zero],
            meta: CoefficientMeta { delta: Some(0.0), smoothness: u32::MAX, label: "kdv".into() },
        }
    }

    pub fn new(grid: &TorusGrid<T>, coeffs: [Coefficient<T>; 4], meta: CoefficientMeta) -> Result<Self> {
        for c in &coeffs {
            match c {
                Coefficient::Static(f) | Coefficient::Traveling { profile: f, .. } if !f.grid().same_as(grid) => {
                    return Err(Error::GridMismatch)
                }
                _ => {}
            }
        }
        Ok(Self { grid: grid.clone(), coeffs, meta })
    }

    /// Static coefficients; `None` entries are zero.
    pub fn from_static(grid: &TorusGrid<T>, fields: [Option<RealField<T>>; 4]) -> Result<Self> {
        let coeffs = fields.map(|f| f.map_or(Coefficient::Zero, Coefficient::Static));
        let meta = CoefficientMeta { delta: None, smoothness: u32::MAX, label: "static".into() };
        Self::new(grid, coeffs, meta)
    }

    pub fn grid(&self) -> &TorusGrid<T> {
        &self.grid
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coefficient::is_zero)
    }

    pub fn get(&self, index: usize) -> &Coefficient<T> {
        &self.coeffs[index - 1]
    }

    /// Samples `a_index` (1-based) at time `t`, checking the grid.
    pub fn sample(&self, index: usize, t: T) -> Result<Option<RealField<T>>> {
        match self.coeffs[index - 1].sample(t) {
            Some(f) if !f.grid().same_as(&self.grid) => Err(Error::GridMismatch),
            other => Ok(other),
        }
    }

    pub fn descriptor(&self) -> CoefficientDescriptor {
        CoefficientDescriptor {
            kinds: [0, 1, 2, 3].map(|i| self.coeffs[i].kind().to_string()),
            meta: self.meta.clone(),
        }
    }
}
