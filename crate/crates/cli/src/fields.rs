//! Realizing configured fields and coefficient sets on a grid.

use std::fs::File;
use std::path::Path;

use kdvlab_core::bottom::{build_profile, synth_coefficients};
use kdvlab_core::dynamics::{soliton, Coefficient, CoefficientMeta, CoefficientSet};
use kdvlab_core::io::csv_reader;
use kdvlab_core::spectral::colored_field;
use kdvlab_core::{Bottom, Coefficients, Error, Field, Grid, Kappa, Result};
use serde::{Deserialize, Serialize};

use crate::config::{CoefficientSpec, InitialData};

/// Closed-form coefficient profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSpec {
    Constant {
        value: f64,
    },
    /// `amplitude / (1 + (x - center)^2)`.
    Decaying {
        amplitude: f64,
        #[serde(default)]
        center: f64,
    },
    /// `amplitude * exp(-((x - center) / width)^2)`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// `amplitude * sech^2((x - center) / width)`.
    Sech2 {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: f64,
    },
}

impl FieldSpec {
    pub fn sample(&self, grid: &Grid) -> Field {
        match *self {
            Self::Constant { value } => Field::constant(grid, value),
            Self::Decaying { amplitude, center } => Field::from_fn(grid, |x| amplitude / (1.0 + (x - center).powi(2))),
            Self::Gaussian { amplitude, width, center } => {
                Field::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
            }
            Self::Sech2 { amplitude, width, center } => {
                Field::from_fn(grid, |x| amplitude / ((x - center) / width).cosh().powi(2))
            }
        }
    }
}

pub fn initial_field(spec: &InitialData, grid: &Grid) -> Result<Field> {
    Ok(match *spec {
        InitialData::Soliton { c, x0 } => soliton(grid, c, x0, 0.0),
        InitialData::Gaussian { amplitude, width, center } => {
            Field::from_fn(grid, |x| amplitude * (-((x - center) / width).powi(2)).exp())
        }
        InitialData::RandomBandlimited { h_minus_one_norm, kappa, seed } => {
            let seed = seed.ok_or_else(|| Error::InvalidArgument("random data needs a seed".into()))?;
            colored_field(grid, Kappa::new(kappa.unwrap_or(1.0))?, h_minus_one_norm, seed)
        }
    })
}

/// Coefficients of a run plus the bottom profile they came from, if any.
pub struct RunCoefficients {
    pub set: Coefficients,
    pub profile: Option<Bottom>,
}

/// Builds the coefficients; `grid` is the physical grid (for bottoms, the
/// coefficients live on the stretched grid of the profile).
pub fn build_coefficients(spec: &CoefficientSpec, grid: &Grid) -> Result<RunCoefficients> {
    match spec {
        CoefficientSpec::Kdv => Ok(RunCoefficients { set: CoefficientSet::zero(grid), profile: None }),
        CoefficientSpec::Analytic { a1, a2, a3, a4, velocity } => {
            let make = |f: &Option<FieldSpec>| match f {
                None => Coefficient::Zero,
                Some(f) if *velocity == 0.0 => Coefficient::Static(f.sample(grid)),
                Some(f) => Coefficient::Traveling { profile: f.sample(grid), velocity: *velocity },
            };
            let meta = CoefficientMeta { delta: None, smoothness: u32::MAX, label: "analytic".into() };
            let set = CoefficientSet::new(grid, [make(a1), make(a2), make(a3), make(a4)], meta)?;
            Ok(RunCoefficients { set, profile: None })
        }
        CoefficientSpec::Explicit { path } => {
            let fields = load_coefficient_table(Path::new(path), grid)?;
            let mut set = CoefficientSet::from_static(grid, fields.map(Some))?;
            set.meta.label = "explicit".into();
            Ok(RunCoefficients { set, profile: None })
        }
        CoefficientSpec::Bottom { profile, margin } => {
            let c = profile.elevation(grid)?;
            let bottom = build_profile(&c, *margin)?;
            let set = synth_coefficients(&bottom)?;
            Ok(RunCoefficients { set, profile: Some(bottom) })
        }
    }
}

/// Reads a CSV with header `x,a1,a2,a3,a4` whose `x` column matches `grid`.
pub fn load_coefficient_table(path: &Path, grid: &Grid) -> Result<[Field; 4]> {
    let mut reader = csv_reader(File::open(path)?);
    let header = reader.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != ["x", "a1", "a2", "a3", "a4"] {
        return Err(Error::Parse(format!("{}: expected header x,a1,a2,a3,a4", path.display())));
    }
    let mut columns: [Vec<f64>; 4] = Default::default();
    let tol = 1e-9 * grid.length();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::Parse(e.to_string()))?;
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")));
        let x = parse(&row[0])?;
        if i >= grid.points() || (x - grid.x(i)).abs() > tol {
            return Err(Error::Parse(format!("{}: row {} has x = {x}, not a grid point", path.display(), i + 1)));
        }
        for (j, col) in columns.iter_mut().enumerate() {
            col.push(parse(&row[j + 1])?);
        }
    }
    let [c1, c2, c3, c4] = columns;
    Ok([Field::new(grid, c1)?, Field::new(grid, c2)?, Field::new(grid, c3)?, Field::new(grid, c4)?])
}
