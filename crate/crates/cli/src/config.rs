//! Run configuration: parsing, defaults and cross-field validation.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use kdvlab_core::bottom::{build_profile, BottomSource, DEFAULT_DEPTH_MARGIN};
use kdvlab_core::dynamics::{default_dt, step_count, SolveOptions};
use kdvlab_core::io::SnapshotFormat;
use kdvlab_core::lax::{is_admissible, minimal_admissible_kappa, DEFAULT_ADMISSIBILITY};
use kdvlab_core::metrics::CommutatorVariant;
use kdvlab_core::{Field, Grid, Kappa};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::fields::{initial_field, FieldSpec};

/// Largest accepted step is `STEP_CAP / xi_max^3`, a hundred times the default.
pub const STEP_CAP: f64 = 40.0;
/// Minimum number of stored records when `save_every` is defaulted.
pub const TARGET_RECORDS: usize = 200;
/// Largest accepted `kappa * dx`.
pub const MAX_KAPPA_DX: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Conservation,
    Microlaw,
    OperatorScaling,
    AprioriSweep,
    BottomRoundtrip,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Conservation => "conservation",
            Self::Microlaw => "microlaw",
            Self::OperatorScaling => "operator_scaling",
            Self::AprioriSweep => "apriori_sweep",
            Self::BottomRoundtrip => "bottom_roundtrip",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub duration: f64,
    pub dt: f64,
    pub save_every: usize,
}

/// Initial state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `-2 c^2 sech^2(c (x - x0))`.
    Soliton {
        c: f64,
        #[serde(default)]
        x0: f64,
    },
    /// `amplitude * exp(-((x - center) / width)^2)`.
    Gaussian {
        #[serde(default = "half")]
        amplitude: f64,
        #[serde(default = "one")]
        width: f64,
        #[serde(default)]
        center: f64,
    },
    /// Seeded spectrally colored field with the given `H^{-1}_kappa` norm.
    RandomBandlimited {
        h_minus_one_norm: f64,
        #[serde(default)]
        kappa: Option<f64>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

/// The gKdV coefficients of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    /// Pure KdV.
    Kdv,
    /// Closed-form fields, optionally traveling with `velocity`.
    Analytic {
        #[serde(default)]
        a1: Option<FieldSpec>,
        #[serde(default)]
        a2: Option<FieldSpec>,
        #[serde(default)]
        a3: Option<FieldSpec>,
        #[serde(default)]
        a4: Option<FieldSpec>,
        #[serde(default)]
        velocity: f64,
    },
    /// CSV with columns `x,a1,a2,a3,a4` on the run grid.
    Explicit { path: String },
    /// Coefficients synthesized from a channel bottom.
    Bottom {
        profile: BottomSource,
        #[serde(default = "default_margin")]
        margin: f64,
    },
}

impl CoefficientSpec {
    pub fn is_kdv(&self) -> bool {
        matches!(self, Self::Kdv)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_alpha_drift")]
    pub alpha_drift: f64,
    #[serde(default = "default_integrated_microlaw")]
    pub integrated_microlaw: f64,
    /// Filled per coefficient kind: 1e-8 for pure KdV, 1e-4 otherwise.
    #[serde(default)]
    pub l2_identity: Option<f64>,
    #[serde(default = "default_microlaw_residual")]
    pub microlaw_residual: f64,
    #[serde(default = "default_microlaw_reduction")]
    pub microlaw_reduction: f64,
    #[serde(default = "default_bottom_equivalence")]
    pub bottom_equivalence: f64,
    #[serde(default = "default_roundtrip")]
    pub roundtrip: f64,
    #[serde(default = "default_bound_factor")]
    pub bound_factor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Map::new())).expect("all tolerance fields have defaults")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    #[serde(default = "all_variants")]
    pub variants: Vec<CommutatorVariant>,
    #[serde(default = "one_u32")]
    pub weight_power: u32,
    #[serde(default)]
    pub schur: bool,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { variants: all_variants(), weight_power: 1, schur: false }
    }
}

/// A validated configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub kappa_list: Vec<f64>,
    pub initial_data: InitialData,
    pub coefficients: CoefficientSpec,
    pub tolerances: Tolerances,
    pub admissibility_constant: f64,
    pub scaling: ScalingConfig,
    pub radii: Vec<f64>,
    pub snapshot_format: SnapshotFormat,
    pub output_dir: String,
}

fn half() -> f64 {
    0.5
}
fn one() -> f64 {
    1.0
}
fn one_u32() -> u32 {
    1
}
fn default_margin() -> f64 {
    DEFAULT_DEPTH_MARGIN
}
fn default_alpha_drift() -> f64 {
    1e-6
}
fn default_integrated_microlaw() -> f64 {
    1e-4
}
fn default_microlaw_residual() -> f64 {
    1e-6
}
fn default_microlaw_reduction() -> f64 {
    2.0
}
fn default_bottom_equivalence() -> f64 {
    1e-4
}
fn default_roundtrip() -> f64 {
    1e-8
}
fn default_bound_factor() -> f64 {
    10.0
}
fn all_variants() -> Vec<CommutatorVariant> {
    CommutatorVariant::ALL.to_vec()
}

/// One validation failure at a dotted field path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Default)]
struct Collector {
    errors: Vec<ConfigError>,
}

impl Collector {
    fn push(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.errors.push(ConfigError { path: path.into(), message: message.into() });
    }

    /// Deserializes `map[key]` if present, recording type errors at `path.key`.
    fn get<T: DeserializeOwned>(&mut self, map: &Map<String, Value>, path: &str, key: &str) -> Option<T> {
        let value = map.get(key)?;
        match serde_json::from_value(value.clone()) {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(join(path, key), e.to_string());
                None
            }
        }
    }

    fn object<'v>(&mut self, map: &'v Map<String, Value>, path: &str, key: &str) -> Option<&'v Map<String, Value>> {
        match map.get(key)? {
            Value::Object(m) => Some(m),
            _ => {
                self.push(join(path, key), "expected an object");
                None
            }
        }
    }

    fn unknown(&mut self, map: &Map<String, Value>, path: &str, allowed: &[&str]) {
        let allowed: BTreeSet<&str> = allowed.iter().copied().collect();
        for key in map.keys().filter(|k| !allowed.contains(k.as_str())) {
            self.push(join(path, key), "unknown key");
        }
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn default_kappas(experiment: Experiment) -> Vec<f64> {
    match experiment {
        Experiment::OperatorScaling => vec![2.0, 4.0, 8.0, 16.0],
        Experiment::AprioriSweep => vec![2.0],
        _ => vec![3.0],
    }
}

fn default_grid(experiment: Experiment) -> GridConfig {
    match experiment {
        Experiment::OperatorScaling => GridConfig { length: 100.0, points: 4096 },
        Experiment::AprioriSweep => GridConfig { length: 50.0, points: 256 },
        Experiment::BottomRoundtrip => GridConfig { length: 40.0, points: 256 },
        _ => GridConfig { length: 50.0, points: 512 },
    }
}

fn default_duration(experiment: Experiment) -> f64 {
    match experiment {
        Experiment::AprioriSweep => 1.0,
        _ => 0.1,
    }
}

fn default_coefficients(experiment: Experiment) -> CoefficientSpec {
    match experiment {
        Experiment::AprioriSweep | Experiment::BottomRoundtrip => CoefficientSpec::Bottom {
            profile: BottomSource::Sech2 { amplitude: 0.05, width: 3.0 },
            margin: DEFAULT_DEPTH_MARGIN,
        },
        _ => CoefficientSpec::Kdv,
    }
}

fn default_initial_data(experiment: Experiment) -> InitialData {
    match experiment {
        Experiment::AprioriSweep => InitialData::RandomBandlimited { h_minus_one_norm: 1.0, kappa: None, seed: Some(1) },
        _ => InitialData::Gaussian { amplitude: 0.5, width: 1.0, center: 0.0 },
    }
}

const TOP_KEYS: [&str; 12] = [
    "experiment",
    "grid",
    "time",
    "kappa_list",
    "initial_data",
    "coefficients",
    "tolerances",
    "admissibility_constant",
    "scaling",
    "radii",
    "snapshot_format",
    "output_dir",
];

/// Parses and validates configuration text. Relative file references are
/// resolved against `base_dir`. `seed` overrides the configured seed.
pub fn validate(text: &str, base_dir: &Path, seed: Option<u64>) -> Result<RunConfig, Vec<ConfigError>> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| vec![ConfigError { path: "$".into(), message: format!("not valid JSON: {e}") }])?;
    validate_value(&value, base_dir, seed)
}

pub fn validate_value(value: &Value, base_dir: &Path, seed: Option<u64>) -> Result<RunConfig, Vec<ConfigError>> {
    let mut c = Collector::default();
    let Value::Object(top) = value else {
        return Err(vec![ConfigError { path: "$".into(), message: "expected an object".into() }]);
    };
    c.unknown(top, "", &TOP_KEYS);
    let experiment = match top.get("experiment") {
        None => {
            c.push("experiment", "missing; one of conservation, microlaw, operator_scaling, apriori_sweep, bottom_roundtrip");
            None
        }
        Some(_) => c.get::<Experiment>(top, "", "experiment"),
    };
    let exp = experiment.unwrap_or(Experiment::Conservation);

    let mut grid = default_grid(exp);
    if let Some(g) = c.object(top, "", "grid") {
        c.unknown(g, "grid", &["L", "N"]);
        if let Some(l) = c.get::<f64>(g, "grid", "L") {
            grid.length = l;
        }
        if let Some(n) = c.get::<usize>(g, "grid", "N") {
            grid.points = n;
        }
    }
    if !(grid.length.is_finite() && grid.length > 0.0) {
        c.push("grid.L", "must be positive and finite");
    }
    if grid.points % 2 == 1 {
        c.push("grid.N", format!("{} is odd; an even point count is required", grid.points));
    } else if grid.points < 8 {
        c.push("grid.N", "at least 8 points are required");
    }

    let mut duration = default_duration(exp);
    let mut dt = None;
    let mut save_every = None;
    if let Some(t) = c.object(top, "", "time") {
        c.unknown(t, "time", &["T", "dt", "save_every"]);
        duration = c.get(t, "time", "T").unwrap_or(duration);
        dt = c.get::<f64>(t, "time", "dt");
        save_every = c.get::<usize>(t, "time", "save_every");
    }
    if !(duration.is_finite() && duration > 0.0) {
        c.push("time.T", "must be positive and finite");
    }

    let kappa_list = c.get::<Vec<f64>>(top, "", "kappa_list").unwrap_or_else(|| default_kappas(exp));
    if kappa_list.is_empty() {
        c.push("kappa_list", "at least one kappa is required");
    }
    for (i, &k) in kappa_list.iter().enumerate() {
        if !(k >= 1.0) {
            c.push(format!("kappa_list[{i}]"), format!("kappa = {k} is below the standing assumption kappa >= 1"));
        }
    }

    let mut initial_data = c.get::<InitialData>(top, "", "initial_data").unwrap_or_else(|| default_initial_data(exp));
    if let InitialData::RandomBandlimited { seed: s, kappa, h_minus_one_norm } = &mut initial_data {
        if seed.is_some() {
            *s = seed;
        }
        if s.is_none() {
            c.push("initial_data.seed", "a seed is mandatory for random data");
        }
        if kappa.is_none() {
            *kappa = kappa_list.first().copied().filter(|&k| k >= 1.0).or(Some(1.0));
        }
        if kappa.is_some_and(|k| !(k >= 1.0)) {
            c.push("initial_data.kappa", "must be at least 1");
        }
        if !(h_minus_one_norm.is_finite() && *h_minus_one_norm > 0.0) {
            c.push("initial_data.h_minus_one_norm", "must be positive");
        }
    }
    if let InitialData::Gaussian { width, .. } = initial_data {
        if !(width > 0.0) {
            c.push("initial_data.width", "must be positive");
        }
    }

    let mut coefficients = c.get::<CoefficientSpec>(top, "", "coefficients").unwrap_or_else(|| default_coefficients(exp));
    match &mut coefficients {
        CoefficientSpec::Explicit { path } => {
            *path = resolve(base_dir, path);
            if !Path::new(path).is_file() {
                c.push("coefficients.path", format!("file {path} does not exist"));
            }
        }
        CoefficientSpec::Bottom { profile: BottomSource::File { path }, .. } => {
            *path = resolve(base_dir, path);
            if !Path::new(path).is_file() {
                c.push("coefficients.profile.path", format!("file {path} does not exist"));
            }
        }
        _ => {}
    }
    if exp == Experiment::BottomRoundtrip && !matches!(coefficients, CoefficientSpec::Bottom { .. }) {
        c.push("coefficients.kind", "bottom_roundtrip needs a bottom profile");
    }

    let mut tolerances = c.get::<Tolerances>(top, "", "tolerances").unwrap_or_default();
    tolerances.l2_identity.get_or_insert(if coefficients.is_kdv() { 1e-8 } else { 1e-4 });
    let admissibility_constant = c.get(top, "", "admissibility_constant").unwrap_or(DEFAULT_ADMISSIBILITY);
    if !(admissibility_constant >= 0.0) {
        c.push("admissibility_constant", "must be nonnegative");
    }
    let scaling = c.get::<ScalingConfig>(top, "", "scaling").unwrap_or_default();
    if exp == Experiment::OperatorScaling {
        if !(1..=3).contains(&scaling.weight_power) {
            c.push("scaling.weight_power", "must be 1, 2 or 3");
        }
        if scaling.variants.is_empty() {
            c.push("scaling.variants", "at least one variant is required");
        }
        if kappa_list.len() < 4 {
            c.push("kappa_list", "scaling audits need at least 4 kappa values");
        }
        if kappa_list.windows(2).any(|w| !(w[1] > w[0])) {
            c.push("kappa_list", "must be strictly increasing");
        }
    }
    let radii = c.get::<Vec<f64>>(top, "", "radii").unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    if exp == Experiment::AprioriSweep && (radii.is_empty() || radii.iter().any(|&r| !(r > 0.0))) {
        c.push("radii", "needs at least one positive radius");
    }
    let snapshot_format = c.get(top, "", "snapshot_format").unwrap_or_default();
    let output_dir = c.get::<String>(top, "", "output_dir").unwrap_or_else(|| "out".into());

    if !c.errors.is_empty() {
        return Err(c.errors);
    }

    // Cross-field checks need a valid grid.
    let mut cfg = RunConfig {
        experiment: exp,
        grid,
        time: TimeConfig { duration, dt: 0.0, save_every: 0 },
        kappa_list,
        initial_data,
        coefficients,
        tolerances,
        admissibility_constant,
        scaling,
        radii,
        snapshot_format,
        output_dir,
    };
    let run_grid = match run_grid(&cfg) {
        Ok(g) => g,
        Err(e) => return Err(vec![ConfigError { path: "coefficients".into(), message: e.to_string() }]),
    };
    let xi_max = run_grid.xi_max();
    let dt = dt.unwrap_or_else(|| default_dt(&run_grid));
    let cap = STEP_CAP / xi_max.powi(3);
    if !(dt > 0.0) {
        c.push("time.dt", "must be positive");
    } else if dt > cap {
        c.push("time.dt", format!("{dt:e} exceeds the cap {STEP_CAP}/xi_max^3 = {cap:e}"));
    }
    if dt > 0.0 {
        match step_count(duration, dt) {
            Ok((steps, _)) => {
                let every = save_every.unwrap_or_else(|| dividing_stride(steps));
                if every == 0 || steps % every != 0 {
                    c.push("time.save_every", format!("must divide the step count {steps}"));
                }
                cfg.time.save_every = every;
            }
            Err(e) => c.push("time.dt", e.to_string()),
        }
    }
    cfg.time.dt = dt;

    let dx = run_grid.dx();
    for (i, &k) in cfg.kappa_list.iter().enumerate() {
        if k * dx > MAX_KAPPA_DX {
            c.push(format!("kappa_list[{i}]"), format!("kappa * dx = {:.3} exceeds {MAX_KAPPA_DX}; refine the grid", k * dx));
        }
    }
    if matches!(exp, Experiment::Conservation | Experiment::Microlaw) && c.errors.is_empty() {
        match initial_field(&cfg.initial_data, &run_grid) {
            Ok(u0) => admissibility_precheck(&mut c, &u0, &cfg.kappa_list, admissibility_constant),
            Err(e) => c.push("initial_data", e.to_string()),
        }
    }
    if c.errors.is_empty() {
        Ok(cfg)
    } else {
        Err(c.errors)
    }
}

fn admissibility_precheck(c: &mut Collector, u0: &Field, kappas: &[f64], constant: f64) {
    for (i, &k) in kappas.iter().enumerate() {
        let Ok(kappa) = Kappa::new(k) else { continue };
        if !is_admissible(u0, kappa, constant) {
            let need = minimal_admissible_kappa(u0, constant).map(|k| k.get()).unwrap_or(f64::INFINITY);
            c.push(format!("kappa_list[{i}]"), format!("initial data is not admissible at kappa = {k}; need kappa >= {need:.4}"));
        }
    }
}

/// Largest stride giving at least `TARGET_RECORDS` records that divides `steps`.
fn dividing_stride(steps: usize) -> usize {
    let mut every = SolveOptions::stride_for(steps, TARGET_RECORDS);
    while steps % every != 0 {
        every -= 1;
    }
    every
}

fn resolve(base: &Path, path: &str) -> String {
    let p = PathBuf::from(path);
    if p.is_absolute() {
        path.to_string()
    } else {
        base.join(p).display().to_string()
    }
}

/// Grid the gKdV evolution runs on: the configured grid, or the stretched
/// coordinate grid for bottom-derived coefficients.
pub fn run_grid(cfg: &RunConfig) -> kdvlab_core::Result<Grid> {
    let grid = Grid::new(cfg.grid.length, cfg.grid.points)?;
    match (&cfg.coefficients, cfg.experiment) {
        (CoefficientSpec::Bottom { profile, margin }, e) if e != Experiment::BottomRoundtrip => {
            let c = profile.elevation(&grid)?;
            Ok(build_profile(&c, *margin)?.y_grid().clone())
        }
        _ => Ok(grid),
    }
}

/// SHA-256 of the canonical normalized configuration, without `output_dir`.
pub fn config_hash(cfg: &RunConfig) -> String {
    let mut value = serde_json::to_value(cfg).expect("config serializes");
    if let Value::Object(map) = &mut value {
        map.remove("output_dir");
    }
    format!("{:x}", Sha256::digest(value.to_string().as_bytes()))
}
