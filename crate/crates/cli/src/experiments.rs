//! The five experiment pipelines and the `run` entry point.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use kdvlab_core::bottom::{transform_backward, transform_forward, write_coefficients_csv, VariableBottomEquation};
use kdvlab_core::dynamics::{
    alpha_series, integrated_microlaw, CoefficientSet, l2_identity_residual, solve_with, GkdvEquation, SolveOptions, Trajectory,
};
use kdvlab_core::io::{write_plot_data, write_trajectory, TrajectoryHeader};
use kdvlab_core::lax::{microlaw_residual, rho_alpha, GreensMethod};
use kdvlab_core::metrics::commutator_scaling_audit;
use kdvlab_core::smoothing::{apriori_horizon, bootstrap_audit, horizon_slope, hypothesis_check, HypothesisMode, WeightFamily};
use kdvlab_core::spectral::sobolev_kappa_norm;
use kdvlab_core::{Coefficients, Error, Field, Grid, Kappa, Result};
use serde::Serialize;

use crate::config::{config_hash, CoefficientSpec, Experiment, RunConfig};
use crate::fields::{build_coefficients, initial_field};
use crate::summary::{Check, RunSummary};

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.json";

/// Writes artifacts into one run directory and remembers their names.
struct Output {
    dir: PathBuf,
    hash: String,
    files: Vec<String>,
}

impl Output {
    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        self.files.push(name.to_string());
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    /// Text artifact whose first line records the config hash as a `#` comment.
    fn text(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let hash = self.hash.clone();
        let mut w = self.create(name)?;
        writeln!(w, "# config_hash: {hash}")?;
        body(&mut w)?;
        w.flush()?;
        Ok(())
    }

    fn plot(&mut self, name: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
        self.text(name, |w| write_plot_data(xs, ys, w))
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    fn trajectory(&mut self, name: &str, traj: &Trajectory<f64>, cfg: &RunConfig, coeffs: &Coefficients) -> Result<()> {
        let g = traj.grid();
        let header = TrajectoryHeader {
            length: g.length(),
            points: g.points(),
            dt: traj.dt(),
            duration: cfg.time.duration,
            kappa_list: traj.kappas().to_vec(),
            coeff_descriptor: coeffs.descriptor(),
            snapshot_format: cfg.snapshot_format,
            config_hash: Some(self.hash.clone()),
        };
        write_trajectory(traj, &header, &self.dir.join(name))?;
        self.files.push(format!("{name}/"));
        Ok(())
    }
}

#[derive(Default)]
struct Outcome {
    checks: Vec<Check>,
    measured: BTreeMap<String, f64>,
}

impl Outcome {
    fn measure(&mut self, name: impl Into<String>, value: f64) {
        self.measured.insert(name.into(), value);
    }
}

fn rel_l2(a: &Field, b: &Field) -> f64 {
    (a - b).l2_norm() / b.l2_norm().max(f64::MIN_POSITIVE)
}

fn solve_options(cfg: &RunConfig, kappas: Vec<f64>) -> SolveOptions {
    SolveOptions { save_every: cfg.time.save_every, kappas, admissibility: cfg.admissibility_constant, ..SolveOptions::default() }
}

fn physical_grid(cfg: &RunConfig) -> Result<Grid> {
    Grid::new(cfg.grid.length, cfg.grid.points)
}

fn divergence_check(out: &mut Outcome, name: &str, traj: &Trajectory<f64>) {
    out.checks.push(Check::verdict(format!("no_divergence{name}"), traj.halted_at().is_none(), traj.halted_at().unwrap_or(-1.0)));
}

/// Runs one validated configuration, writing artifacts and `summary.json`
/// into `dir`. Module errors are captured in the summary.
pub fn run(cfg: &RunConfig, dir: &Path, threads: usize) -> RunSummary {
    let start = Instant::now();
    let hash = config_hash(cfg);
    let mut output = Output { dir: dir.to_path_buf(), hash: hash.clone(), files: Vec::new() };
    let result = std::fs::create_dir_all(dir).map_err(Error::from).and_then(|_| {
        output.json(CONFIG_FILE, cfg)?;
        let mut outcome = Outcome::default();
        match cfg.experiment {
            Experiment::Conservation => conservation(cfg, &mut output, &mut outcome),
            Experiment::Microlaw => microlaw(cfg, &mut output, &mut outcome),
            Experiment::OperatorScaling => operator_scaling(cfg, &mut output, &mut outcome),
            Experiment::AprioriSweep => apriori_sweep(cfg, &mut output, &mut outcome),
            Experiment::BottomRoundtrip => bottom_roundtrip(cfg, &mut output, &mut outcome),
        }
        .map(|_| outcome)
    });
    let (outcome, error) = match result {
        Ok(o) => (o, None),
        Err(e) => (Outcome::default(), Some(format!("{} failed: {e}", cfg.experiment.name()))),
    };
    let passed = error.is_none() && !outcome.checks.is_empty() && outcome.checks.iter().all(|c| c.passed);
    output.files.push(SUMMARY_FILE.into());
    let mut summary = RunSummary {
        experiment: cfg.experiment.name().into(),
        config_hash: hash,
        passed,
        checks: outcome.checks,
        measured: outcome.measured,
        files: output.files.clone(),
        error,
        threads,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let written = File::create(dir.join(SUMMARY_FILE))
        .map_err(Error::from)
        .and_then(|f| serde_json::to_writer_pretty(BufWriter::new(f), &summary).map_err(Error::from));
    if let Err(e) = written {
        summary.passed = false;
        summary.error.get_or_insert_with(|| format!("cannot write summary: {e}"));
    }
    summary
}

fn conservation(cfg: &RunConfig, out: &mut Output, res: &mut Outcome) -> Result<()> {
    let coeffs = build_coefficients(&cfg.coefficients, &physical_grid(cfg)?)?.set;
    let grid = coeffs.grid().clone();
    let u0 = initial_field(&cfg.initial_data, &grid)?;
    let eq = GkdvEquation::new(coeffs.clone());
    let traj = solve_with(&eq, &u0, cfg.time.duration, cfg.time.dt, &solve_options(cfg, cfg.kappa_list.clone()))?;
    out.trajectory("trajectory", &traj, cfg, &coeffs)?;
    divergence_check(res, "", &traj);
    let times = traj.times().to_vec();
    for (i, &k) in cfg.kappa_list.iter().enumerate() {
        let kappa = Kappa::new(k)?;
        let stored: Option<Vec<f64>> = traj.records().iter().map(|r| r.alpha[i]).collect();
        let alpha = match stored {
            Some(a) => a,
            None => alpha_series(&traj, kappa)?,
        };
        let a0 = alpha[0];
        out.plot(&format!("alpha_k{k}.dat"), &times, &alpha)?;
        res.measure(format!("alpha0_k{k}"), a0);
        if cfg.coefficients.is_kdv() {
            let drift = alpha.iter().map(|a| (a - a0).abs() / a0.max(1e-14)).fold(0.0, f64::max);
            res.measure(format!("alpha_drift_k{k}"), drift);
            res.checks.push(Check::at_most(format!("alpha_drift_k{k}"), drift, cfg.tolerances.alpha_drift));
        } else {
            let forcing = integrated_microlaw(&traj, &coeffs, kappa)?;
            let change = alpha[alpha.len() - 1] - a0;
            let mismatch = (change - forcing).abs();
            res.measure(format!("alpha_change_k{k}"), change);
            res.measure(format!("integrated_forcing_k{k}"), forcing);
            res.measure(format!("integrated_microlaw_k{k}"), mismatch);
            let bound = cfg.tolerances.integrated_microlaw * a0.max(1e-10);
            res.checks.push(Check::at_most(format!("integrated_microlaw_k{k}"), mismatch, bound));
        }
    }
    let residuals = l2_identity_residual(&traj, &coeffs)?;
    let (ts, rs): (Vec<f64>, Vec<f64>) = residuals.into_iter().unzip();
    out.plot("l2_identity.dat", &ts, &rs)?;
    let worst = rs.iter().copied().fold(0.0, f64::max);
    res.measure("l2_identity", worst);
    let tol = cfg.tolerances.l2_identity.unwrap_or(1e-8);
    res.checks.push(Check::at_most("l2_identity", worst, tol));
    let mass = traj.records().iter().map(|r| (r.mass - traj.records()[0].mass).abs()).fold(0.0, f64::max);
    res.measure("mass_drift", mass);
    Ok(())
}

fn microlaw(cfg: &RunConfig, out: &mut Output, res: &mut Outcome) -> Result<()> {
    let phys = physical_grid(cfg)?;
    let coeffs = build_coefficients(&cfg.coefficients, &phys)?.set;
    let grid = coeffs.grid().clone();
    let u = initial_field(&cfg.initial_data, &grid)?;
    // Refinement needs coefficients that can be re-sampled on a finer grid.
    let refinable = matches!(cfg.coefficients, CoefficientSpec::Kdv | CoefficientSpec::Analytic { .. });
    let fine = if refinable {
        let g2 = Grid::new(cfg.grid.length, 2 * cfg.grid.points)?;
        let c2 = build_coefficients(&cfg.coefficients, &g2)?.set;
        Some((initial_field(&cfg.initial_data, &g2)?, c2))
    } else {
        None
    };
    let mut rows = Vec::new();
    for &k in &cfg.kappa_list {
        let kappa = Kappa::new(k)?;
        let data = rho_alpha(&u, kappa, GreensMethod::Direct)?;
        out.text(&format!("greens_k{k}.txt"), |w| data.write_columns(w))?;
        out.json(&format!("greens_k{k}.json"), &data.summary())?;
        res.measure(format!("alpha_k{k}"), data.alpha);
        let r1 = microlaw_residual(&u, kappa, &coeffs, 0.0)?;
        rows.push((k, grid.points(), r1));
        res.measure(format!("residual_k{k}_n{}", grid.points()), r1);
        res.checks.push(Check::at_most(format!("residual_k{k}"), r1, cfg.tolerances.microlaw_residual));
        if let Some((u2, c2)) = &fine {
            let r2 = microlaw_residual(u2, kappa, c2, 0.0)?;
            rows.push((k, u2.len(), r2));
            res.measure(format!("residual_k{k}_n{}", u2.len()), r2);
            let reduction = r1 / r2.max(f64::MIN_POSITIVE);
            res.measure(format!("reduction_k{k}"), reduction);
            // Both at round-off: no reduction is measurable.
            if r1 <= 1e-13 {
                res.checks.push(Check::verdict(format!("reduction_k{k}"), true, reduction));
            } else {
                res.checks.push(Check::at_least(format!("reduction_k{k}"), reduction, cfg.tolerances.microlaw_reduction));
            }
        }
    }
    out.text("microlaw.csv", |w| {
        writeln!(w, "kappa,N,residual")?;
        for (k, n, r) in &rows {
            writeln!(w, "{k},{n},{r}")?;
        }
        Ok(())
    })
}

fn variant_name(v: impl Serialize) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn operator_scaling(cfg: &RunConfig, out: &mut Output, res: &mut Outcome) -> Result<()> {
    let grid = physical_grid(cfg)?;
    for &variant in &cfg.scaling.variants {
        let name = variant_name(variant);
        let report = commutator_scaling_audit(&grid, cfg.scaling.weight_power, variant, &cfg.kappa_list, cfg.scaling.schur)?;
        out.json(&format!("scaling_{name}.json"), &report)?;
        out.plot(&format!("scaling_{name}.dat"), &report.kappas, &report.norms)?;
        res.measure(format!("slope_{name}"), report.slope);
        res.measure(format!("ci_{name}"), report.ci);
        res.checks.push(Check::verdict(format!("slope_{name}"), report.passes(), report.slope));
    }
    Ok(())
}

fn apriori_sweep(cfg: &RunConfig, out: &mut Output, res: &mut Outcome) -> Result<()> {
    let coeffs = build_coefficients(&cfg.coefficients, &physical_grid(cfg)?)?.set;
    let grid = coeffs.grid().clone();
    let kappa = Kappa::new(cfg.kappa_list[0])?;
    let weights = WeightFamily::with_default_stride(&grid);
    let hyp = hypothesis_check(&coeffs, HypothesisMode::Pointwise, &[0.0], &weights)?;
    out.text("hypothesis.csv", |w| hyp.write_csv(w))?;
    let epsilon = hyp.epsilon();
    res.measure("epsilon", epsilon);
    let base = initial_field(&cfg.initial_data, &grid)?;
    let base_norm = sobolev_kappa_norm(&base, -1.0, kappa);
    if !(base_norm > 0.0) {
        return Err(Error::DivisionByZeroNorm);
    }
    let eq = GkdvEquation::new(coeffs.clone());
    let mut boots = Vec::new();
    let mut horizons = Vec::new();
    for &r in &cfg.radii {
        let u0 = base.scale(r / base_norm);
        let traj = solve_with(&eq, &u0, cfg.time.duration, cfg.time.dt, &solve_options(cfg, Vec::new()))?;
        out.trajectory(&format!("trajectory_R{r}"), &traj, cfg, &coeffs)?;
        divergence_check(res, &format!("_R{r}"), &traj);
        let boot = bootstrap_audit(&traj, kappa, r, epsilon, &weights)?;
        let horizon = apriori_horizon(&traj, kappa, r, &weights)?;
        let sup = boot.sup_h1k.sqrt();
        res.measure(format!("sup_h1k_R{r}"), sup);
        res.measure(format!("b_t_R{r}"), boot.b_t);
        res.measure(format!("horizon_R{r}"), horizon.horizon);
        if let Some(c) = boot.fitted_c {
            res.measure(format!("fitted_c_R{r}"), c);
        }
        res.checks.push(Check::at_most(format!("sup_h1k_R{r}"), sup, cfg.tolerances.bound_factor * r));
        res.checks.push(Check::verdict(format!("b_t_finite_R{r}"), boot.b_t.is_finite(), boot.b_t));
        boots.push(boot);
        horizons.push(horizon);
    }
    out.text("bootstrap.csv", |w| {
        writeln!(w, "r,t,kappa,sup_h1k,ls_sq,b_t,epsilon,admissible,fitted_c")?;
        for b in &boots {
            let c = b.fitted_c.map(|c| c.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{},{},{},{},{c}", b.r, b.t, b.kappa, b.sup_h1k, b.ls_sq, b.b_t, b.epsilon, b.admissible)?;
        }
        Ok(())
    })?;
    let (rs, hs): (Vec<f64>, Vec<f64>) = horizons.iter().map(|h| (h.r, h.horizon)).unzip();
    out.plot("horizon.dat", &rs, &hs)?;
    out.json("horizons.json", &horizons)?;
    res.measure("censored_runs", horizons.iter().filter(|h| h.censored).count() as f64);
    if let Some(fit) = horizon_slope(&horizons) {
        res.measure("horizon_slope", fit.slope);
    }
    Ok(())
}

fn bottom_roundtrip(cfg: &RunConfig, out: &mut Output, res: &mut Outcome) -> Result<()> {
    let phys = physical_grid(cfg)?;
    let built = build_coefficients(&cfg.coefficients, &phys)?;
    let profile = built.profile.ok_or_else(|| Error::InvalidArgument("bottom_roundtrip needs a bottom profile".into()))?;
    let coeffs = built.set;
    out.text("coefficients.csv", |w| write_coefficients_csv(&coeffs, w))?;
    let coeff_max = (1..=4)
        .map(|j| Ok(coeffs.sample(j, 0.0)?.map_or(0.0, |a| a.max_abs())))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    res.measure("coefficient_max_abs", coeff_max);
    if profile.elevation().max_abs() == 0.0 {
        res.checks.push(Check::at_most("flat_bottom_coefficients", coeff_max, 1e-12));
    }
    res.measure("stretch", profile.stretch());

    let u0 = initial_field(&cfg.initial_data, &phys)?;
    let v0 = transform_backward(&u0, 0.0, &profile)?;
    let back = transform_forward(&v0.field, 0.0, &profile)?;
    let roundtrip = rel_l2(&back.field, &u0);
    res.measure("roundtrip", roundtrip);
    res.measure("aliased", f64::from(u8::from(v0.aliased() || back.aliased())));
    res.checks.push(Check::at_most("roundtrip", roundtrip, cfg.tolerances.roundtrip));

    let (duration, dt) = (cfg.time.duration, cfg.time.dt);
    let direct = solve_with(&VariableBottomEquation::new(&profile), &u0, duration, dt, &solve_options(cfg, Vec::new()))?;
    let moved = solve_with(&GkdvEquation::new(coeffs.clone()), &v0.field, duration, dt, &solve_options(cfg, Vec::new()))?;
    divergence_check(res, "_direct", &direct);
    divergence_check(res, "_transformed", &moved);
    let mut direct_label = CoefficientSet::zero(&phys);
    direct_label.meta.label = "variable_bottom".into();
    out.trajectory("direct", &direct, cfg, &direct_label)?;
    out.trajectory("transformed", &moved, cfg, &coeffs)?;
    let mapped = transform_forward(moved.last(), duration, &profile)?.field;
    let mismatch = rel_l2(&mapped, direct.last());
    res.measure("equivalence", mismatch);
    res.checks.push(Check::at_most("equivalence", mismatch, cfg.tolerances.bottom_equivalence));
    let xs = phys.coordinates();
    out.plot("final_direct.dat", &xs, direct.last().samples())?;
    out.plot("final_transformed.dat", &xs, mapped.samples())?;
    Ok(())
}
