//! Parameter sweeps: a base config plus dotted-path value lists, expanded
//! as a cartesian product and run in parallel.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::config::{config_hash, validate_value, ConfigError, RunConfig};
use crate::experiments::run;
use crate::summary::RunSummary;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Value,
    /// Dotted path (e.g. `initial_data.amplitude`) to the values it takes.
    #[serde(default)]
    pub vary: BTreeMap<String, Vec<Value>>,
}

fn set_path(target: &mut Value, path: &str, value: Value) -> Result<(), String> {
    let mut node = target;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let Value::Object(map) = node else {
            return Err(format!("{} is not an object", keys[..i].join(".")));
        };
        if i + 1 == keys.len() {
            map.insert(key.to_string(), value);
            return Ok(());
        }
        node = map.entry(key.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Expands and validates every point of the sweep, dropping duplicates.
/// Errors are reported as `runs[i].<path>`.
pub fn expand(text: &str, base_dir: &Path, seed: Option<u64>) -> Result<Vec<RunConfig>, Vec<ConfigError>> {
    let spec: SweepSpec = serde_json::from_str(text)
        .map_err(|e| vec![ConfigError { path: "$".into(), message: format!("not a sweep spec: {e}") }])?;
    let mut points = vec![spec.base.clone()];
    for (path, values) in &spec.vary {
        if values.is_empty() {
            return Err(vec![ConfigError { path: format!("vary.{path}"), message: "needs at least one value".into() }]);
        }
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for v in values {
                let mut q = p.clone();
                set_path(&mut q, path, v.clone())
                    .map_err(|m| vec![ConfigError { path: format!("vary.{path}"), message: m }])?;
                next.push(q);
            }
        }
        points = next;
    }
    let mut configs = Vec::new();
    let mut errors = Vec::new();
    for (i, p) in points.iter().enumerate() {
        match validate_value(p, base_dir, seed) {
            Ok(cfg) => configs.push(cfg),
            Err(errs) => errors.extend(
                errs.into_iter().map(|e| ConfigError { path: format!("runs[{i}].{}", e.path), message: e.message }),
            ),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    configs.sort_by_cached_key(config_hash);
    configs.dedup_by(|a, b| config_hash(a) == config_hash(b));
    Ok(configs)
}

/// Directory name of a run inside a sweep.
pub fn run_dir_name(cfg: &RunConfig) -> String {
    config_hash(cfg)[..16].to_string()
}

/// Runs every config in its own subdirectory of `out`, in hash order.
pub fn run_sweep(configs: &[RunConfig], out: &Path, threads: usize) -> Vec<(String, RunSummary)> {
    configs
        .par_iter()
        .map(|cfg| {
            let name = run_dir_name(cfg);
            let summary = run(cfg, &out.join(&name), threads);
            (name, summary)
        })
        .collect()
}
