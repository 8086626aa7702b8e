//! Run summaries and the cross-run report.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Deserializer, Serialize};

// serde_json writes non-finite numbers as null; read them back as NaN.
fn f64_or_nan<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn map_or_nan<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
    let m = BTreeMap::<String, Option<f64>>::deserialize(d)?;
    Ok(m.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::NAN))).collect())
}

/// One acceptance check of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(deserialize_with = "f64_or_nan")]
    pub value: f64,
    /// `"<="`, `">="`, or `"ok"` for verdicts without a threshold.
    pub relation: String,
    #[serde(deserialize_with = "f64_or_nan")]
    pub threshold: f64,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, relation: "<=".into(), threshold }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, relation: ">=".into(), threshold }
    }

    /// A check whose outcome was decided elsewhere; `value` is reported as-is.
    pub fn verdict(name: impl Into<String>, passed: bool, value: f64) -> Self {
        Self { name: name.into(), passed, value, relation: "ok".into(), threshold: f64::NAN }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub config_hash: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(deserialize_with = "map_or_nan")]
    pub measured: BTreeMap<String, f64>,
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub threads: usize,
    pub wall_time_s: f64,
}

impl RunSummary {
    /// Fitted slopes, recorded as `slope_<variant>` measurements.
    pub fn slopes(&self) -> Vec<(&str, f64)> {
        self.measured
            .iter()
            .filter_map(|(k, &v)| k.strip_prefix("slope_").map(|name| (name, v)))
            .collect()
    }
}

/// One row of the report index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub source: String,
    pub experiment: String,
    pub config_hash: String,
    pub passed: bool,
    pub checks_passed: usize,
    pub checks_total: usize,
    pub failed_checks: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty", deserialize_with = "map_or_nan")]
    pub slopes: BTreeMap<String, f64>,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportIndex {
    pub all_passed: bool,
    pub rows: Vec<ReportRow>,
}

/// Aggregates summaries, ordered by config hash then source.
pub fn report(summaries: &[(String, RunSummary)]) -> Result<(String, ReportIndex), String> {
    if summaries.is_empty() {
        return Err("report needs at least one summary".into());
    }
    let mut rows: Vec<ReportRow> = summaries
        .iter()
        .map(|(source, s)| ReportRow {
            source: source.clone(),
            experiment: s.experiment.clone(),
            config_hash: s.config_hash.clone(),
            passed: s.passed,
            checks_passed: s.checks.iter().filter(|c| c.passed).count(),
            checks_total: s.checks.len(),
            failed_checks: s
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .chain(s.error.iter().map(|e| format!("error: {e}")))
                .collect(),
            slopes: s.slopes().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            wall_time_s: s.wall_time_s,
        })
        .collect();
    rows.sort_by(|a, b| (&a.config_hash, &a.source).cmp(&(&b.config_hash, &b.source)));
    let with_slopes = rows.iter().any(|r| !r.slopes.is_empty());
    let mut table = String::new();
    let mut header = vec!["status", "experiment", "config_hash", "checks"];
    if with_slopes {
        header.push("slopes");
    }
    header.extend(["wall_s", "failed"]);
    let mut lines = vec![header.iter().map(|s| s.to_string()).collect::<Vec<_>>()];
    for r in &rows {
        let mut line = vec![
            if r.passed { "PASS".to_string() } else { "FAIL".to_string() },
            r.experiment.clone(),
            r.config_hash.chars().take(12).collect(),
            format!("{}/{}", r.checks_passed, r.checks_total),
        ];
        if with_slopes {
            let slopes: Vec<String> = r.slopes.iter().map(|(k, v)| format!("{k}={v:.3}")).collect();
            line.push(if slopes.is_empty() { "-".into() } else { slopes.join(" ") });
        }
        line.push(format!("{:.2}", r.wall_time_s));
        line.push(if r.failed_checks.is_empty() { "-".into() } else { r.failed_checks.join(";") });
        lines.push(line);
    }
    let widths: Vec<usize> =
        (0..header.len()).map(|i| lines.iter().map(|l| l[i].chars().count()).max().unwrap_or(0)).collect();
    for line in &lines {
        let cells: Vec<String> = line.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(table, "{}", cells.join("  ").trim_end());
    }
    let all_passed = rows.iter().all(|r| r.passed);
    Ok((table, ReportIndex { all_passed, rows }))
}
