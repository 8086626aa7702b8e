//! Persistence: binary and CSV fields, trajectory directories, diagnostics
//! tables and two-column plot data. Every writer has a matching loader.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::{CoefficientDescriptor, DiagnosticRecord, Trajectory};
use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::spectral::{RealField, TorusGrid};

/// Header file of a stored trajectory.
pub const HEADER_FILE: &str = "header.json";
/// Diagnostics table of a stored trajectory.
pub const DIAGNOSTICS_FILE: &str = "diagnostics.csv";

/// How snapshots are written next to the header.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotFormat {
    #[default]
    Binary,
    Csv,
}

impl SnapshotFormat {
    pub fn file_name(self) -> &'static str {
        match self {
            Self::Binary => "snapshots.bin",
            Self::Csv => "snapshots.csv",
        }
    }
}

/// Metadata stored as `header.json` beside the snapshots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryHeader {
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub points: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub duration: f64,
    pub kappa_list: Vec<f64>,
    pub coeff_descriptor: CoefficientDescriptor,
    pub snapshot_format: SnapshotFormat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config_hash: Option<String>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

/// Writes one field as little-endian `L: f64, N: u64, t: f64` followed by `N` samples.
pub fn write_field_binary<T: Scalar>(u: &RealField<T>, t: T, mut out: impl Write) -> Result<()> {
    let g = u.grid();
    out.write_all(&g.length().to_f64_lossy().to_le_bytes())?;
    out.write_all(&(g.points() as u64).to_le_bytes())?;
    out.write_all(&t.to_f64_lossy().to_le_bytes())?;
    for &v in u.samples() {
        out.write_all(&v.to_f64_lossy().to_le_bytes())?;
    }
    Ok(())
}

fn read_word(input: &mut impl Read) -> Result<Option<[u8; 8]>> {
    let mut buf = [0u8; 8];
    let mut filled = 0;
    while filled < 8 {
        match input.read(&mut buf[filled..])? {
            0 if filled == 0 => return Ok(None),
            0 => return Err(parse_err("truncated binary field")),
            n => filled += n,
        }
    }
    Ok(Some(buf))
}

fn require_word(input: &mut impl Read) -> Result<[u8; 8]> {
    read_word(input)?.ok_or_else(|| parse_err("truncated binary field"))
}

/// Reads one binary field; `Ok(None)` at a clean end of input.
pub fn read_field_binary<T: Scalar>(mut input: impl Read) -> Result<Option<(RealField<T>, T)>> {
    let Some(first) = read_word(&mut input)? else {
        return Ok(None);
    };
    let length = f64::from_le_bytes(first);
    let points = u64::from_le_bytes(require_word(&mut input)?);
    let points = usize::try_from(points).map_err(|_| parse_err("point count out of range"))?;
    let t = f64::from_le_bytes(require_word(&mut input)?);
    let grid = TorusGrid::new(lit::<T>(length), points)?;
    let samples = (0..points)
        .map(|_| Ok(lit::<T>(f64::from_le_bytes(require_word(&mut input)?))))
        .collect::<Result<Vec<T>>>()?;
    Ok(Some((RealField::new(&grid, samples)?, lit(t))))
}

/// Reads every binary field of a stream, checking they share one grid.
pub fn read_fields_binary<T: Scalar>(mut input: impl Read) -> Result<(Vec<T>, Vec<RealField<T>>)> {
    let mut times = Vec::new();
    let mut fields: Vec<RealField<T>> = Vec::new();
    while let Some((u, t)) = read_field_binary(&mut input)? {
        if let Some(first) = fields.first() {
            first.check_grid(&u)?;
        }
        times.push(t);
        fields.push(u);
    }
    Ok((times, fields))
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

/// Reader accepting `#` comment lines (used for provenance lines).
pub fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input)
}

fn csv_err(e: csv::Error) -> Error {
    parse_err(e.to_string())
}

fn num(field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| parse_err(format!("not a number: {field:?}")))
}

/// Snapshots in long format with header `t,x,u`.
pub fn write_fields_csv<T: Scalar>(times: &[T], fields: &[RealField<T>], out: impl Write) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["t", "x", "u"]).map_err(csv_err)?;
    for (t, u) in times.iter().zip(fields) {
        let t = t.to_f64_lossy().to_string();
        for (x, v) in u.grid().coordinates().iter().zip(u.samples()) {
            w.write_record([t.as_str(), &x.to_f64_lossy().to_string(), &v.to_f64_lossy().to_string()])
                .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_fields_csv`]; the grid is rebuilt from the first `x`
/// (`-L/2`) and the number of rows per time.
pub fn read_fields_csv<T: Scalar>(input: impl Read) -> Result<(Vec<T>, Vec<RealField<T>>)> {
    let mut blocks: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    for row in csv_reader(input).records() {
        let row = row.map_err(csv_err)?;
        if row.len() != 3 {
            return Err(parse_err("snapshot rows need t,x,u"));
        }
        let (t, x, v) = (num(&row[0])?, num(&row[1])?, num(&row[2])?);
        match blocks.last_mut() {
            Some((bt, vals, _)) if *bt == t => vals.push(v),
            _ => blocks.push((t, vec![v], x)),
        }
    }
    let Some((_, first, x0)) = blocks.first() else {
        return Err(Error::EmptyTrajectory);
    };
    let grid = TorusGrid::new(lit::<T>(-2.0 * x0), first.len())?;
    let mut times = Vec::with_capacity(blocks.len());
    let mut fields = Vec::with_capacity(blocks.len());
    for (t, vals, _) in blocks {
        times.push(lit(t));
        fields.push(RealField::new(&grid, vals.into_iter().map(lit).collect())?);
    }
    Ok((times, fields))
}

fn alpha_column(kappa: f64) -> String {
    format!("alpha_k{kappa}")
}

/// Diagnostics table `t,mass,momentum,alpha_k<kappa>...,h1k_norm,max_abs,diverged`;
/// inadmissible alpha entries are empty cells.
pub fn write_diagnostics_csv(records: &[DiagnosticRecord], kappas: &[f64], out: impl Write) -> Result<()> {
    let mut w = csv_writer(out);
    let mut header = vec!["t".to_string(), "mass".into(), "momentum".into()];
    header.extend(kappas.iter().map(|&k| alpha_column(k)));
    header.extend(["h1k_norm".into(), "max_abs".into(), "diverged".into()]);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        if r.alpha.len() != kappas.len() {
            return Err(Error::LengthMismatch { expected: kappas.len(), found: r.alpha.len() });
        }
        let mut row = vec![r.t.to_string(), r.mass.to_string(), r.momentum.to_string()];
        row.extend(r.alpha.iter().map(|a| a.map(|a| a.to_string()).unwrap_or_default()));
        row.extend([r.h1k_norm.to_string(), r.max_abs.to_string(), r.diverged.to_string()]);
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Inverse of [`write_diagnostics_csv`]: `(kappas, records)`.
pub fn read_diagnostics_csv(input: impl Read) -> Result<(Vec<f64>, Vec<DiagnosticRecord>)> {
    let mut reader = csv_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    let n = header.len();
    if n < 6 || &header[0] != "t" || &header[n - 1] != "diverged" {
        return Err(parse_err("unrecognized diagnostics header"));
    }
    let kappas = (3..n - 3)
        .map(|i| header[i].strip_prefix("alpha_k").ok_or_else(|| parse_err("bad alpha column")).and_then(num))
        .collect::<Result<Vec<f64>>>()?;
    let records = reader
        .records()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            if row.len() != n {
                return Err(parse_err("ragged diagnostics row"));
            }
            Ok(DiagnosticRecord {
                t: num(&row[0])?,
                mass: num(&row[1])?,
                momentum: num(&row[2])?,
                alpha: (3..n - 3)
                    .map(|i| if row[i].is_empty() { Ok(None) } else { num(&row[i]).map(Some) })
                    .collect::<Result<_>>()?,
                h1k_norm: num(&row[n - 3])?,
                max_abs: num(&row[n - 2])?,
                diverged: row[n - 1].parse().map_err(|_| parse_err("bad diverged flag"))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((kappas, records))
}

/// Whitespace-separated two-column plot data, one pair per line.
pub fn write_plot_data(xs: &[f64], ys: &[f64], mut out: impl Write) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { expected: xs.len(), found: ys.len() });
    }
    for (x, y) in xs.iter().zip(ys) {
        writeln!(out, "{x} {y}")?;
    }
    Ok(())
}

/// Inverse of [`write_plot_data`]; skips blank and `#` lines.
pub fn read_plot_data(input: impl Read) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut text = String::new();
    BufReader::new(input).read_to_string(&mut text)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let mut parts = line.split_whitespace();
        match (parts.next(), parts.next(), parts.next()) {
            (Some(x), Some(y), None) => {
                xs.push(num(x)?);
                ys.push(num(y)?);
            }
            _ => return Err(parse_err(format!("expected two columns: {line:?}"))),
        }
    }
    Ok((xs, ys))
}

/// A trajectory read back from disk.
#[derive(Clone, Debug)]
pub struct StoredTrajectory {
    pub header: TrajectoryHeader,
    pub trajectory: Trajectory<f64>,
}

/// Writes `header.json`, the snapshots and `diagnostics.csv` into `dir`.
pub fn write_trajectory<T: Scalar>(traj: &Trajectory<T>, header: &TrajectoryHeader, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join(HEADER_FILE))?), header)?;
    let mut snaps = BufWriter::new(File::create(dir.join(header.snapshot_format.file_name()))?);
    match header.snapshot_format {
        SnapshotFormat::Binary => {
            for (u, &t) in traj.snapshots().iter().zip(traj.times()) {
                write_field_binary(u, t, &mut snaps)?;
            }
        }
        SnapshotFormat::Csv => write_fields_csv(traj.times(), traj.snapshots(), &mut snaps)?,
    }
    snaps.flush()?;
    let diag = BufWriter::new(File::create(dir.join(DIAGNOSTICS_FILE))?);
    write_diagnostics_csv(traj.records(), traj.kappas(), diag)
}

/// Loads a directory written by [`write_trajectory`] without recomputing diagnostics.
pub fn read_trajectory(dir: &Path) -> Result<StoredTrajectory> {
    let header: TrajectoryHeader = serde_json::from_reader(BufReader::new(File::open(dir.join(HEADER_FILE))?))?;
    let snaps = BufReader::new(File::open(dir.join(header.snapshot_format.file_name()))?);
    let (times, snapshots) = match header.snapshot_format {
        SnapshotFormat::Binary => read_fields_binary::<f64>(snaps)?,
        SnapshotFormat::Csv => read_fields_csv::<f64>(snaps)?,
    };
    let (kappas, records) = read_diagnostics_csv(BufReader::new(File::open(dir.join(DIAGNOSTICS_FILE))?))?;
    let first = snapshots.first().ok_or(Error::EmptyTrajectory)?;
    if first.grid().points() != header.points || first.grid().length() != header.length {
        return Err(parse_err("snapshot grid disagrees with the header"));
    }
    if records.len() != snapshots.len() {
        return Err(Error::LengthMismatch { expected: snapshots.len(), found: records.len() });
    }
    let grid = first.grid().clone();
    let halted_at = records.last().filter(|r| r.diverged).map(|r| r.t);
    let trajectory = Trajectory::from_parts(&grid, times, snapshots, records, kappas, header.dt, halted_at);
    Ok(StoredTrajectory { header, trajectory })
}
