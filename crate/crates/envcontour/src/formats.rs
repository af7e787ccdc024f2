//! CSV and JSON readers and writers.
//!
//! Floats are written in Rust's shortest round-trip form, so equal values
//! always give equal bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use envcontour_core::calibration::MetOceanSeries;
use envcontour_core::geometry::{Point, Polygon, SupportGrid, UnitVector};
use envcontour_core::process::SeaStateModel;

use crate::error::{AppError, AppResult};

pub const GRID_HEADER: [&str; 2] = ["angle_rad", "threshold"];
pub const POLYGON_HEADER: [&str; 2] = ["x", "y"];
pub const ESTIMATE_HEADER: [&str; 5] = ["angle_rad", "c_value", "std_err", "n_paths", "censored_frac"];
pub const SERIES_HEADER: [&str; 3] = ["t_hours", "hs_m", "tz_s"];

// Tolerance when matching file angles to the uniform direction grid.
const ANGLE_TOL: f64 = 1e-9;

fn csv_err(e: csv::Error) -> AppError {
    AppError::Input(format!("csv: {e}"))
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, want: &[&str]) -> AppResult<()> {
    let got = rdr.headers().map_err(csv_err)?;
    if got.is_empty() {
        return Err(AppError::Input("insufficient data: empty file".into()));
    }
    let got: Vec<&str> = got.iter().map(str::trim).collect();
    if got != want {
        return Err(AppError::Input(format!("line 1: expected header '{}', got '{}'", want.join(","), got.join(","))));
    }
    Ok(())
}

fn parse_field(record: &csv::StringRecord, i: usize, name: &str) -> Result<f64, String> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record.get(i).ok_or_else(|| format!("line {line}: missing column {name}"))?;
    raw.trim().parse().map_err(|_| format!("line {line}, column {name}: cannot parse '{raw}' as a number"))
}

fn parse_row<const N: usize>(record: &csv::StringRecord, header: &[&str; N]) -> Result<[f64; N], String> {
    if record.len() != N {
        let line = record.position().map_or(0, |p| p.line());
        return Err(format!("line {line}: expected {N} columns, got {}", record.len()));
    }
    let mut out = [0.0; N];
    for (i, name) in header.iter().enumerate() {
        out[i] = parse_field(record, i, name)?;
    }
    Ok(out)
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(r)
}

/// Reads a whole file strictly: any malformed row is an error.
fn read_table<R: Read, const N: usize>(r: R, header: &[&str; N]) -> AppResult<Vec<[f64; N]>> {
    let mut rdr = reader(r);
    check_header(&mut rdr, header)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        rows.push(parse_row(&rec, header).map_err(AppError::Input)?);
    }
    Ok(rows)
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn write_rows<W: Write>(w: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> AppResult<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header).map_err(csv_err)?;
    for row in rows {
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| AppError::Input(e.to_string()))
}

pub fn write_grid<W: Write>(w: W, grid: &SupportGrid) -> AppResult<()> {
    write_rows(w, &GRID_HEADER, grid.iter().map(|(u, c)| vec![fmt(u.angle()), fmt(c)]))
}

/// Reads a support grid; the angles must be the uniform grid `2πi/n`.
pub fn read_grid<R: Read>(r: R) -> AppResult<SupportGrid> {
    let rows = read_table(r, &GRID_HEADER)?;
    let n = rows.len();
    for (i, [angle, _]) in rows.iter().enumerate() {
        let want = UnitVector::on_grid(i, n).angle();
        if (angle - want).abs() > ANGLE_TOL {
            return Err(AppError::Input(format!(
                "line {}: angle {angle} is not direction {i} of a uniform {n}-direction grid",
                i + 2
            )));
        }
    }
    Ok(SupportGrid::new(rows.into_iter().map(|[_, c]| c).collect())?)
}

pub fn write_polygon<W: Write>(w: W, poly: &Polygon) -> AppResult<()> {
    write_rows(w, &POLYGON_HEADER, poly.vertices().iter().map(|p| vec![fmt(p.x), fmt(p.y)]))
}

pub fn read_polygon<R: Read>(r: R) -> AppResult<Polygon> {
    let rows = read_table(r, &POLYGON_HEADER)?;
    Ok(Polygon::new(rows.into_iter().map(|[x, y]| Point::new(x, y)).collect())?)
}

/// One row of the per-direction estimate dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRow {
    pub angle_rad: f64,
    pub c_value: f64,
    pub std_err: f64,
    pub n_paths: usize,
    pub censored_frac: f64,
}

pub fn write_estimates<W: Write>(w: W, rows: &[EstimateRow]) -> AppResult<()> {
    write_rows(
        w,
        &ESTIMATE_HEADER,
        rows.iter().map(|r| {
            vec![fmt(r.angle_rad), fmt(r.c_value), fmt(r.std_err), r.n_paths.to_string(), fmt(r.censored_frac)]
        }),
    )
}

pub fn read_estimates<R: Read>(r: R) -> AppResult<Vec<EstimateRow>> {
    let rows = read_table(r, &ESTIMATE_HEADER)?;
    rows.into_iter()
        .enumerate()
        .map(|(i, [a, c, s, n, f])| {
            if n < 0.0 || n.fract() != 0.0 {
                return Err(AppError::Input(format!("line {}, column n_paths: not a count: {n}", i + 2)));
            }
            Ok(EstimateRow { angle_rad: a, c_value: c, std_err: s, n_paths: n as usize, censored_frac: f })
        })
        .collect()
}

/// A met-ocean series read leniently.
#[derive(Debug, Clone)]
pub struct Ingest {
    pub series: MetOceanSeries,
    /// One message per row that could not be parsed.
    pub malformed: Vec<String>,
    /// Parsed rows removed for non-positive values or repeated timestamps.
    pub dropped: usize,
}

impl Ingest {
    /// Number of input rows that did not make it into the series.
    pub fn warning_count(&self) -> usize {
        self.malformed.len() + self.dropped
    }
}

/// Reads `t_hours,hs_m,tz_s`. Unparseable rows are skipped with a warning,
/// as are rows with non-positive values or repeated timestamps. A missing or
/// wrong header is an error.
pub fn read_series<R: Read>(r: R) -> AppResult<Ingest> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &SERIES_HEADER)?;
    let mut malformed = Vec::new();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        match parse_row(&rec, &SERIES_HEADER) {
            Ok([t, h, p]) => rows.push((t, h, p)),
            Err(msg) => malformed.push(msg),
        }
    }
    let (series, dropped) = MetOceanSeries::from_rows_lossy(rows);
    Ok(Ingest { series, malformed, dropped })
}

pub fn write_series<W: Write>(w: W, series: &MetOceanSeries) -> AppResult<()> {
    write_rows(w, &SERIES_HEADER, series.rows().map(|(t, h, p)| vec![fmt(t), fmt(h), fmt(p)]))
}

pub fn read_model<R: Read>(r: R) -> AppResult<SeaStateModel> {
    let model: SeaStateModel = serde_json::from_reader(r).map_err(|e| AppError::Input(format!("model JSON: {e}")))?;
    model.validate()?;
    Ok(model)
}

pub fn write_json<W: Write, T: serde::Serialize>(mut w: W, value: &T) -> AppResult<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| AppError::Input(e.to_string()))?;
    w.write_all(b"\n").map_err(|e| AppError::Input(e.to_string()))
}

pub fn open(path: &Path) -> AppResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| AppError::io(path, e))
}

pub fn create(path: &Path) -> AppResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| AppError::io(path, e))
}

/// Runs `f` on a buffered writer for `path` and flushes it.
pub fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> AppResult<()>) -> AppResult<()> {
    let mut w = create(path)?;
    f(&mut w)?;
    w.flush().map_err(|e| AppError::io(path, e))
}
