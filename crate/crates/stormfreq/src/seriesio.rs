//! Annual and monthly series files.
//!
//! Annual CSV: header `year,value`, a blank value marks a gap year.
//! Monthly CSV: header `year,month,value`.
//! PSMSL annual: `year; value_mm; flag; missing_days`, `-99999` for missing.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use stormfreq_core::{AnnualSeries, MonthlyObservation, MonthlySeries, Observation, SeriesKind};

use crate::error::{Error, Result};

pub const PSMSL_MISSING: i64 = -99999;

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn station_from_path(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn parse_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, message: message.into() }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader)
}

fn check_header(path: &Path, headers: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(parse_error(path, 1, format!("expected header `{}`, found `{}`", expected.join(","), got.join(","))));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(path: &Path, line: u64, name: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| parse_error(path, line, format!("bad {name} `{raw}`")))
}

/// Reads an annual CSV. The station id is the file stem.
pub fn load_annual_csv(path: impl AsRef<Path>, kind: SeriesKind) -> Result<AnnualSeries> {
    let path = path.as_ref();
    parse_annual_csv(open(path)?, path, kind)
}

/// `path` is only used for the station id and in messages.
pub fn parse_annual_csv<R: Read>(reader: R, path: &Path, kind: SeriesKind) -> Result<AnnualSeries> {
    let mut rdr = csv_reader(reader);
    let headers = rdr.headers().map_err(|e| Error::Csv { path: path.to_path_buf(), source: e })?.clone();
    check_header(path, &headers, &["year", "value"])?;
    let mut observations = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv { path: path.to_path_buf(), source: e })?;
        let line = record.position().map_or(0, |p| p.line());
        let year: i32 = field(path, line, "year", &record[0])?;
        let raw = &record[1];
        if raw.is_empty() {
            continue;
        }
        observations.push(Observation::new(year, field(path, line, "value", raw)?));
    }
    AnnualSeries::from_unsorted(station_from_path(path), kind, observations)
        .map_err(|e| Error::input(path.display().to_string(), e))
}

/// Reads a PSMSL annual mean file, converting mm to cm and adding
/// `datum_offset_cm`.
pub fn load_psmsl_annual(path: impl AsRef<Path>, datum_offset_cm: f64) -> Result<AnnualSeries> {
    let path = path.as_ref();
    parse_psmsl_annual(BufReader::new(open(path)?), path, datum_offset_cm)
}

pub fn parse_psmsl_annual<R: BufRead>(reader: R, path: &Path, datum_offset_cm: f64) -> Result<AnnualSeries> {
    let mut observations = Vec::new();
    let mut rows = 0;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let lineno = i as u64 + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(';').map(str::trim).collect();
        if cols.len() < 2 {
            return Err(parse_error(path, lineno, "expected `year; value; flag; missing_days`"));
        }
        let year: i32 = field(path, lineno, "year", cols[0])?;
        let mm: i64 = field(path, lineno, "value", cols[1])?;
        rows += 1;
        if mm == PSMSL_MISSING {
            continue;
        }
        observations.push(Observation::new(year, mm as f64 / 10.0 + datum_offset_cm));
    }
    if observations.is_empty() {
        return Err(parse_error(path, rows, "no valid values"));
    }
    AnnualSeries::from_unsorted(station_from_path(path), SeriesKind::AnnualMean, observations)
        .map_err(|e| Error::input(path.display().to_string(), e))
}

/// Reads a monthly CSV. The label is the file stem.
pub fn load_monthly_csv(path: impl AsRef<Path>) -> Result<MonthlySeries> {
    let path = path.as_ref();
    let mut rdr = csv_reader(open(path)?);
    let headers = rdr.headers().map_err(|e| Error::Csv { path: path.to_path_buf(), source: e })?.clone();
    check_header(path, &headers, &["year", "month", "value"])?;
    let mut observations = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Csv { path: path.to_path_buf(), source: e })?;
        let line = record.position().map_or(0, |p| p.line());
        if record[2].is_empty() {
            continue;
        }
        observations.push(MonthlyObservation {
            year: field(path, line, "year", &record[0])?,
            month: field(path, line, "month", &record[1])?,
            value: field(path, line, "value", &record[2])?,
        });
    }
    if observations.is_empty() {
        return Err(Error::input(path.display().to_string(), stormfreq_core::Error::EmptySeries));
    }
    observations.sort_by_key(|o| (o.year, o.month));
    MonthlySeries::new(station_from_path(path), observations)
        .map_err(|e| Error::input(path.display().to_string(), e))
}

/// Writes `year,value` rows. Values use the shortest representation that
/// parses back to the same number.
pub fn write_annual_csv<W: Write>(mut out: W, series: &AnnualSeries) -> std::io::Result<()> {
    writeln!(out, "year,value")?;
    for obs in series.observations() {
        writeln!(out, "{},{}", obs.year, obs.value)?;
    }
    Ok(())
}

pub fn save_annual_csv(path: impl AsRef<Path>, series: &AnnualSeries) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_annual_csv(&mut out, series).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}
