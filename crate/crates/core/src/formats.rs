//! Text formats: entropy-profile CSV, shape-parameter lists, and the JSON
//! report document with its run manifest.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::basis::{EntropyPoint, OperatorParams};
use crate::catalog::ProfileRow;
use crate::error::{Error, Result};
use crate::report::ViolationReport;
use crate::verifier::{NumericalFailure, SuiteReport};

/// Column order of an entropy-profile CSV.
pub const PROFILE_HEADER: [&str; 8] = ["x", "S", "V", "renyi", "tsallis", "dS", "d2S", "logconv_margin"];

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

/// Writes a profile with a header row and LF line endings. Missing derivative
/// values are written as empty cells.
pub fn write_profile_csv<W: Write>(rows: &[ProfileRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(PROFILE_HEADER).map_err(csv_error)?;
    let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
    for r in rows {
        let p = &r.point;
        w.write_record([
            format_float(p.x),
            format_float(p.s),
            format_float(p.v),
            format_float(p.renyi),
            format_float(p.tsallis),
            opt(r.ds),
            opt(r.d2s),
            opt(r.logconv_margin),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(|e| Error::Parse(format!("csv: {e}")))
}

pub fn profile_csv_string(rows: &[ProfileRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_profile_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_float(cell: &str, line: u64, column: &str) -> Result<f64> {
    cell.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}, column {column}: invalid number '{cell}'")))
}

/// Parses a profile CSV as written by [`write_profile_csv`]. The header must
/// match [`PROFILE_HEADER`] exactly; derivative cells may be empty.
pub fn parse_profile_csv(text: &str) -> Result<Vec<ProfileRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.iter().ne(PROFILE_HEADER) {
        return Err(Error::Parse(format!(
            "unexpected header '{}', expected '{}'",
            header.iter().collect::<Vec<_>>().join(","),
            PROFILE_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize| parse_float(&rec[i], line, PROFILE_HEADER[i]);
        let opt = |i: usize| -> Result<Option<f64>> {
            if rec[i].trim().is_empty() {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        rows.push(ProfileRow {
            point: EntropyPoint {
                x: num(0)?,
                s: num(1)?,
                v: num(2)?,
                renyi: num(3)?,
                tsallis: num(4)?,
            },
            ds: opt(5)?,
            d2s: opt(6)?,
            logconv_margin: opt(7)?,
        });
    }
    Ok(rows)
}

/// Parses a comma-separated list of shape parameters such as `-1,0,1`.
/// Each value must be `-1` or nonnegative.
pub fn parse_shape_list(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Parse("empty shape list".into()));
    }
    text.split(',')
        .map(|part| {
            let c = part
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("invalid shape parameter '{part}'")))?;
            OperatorParams::new(1, c).map(|p| p.c())
        })
        .collect()
}

/// Violation counts echoed in every manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub unconditional: usize,
    pub conditional: usize,
    pub grazing: usize,
}

impl Counts {
    pub fn of(report: &SuiteReport) -> Self {
        Self {
            unconditional: report.violations.len(),
            conditional: report.findings.len(),
            grazing: report.grazing.len(),
        }
    }
}

/// Provenance of one output: the command, its resolved parameters, the tool
/// version, wall time, and violation counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub version: String,
    pub wall_time_seconds: f64,
    pub counts: Counts,
}

impl RunManifest {
    pub fn new(command: &str, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_seconds: 0.0,
            counts: Counts::default(),
        }
    }
}

/// JSON document written by `verify` and the scan subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub manifest: RunManifest,
    pub findings: Vec<ViolationReport>,
    pub violations: Vec<ViolationReport>,
    pub grazing: Vec<ViolationReport>,
    pub numerical_failures: Vec<NumericalFailure>,
}

impl ReportDocument {
    pub fn new(mut manifest: RunManifest, report: SuiteReport) -> Self {
        manifest.counts = Counts::of(&report);
        Self {
            manifest,
            findings: report.findings,
            violations: report.violations,
            grazing: report.grazing,
            numerical_failures: report.numerical_failures,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(format!("json: {e}")))
    }
}

pub fn parse_report_json(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("json: {e}")))
}
