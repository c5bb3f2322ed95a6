use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A record that can be written as a CSV row.
pub trait Row {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<String>;
}

/// 17 significant digits, enough to recover every `f64` exactly.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn write_csv<R: Row>(out: impl Write, rows: &[R]) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(R::header())?;
    for r in rows {
        w.write_record(r.cells())?;
    }
    w.flush()
}

fn write_json<T: Serialize + ?Sized>(mut out: impl Write, doc: &T) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, doc)?;
    writeln!(out)
}

/// Writes a single record: a flat JSON object or a one-row CSV table.
pub fn emit_one<R: Row + Serialize>(format: Format, row: &R) -> io::Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Json => write_json(out, row),
        Format::Csv => write_csv(out, std::slice::from_ref(row)),
    }
}

/// Writes a table: a JSON array of objects or a CSV table.
pub fn emit_rows<R: Row + Serialize>(format: Format, rows: &[R]) -> io::Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Json => write_json(out, rows),
        Format::Csv => write_csv(out, rows),
    }
}

#[derive(Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
    pub method: &'static str,
}

impl From<wavebounds::ProbEstimate> for Estimate {
    fn from(p: wavebounds::ProbEstimate) -> Self {
        Self {
            value: p.value,
            std_err: p.std_err,
            method: p.method.as_str(),
        }
    }
}

impl Row for Estimate {
    fn header() -> &'static [&'static str] {
        &["value", "std_err", "method"]
    }

    fn cells(&self) -> Vec<String> {
        vec![num(self.value), num(self.std_err), self.method.to_string()]
    }
}

#[derive(Debug, Serialize)]
pub struct CurveRow {
    pub b: f64,
    pub upper: f64,
    pub lower: f64,
}

impl Row for CurveRow {
    fn header() -> &'static [&'static str] {
        &["b", "upper", "lower"]
    }

    fn cells(&self) -> Vec<String> {
        vec![num(self.b), num(self.upper), num(self.lower)]
    }
}

/// One speed pair of the `field` command.
#[derive(Debug, Serialize)]
pub struct FieldRow {
    pub c1: f64,
    pub c2: f64,
    pub covariance: f64,
    pub std_err: f64,
    /// `(t²/4) min(1/c1, 1/c2)`
    pub exact: f64,
    /// Exact covariance of the discretised field.
    pub grid_exact: f64,
}

impl Row for FieldRow {
    fn header() -> &'static [&'static str] {
        &["c1", "c2", "covariance", "std_err", "exact", "grid_exact"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.c1),
            num(self.c2),
            num(self.covariance),
            num(self.std_err),
            num(self.exact),
            num(self.grid_exact),
        ]
    }
}

#[derive(Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckRow>,
}

struct SuiteCheck<'a>(&'a str, &'a CheckRow);

impl Row for SuiteCheck<'_> {
    fn header() -> &'static [&'static str] {
        &["suite", "name", "pass", "detail"]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.0.to_string(),
            self.1.name.clone(),
            self.1.pass.to_string(),
            self.1.detail.clone(),
        ]
    }
}

pub fn emit_report(format: Format, report: &Report) -> io::Result<()> {
    let out = io::stdout().lock();
    match format {
        Format::Json => write_json(out, report),
        Format::Csv => {
            let rows: Vec<SuiteCheck> = report.checks.iter().map(|c| SuiteCheck(&report.suite, c)).collect();
            write_csv(out, &rows)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.220_960_574_271_784e-16, -2.5e300, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(f64::NEG_INFINITY), "-inf");
    }
}
