use std::io::{self, Write};

use serde::Serialize;

use crate::args::Format;

/// A command result: serialized whole as JSON, or flattened to a CSV table.
pub trait Report: Serialize {
    fn csv_header(&self) -> &'static [&'static str];
    fn csv_rows(&self) -> Vec<Vec<String>>;
}

/// 17 significant digits, enough to round-trip any f64.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn emit<R: Report>(report: &R, format: Format, out: &mut impl Write) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, report)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "{}", report.csv_header().join(","))?;
            for row in report.csv_rows() {
                writeln!(out, "{}", row.join(","))?;
            }
        }
    }
    out.flush()
}
