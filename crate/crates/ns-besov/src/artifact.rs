//! JSON and CSV artifact writers.
//!
//! Every artifact carries a [`Meta`] block: JSON files wrap their payload as
//! `{"meta": ..., "report": ...}`, CSV files start with `# key: value` lines.
//! Floats in CSV use 17 significant digits so values round-trip exactly.

use std::io::Write;
use std::path::Path;

use ns_besov_core::solver::{EmpiricalConstants, TrajectoryRecord};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub scenario: String,
    pub scenario_hash: String,
    pub core_version: &'static str,
    pub cli_version: &'static str,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub dt: f64,
    pub constants: EmpiricalConstants,
}

pub const CORE_VERSION: &str = ns_besov_core::VERSION;
pub const CLI_VERSION: &str = env!("CARGO_PKG_VERSION");

impl Meta {
    fn lines(&self) -> Vec<(String, String)> {
        let c = &self.constants;
        vec![
            ("scenario".into(), self.scenario.clone()),
            ("scenario_hash".into(), self.scenario_hash.clone()),
            ("core_version".into(), self.core_version.into()),
            ("cli_version".into(), self.cli_version.into()),
            ("N".into(), self.n.to_string()),
            ("M".into(), self.m.to_string()),
            ("dt".into(), fmt_f64(self.dt)),
            ("norm_inv_d0phi".into(), fmt_f64(c.norm_inv_d0phi)),
            ("c1".into(), fmt_f64(c.c1)),
            ("c2".into(), fmt_f64(c.c2)),
            ("c3".into(), fmt_f64(c.c3)),
            (
                "lemma_c".into(),
                c.lemma_c.map(fmt_f64).unwrap_or_else(|| "none".into()),
            ),
            ("constants_estimated".into(), c.estimated.to_string()),
        ]
    }
}

/// 17 significant digits in scientific notation.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

#[derive(Serialize)]
struct Wrapped<'a, T: Serialize> {
    meta: &'a Meta,
    report: &'a T,
}

pub fn json_string<T: Serialize>(meta: &Meta, report: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Wrapped { meta, report })?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, meta: &Meta, report: &T) -> Result<(), CliError> {
    std::fs::write(path, json_string(meta, report)?)?;
    Ok(())
}

/// A table of floats with named columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn from_record(record: &TrajectoryRecord) -> Self {
        let mut header = vec![String::from("t")];
        header.extend(record.columns.iter().map(|(n, _)| n.clone()));
        let rows = (0..record.times.len())
            .map(|i| {
                let mut row = vec![record.times[i]];
                row.extend(record.columns.iter().map(|(_, v)| v[i]));
                row
            })
            .collect();
        Self { header, rows }
    }
}

pub fn csv_bytes(
    meta: Option<&Meta>,
    header: &[String],
    rows: &[Vec<String>],
) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    if let Some(meta) = meta {
        for (k, v) in meta.lines() {
            writeln!(out, "# {k}: {v}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn write_table(path: &Path, meta: &Meta, table: &Table) -> Result<(), CliError> {
    let rows: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| r.iter().copied().map(fmt_f64).collect())
        .collect();
    std::fs::write(path, csv_bytes(Some(meta), &table.header, &rows)?)?;
    Ok(())
}

pub fn write_rows(
    path: &Path,
    meta: Option<&Meta>,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let header: Vec<String> = header.iter().map(|s| s.to_string()).collect();
    std::fs::write(path, csv_bytes(meta, &header, rows)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }
}
