//! Canonical CSV/JSON serialization of sweep results.
//!
//! Floats are rendered with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 exactly, so re-importing an export reproduces the
//! records bit for bit. Line endings are LF; identical inputs produce
//! byte-identical files.

use std::path::Path;

use serde::Serialize;

use super::{ExperimentConfig, ScalingFit, TrialRecord};
use crate::error::{Error, Result};

pub(crate) const CSV_HEADER: &str =
    "n,trial,seed,sup_lower,sup_upper,max_abs_coeff,proxy_max,wall_time_s";

fn float_field(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn record_csv_line(r: &TrialRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.n,
        r.trial,
        r.seed,
        float_field(r.sup_lower),
        float_field(r.sup_upper),
        float_field(r.max_abs_coeff),
        r.proxy_max.map(float_field).unwrap_or_default(),
        r.wall_time_s.map(float_field).unwrap_or_default(),
    )
}

/// Header plus one line per record; empty input gives a header-only file.
pub fn records_csv_string(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 128 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&record_csv_line(r));
        out.push('\n');
    }
    out
}

pub fn write_records_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    std::fs::write(path, records_csv_string(records)).map_err(|e| Error::io(path, e))
}

fn parse_record_line(line: &str) -> Result<TrialRecord> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 8 {
        return Err(Error::validation(format!(
            "record line has {} fields, expected 8: {line:?}",
            fields.len()
        )));
    }
    let int = |s: &str, what: &str| -> Result<usize> {
        s.parse().map_err(|_| Error::validation(format!("bad {what} field {s:?}")))
    };
    let float = |s: &str, what: &str| -> Result<f64> {
        s.parse().map_err(|_| Error::validation(format!("bad {what} field {s:?}")))
    };
    let optional = |s: &str, what: &str| -> Result<Option<f64>> {
        if s.is_empty() { Ok(None) } else { float(s, what).map(Some) }
    };
    Ok(TrialRecord {
        n: int(fields[0], "n")?,
        trial: int(fields[1], "trial")?,
        seed: fields[2]
            .parse()
            .map_err(|_| Error::validation(format!("bad seed field {:?}", fields[2])))?,
        sup_lower: float(fields[3], "sup_lower")?,
        sup_upper: float(fields[4], "sup_upper")?,
        max_abs_coeff: float(fields[5], "max_abs_coeff")?,
        proxy_max: optional(fields[6], "proxy_max")?,
        wall_time_s: optional(fields[7], "wall_time_s")?,
    })
}

/// Strict parser for complete exports: the header line is required and every
/// record line must be well formed.
pub fn parse_records_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(Error::validation(format!(
                "records CSV must start with {CSV_HEADER:?}, found {other:?}"
            )))
        }
    }
    lines.filter(|l| !l.is_empty()).map(parse_record_line).collect()
}

pub fn read_records_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records_csv(&text)
}

/// Lenient parser for resume files: skips the header and any torn or
/// malformed line (an interrupted sweep may die mid-write).
pub(crate) fn parse_partial_records(text: &str) -> Vec<TrialRecord> {
    text.lines()
        .filter(|l| !l.is_empty() && *l != CSV_HEADER)
        .filter_map(|l| parse_record_line(l).ok())
        .collect()
}

#[derive(Serialize)]
struct JsonExport<'a> {
    config: &'a ExperimentConfig,
    records: &'a [TrialRecord],
    fits: &'a [ScalingFit],
}

/// Pretty-printed JSON document with fixed key order `config`, `records`,
/// `fits`. Non-finite floats (failed trials) render as null.
pub fn json_export_string(
    config: &ExperimentConfig,
    records: &[TrialRecord],
    fits: &[ScalingFit],
) -> String {
    let doc = JsonExport { config, records, fits };
    let mut text = serde_json::to_string_pretty(&doc)
        .expect("sweep export types always serialize");
    text.push('\n');
    text
}

pub fn write_json_export(
    config: &ExperimentConfig,
    records: &[TrialRecord],
    fits: &[ScalingFit],
    path: &Path,
) -> Result<()> {
    std::fs::write(path, json_export_string(config, records, fits))
        .map_err(|e| Error::io(path, e))
}
