//! Report emission: one CSV of per-cell rows (byte-identical across reruns
//! of the same config) and one JSON summary (identical except wall time).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::LabError;

/// Per-run result: frozen column schema, stringified rows, and the summary
/// counts keyed to the claim the experiment checks.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub claim: String,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Version of the frozen per-kind CSV column schemas.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
struct Summary<'a> {
    schema_version: u32,
    claim: &'a str,
    kind: &'a str,
    system: &'a str,
    rows: usize,
    pass: usize,
    fail: usize,
    inconclusive: usize,
    tolerances: &'a BTreeMap<String, f64>,
    notes: &'a [String],
    seed: u64,
    config: &'a ExperimentConfig,
    version: &'a str,
    wall_time_ms: u128,
}

/// Stringify a float with the shortest round-trip representation (stable
/// for equal bit patterns, so reruns emit identical bytes).
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x}")
    }
}

pub fn render_csv(header: &[&'static str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Write the CSV and the JSON summary; creates parent directories.
pub fn write_outputs(
    config: &ExperimentConfig,
    outcome: &RunOutcome,
    wall_time_ms: u128,
) -> Result<(), LabError> {
    let csv = render_csv(&outcome.header, &outcome.rows);
    write_file(&config.output.csv, &csv)?;
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        claim: &outcome.claim,
        kind: &config.kind,
        system: &config.system.name,
        rows: outcome.rows.len(),
        pass: outcome.pass,
        fail: outcome.fail,
        inconclusive: outcome.inconclusive,
        tolerances: &outcome.tolerances,
        notes: &outcome.notes,
        seed: config.seed,
        config,
        version: env!("CARGO_PKG_VERSION"),
        wall_time_ms,
    };
    let json = serde_json::to_string_pretty(&summary)
        .map_err(|e| LabError::Io(format!("summary serialisation: {e}")))?;
    write_file(&config.output.summary, &json)?;
    Ok(())
}

fn write_file(path: &str, contents: &str) -> Result<(), LabError> {
    let path = Path::new(path);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| LabError::Io(format!("creating {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents).map_err(|e| LabError::Io(format!("writing {}: {e}", path.display())))
}
