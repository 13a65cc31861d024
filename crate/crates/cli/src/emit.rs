//! Report writers. `json_lines` puts every record on its own line of
//! `report.jsonl`; `csv` writes one file per record kind. Either way the
//! record files are byte-identical across reruns of the same config; the
//! wall-clock fields live only in `summary.json`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use rk_core::report::{csv_complex, serialize_complex_map};

use crate::config::RunConfig;
use crate::suites::{Record, SuiteRun};

pub const IDENTITY_COLS: &[&str] = &[
    "id", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "pass", "seed",
    "note",
];
pub const CHAIN_COLS: &[&str] = &[
    "case",
    "first",
    "second",
    "first_value_re",
    "first_value_im",
    "second_value_re",
    "second_value_im",
    "rel_diff",
    "tolerance",
    "pass",
];
pub const CALIBRATION_COLS: &[&str] = &[
    "lambda1_im",
    "lambda2_im",
    "lambda3_im",
    "tau_im",
    "ratio_re",
    "ratio_im",
    "rel_dev",
    "pass",
];
pub const RECIPROCITY_COLS: &[&str] = &[
    "index",
    "lambda1_im",
    "lambda2_im",
    "lambda3_im",
    "tau_im",
    "t",
    "value",
    "rel_dev",
    "pass",
];
pub const BUMP_COLS: &[&str] = &["family", "t", "abs_value", "scaled_value"];

pub fn cols_for(kind: &str) -> &'static [&'static str] {
    match kind {
        "identity" => IDENTITY_COLS,
        "chain_pair" => CHAIN_COLS,
        "calibration" => CALIBRATION_COLS,
        "reciprocity" => RECIPROCITY_COLS,
        "bump" => BUMP_COLS,
        _ => &[],
    }
}

struct ParamsCell<'a>(&'a BTreeMap<String, Complex64>);

impl Serialize for ParamsCell<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_complex_map(self.0, s)
    }
}

fn csv_row(record: &Record) -> Vec<String> {
    match record {
        Record::Identity(r) => {
            let [lre, lim] = csv_complex(r.lhs);
            let [rre, rim] = csv_complex(r.rhs);
            vec![
                r.id.to_string(),
                serde_json::to_string(&ParamsCell(&r.params)).unwrap_or_default(),
                lre,
                lim,
                rre,
                rim,
                r.abs_err.to_string(),
                r.rel_err.to_string(),
                r.pass.to_string(),
                r.seed.to_string(),
                r.note.clone().unwrap_or_default(),
            ]
        }
        Record::ChainPair(r) => {
            let [fre, fim] = csv_complex(r.first_value);
            let [sre, sim] = csv_complex(r.second_value);
            vec![
                r.case.clone(),
                r.first.to_string(),
                r.second.to_string(),
                fre,
                fim,
                sre,
                sim,
                r.rel_diff.to_string(),
                r.tolerance.to_string(),
                r.pass.to_string(),
            ]
        }
        Record::Calibration(r) => {
            let [rre, rim] = csv_complex(r.ratio);
            vec![
                r.lambda_im[0].to_string(),
                r.lambda_im[1].to_string(),
                r.lambda_im[2].to_string(),
                r.tau_im.to_string(),
                rre,
                rim,
                r.rel_dev.to_string(),
                r.pass.to_string(),
            ]
        }
        Record::Reciprocity(r) => vec![
            r.index.to_string(),
            r.lambda_im[0].to_string(),
            r.lambda_im[1].to_string(),
            r.lambda_im[2].to_string(),
            r.tau_im.to_string(),
            r.t.to_string(),
            r.value.to_string(),
            r.rel_dev.to_string(),
            r.pass.to_string(),
        ],
        Record::Bump(r) => vec![
            r.family.clone(),
            r.t.to_string(),
            r.abs_value.to_string(),
            r.scaled_value.to_string(),
        ],
    }
}

use crate::config::Format;

/// Write the record files and return their paths.
pub fn write_reports(
    dir: &Path,
    format: Format,
    records: &[Record],
) -> Result<Vec<PathBuf>, String> {
    std::fs::create_dir_all(dir)
        .map_err(|e| format!("cannot create output dir {}: {e}", dir.display()))?;
    let io = |e: std::io::Error| format!("cannot write report: {e}");
    match format {
        Format::JsonLines => {
            let path = dir.join("report.jsonl");
            let mut out = std::io::BufWriter::new(std::fs::File::create(&path).map_err(io)?);
            for rec in records {
                let line = serde_json::to_string(rec)
                    .map_err(|e| format!("cannot encode record: {e}"))?;
                writeln!(out, "{line}").map_err(io)?;
            }
            out.flush().map_err(io)?;
            Ok(vec![path])
        }
        Format::Csv => {
            // One file per record kind, kinds in first-appearance order.
            let mut kinds: Vec<&'static str> = Vec::new();
            for rec in records {
                if !kinds.contains(&rec.kind()) {
                    kinds.push(rec.kind());
                }
            }
            let mut paths = Vec::new();
            for kind in kinds {
                let path = dir.join(format!("{kind}.csv"));
                let mut w = csv::Writer::from_path(&path)
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                w.write_record(cols_for(kind))
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                for rec in records.iter().filter(|r| r.kind() == kind) {
                    w.write_record(csv_row(rec))
                        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
                }
                w.flush().map_err(io)?;
                paths.push(path);
            }
            Ok(paths)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub kind: &'static str,
    pub suite: &'static str,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    pub parallelism: usize,
    pub hard: bool,
    pub format: &'static str,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub tol_overrides: BTreeMap<String, f64>,
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reciprocity_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reciprocity_spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump_slope_origin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump_slope_scaled: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_ms: u64,
    pub unix_time_ms: u64,
}

impl Summary {
    pub fn build(cfg: &RunConfig, run: &SuiteRun, wall: Duration) -> Self {
        let unix_time_ms = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default()
            .as_millis() as u64;
        Summary {
            kind: "summary",
            suite: cfg.suite.as_str(),
            seed: cfg.seed,
            samples: cfg.samples,
            parallelism: cfg.parallelism,
            hard: cfg.hard,
            format: cfg.format.as_str(),
            tol_overrides: cfg.tol_overrides.clone(),
            records: run.records.len(),
            passed: run.passed_records(),
            failed: run.failed_records(),
            all_pass: run.all_pass(),
            calibration_constant: run.extras.calibration_constant,
            calibration_spread: run.extras.calibration_spread,
            reciprocity_mean: run.extras.reciprocity_mean,
            reciprocity_spread: run.extras.reciprocity_spread,
            bump_slope_origin: run.extras.bump_slope_origin,
            bump_slope_scaled: run.extras.bump_slope_scaled,
            error: run.error.clone(),
            wall_ms: wall.as_millis() as u64,
            unix_time_ms,
        }
    }
}

pub fn write_summary(dir: &Path, summary: &Summary) -> Result<PathBuf, String> {
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(summary)
        .map_err(|e| format!("cannot encode summary: {e}"))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

pub fn schema_text() -> String {
    let mut s = String::new();
    s.push_str("Report records, one JSON object (or CSV row) per check.\n");
    s.push_str("Complex values are {\"re\": .., \"im\": ..} objects in JSON and _re/_im column pairs in CSV.\n");
    s.push_str("json_lines format writes report.jsonl (one UTF-8 object per line); csv writes one file per record kind.\n\n");
    let kinds: [(&str, &str); 5] = [
        (
            "identity",
            "kind, id, params (name -> complex), lhs, rhs, abs_err, rel_err, pass, seed, note (only on evaluation failure)",
        ),
        (
            "chain_pair",
            "kind, case, first, second, first_value, second_value, rel_diff, tolerance, pass",
        ),
        (
            "calibration",
            "kind, lambda_im, tau_im, ratio, rel_dev, pass",
        ),
        (
            "reciprocity",
            "kind, index, lambda_im, tau_im, t, value, rel_dev, pass",
        ),
        ("bump", "kind, family, t, abs_value, scaled_value"),
    ];
    for (kind, json_fields) in kinds {
        s.push_str(&format!("{kind}\n"));
        s.push_str(&format!("  json fields: {json_fields}\n"));
        s.push_str(&format!(
            "  csv columns ({kind}.csv): {}\n",
            cols_for(kind).join(",")
        ));
    }
    s.push_str("\nsummary.json fields: kind, suite, seed, samples, parallelism, hard, format, tol_overrides (when overridden), records, passed, failed, all_pass, calibration_constant, calibration_spread, reciprocity_mean, reciprocity_spread, bump_slope_origin, bump_slope_scaled, error (when a suite aborted), wall_ms, unix_time_ms.\n");
    s.push_str("Record files are byte-identical for identical configs; timestamps appear only in summary.json.\n");
    s
}
