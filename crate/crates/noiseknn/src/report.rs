//! Per-trial CSV and the JSON sweep summary.
//!
//! Floats are written as shortest round-trip decimals, so identical inputs
//! give identical bytes.

use std::path::Path;

use noiseknn_core::distributions::RateExponent;
use noiseknn_core::harness::{SweepSummary, TrialReport};
use serde_json::{json, Value};

use crate::data::write_file;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = ["n", "trial", "seed", "pi0_hat", "pi1_hat", "threshold", "excess_risk", "stderr", "wall_ms"];

pub const TRIALS_FILE: &str = "trials.csv";
pub const SUMMARY_FILE: &str = "summary.json";

pub fn trials_csv(reports: &[TrialReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.pi0_hat.to_string(),
            r.pi1_hat.to_string(),
            r.threshold.to_string(),
            r.excess_risk.to_string(),
            r.stderr.map(|s| s.to_string()).unwrap_or_default(),
            r.wall_ms.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

/// Parses a CSV written by [`trials_csv`].
pub fn parse_trials_csv(path: &Path, text: &str) -> Result<Vec<TrialReport>> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| Error::parse(path, 1, e.to_string()))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::parse(path, 1, format!("expected header {}", CSV_HEADER.join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| Error::parse(path, line, e.to_string()))?;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let bad = |j: usize| Error::parse(path, line, format!("column {} = {:?} is malformed", CSV_HEADER[j], field(j)));
        let int = |j: usize| field(j).parse::<u64>().map_err(|_| bad(j));
        let real = |j: usize| field(j).parse::<f64>().map_err(|_| bad(j));
        out.push(TrialReport {
            n: int(0)? as usize,
            trial: int(1)? as usize,
            seed: int(2)?,
            pi0_hat: real(3)?,
            pi1_hat: real(4)?,
            threshold: real(5)?,
            excess_risk: real(6)?,
            stderr: if field(7).is_empty() { None } else { Some(real(7)?) },
            wall_ms: real(8)?,
        });
    }
    Ok(out)
}

pub fn exponent_json(t: &RateExponent) -> Value {
    json!({
        "exponent": t.value,
        "branch": t.branch.as_str(),
        "classification_exponent": t.classification,
        "noise_exponent": t.noise,
        "upper_bound_applies": t.upper_bound_applies,
    })
}

/// Medians are nonincreasing along the grid (censored cells included).
pub fn medians_nonincreasing(s: &SweepSummary) -> bool {
    s.medians.windows(2).all(|w| w[1].median <= w[0].median)
}

pub fn summary_json(s: &SweepSummary) -> Value {
    let medians: Vec<Value> = s
        .medians
        .iter()
        .map(|c| json!({ "n": c.n, "trials": c.trials, "median_excess_risk": c.median, "censored": c.censored }))
        .collect();
    let fit = s.fit.map(|f| {
        json!({ "slope": f.slope, "intercept": f.intercept, "r_squared": f.r_squared, "points": f.points })
    });
    json!({
        "cells": s.cells,
        "medians": medians,
        "monotone_medians": medians_nonincreasing(s),
        "fit": fit,
        "theoretical": exponent_json(&s.theoretical),
        "theoretical_exponent": s.theoretical.value,
        "branch": s.theoretical.branch.as_str(),
    })
}

pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serialisable");
    s.push('\n');
    s
}

/// Writes `trials.csv` and `summary.json` into `dir`, creating it if needed.
pub fn emit_report(reports: &[TrialReport], summary: &SweepSummary, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_file(&dir.join(TRIALS_FILE), &trials_csv(reports))?;
    write_file(&dir.join(SUMMARY_FILE), &to_pretty(&summary_json(summary)))
}
