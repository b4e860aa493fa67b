//! One function per subcommand, each returning the JSON document the
//! executable prints. All numerics come from `noiseknn-core`.

use std::path::Path;

use noiseknn_core::distributions::{rate_exponent, GammaParams};
use noiseknn_core::harness::ExperimentConfig;
use noiseknn_core::lepski::lepski_estimate_indexed;
use noiseknn_core::supremum::extremum_estimates;
use noiseknn_core::{estimate_noise_rates, LepskiConfig, NeighborIndex, PluginClassifier, SupEstimate};
use serde_json::{json, Value};

use crate::data::{dataset_to_jsonl, point_to_json, read_dataset, read_queries, write_file};
use crate::error::Result;
use crate::report::{emit_report, exponent_json, summary_json, SUMMARY_FILE, TRIALS_FILE};
use crate::spec::read_spec;
use crate::sweep::{run_sweep, SweepOptions};

/// Draws `n` records from a spec file and writes them as a data file.
pub fn gen(spec_path: &Path, n: usize, seed: u64, clean: bool, out: &Path) -> Result<Value> {
    let spec = read_spec(spec_path)?;
    let ds = if clean { spec.sample_clean(n, seed)? } else { spec.sample_corrupted(n, seed)? };
    write_file(out, &dataset_to_jsonl(&ds, &spec.metric()))?;
    let noise = spec.noise();
    Ok(json!({
        "out": out.display().to_string(),
        "family": spec.name(),
        "n": n,
        "seed": seed,
        "labels": if clean { "clean" } else { "corrupted" },
        "pi0": noise.pi0,
        "pi1": noise.pi1,
        "positive_fraction": ds.mean_response(),
    }))
}

/// Lepski estimates at every query point.
pub fn regress(data: &Path, queries: &Path, delta: f64) -> Result<Value> {
    let (ds, metric) = read_dataset(data)?;
    let qs = read_queries(queries, &metric, &ds)?;
    let cfg = LepskiConfig::new(delta)?;
    let index = NeighborIndex::new(&ds, &metric)?;
    let mut estimates = Vec::with_capacity(qs.len());
    for x in &qs {
        let e = lepski_estimate_indexed(&index, x, &cfg)?;
        estimates.push(json!({
            "x": point_to_json(x),
            "value": e.value,
            "k_selected": e.k_selected,
            "intervals_checked": e.intervals_checked,
            "fallback_used": e.fallback_used,
            "k_min": cfg.k_min(ds.len()),
            "k_max": cfg.k_max(ds.len()),
        }));
    }
    Ok(json!({ "delta": delta, "n": ds.len(), "estimates": estimates }))
}

fn sup_json(e: &SupEstimate) -> Value {
    json!({ "value": e.value, "argmax_index": e.argmax_index, "k_at_max": e.k_at_max })
}

/// `M_hat(f)` and `M_hat(1 - f)` over the data file's responses.
pub fn supest(data: &Path, delta: f64) -> Result<Value> {
    let (ds, metric) = read_dataset(data)?;
    let (sup, complement) = extremum_estimates(&ds, &metric, delta)?;
    Ok(json!({
        "delta": delta,
        "n": ds.len(),
        "sup": sup_json(&sup),
        "complement": sup_json(&complement),
        "inf_lower": 1.0 - complement.value,
    }))
}

/// Noise-rate estimates with every extremum estimate at `delta`.
pub fn noise_est(data: &Path, delta: f64) -> Result<Value> {
    let (ds, metric) = read_dataset(data)?;
    let r = estimate_noise_rates(&ds, &metric, delta)?;
    Ok(json!({
        "delta": delta,
        "n": ds.len(),
        "pi0_hat": r.pi0,
        "pi1_hat": r.pi1,
        "raw_pi0": r.raw_pi0,
        "raw_pi1": r.raw_pi1,
        "clipped": r.clipped,
        "sum_ok": r.sum_ok,
    }))
}

/// Fits the plug-in classifier and predicts every query point.
pub fn classify(data: &Path, queries: &Path, delta: f64) -> Result<Value> {
    let (ds, metric) = read_dataset(data)?;
    let qs = read_queries(queries, &metric, &ds)?;
    let n = ds.len();
    let clf = PluginClassifier::fit(ds, metric, delta)?;
    let mut predictions = Vec::with_capacity(qs.len());
    for x in &qs {
        let e = clf.regression_estimate(x)?;
        let corrected = clf.correct(e.value).ok();
        predictions.push(json!({
            "x": point_to_json(x),
            "label": clf.decide(e.value),
            "eta_tilde_hat": e.value,
            "k_selected": e.k_selected,
            "eta_hat": corrected.map(|c| c.value),
            "eta_hat_unclamped": corrected.map(|c| c.unclamped),
        }));
    }
    let r = clf.rates();
    Ok(json!({
        "delta": delta,
        "query_delta": clf.query_delta(),
        "n": n,
        "pi0_hat": r.pi0,
        "pi1_hat": r.pi1,
        "clipped": r.clipped,
        "sum_ok": r.sum_ok,
        "threshold": clf.threshold(),
        "predictions": predictions,
    }))
}

/// Runs a sweep, writes `trials.csv` and `summary.json` into `out_dir` and
/// returns the summary.
pub fn sweep(cfg: &ExperimentConfig, opts: &SweepOptions, out_dir: &Path) -> Result<Value> {
    let (reports, summary) = run_sweep(cfg, opts)?;
    emit_report(&reports, &summary, out_dir)?;
    let mut doc = summary_json(&summary);
    doc["trials_csv"] = json!(out_dir.join(TRIALS_FILE).display().to_string());
    doc["summary_json"] = json!(out_dir.join(SUMMARY_FILE).display().to_string());
    Ok(doc)
}

/// The rate exponent with its active branch.
pub fn exponent(g: &GammaParams) -> Value {
    exponent_json(&rate_exponent(g))
}
