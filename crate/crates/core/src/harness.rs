//! Trials, per-`n` aggregation and log-log rate fits.
//!
//! Execution order never matters: every trial is a pure function of
//! `(config, n, trial)` and [`summarize`] folds reports in `(n, trial)` order.

use alloc::format;
use alloc::vec::Vec;

use crate::classifier::PluginClassifier;
use crate::distributions::{rate_exponent, Branch, DistributionSpec, RateExponent, RiskMode};
use crate::error::{check_delta, Error, Result};
use crate::num;
use crate::rng::derive_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub spec: DistributionSpec,
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub delta: f64,
    pub risk_mode: RiskMode,
    pub base_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        check_delta(self.delta)?;
        if self.n_grid.is_empty() || self.n_grid[0] == 0 {
            return Err(Error::Parameter("n_grid must be non-empty with positive sizes".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(format!("n_grid {:?} must be strictly increasing", self.n_grid)));
        }
        if self.trials_per_n == 0 {
            return Err(Error::Parameter("trials_per_n must be at least 1".into()));
        }
        if self.risk_mode == RiskMode::Exact && !self.spec.is_atomic() {
            return Err(Error::NotAtomic);
        }
        if let RiskMode::MonteCarlo(0) = self.risk_mode {
            return Err(Error::Parameter("Monte-Carlo risk needs at least one draw".into()));
        }
        Ok(())
    }

    /// Every `(n, trial)` cell in aggregation order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.n_grid.iter().flat_map(|&n| (0..self.trials_per_n).map(move |t| (n, t))).collect()
    }

    pub fn theoretical(&self) -> RateExponent {
        rate_exponent(&self.spec.gamma)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialReport {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub pi0_hat: f64,
    pub pi1_hat: f64,
    pub threshold: f64,
    pub excess_risk: f64,
    /// Monte-Carlo standard error; `None` for exact risk.
    pub stderr: Option<f64>,
    /// Filled in by callers that time trials; `0` otherwise.
    pub wall_ms: f64,
}

/// Samples a corrupted data set, fits the classifier at `cfg.delta` and
/// evaluates its excess risk.
pub fn run_trial(cfg: &ExperimentConfig, n: usize, trial: usize) -> Result<TrialReport> {
    let seed = derive_seed(cfg.base_seed, n as u64, trial as u64);
    let sample = cfg.spec.sample_corrupted(n, seed)?;
    let clf = PluginClassifier::fit(sample, cfg.spec.metric(), cfg.delta)?;
    let risk = cfg.spec.excess_risk(|x| clf.predict(x), cfg.risk_mode, seed)?;
    Ok(TrialReport {
        n,
        trial,
        seed,
        pi0_hat: clf.rates().pi0,
        pi1_hat: clf.rates().pi1,
        threshold: clf.threshold(),
        excess_risk: risk.value,
        stderr: risk.stderr,
        wall_ms: 0.0,
    })
}

/// Median excess risk of one sample size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellMedian {
    pub n: usize,
    pub trials: usize,
    pub median: f64,
    /// A zero median cannot enter the log-log fit.
    pub censored: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The exponent the slope should approach in magnitude.
    pub theoretical: f64,
    pub branch: Branch,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub cells: usize,
    pub medians: Vec<CellMedian>,
    /// `None` when fewer than three sample sizes have a positive median.
    pub fit: Option<RateFit>,
    pub theoretical: RateExponent,
}

/// Midpoint median; `NaN` for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Ordinary least squares of `y` on `x`: `(slope, intercept, r_squared)`.
pub fn ols(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) } else { 1.0 };
    Some((slope, intercept, r_squared))
}

/// Per-`n` medians and the fit of `ln median` on `ln n`.
pub fn summarize(reports: &[TrialReport], theoretical: RateExponent) -> SweepSummary {
    let mut sorted = reports.to_vec();
    sorted.sort_by(|a, b| (a.n, a.trial).cmp(&(b.n, b.trial)));
    let mut medians = Vec::new();
    for group in sorted.chunk_by(|a, b| a.n == b.n) {
        let risks: Vec<f64> = group.iter().map(|r| r.excess_risk).collect();
        let m = median(&risks);
        medians.push(CellMedian { n: group[0].n, trials: group.len(), median: m, censored: !(m > 0.0) });
    }
    let points: Vec<(f64, f64)> =
        medians.iter().filter(|c| !c.censored).map(|c| (num::ln(c.n as f64), num::ln(c.median))).collect();
    let fit = if points.len() >= 3 {
        ols(&points).map(|(slope, intercept, r_squared)| RateFit {
            slope,
            intercept,
            r_squared,
            theoretical: theoretical.value,
            branch: theoretical.branch,
            points: points.len(),
        })
    } else {
        None
    };
    SweepSummary { cells: reports.len(), medians, fit, theoretical }
}

/// Runs every cell sequentially.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<(Vec<TrialReport>, SweepSummary)> {
    cfg.validate()?;
    let reports = cfg.cells().into_iter().map(|(n, t)| run_trial(cfg, n, t)).collect::<Result<Vec<_>>>()?;
    let summary = summarize(&reports, cfg.theoretical());
    Ok((reports, summary))
}
