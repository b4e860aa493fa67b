//! The plug-in classifier for class-conditional label noise.
//!
//! Fitting estimates both noise rates from the corrupted sample at
//! confidence `delta / 3` each. Prediction estimates the corrupted regression
//! function at the query with Lepski's rule at confidence `delta^2 / 3` and
//! compares it with the shifted threshold `(1 + pi0_hat - pi1_hat) / 2`.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use alloc::vec::Vec;

use crate::lepski::{estimate_streaming, halfwidth_table, LepskiConfig, LepskiEstimate};
use crate::metric::{Metric, Point};
use crate::neighbors::{NeighborIndex, SortedLine};
use crate::supremum::{noise_rates_indexed, NoiseRates};

/// Largest double strictly below one half.
const BELOW_HALF: f64 = 0.5f64.next_down();

#[derive(Clone, Debug)]
pub struct PluginClassifier {
    sample: Dataset,
    metric: Metric,
    line: Option<SortedLine>,
    /// Lepski band half-widths at the query confidence.
    bands: Vec<f64>,
    delta: f64,
    rates: NoiseRates,
    threshold: f64,
    /// `1 - pi0_hat - pi1_hat`.
    scale: f64,
}

/// Ratio-corrected estimate of the clean regression function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectedRegression {
    /// Clamped to `[0, 1]` for reporting.
    pub value: f64,
    pub unclamped: f64,
}

impl PluginClassifier {
    /// Fits noise rates on a sample with binary (corrupted) labels.
    pub fn fit(sample: Dataset, metric: Metric, delta: f64) -> Result<Self> {
        LepskiConfig::new(delta)?;
        sample.check_binary()?;
        let rates = {
            let index = NeighborIndex::new(&sample, &metric)?;
            noise_rates_indexed(&index, delta / 3.0)?
        };
        Self::with_rates(sample, metric, delta, rates)
    }

    /// Builds a classifier around externally supplied rates.
    pub fn with_rates(sample: Dataset, metric: Metric, delta: f64, rates: NoiseRates) -> Result<Self> {
        LepskiConfig::new(delta)?;
        for p in sample.points() {
            metric.check_point(p)?;
        }
        let line = SortedLine::build(&sample, &metric);
        let bands = halfwidth_table(sample.len(), &LepskiConfig::new(delta * delta / 3.0)?);
        Ok(PluginClassifier {
            bands,
            threshold: 0.5 + 0.5 * (rates.pi0 - rates.pi1),
            scale: 1.0 - (rates.pi0 + rates.pi1),
            sample,
            metric,
            line,
            delta,
            rates,
        })
    }

    pub fn sample(&self) -> &Dataset {
        &self.sample
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rates(&self) -> &NoiseRates {
        &self.rates
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Confidence used for each per-query regression estimate.
    pub fn query_delta(&self) -> f64 {
        self.delta * self.delta / 3.0
    }

    pub fn index(&self) -> NeighborIndex<'_> {
        NeighborIndex::with_line(&self.sample, &self.metric, self.line.as_ref())
    }

    /// Lepski estimate of the corrupted regression function at `x`.
    pub fn regression_estimate(&self, x: &Point) -> Result<LepskiEstimate> {
        let cfg = LepskiConfig::new(self.query_delta())?;
        estimate_streaming(&self.index(), x, &cfg, Some(&self.bands))
    }

    /// `1` iff the estimate reaches the threshold; equality classifies as `1`.
    pub fn decide(&self, eta_tilde_hat: f64) -> u8 {
        u8::from(eta_tilde_hat >= self.threshold)
    }

    pub fn predict(&self, x: &Point) -> Result<u8> {
        Ok(self.decide(self.regression_estimate(x)?.value))
    }

    /// `(eta_tilde_hat - pi0_hat) / (1 - pi0_hat - pi1_hat)`, evaluated as
    /// `1/2 + (eta_tilde_hat - threshold) / scale` so that it reaches `1/2`
    /// exactly when [`PluginClassifier::decide`] returns `1`.
    pub fn correct(&self, eta_tilde_hat: f64) -> Result<CorrectedRegression> {
        if !self.rates.sum_ok || !(self.scale > 0.0) {
            return Err(Error::RatesNotInvertible { pi0: self.rates.pi0, pi1: self.rates.pi1 });
        }
        let offset = (eta_tilde_hat - self.threshold) / self.scale;
        let mut unclamped = 0.5 + offset;
        if offset < 0.0 && unclamped >= 0.5 {
            unclamped = BELOW_HALF;
        }
        Ok(CorrectedRegression { value: unclamped.clamp(0.0, 1.0), unclamped })
    }

    pub fn corrected_regression(&self, x: &Point) -> Result<CorrectedRegression> {
        self.correct(self.regression_estimate(x)?.value)
    }
}

/// Free-function form of [`PluginClassifier::corrected_regression`].
pub fn corrected_regression(c: &PluginClassifier, x: &Point) -> Result<CorrectedRegression> {
    c.corrected_regression(x)
}
