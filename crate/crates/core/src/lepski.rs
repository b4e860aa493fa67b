//! Pointwise adaptive k-NN regression with Lepski's rule.
//!
//! For each `k` the estimate `f_hat_{n,k}(x)` gets a Hoeffding band of
//! half-width `sqrt(2 ln(4n/delta) / k)`. Starting at
//! `k_min = ceil(8 ln(2n/delta))`, `k` grows while the bands seen so far still
//! share a common point, up to `k_max = floor(n/2)`.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{check_delta, Error, Result};
use crate::metric::{Metric, Point};
use crate::neighbors::{neighbor_order, NeighborIndex, NeighborOrder};
use crate::num;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LepskiConfig {
    delta: f64,
}

impl LepskiConfig {
    pub fn new(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(LepskiConfig { delta })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `ceil(8 ln(2n / delta))`.
    pub fn k_min(&self, n: usize) -> usize {
        let v = num::ceil(8.0 * num::ln(2.0 * n as f64 / self.delta));
        if v < 1.0 {
            1
        } else {
            v as usize
        }
    }

    /// `floor(n / 2)`.
    pub fn k_max(&self, n: usize) -> usize {
        n / 2
    }

    /// True when the admissible range of `k` is empty for this `n`.
    pub fn range_is_empty(&self, n: usize) -> bool {
        self.k_max(n) == 0 || self.k_min(n) > self.k_max(n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LepskiEstimate {
    pub value: f64,
    pub k_selected: usize,
    /// Number of bands intersected by the sweep.
    pub intervals_checked: usize,
    /// The admissible range was empty; `value` is the global mean (`k = n`).
    pub fallback_used: bool,
}

#[inline]
fn band_log_term(n: usize, delta: f64) -> f64 {
    2.0 * num::ln(4.0 * n as f64 / delta)
}

#[inline]
fn band_halfwidth(log_term: f64, k: usize) -> f64 {
    num::sqrt(log_term / k as f64)
}

/// Half-width `sqrt(2 ln(4n/delta) / k)` of the band around `f_hat_{n,k}`.
pub fn ci_halfwidth(n: usize, k: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(band_halfwidth(band_log_term(n, delta), k))
}

/// Incremental form of the rule, fed one `(k, f_hat_{n,k})` at a time.
struct Sweep<'t> {
    log_term: f64,
    /// Precomputed `band_halfwidth(log_term, k)` at index `k - 1`.
    table: Option<&'t [f64]>,
    k_min: usize,
    k_max: usize,
    lower: f64,
    upper: f64,
    best: Option<(usize, f64)>,
    checked: usize,
}

impl<'t> Sweep<'t> {
    fn new(n: usize, cfg: &LepskiConfig, table: Option<&'t [f64]>) -> Self {
        Sweep {
            log_term: band_log_term(n, cfg.delta),
            table,
            k_min: cfg.k_min(n),
            k_max: cfg.k_max(n),
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            best: None,
            checked: 0,
        }
    }

    /// Returns `false` once no larger `k` can be selected.
    #[inline]
    fn push(&mut self, k: usize, mean: f64) -> bool {
        if k < self.k_min {
            return true;
        }
        if k > self.k_max {
            return false;
        }
        let h = match self.table {
            Some(t) => t[k - 1],
            None => band_halfwidth(self.log_term, k),
        };
        self.lower = self.lower.max(mean - h);
        self.upper = self.upper.min(mean + h);
        self.checked += 1;
        if self.lower > self.upper {
            return false;
        }
        self.best = Some((k, mean));
        k < self.k_max
    }

    fn finish(self) -> Option<LepskiEstimate> {
        self.best.map(|(k, value)| LepskiEstimate {
            value,
            k_selected: k,
            intervals_checked: self.checked,
            fallback_used: false,
        })
    }
}

fn fallback(global_mean: f64, n: usize) -> LepskiEstimate {
    LepskiEstimate { value: global_mean, k_selected: n, intervals_checked: 0, fallback_used: true }
}

/// Selects `k_hat_{n,delta}(x)` over a full neighbour ordering and returns
/// `f_hat_{n,k_hat}(x)`.
pub fn lepski_select(no: &NeighborOrder, cfg: &LepskiConfig) -> LepskiEstimate {
    let n = no.len();
    let means = no.prefix_means();
    if cfg.range_is_empty(n) {
        return fallback(means[n - 1], n);
    }
    let mut sweep = Sweep::new(n, cfg, None);
    for (j, &mean) in means.iter().enumerate() {
        if !sweep.push(j + 1, mean) {
            break;
        }
    }
    sweep.finish().expect("the first band of a nonempty range always intersects itself")
}

/// `lepski_select(neighbor_order(ds, m, x), delta)`.
pub fn lepski_estimate_at(ds: &Dataset, m: &Metric, x: &Point, delta: f64) -> Result<LepskiEstimate> {
    let cfg = LepskiConfig::new(delta)?;
    Ok(lepski_select(&neighbor_order(ds, m, x)?, &cfg))
}

/// Same result as [`lepski_estimate_at`], streaming neighbours from an index
/// and stopping as soon as the running intersection empties.
pub fn lepski_estimate_indexed(index: &NeighborIndex<'_>, x: &Point, cfg: &LepskiConfig) -> Result<LepskiEstimate> {
    estimate_streaming(index, x, cfg, None)
}

/// Band half-widths for `k = 1..=k_max(n)`, for repeated queries on one sample.
pub(crate) fn halfwidth_table(n: usize, cfg: &LepskiConfig) -> Vec<f64> {
    let log_term = band_log_term(n, cfg.delta);
    (1..=cfg.k_max(n)).map(|k| band_halfwidth(log_term, k)).collect()
}

pub(crate) fn estimate_streaming(
    index: &NeighborIndex<'_>,
    x: &Point,
    cfg: &LepskiConfig,
    table: Option<&[f64]>,
) -> Result<LepskiEstimate> {
    let n = index.dataset().len();
    if cfg.range_is_empty(n) {
        let mut last = 0.0;
        index.visit_means(x, |_, _, mean| {
            last = mean;
            true
        })?;
        return Ok(fallback(last, n));
    }
    let mut sweep = Sweep::new(n, cfg, table);
    index.visit_means(x, |k, _, mean| sweep.push(k, mean))?;
    Ok(sweep.finish().expect("the first band of a nonempty range always intersects itself"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn line_ds(zs: &[f64]) -> Dataset {
        let pts = (0..zs.len()).map(|i| Point::scalar(i as f64).unwrap()).collect();
        Dataset::new(pts, zs.to_vec()).unwrap()
    }

    #[test]
    fn halfwidth_reference_value() {
        // sqrt(2 ln(10000) / 100)
        let h = ci_halfwidth(100, 100, 0.04).unwrap();
        assert!((h - 0.429_193_205_257_869_4).abs() < 1e-12, "{h}");
    }

    #[test]
    fn halfwidth_monotone_and_scaled() {
        let base = ci_halfwidth(500, 1, 0.1).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=500 {
            let h = ci_halfwidth(500, k, 0.1).unwrap();
            assert!(h < prev);
            assert!((h * (k as f64).sqrt() - base).abs() < 1e-12);
            prev = h;
        }
    }

    #[test]
    fn halfwidth_errors() {
        assert_eq!(ci_halfwidth(10, 1, 1.0), Err(Error::InvalidDelta(1.0)));
        assert_eq!(ci_halfwidth(10, 1, 0.0), Err(Error::InvalidDelta(0.0)));
        assert!(matches!(ci_halfwidth(10, 11, 0.5), Err(Error::KOutOfRange { .. })));
    }

    #[test]
    fn constant_responses_reach_k_max() {
        let ds = line_ds(&[0.3; 400]);
        let est = lepski_estimate_at(&ds, &Metric::Euclidean, &Point::scalar(17.0).unwrap(), 0.1).unwrap();
        assert_eq!(est.value, 0.3);
        assert_eq!(est.k_selected, 200);
        assert!(!est.fallback_used);
    }

    #[test]
    fn small_sample_falls_back_to_global_mean() {
        // 8 ln(400) = 47.9 > floor(20 / 2)
        let zs: Vec<f64> = (0..20).map(|i| (i % 3) as f64 / 2.0).collect();
        let ds = line_ds(&zs);
        let est = lepski_estimate_at(&ds, &Metric::Euclidean, &Point::scalar(3.0).unwrap(), 0.1).unwrap();
        assert!(est.fallback_used);
        assert_eq!(est.k_selected, 20);
        assert!((est.value - ds.mean_response()).abs() < 1e-15);
    }

    #[test]
    fn range_endpoints() {
        let cfg = LepskiConfig::new(0.2).unwrap();
        // 8 ln(640) = 51.7
        assert_eq!(cfg.k_min(64), 52);
        assert_eq!(cfg.k_max(64), 32);
        assert!(cfg.range_is_empty(64));
        assert!(LepskiConfig::new(1.5).is_err());
    }
}
