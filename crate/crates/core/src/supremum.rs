//! Lower-confidence-bound estimation of `M(f) = sup f` and the noise-rate
//! estimates derived from it.
//!
//! `M_hat_{n,delta}(f) = max_{(i,k)} f_hat_{n,k}(X_i) - sqrt(ln(4n/delta) / k)`
//! over every sample point `X_i` and every `k` in `1..=n`. The k-NN bias at a
//! maximiser is never positive, so subtracting the Hoeffding term alone gives
//! an estimate that sits below `M(f)` with high probability.
//!
//! The penalty here is `sqrt(ln(4n/delta)/k)`, a factor `sqrt(2)` narrower
//! than the Lepski band; the two are intentionally computed separately.

use alloc::vec::Vec;

use crate::dataset::Dataset;
use crate::error::{check_delta, Result};
use crate::metric::Metric;
use crate::neighbors::{identical_point_groups, NeighborIndex, RunningMean};
use crate::num;

/// Margin kept between projected noise rates and their bounds.
pub const EPS_CLIP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupEstimate {
    pub value: f64,
    /// Zero-based sample index `i*` of the maximising pair.
    pub argmax_index: usize,
    pub k_at_max: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseRates {
    pub pi0: f64,
    pub pi1: f64,
    /// Estimates before projection.
    pub raw_pi0: f64,
    pub raw_pi1: f64,
    /// At least one raw estimate was moved by the projection.
    pub clipped: bool,
    /// `pi0 + pi1 < 1` holds for the projected pair.
    pub sum_ok: bool,
}

impl NoiseRates {
    /// Rates known exactly (no estimation, no projection).
    pub fn exact(pi0: f64, pi1: f64) -> Self {
        NoiseRates { pi0, pi1, raw_pi0: pi0, raw_pi1: pi1, clipped: false, sum_ok: pi0 + pi1 < 1.0 }
    }

    /// Projects raw estimates: each onto `[0, 1/2 - EPS_CLIP]`, then, if the
    /// sum still reaches `1 - EPS_CLIP`, both are rescaled proportionally.
    pub fn project(raw_pi0: f64, raw_pi1: f64) -> Self {
        let cap = 0.5 - EPS_CLIP;
        let mut pi0 = raw_pi0.clamp(0.0, cap);
        let mut pi1 = raw_pi1.clamp(0.0, cap);
        let mut clipped = pi0 != raw_pi0 || pi1 != raw_pi1;
        let limit = 1.0 - EPS_CLIP;
        if pi0 + pi1 >= limit {
            let scale = limit / (pi0 + pi1);
            pi0 *= scale;
            pi1 *= scale;
            clipped = true;
        }
        NoiseRates { pi0, pi1, raw_pi0, raw_pi1, clipped, sum_ok: pi0 + pi1 < 1.0 }
    }
}

/// Slack for rounding when discarding candidates by the bound in
/// [`extremum_estimates_indexed`].
const PRUNE_MARGIN: f64 = 1e-9;

/// Best pair seen so far; ties keep the earliest `(i, k)`.
struct Best {
    value: f64,
    index: usize,
    k: usize,
}

impl Best {
    fn new() -> Self {
        Best { value: f64::NEG_INFINITY, index: 0, k: 0 }
    }

    #[inline]
    fn offer(&mut self, value: f64, index: usize, k: usize) {
        if value > self.value {
            *self = Best { value, index, k };
        }
    }

    fn into_estimate(self) -> SupEstimate {
        SupEstimate { value: self.value, argmax_index: self.index, k_at_max: self.k }
    }
}

fn penalties(n: usize, delta: f64) -> Vec<f64> {
    let log_term = num::ln(4.0 * n as f64 / delta);
    (1..=n).map(|k| num::sqrt(log_term / k as f64)).collect()
}

/// Computes `M_hat(f)` and `M_hat(1 - f)` in one sweep over all `(i, k)`.
///
/// Sample points that coincide share a neighbour sequence, so each distinct
/// point is swept once and credited to its lowest index; the result equals
/// the exhaustive maximisation.
pub fn extremum_estimates(ds: &Dataset, m: &Metric, delta: f64) -> Result<(SupEstimate, SupEstimate)> {
    check_delta(delta)?;
    let index = NeighborIndex::new(ds, m)?;
    extremum_estimates_indexed(&index, delta)
}

pub(crate) fn extremum_estimates_indexed(index: &NeighborIndex<'_>, delta: f64) -> Result<(SupEstimate, SupEstimate)> {
    check_delta(delta)?;
    let ds = index.dataset();
    let penalty = penalties(ds.len(), delta);
    let responses = ds.responses();
    let n = ds.len() as f64;
    let last_penalty = penalty[ds.len() - 1];
    let mut best_sup = Best::new();
    let mut best_inf = Best::new();
    for group in identical_point_groups(ds) {
        let i = group[0] as usize;
        let mut mean = RunningMean::default();
        let mut mean_c = RunningMean::default();
        // Sums of 1 - z and z so far. With responses in [0, 1], every later
        // candidate on the sup side is at most 1 - short_sup/k - penalty(k),
        // which increases in k, so 1 - short_sup/n - penalty(n) bounds them all.
        let (mut short_sup, mut short_inf) = (0.0, 0.0);
        let mut k = 0;
        index.visit(&ds.points()[i], |j, _| {
            let z = responses[j as usize];
            let p = penalty[k];
            k += 1;
            best_sup.offer(mean.push(z) - p, i, k);
            best_inf.offer(mean_c.push(1.0 - z) - p, i, k);
            short_sup += 1.0 - z;
            short_inf += z;
            let sup_open = 1.0 - short_sup / n - last_penalty > best_sup.value - PRUNE_MARGIN;
            let inf_open = 1.0 - short_inf / n - last_penalty > best_inf.value - PRUNE_MARGIN;
            sup_open || inf_open
        })?;
    }
    Ok((best_sup.into_estimate(), best_inf.into_estimate()))
}

/// `M_hat_{n,delta}(f)` for the responses of `ds`.
pub fn sup_estimate(ds: &Dataset, m: &Metric, delta: f64) -> Result<SupEstimate> {
    Ok(extremum_estimates(ds, m, delta)?.0)
}

/// `M_hat_{n,delta}(1 - f)`; the implied lower estimate of `inf f` is
/// `1 - value`.
pub fn inf_estimate(ds: &Dataset, m: &Metric, delta: f64) -> Result<SupEstimate> {
    Ok(extremum_estimates(ds, m, delta)?.1)
}

/// `pi1_hat = 1 - M_hat(eta_tilde)` and `pi0_hat = 1 - M_hat(1 - eta_tilde)`,
/// both at the supplied `delta`, followed by [`NoiseRates::project`].
pub fn estimate_noise_rates(ds_corrupted: &Dataset, m: &Metric, delta: f64) -> Result<NoiseRates> {
    ds_corrupted.check_binary()?;
    let index = NeighborIndex::new(ds_corrupted, m)?;
    noise_rates_indexed(&index, delta)
}

pub(crate) fn noise_rates_indexed(index: &NeighborIndex<'_>, delta: f64) -> Result<NoiseRates> {
    let (sup, inf) = extremum_estimates_indexed(index, delta)?;
    Ok(NoiseRates::project(1.0 - inf.value, 1.0 - sup.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::metric::Point;
    use alloc::vec;

    fn line_ds(zs: &[f64]) -> Dataset {
        let pts = (0..zs.len()).map(|i| Point::scalar((i as f64 * 0.61).cos()).unwrap()).collect();
        Dataset::new(pts, zs.to_vec()).unwrap()
    }

    #[test]
    fn all_ones() {
        let n = 40;
        let ds = line_ds(&vec![1.0; n]);
        let est = sup_estimate(&ds, &Metric::Euclidean, 0.1).unwrap();
        let expected = 1.0 - num::sqrt(num::ln(4.0 * n as f64 / 0.1) / n as f64);
        assert_eq!(est.value, expected);
        assert_eq!(est.k_at_max, n);
        assert_eq!(est.argmax_index, 0);
    }

    #[test]
    fn all_zeros_inf_side() {
        let n = 25;
        let ds = line_ds(&vec![0.0; n]);
        let est = inf_estimate(&ds, &Metric::Euclidean, 0.3).unwrap();
        assert_eq!(est.value, 1.0 - num::sqrt(num::ln(4.0 * n as f64 / 0.3) / n as f64));
    }

    #[test]
    fn single_record() {
        let ds = line_ds(&[0.8]);
        let est = sup_estimate(&ds, &Metric::Euclidean, 0.5).unwrap();
        assert_eq!(est.value, 0.8 - num::sqrt(num::ln(8.0)));
    }

    #[test]
    fn labels_all_one_noise_rates() {
        let n = 300;
        let ds = line_ds(&vec![1.0; n]);
        let rates = estimate_noise_rates(&ds, &Metric::Euclidean, 0.05).unwrap();
        let expected = num::sqrt(num::ln(4.0 * n as f64 / 0.05) / n as f64);
        assert!((rates.pi1 - expected).abs() < 1e-15);
        assert_eq!(rates.pi0, 0.5 - EPS_CLIP);
        assert!(rates.clipped && rates.sum_ok);
    }

    #[test]
    fn non_binary_labels_rejected() {
        let ds = line_ds(&[0.0, 0.5, 1.0]);
        assert!(matches!(
            estimate_noise_rates(&ds, &Metric::Euclidean, 0.1),
            Err(Error::InvalidResponse { index: 1, .. })
        ));
        assert_eq!(sup_estimate(&ds, &Metric::Euclidean, 1.0), Err(Error::InvalidDelta(1.0)));
    }

    #[test]
    fn projection_rescales_when_needed() {
        let r = NoiseRates::project(-0.2, 0.3);
        assert_eq!((r.pi0, r.pi1), (0.0, 0.3));
        assert!(r.clipped);
        let r = NoiseRates::project(0.1, 0.2);
        assert!(!r.clipped && r.sum_ok);
    }
}
