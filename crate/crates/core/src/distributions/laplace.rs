//! Standard Laplace marginal with a logistic regression function.

use alloc::format;

use super::NoiseSpec;
use crate::error::{Error, Result};
use crate::metric::Point;
use crate::num;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceLogisticFamily {
    pub tau: f64,
    pub noise: NoiseSpec,
}

impl LaplaceLogisticFamily {
    pub fn new(tau: f64, noise: NoiseSpec) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::Parameter(format!("tau = {tau} must be positive and finite")));
        }
        Ok(LaplaceLogisticFamily { tau, noise })
    }

    /// `1 / (1 + e^(-tau x))`.
    pub fn eta_at(&self, x: f64) -> f64 {
        1.0 / (1.0 + num::exp(-self.tau * x))
    }

    /// Density `e^(-|x|) / 2`, used as `omega`.
    pub fn density(x: f64) -> f64 {
        0.5 * num::exp(-x.abs())
    }

    /// Inverse distribution function on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u < 0.5 {
            num::ln(2.0 * u)
        } else {
            -num::ln(2.0 * (1.0 - u))
        }
    }

    fn scalar(x: &Point) -> Result<f64> {
        match x {
            Point::RealVector(c) if c.len() == 1 => Ok(c[0]),
            _ => Err(Error::SpaceMismatch(format!("{} is not a real scalar", crate::metric::describe(x)))),
        }
    }

    pub fn eta(&self, x: &Point) -> Result<f64> {
        Ok(self.eta_at(Self::scalar(x)?))
    }

    pub fn omega(&self, x: &Point) -> Result<f64> {
        Ok(Self::density(Self::scalar(x)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_shape() {
        let f = LaplaceLogisticFamily::new(1.5, NoiseSpec::NONE).unwrap();
        assert_eq!(f.eta_at(0.0), 0.5);
        let mut prev = 0.0;
        for i in -200..=200 {
            let e = f.eta_at(i as f64 * 0.1);
            assert!(e > prev || (e == 1.0 && prev == 1.0));
            assert!(e < 1.0 || i as f64 * 0.1 * 1.5 > 36.0);
            prev = e;
        }
        assert!(f.eta_at(-1e-300) < 0.5 || f.eta_at(-1e-300) == 0.5);
        assert!(f.eta_at(-1e-9) < 0.5);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let f = LaplaceLogisticFamily::new(1.0, NoiseSpec::NONE).unwrap();
        for u in [1e-9, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0 - 1e-9] {
            let x = f.quantile(u);
            let cdf = if x < 0.0 { 0.5 * num::exp(x) } else { 1.0 - 0.5 * num::exp(-x) };
            assert!((cdf - u).abs() < 1e-12, "{u}: {cdf}");
        }
        assert_eq!(f.quantile(0.5), 0.0);
    }

    #[test]
    fn rejects_bad_tau() {
        assert!(LaplaceLogisticFamily::new(0.0, NoiseSpec::NONE).is_err());
        assert!(LaplaceLogisticFamily::new(f64::INFINITY, NoiseSpec::NONE).is_err());
    }
}
