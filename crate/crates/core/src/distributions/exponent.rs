//! The minimax rate exponent and its active branch.

use crate::num;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// The label-noise term is the smaller exponent (`tau alpha < gamma`).
    NoiseLimited,
    ClassificationLimited,
    Tie,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::NoiseLimited => "noise-limited",
            Branch::ClassificationLimited => "classification-limited",
            Branch::Tie => "tie",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateExponent {
    pub value: f64,
    /// `gamma beta (alpha + 1) / (gamma (2 beta + d) + alpha beta)`.
    pub classification: f64,
    /// `tau beta (alpha + 1) / (tau (2 beta + d) + beta)`.
    pub noise: f64,
    pub branch: Branch,
    /// `gamma > beta / (2 beta + d)`, outside of which the upper bound is not claimed.
    pub upper_bound_applies: bool,
}

/// `min` of the two exponents. Written as `beta (alpha + 1) / (2 beta + d + alpha beta / gamma)`
/// and `beta (alpha + 1) / (2 beta + d + beta / tau)` so that infinite `gamma`
/// or `tau` take their limits.
pub fn rate_exponent(g: &super::GammaParams) -> RateExponent {
    let (a, b, d) = (g.alpha, g.beta, g.d);
    let classification = b * (a + 1.0) / (2.0 * b + d + a * b / g.gamma);
    let noise = b * (a + 1.0) / (2.0 * b + d + b / g.tau);
    let branch = if num::le_rel(classification, noise) && num::le_rel(noise, classification) {
        Branch::Tie
    } else if noise < classification {
        Branch::NoiseLimited
    } else {
        Branch::ClassificationLimited
    };
    RateExponent {
        value: classification.min(noise),
        classification,
        noise,
        branch,
        upper_bound_applies: g.gamma > b / (2.0 * b + d),
    }
}
