//! Executable assumption checks.
//!
//! [`audit_atoms`] verifies each assumption exactly on a finite family: the
//! quantities involved are step functions of their threshold, so it is enough
//! to test the one-sided limit at every jump.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{mass_error, Atom, GammaParams, NoiseSpec};
use crate::error::Result;
use crate::metric::{distance, Metric};
use crate::num;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Assumption {
    LabelNoise,
    Margin,
    Holder,
    MinimalMass,
    Tail,
    QuantitativeRange,
    Normalization,
}

impl Assumption {
    pub fn name(&self) -> &'static str {
        match self {
            Assumption::LabelNoise => "label-noise",
            Assumption::Margin => "margin",
            Assumption::Holder => "holder",
            Assumption::MinimalMass => "minimal-mass",
            Assumption::Tail => "tail",
            Assumption::QuantitativeRange => "quantitative-range",
            Assumption::Normalization => "normalization",
        }
    }
}

/// One inequality `lhs <= rhs` (or a named boolean condition).
#[derive(Clone, Debug, PartialEq)]
pub struct AuditCheck {
    pub assumption: Assumption,
    pub condition: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<AuditCheck>,
}

/// Absolute slack for comparisons of regression values.
const ETA_SLACK: f64 = 4.0 * f64::EPSILON;

impl AuditReport {
    pub fn push(&mut self, assumption: Assumption, condition: &str, lhs: f64, rhs: f64, passed: bool) {
        self.checks.push(AuditCheck { assumption, condition: condition.to_string(), lhs, rhs, passed });
    }

    /// `lhs <= rhs` up to a relative `1e-12`; several conditions hold with
    /// equality in exact arithmetic and differ only in the last bits here.
    pub fn push_le(&mut self, assumption: Assumption, condition: &str, lhs: f64, rhs: f64) {
        self.push(assumption, condition, lhs, rhs, num::le_rel(lhs, rhs));
    }

    /// As [`AuditReport::push_le`] for a left side built from regression
    /// values. Those are stored in `[0, 1]`, so a value such as `1 - Delta`
    /// only keeps `Delta` to an absolute error of a few ulps of one.
    pub fn push_le_eta(&mut self, assumption: Assumption, condition: &str, lhs: f64, rhs: f64) {
        self.push(assumption, condition, lhs, rhs, num::le_rel(lhs, rhs) || lhs - rhs <= ETA_SLACK);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn passed_for(&self, assumption: Assumption) -> bool {
        self.checks.iter().filter(|c| c.assumption == assumption).all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AuditCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn sorted_levels(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Exact checks of every assumption on the support of a finite family.
pub fn audit_atoms(atoms: &[Atom], metric: &Metric, noise: NoiseSpec, g: &GammaParams) -> Result<AuditReport> {
    let mut rep = AuditReport::default();
    let support: Vec<&Atom> = atoms.iter().filter(|a| a.mass > 0.0).collect();

    let err = mass_error(atoms);
    rep.push(Assumption::Normalization, "exact: |sum of masses - 1| <= 1e-12", err, 1e-12, err <= 1e-12);
    let sum = noise.pi0 + noise.pi1;
    rep.push(Assumption::LabelNoise, "exact: pi0 + pi1 < nu_max", sum, g.nu_max, sum < g.nu_max);

    // Margin: mu{0 < |eta - 1/2| < xi} <= C_alpha xi^alpha for xi in (0, 1).
    // Just above each gap level g the left side is mu{0 < gap <= g}.
    let gap = |a: &Atom| (a.eta - 0.5).abs();
    for level in sorted_levels(support.iter().map(|a| gap(a)).filter(|&x| x > 0.0)) {
        let mass: f64 = support.iter().filter(|a| gap(a) > 0.0 && gap(a) <= level).map(|a| a.mass).sum();
        rep.push_le(Assumption::Margin, "exact: mu{0 < |eta - 1/2| <= g} <= C_alpha g^alpha", mass, g.c_alpha * num::powf(level, g.alpha));
    }

    // Hoelder: |eta(x) - eta(y)| <= C_beta rho^beta whenever rho < 1.
    let mut worst: Option<(f64, f64)> = None;
    for (i, a) in support.iter().enumerate() {
        for b in &support[i + 1..] {
            let rho = distance(metric, &a.point, &b.point)?;
            if rho < 1.0 {
                let lhs = (a.eta - b.eta).abs();
                let rhs = g.c_beta * num::powf(rho, g.beta);
                let slack = rhs - lhs;
                if worst.is_none_or(|(l, r)| slack < r - l) {
                    worst = Some((lhs, rhs));
                }
            }
        }
    }
    if let Some((lhs, rhs)) = worst {
        rep.push_le_eta(Assumption::Holder, "exact: max |eta(x) - eta(y)| - C_beta rho^beta <= 0", lhs, rhs);
    }

    // Minimal mass: mu(B_r(x)) >= omega(x) r^d on open balls, r in (0, 1).
    // Just below a distance level L the ball holds the atoms with rho < L.
    let mut ring: Vec<(f64, f64)> = Vec::with_capacity(support.len());
    for a in &support {
        ring.clear();
        for b in &support {
            ring.push((distance(metric, &a.point, &b.point)?, b.mass));
        }
        ring.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut mass = 0.0;
        let mut j = 0;
        loop {
            let level = ring.get(j).map_or(1.0, |r| r.0.min(1.0));
            if level > 0.0 {
                rep.push_le(Assumption::MinimalMass, "exact: omega(x) L^d <= mu{rho(x, .) < L}", a.omega * num::powf(level, g.d), mass);
            }
            if level >= 1.0 {
                break;
            }
            while j < ring.len() && ring[j].0 == level {
                mass += ring[j].1;
                j += 1;
            }
        }
    }

    // Tail: mu{omega < eps} <= C_gamma eps^gamma for eps in (0, t_gamma).
    // Just above an omega level o the left side is mu{omega <= o}.
    for level in sorted_levels(support.iter().map(|a| a.omega)).into_iter().filter(|&o| o < g.t_gamma) {
        let mass: f64 = support.iter().filter(|a| a.omega <= level).map(|a| a.mass).sum();
        rep.push_le(Assumption::Tail, "exact: mu{omega <= o} <= C_gamma o^gamma", mass, g.c_gamma * num::powf(level, g.gamma));
    }

    // Quantitative range: for eps in (0, t_tau),
    // max(inf{eta : omega > eps}, inf{1 - eta : omega > eps}) <= C_tau eps^tau.
    // On [o_{j-1}, o_j) the set is {omega >= o_j}; the bound is weakest at o_{j-1}.
    let levels = sorted_levels(support.iter().map(|a| a.omega));
    let mut lower = 0.0;
    for &level in &levels {
        if lower >= g.t_tau {
            break;
        }
        let kept = support.iter().filter(|a| a.omega >= level);
        let (mut low, mut high) = (f64::INFINITY, f64::INFINITY);
        for a in kept {
            low = low.min(a.eta);
            high = high.min(1.0 - a.eta);
        }
        let rhs = g.c_tau * num::powf(lower, g.tau);
        rep.push_le_eta(Assumption::QuantitativeRange, "exact: max(inf eta, inf 1 - eta) over {omega > eps} <= C_tau eps^tau", low.max(high), rhs);
        lower = level;
    }
    if lower < g.t_tau {
        // eps in [max omega, t_tau): nothing has omega > eps.
        rep.push(Assumption::QuantitativeRange, "exact: t_tau <= max omega", g.t_tau, lower, false);
    }
    Ok(rep)
}
