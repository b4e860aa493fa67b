//! The four-atom construction behind the unknown-noise lower bound.
//!
//! Atoms `a, b, c, d` are the symbols `0..4`. `rho(a, b) = r` and every other
//! pair of distinct atoms is at distance 1.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::audit::{Assumption, AuditReport};
use super::{fmt_param, mass_error, symbol_index, Atom, GammaParams, NoiseSpec};
use crate::error::{Error, Result};
use crate::metric::{DistanceTable, Metric, Point};
use crate::num;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourPointFamily {
    pub iota: u8,
    pub delta: f64,
    pub r: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub nu_max: f64,
}

impl FourPointFamily {
    /// Each of `delta, r, u, v, w` must lie in `(0, 1/6)`.
    pub fn new(iota: u8, delta: f64, r: f64, u: f64, v: f64, w: f64, nu_max: f64) -> Result<Self> {
        if iota > 1 {
            return Err(Error::Parameter(format!("iota = {iota} must be 0 or 1")));
        }
        if !(nu_max > 0.0 && nu_max < 1.0) {
            return Err(Error::Parameter(format!("nu_max = {nu_max} must lie in (0, 1)")));
        }
        for (name, value) in [("Delta", delta), ("r", r), ("u", u), ("v", v), ("w", w)] {
            if !(value > 0.0 && value < 1.0 / 6.0) {
                return Err(Error::Parameter(format!("{name} = {value} must lie in (0, 1/6)")));
            }
        }
        Ok(FourPointFamily { iota, delta, r, u, v, w, nu_max })
    }

    /// The same construction with the other value of `iota`.
    pub fn twin(&self) -> FourPointFamily {
        FourPointFamily { iota: 1 - self.iota, ..*self }
    }

    pub fn masses(&self) -> [f64; 4] {
        [self.u, 1.0 / 3.0, self.v, 2.0 / 3.0 - self.u - self.v]
    }

    pub fn etas(&self) -> [f64; 4] {
        let dl = self.delta;
        if self.iota == 0 {
            [1.0, 1.0 - dl, (1.0 - dl) / (2.0 - dl), 0.0]
        } else {
            [1.0, 1.0, 1.0 / (2.0 - dl), 0.0]
        }
    }

    pub fn omegas(&self) -> [f64; 4] {
        [self.w, 1.0 / 3.0, self.v, 1.0 / 3.0]
    }

    pub fn noise(&self) -> NoiseSpec {
        let base = self.nu_max / 4.0;
        let pi1 = if self.iota == 0 { base } else { self.delta + base * (1.0 - self.delta) };
        NoiseSpec { pi0: 0.0, pi1 }
    }

    pub fn metric(&self) -> Metric {
        let mut rows = vec![vec![1.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 0.0;
        }
        rows[0][1] = self.r;
        rows[1][0] = self.r;
        Metric::DiscreteTable(DistanceTable::new(&rows).expect("valid four-point table"))
    }

    pub fn atoms(&self) -> Vec<Atom> {
        let (m, e, o) = (self.masses(), self.etas(), self.omegas());
        (0..4).map(|i| Atom { point: Point::Symbol(i as u32), mass: m[i], eta: e[i], omega: o[i] }).collect()
    }

    pub fn eta(&self, x: &Point) -> Result<f64> {
        Ok(self.etas()[symbol_index(x, 4)?])
    }

    pub fn omega(&self, x: &Point) -> Result<f64> {
        Ok(self.omegas()[symbol_index(x, 4)?])
    }

    /// Sufficient conditions from the property lemma of the construction.
    pub fn audit(&self, g: &GammaParams) -> AuditReport {
        let mut rep = AuditReport::default();
        let noise = self.noise();
        let (dl, r, u, v, w) = (self.delta, self.r, self.u, self.v, self.w);
        rep.push(Assumption::LabelNoise, "pi0 + pi1 < nu_max", noise.pi0 + noise.pi1, g.nu_max, noise.pi0 + noise.pi1 < g.nu_max);
        rep.push_le(Assumption::Margin, "4^alpha <= C_alpha", num::powf(4.0, g.alpha), g.c_alpha);
        rep.push_le(Assumption::Margin, "v <= Delta^alpha", v, num::powf(dl, g.alpha));
        rep.push_le(Assumption::Holder, "Delta <= C_beta r^beta", dl, g.c_beta * num::powf(r, g.beta));
        rep.push_le(Assumption::MinimalMass, "w r^d <= u", w * num::powf(r, g.d), u);
        rep.push_le(Assumption::Tail, "gamma <= 1", g.gamma, 1.0);
        rep.push_le(Assumption::Tail, "t_gamma <= 1/3", g.t_gamma, 1.0 / 3.0);
        rep.push_le(Assumption::Tail, "u <= w", u, w);
        rep.push_le(Assumption::QuantitativeRange, "t_tau <= 1/3", g.t_tau, 1.0 / 3.0);
        rep.push_le(Assumption::QuantitativeRange, "Delta <= C_tau w^tau", dl, g.c_tau * num::powf(w, g.tau));
        let err = mass_error(&self.atoms());
        rep.push(Assumption::Normalization, "|sum of masses - 1| <= 1e-12", err, 1e-12, err <= 1e-12);
        rep
    }
}

/// The pair `(iota = 0, iota = 1)` of four-point families tuned to sample
/// size `n`:
///
/// `Delta = 6^-(1 + 1/alpha + tau) nu_max (2n)^(-tau beta / (tau (2 beta + d) + beta))`,
/// `r = Delta^(1/beta)`, `u = Delta^((beta + tau d) / (tau beta))`,
/// `v = Delta^alpha`, `w = Delta^(1/tau)`.
pub fn lb_parameters_unknown_noise(n: usize, g: &GammaParams) -> Result<(FourPointFamily, FourPointFamily)> {
    g.validate()?;
    let ranges: [(bool, &str); 8] = [
        (n >= 1, "n >= 1"),
        (g.alpha > 0.0, "alpha > 0 (alpha = 0 gives v = 1)"),
        (g.d >= g.alpha * g.beta, "d >= alpha beta"),
        (g.gamma <= 1.0, "gamma <= 1"),
        (g.tau.is_finite(), "tau finite"),
        (g.c_alpha >= num::powf(4.0, g.alpha), "C_alpha >= 4^alpha"),
        (g.t_gamma < 1.0 / 24.0, "t_gamma < 1/24"),
        (g.t_tau < 1.0 / 3.0, "t_tau < 1/3"),
    ];
    if let Some((_, name)) = ranges.iter().find(|(ok, _)| !ok) {
        return Err(Error::Parameter(format!("{name}; {}", fmt_param("n", n as f64))));
    }
    let (a, b, d, t) = (g.alpha, g.beta, g.d, g.tau);
    let two_n = 2.0 * n as f64;
    let delta = num::powf(6.0, -(1.0 + 1.0 / a + t)) * g.nu_max * num::powf(two_n, -t * b / (t * (2.0 * b + d) + b));
    let r = num::powf(delta, 1.0 / b);
    let u = num::powf(delta, (b + t * d) / (t * b));
    let v = num::powf(delta, a);
    let w = num::powf(delta, 1.0 / t);
    let f0 = FourPointFamily::new(0, delta, r, u, v, w, g.nu_max)?;
    Ok((f0, f0.twin()))
}
