//! The hypercube construction behind the noise-free lower bound.
//!
//! The space holds two anchor atoms, written as the one-character strings
//! `"0"` and `"1"`, and the `2^l` strings of length `l`. `A_sharp` is the set
//! of the lexicographically first `m` strings ending in `1`; the string whose
//! most-significant-first value is `2j + 1` carries sign `g[j]`.

use alloc::format;
use alloc::vec::Vec;

use super::audit::{Assumption, AuditReport};
use super::{mass_error, Atom, GammaParams};
use crate::error::{Error, Result};
use crate::metric::{BitString, Metric, Point};
use crate::num;
use crate::rng::{CounterRng, STREAM_CONSTRUCTION};

/// Largest string length for which the `2^l` atoms are enumerated.
pub const MAX_HYPERCUBE_LEN: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct HypercubeFamily {
    pub l: usize,
    pub w: f64,
    pub delta: f64,
    pub m: usize,
    pub d: f64,
    /// `g(x)` for the `m` atoms of `A_sharp`, each `-1` or `+1`.
    pub signs: Vec<i8>,
}

impl HypercubeFamily {
    pub fn new(l: usize, w: f64, delta: f64, m: usize, d: f64, signs: Vec<i8>) -> Result<Self> {
        if !(2..=MAX_HYPERCUBE_LEN).contains(&l) {
            return Err(Error::Parameter(format!("l = {l} outside 2..={MAX_HYPERCUBE_LEN}")));
        }
        if !(w > 0.0 && w <= 1.0 / 3.0) {
            return Err(Error::Parameter(format!("w = {w} must lie in (0, 1/3]")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::Parameter(format!("Delta = {delta} must lie in [0, 1]")));
        }
        if m == 0 || m > 1usize << (l - 1) {
            return Err(Error::Parameter(format!("m = {m} must lie in 1..=2^(l-1) = {}", 1usize << (l - 1))));
        }
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Parameter(format!("d = {d} must be positive")));
        }
        if signs.len() != m || signs.iter().any(|s| *s != 1 && *s != -1) {
            return Err(Error::Parameter(format!("need {m} signs in {{-1, +1}}")));
        }
        Ok(HypercubeFamily { l, w, delta, m, d, signs })
    }

    pub fn metric(&self) -> Metric {
        Metric::HypercubeUltrametric { d: self.d }
    }

    fn cells(&self) -> f64 {
        num::powf(2.0, -(self.l as f64))
    }

    /// `v = w 2^-l`, the mass of each atom of `A_sharp`.
    pub fn v(&self) -> f64 {
        self.w * self.cells()
    }

    fn plain_mass(&self) -> f64 {
        let total = (1usize << self.l) as f64;
        (1.0 - 3.0 * self.m as f64 * self.v()) / (3.0 * (total - self.m as f64))
    }

    /// Position of `x` in `A_sharp`, if it is there.
    fn sharp_index(&self, x: &BitString) -> Option<usize> {
        let value = x.msb_value();
        let j = (value >> 1) as usize;
        (value & 1 == 1 && j < self.m).then_some(j)
    }

    fn classify(&self, x: &Point) -> Result<Cell> {
        match x {
            Point::BitString(b) if b.is_anchor() => Ok(Cell::Anchor(b.bit(0))),
            Point::BitString(b) if b.len() == self.l => Ok(match self.sharp_index(b) {
                Some(j) => Cell::Sharp(j),
                None => Cell::Plain,
            }),
            _ => Err(Error::SpaceMismatch(format!(
                "{} is not an atom of the length-{} hypercube",
                crate::metric::describe(x),
                self.l
            ))),
        }
    }

    fn eta_of(&self, c: Cell) -> f64 {
        match c {
            Cell::Anchor(bit) => f64::from(bit),
            Cell::Sharp(j) => (1.0 + self.delta * f64::from(self.signs[j])) / 2.0,
            Cell::Plain => 0.5,
        }
    }

    fn omega_of(&self, c: Cell) -> f64 {
        match c {
            Cell::Anchor(_) => 1.0 / 3.0,
            Cell::Sharp(_) => self.w / 8.0,
            Cell::Plain => 1.0 / 24.0,
        }
    }

    fn mass_of(&self, c: Cell) -> f64 {
        match c {
            Cell::Anchor(_) => 1.0 / 3.0,
            Cell::Sharp(_) => self.v(),
            Cell::Plain => self.plain_mass(),
        }
    }

    pub fn eta(&self, x: &Point) -> Result<f64> {
        Ok(self.eta_of(self.classify(x)?))
    }

    pub fn omega(&self, x: &Point) -> Result<f64> {
        Ok(self.omega_of(self.classify(x)?))
    }

    /// Anchors `"0"`, `"1"`, then the length-`l` strings in lexicographic order.
    pub fn atoms(&self) -> Vec<Atom> {
        let mut out = Vec::with_capacity((1usize << self.l) + 2);
        let anchors = [BitString::parse("0"), BitString::parse("1")];
        let strings = (0..1u64 << self.l).map(|v| BitString::from_msb_value(v, self.l));
        for b in anchors.into_iter().chain(strings) {
            let b = b.expect("valid bit string");
            let point = Point::BitString(b);
            let cell = self.classify(&point).expect("own atom");
            out.push(Atom { point, mass: self.mass_of(cell), eta: self.eta_of(cell), omega: self.omega_of(cell) });
        }
        out
    }

    /// Sufficient conditions from the property lemma of the construction.
    pub fn audit(&self, g: &GammaParams) -> AuditReport {
        let mut rep = AuditReport::default();
        let (m, l) = (self.m as f64, self.l as f64);
        let sharp_mass = m * self.v();
        rep.push(Assumption::LabelNoise, "noiseless channel", 0.0, g.nu_max, 0.0 < g.nu_max);
        rep.push_le(Assumption::Margin, "m w 2^-l <= C_alpha (Delta/2)^alpha", sharp_mass, g.c_alpha * num::powf(self.delta / 2.0, g.alpha));
        rep.push_le(Assumption::Holder, "Delta <= C_beta 2^(-(l-1) beta/d)", self.delta, g.c_beta * num::powf(2.0, -(l - 1.0) * g.beta / self.d));
        rep.push_le(Assumption::Tail, "t_gamma <= 1/24", g.t_gamma, 1.0 / 24.0);
        rep.push_le(Assumption::Tail, "m w 2^-l <= C_gamma (w/8)^gamma", sharp_mass, g.c_gamma * num::powf(self.w / 8.0, g.gamma));
        rep.push_le(Assumption::QuantitativeRange, "t_tau <= 1/3", g.t_tau, 1.0 / 3.0);
        rep.push_le(Assumption::Normalization, "m <= 2^(l-1)", m, num::powf(2.0, l - 1.0));
        let err = mass_error(&self.atoms());
        rep.push(Assumption::Normalization, "|sum of masses - 1| <= 1e-12", err, 1e-12, err <= 1e-12);
        rep
    }
}

#[derive(Clone, Copy)]
enum Cell {
    Anchor(u8),
    Sharp(usize),
    Plain,
}

/// Hypercube tuned to sample size `n`, with signs drawn on the construction
/// stream of `seed`:
///
/// `l = ceil(d gamma / (gamma (2 beta + d) + alpha beta) log2(2n)) + 1`,
/// `Delta = 2^(-l beta / d)`, `w = Delta^(alpha/gamma) / 3`,
/// `m = floor(min(1/2, 2^-alpha, 24^-gamma) Delta^(-(alpha beta + gamma (d - alpha beta)) / (gamma beta)))`.
///
/// For `gamma < 1` this `m` eventually exceeds `2^(l-1)`, which is reported
/// as an error.
pub fn lb_parameters_hypercube(n: usize, g: &GammaParams, seed: u64) -> Result<HypercubeFamily> {
    g.validate()?;
    if n == 0 {
        return Err(Error::Parameter("n >= 1".into()));
    }
    let (a, b, d, gm) = (g.alpha, g.beta, g.d, g.gamma);
    if a * b > d {
        return Err(Error::Parameter(format!("alpha beta = {} must not exceed d = {d}", a * b)));
    }
    if !gm.is_finite() {
        return Err(Error::Parameter("gamma must be finite".into()));
    }
    let ratio = d * gm / (gm * (2.0 * b + d) + a * b);
    let l_real = num::ceil(ratio * num::ln(2.0 * n as f64) / core::f64::consts::LN_2) + 1.0;
    if l_real > MAX_HYPERCUBE_LEN as f64 {
        return Err(Error::Parameter(format!("l = {l_real} exceeds {MAX_HYPERCUBE_LEN}")));
    }
    let l = l_real as usize;
    let delta = num::powf(2.0, -(l as f64) * b / d);
    let w = num::powf(delta, a / gm) / 3.0;
    let factor = 0.5f64.min(num::powf(2.0, -a)).min(num::powf(24.0, -gm));
    let m_real = num::floor(factor * num::powf(delta, -(a * b + gm * (d - a * b)) / (gm * b)));
    let cap = (1usize << (l - 1)) as f64;
    if m_real < 1.0 {
        return Err(Error::Parameter(format!("m = {m_real} < 1: n = {n} too small")));
    }
    if m_real > cap {
        return Err(Error::Parameter(format!("m = {m_real} exceeds 2^(l-1) = {cap} (l = {l}, gamma = {gm})")));
    }
    let m = m_real as usize;
    let mut rng = CounterRng::new(seed, STREAM_CONSTRUCTION);
    let signs = (0..m as u64).map(|j| if rng.record(j).word(0) & 1 == 1 { 1 } else { -1 }).collect();
    HypercubeFamily::new(l, w, delta, m, d, signs)
}
