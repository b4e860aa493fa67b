//! Synthetic distributions with exact regression functions.
//!
//! Every family exposes the clean regression function `eta`, the corrupted
//! regression function `eta_tilde = pi0 (1 - eta) + (1 - pi1) eta`, the Bayes
//! rule, the density proxy `omega`, a counter-based sampler and an
//! excess-risk oracle
//!
//! `E(phi) = integral of |2 eta - 1| 1{phi != phi*} d mu`.
//!
//! Record `i` of a sample uses words 0..3 of block `i` on
//! [`STREAM_SAMPLE`](crate::rng::STREAM_SAMPLE): word 0 draws `X`, word 1 the
//! clean label and word 2 the flip.

mod audit;
mod exponent;
mod four_point;
mod hypercube;
mod laplace;
mod table;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

pub use audit::{audit_atoms, Assumption, AuditCheck, AuditReport};
pub use exponent::{rate_exponent, Branch, RateExponent};
pub use four_point::{lb_parameters_unknown_noise, FourPointFamily};
pub use hypercube::{lb_parameters_hypercube, HypercubeFamily, MAX_HYPERCUBE_LEN};
pub use laplace::LaplaceLogisticFamily;
pub use table::UserTable;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{Metric, Point};
use crate::num;
use crate::rng::{CounterRng, RecordDraws, STREAM_RISK, STREAM_SAMPLE};

/// Whether a family provably satisfies an assumption with the stated
/// parameters, or the values are descriptive only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cert {
    Certified,
    Nominal,
}

/// One flag per assumption group of [`GammaParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GammaFlags {
    pub noise: Cert,
    pub margin: Cert,
    pub holder: Cert,
    pub minimal_mass: Cert,
    pub tail: Cert,
    pub range: Cert,
}

impl GammaFlags {
    pub const NOMINAL: GammaFlags = GammaFlags {
        noise: Cert::Nominal,
        margin: Cert::Nominal,
        holder: Cert::Nominal,
        minimal_mass: Cert::Nominal,
        tail: Cert::Nominal,
        range: Cert::Nominal,
    };
    pub const CERTIFIED: GammaFlags = GammaFlags {
        noise: Cert::Certified,
        margin: Cert::Certified,
        holder: Cert::Certified,
        minimal_mass: Cert::Certified,
        tail: Cert::Certified,
        range: Cert::Certified,
    };
}

/// Exponents and constants of the measure class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaParams {
    pub nu_max: f64,
    pub d: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    pub beta: f64,
    pub c_beta: f64,
    pub gamma: f64,
    pub t_gamma: f64,
    pub c_gamma: f64,
    pub tau: f64,
    pub t_tau: f64,
    pub c_tau: f64,
    pub flags: GammaFlags,
}

impl GammaParams {
    /// Exponents with default constants: `nu_max = 1/2`,
    /// `C_alpha = max(1, 4^alpha)`, `C_beta = C_tau = 1`, `C_gamma = 2`,
    /// `t_gamma = 1/48`, `t_tau = 1/6`. All flags nominal.
    pub fn new(alpha: f64, beta: f64, d: f64, gamma: f64, tau: f64) -> Result<Self> {
        let g = GammaParams {
            nu_max: 0.5,
            d,
            alpha,
            c_alpha: num::powf(4.0, alpha).max(1.0),
            beta,
            c_beta: 1.0,
            gamma,
            t_gamma: 1.0 / 48.0,
            c_gamma: 2.0,
            tau,
            t_tau: 1.0 / 6.0,
            c_tau: 1.0,
            flags: GammaFlags::NOMINAL,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let open_unit = |v: f64| v > 0.0 && v < 1.0;
        let constant = |v: f64| v >= 1.0 && v.is_finite();
        let checks: [(bool, &str); 12] = [
            (open_unit(self.nu_max), "nu_max in (0, 1)"),
            (self.d > 0.0 && self.d.is_finite(), "d > 0"),
            (self.alpha >= 0.0 && self.alpha.is_finite(), "alpha >= 0"),
            (constant(self.c_alpha), "C_alpha >= 1"),
            (self.beta > 0.0 && self.beta <= 1.0, "beta in (0, 1]"),
            (constant(self.c_beta), "C_beta >= 1"),
            (self.gamma > 0.0, "gamma > 0"),
            (open_unit(self.t_gamma), "t_gamma in (0, 1)"),
            (constant(self.c_gamma), "C_gamma >= 1"),
            (self.tau > 0.0, "tau > 0"),
            (open_unit(self.t_tau), "t_tau in (0, 1)"),
            (constant(self.c_tau), "C_tau >= 1"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, name)) => Err(Error::Parameter(format!("{name} (got {self:?})"))),
            None => Ok(()),
        }
    }
}

/// Class-conditional flip probabilities: `0 -> 1` with `pi0`, `1 -> 0` with `pi1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    pub pi0: f64,
    pub pi1: f64,
}

impl NoiseSpec {
    pub const NONE: NoiseSpec = NoiseSpec { pi0: 0.0, pi1: 0.0 };

    /// Rates in `[0, 1)` with `pi0 + pi1 < nu_max`. Zero is allowed so that
    /// one-sided and noiseless channels can be expressed.
    pub fn new(pi0: f64, pi1: f64, nu_max: f64) -> Result<Self> {
        let rate = |p: f64| (0.0..1.0).contains(&p);
        if !rate(pi0) || !rate(pi1) {
            return Err(Error::Parameter(format!("noise rates ({pi0}, {pi1}) must lie in [0, 1)")));
        }
        if !(pi0 + pi1 < nu_max) {
            return Err(Error::Parameter(format!("pi0 + pi1 = {} must be below nu_max = {nu_max}", pi0 + pi1)));
        }
        Ok(NoiseSpec { pi0, pi1 })
    }

    /// `(1 - pi0 - pi1) eta + pi0`, arranged so that `eta = 0` and `eta = 1`
    /// map to exactly `pi0` and `1 - pi1`.
    pub fn corrupt(&self, eta: f64) -> f64 {
        self.pi0 * (1.0 - eta) + (1.0 - self.pi1) * eta
    }
}

/// One atom of a finite family.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub point: Point,
    pub mass: f64,
    pub eta: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    FourPoint(FourPointFamily),
    Hypercube(HypercubeFamily),
    LaplaceLogistic(LaplaceLogisticFamily),
    UserTable(UserTable),
}

/// How excess risk is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiskMode {
    /// Sum over the atoms of a finite family.
    Exact,
    /// Average over this many fresh feature draws.
    MonteCarlo(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiskEstimate {
    pub value: f64,
    /// Standard error of a Monte-Carlo estimate; `None` when exact.
    pub stderr: Option<f64>,
}

/// A family together with the parameter vector it is reported against.
#[derive(Clone, Debug, PartialEq)]
pub struct DistributionSpec {
    pub family: Family,
    pub gamma: GammaParams,
}

impl DistributionSpec {
    pub fn new(family: Family, gamma: GammaParams) -> Result<Self> {
        gamma.validate()?;
        let spec = DistributionSpec { family, gamma };
        let noise = spec.noise();
        NoiseSpec::new(noise.pi0, noise.pi1, 1.0)?;
        Ok(spec)
    }

    pub fn metric(&self) -> Metric {
        match &self.family {
            Family::FourPoint(f) => f.metric(),
            Family::Hypercube(f) => f.metric(),
            Family::LaplaceLogistic(_) => Metric::Euclidean,
            Family::UserTable(t) => t.metric(),
        }
    }

    pub fn noise(&self) -> NoiseSpec {
        match &self.family {
            Family::FourPoint(f) => f.noise(),
            Family::Hypercube(_) => NoiseSpec::NONE,
            Family::LaplaceLogistic(f) => f.noise,
            Family::UserTable(t) => t.noise,
        }
    }

    pub fn name(&self) -> &'static str {
        match &self.family {
            Family::FourPoint(_) => "four-point",
            Family::Hypercube(_) => "hypercube",
            Family::LaplaceLogistic(_) => "laplace-logistic",
            Family::UserTable(_) => "table",
        }
    }

    pub fn is_atomic(&self) -> bool {
        !matches!(self.family, Family::LaplaceLogistic(_))
    }

    /// All atoms (including any of zero mass) of a finite family.
    pub fn atoms(&self) -> Result<Vec<Atom>> {
        match &self.family {
            Family::FourPoint(f) => Ok(f.atoms()),
            Family::Hypercube(f) => Ok(f.atoms()),
            Family::LaplaceLogistic(_) => Err(Error::NotAtomic),
            Family::UserTable(t) => Ok(t.atoms()),
        }
    }

    pub fn eta(&self, x: &Point) -> Result<f64> {
        match &self.family {
            Family::FourPoint(f) => f.eta(x),
            Family::Hypercube(f) => f.eta(x),
            Family::LaplaceLogistic(f) => f.eta(x),
            Family::UserTable(t) => t.eta(x),
        }
    }

    pub fn eta_tilde(&self, x: &Point) -> Result<f64> {
        Ok(self.noise().corrupt(self.eta(x)?))
    }

    /// `1{eta(x) >= 1/2}`.
    pub fn bayes(&self, x: &Point) -> Result<u8> {
        Ok(u8::from(self.eta(x)? >= 0.5))
    }

    pub fn omega(&self, x: &Point) -> Result<f64> {
        match &self.family {
            Family::FourPoint(f) => f.omega(x),
            Family::Hypercube(f) => f.omega(x),
            Family::LaplaceLogistic(f) => f.omega(x),
            Family::UserTable(t) => t.omega(x),
        }
    }

    /// `M(eta_tilde)`: the maximum over atoms of positive mass, or `1 - pi1`
    /// for the Laplace-logistic family.
    pub fn true_sup_eta_tilde(&self) -> f64 {
        let noise = self.noise();
        match self.atoms() {
            Ok(atoms) => atoms
                .iter()
                .filter(|a| a.mass > 0.0)
                .map(|a| noise.corrupt(a.eta))
                .fold(f64::NEG_INFINITY, f64::max),
            Err(_) => 1.0 - noise.pi1,
        }
    }

    /// `inf eta_tilde`, the counterpart of [`DistributionSpec::true_sup_eta_tilde`].
    pub fn true_inf_eta_tilde(&self) -> f64 {
        let noise = self.noise();
        match self.atoms() {
            Ok(atoms) => atoms
                .iter()
                .filter(|a| a.mass > 0.0)
                .map(|a| noise.corrupt(a.eta))
                .fold(f64::INFINITY, f64::min),
            Err(_) => noise.pi0,
        }
    }

    fn sampler(&self) -> Result<Sampler> {
        match &self.family {
            Family::LaplaceLogistic(f) => Ok(Sampler::Laplace(*f)),
            _ => Ok(Sampler::Atomic(AtomSampler::new(self.atoms()?)?)),
        }
    }

    /// `(X_i, Y_i, Y_tilde_i)` for `i < n`.
    pub fn sample_triples(&self, n: usize, seed: u64) -> Result<Vec<(Point, u8, u8)>> {
        if n == 0 {
            return Err(Error::InvalidDataset("sample size must be at least 1".into()));
        }
        let sampler = self.sampler()?;
        let noise = self.noise();
        let mut rng = CounterRng::new(seed, STREAM_SAMPLE);
        let mut out = Vec::with_capacity(n);
        for i in 0..n as u64 {
            let r = rng.record(i);
            let (x, eta) = sampler.draw(&r)?;
            let y = u8::from(r.bernoulli(1, eta));
            let flip = if y == 1 { noise.pi1 } else { noise.pi0 };
            let y_tilde = if r.bernoulli(2, flip) { 1 - y } else { y };
            out.push((x, y, y_tilde));
        }
        Ok(out)
    }

    pub fn sample_clean(&self, n: usize, seed: u64) -> Result<Dataset> {
        self.dataset_from(n, seed, |(_, y, _)| *y)
    }

    pub fn sample_corrupted(&self, n: usize, seed: u64) -> Result<Dataset> {
        self.dataset_from(n, seed, |(_, _, y)| *y)
    }

    fn dataset_from(&self, n: usize, seed: u64, label: impl Fn(&(Point, u8, u8)) -> u8) -> Result<Dataset> {
        let triples = self.sample_triples(n, seed)?;
        let responses = triples.iter().map(|t| f64::from(label(t))).collect();
        let points = triples.into_iter().map(|(x, _, _)| x).collect();
        Dataset::new(points, responses)
    }

    /// Excess risk of `rule`. Exact mode evaluates `rule` once per atom of
    /// positive mass; Monte-Carlo mode draws features on the risk stream of
    /// `seed`.
    pub fn excess_risk<F>(&self, mut rule: F, mode: RiskMode, seed: u64) -> Result<RiskEstimate>
    where
        F: FnMut(&Point) -> Result<u8>,
    {
        match mode {
            RiskMode::Exact => {
                let mut total = 0.0;
                for a in self.atoms()?.iter().filter(|a| a.mass > 0.0) {
                    if rule(&a.point)? != u8::from(a.eta >= 0.5) {
                        total += a.mass * (2.0 * a.eta - 1.0).abs();
                    }
                }
                Ok(RiskEstimate { value: total, stderr: None })
            }
            RiskMode::MonteCarlo(mc_n) => {
                if mc_n == 0 {
                    return Err(Error::Parameter("Monte-Carlo risk needs at least one draw".into()));
                }
                let sampler = self.sampler()?;
                let mut rng = CounterRng::new(seed, STREAM_RISK);
                let (mut sum, mut sum_sq) = (0.0, 0.0);
                for i in 0..mc_n as u64 {
                    let (x, eta) = sampler.draw(&rng.record(i))?;
                    if rule(&x)? != u8::from(eta >= 0.5) {
                        let loss = (2.0 * eta - 1.0).abs();
                        sum += loss;
                        sum_sq += loss * loss;
                    }
                }
                let m = mc_n as f64;
                let mean = sum / m;
                let stderr = if mc_n > 1 {
                    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
                    num::sqrt(var / m)
                } else {
                    0.0
                };
                Ok(RiskEstimate { value: mean, stderr: Some(stderr) })
            }
        }
    }

    /// Lemma-level parameter checks (where the family has them) followed by
    /// the exact per-atom checks.
    pub fn audit(&self) -> Result<AuditReport> {
        let mut report = match &self.family {
            Family::FourPoint(f) => f.audit(&self.gamma),
            Family::Hypercube(f) => f.audit(&self.gamma),
            _ => AuditReport::default(),
        };
        if self.is_atomic() {
            let exact = audit_atoms(&self.atoms()?, &self.metric(), self.noise(), &self.gamma)?;
            report.checks.extend(exact.checks);
        }
        Ok(report)
    }
}

enum Sampler {
    Atomic(AtomSampler),
    Laplace(LaplaceLogisticFamily),
}

impl Sampler {
    fn draw(&self, r: &RecordDraws) -> Result<(Point, f64)> {
        match self {
            Sampler::Atomic(s) => {
                let a = s.pick(r.uniform(0));
                Ok((s.atoms[a].point.clone(), s.atoms[a].eta))
            }
            Sampler::Laplace(f) => {
                let x = f.quantile(r.open_uniform(0));
                Ok((Point::RealVector(alloc::vec![x]), f.eta_at(x)))
            }
        }
    }
}

struct AtomSampler {
    atoms: Vec<Atom>,
    cumulative: Vec<f64>,
}

impl AtomSampler {
    fn new(atoms: Vec<Atom>) -> Result<Self> {
        let mut acc = 0.0;
        let mut cumulative = Vec::with_capacity(atoms.len());
        for a in &atoms {
            acc += a.mass;
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::Parameter("atom masses sum to zero".into()));
        }
        Ok(AtomSampler { atoms, cumulative })
    }

    fn pick(&self, u: f64) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let target = u * total;
        let idx = self.cumulative.partition_point(|&c| c <= target);
        let last_positive = self.atoms.iter().rposition(|a| a.mass > 0.0).expect("positive mass");
        idx.min(last_positive)
    }
}

pub(crate) fn symbol_index(x: &Point, size: usize) -> Result<usize> {
    match x {
        Point::Symbol(s) if (*s as usize) < size => Ok(*s as usize),
        _ => Err(Error::SpaceMismatch(format!("{} is not one of {size} atoms", crate::metric::describe(x)))),
    }
}

pub(crate) fn mass_error(atoms: &[Atom]) -> f64 {
    (crate::num::fsum(atoms.iter().map(|a| a.mass)) - 1.0).abs()
}

pub(crate) fn fmt_param(name: &str, value: f64) -> String {
    format!("{name} = {value}")
}
