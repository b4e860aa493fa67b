//! Distribution spec files and sweep configuration files (JSON).
//!
//! See `docs/file-formats.md` for the schemas and `specs/` for examples.

use std::path::{Path, PathBuf};

use noiseknn_core::distributions::{
    lb_parameters_hypercube, lb_parameters_unknown_noise, DistributionSpec, Family, FourPointFamily, GammaParams,
    HypercubeFamily, LaplaceLogisticFamily, NoiseSpec, RiskMode, UserTable,
};
use noiseknn_core::harness::ExperimentConfig;
use serde::de::{self, Deserializer};
use serde::Deserialize;

use crate::data::MetricJson;
use crate::error::{Error, Result};

/// A number, or `"inf"` for an infinite exponent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent(pub f64);

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Exponent(x)),
            Raw::Word(w) => parse_exponent(&w).map(Exponent).map_err(de::Error::custom),
        }
    }
}

/// Parses a finite number or `inf`.
pub fn parse_exponent(s: &str) -> std::result::Result<f64, String> {
    match s.trim() {
        "inf" | "infinity" | "Infinity" => Ok(f64::INFINITY),
        t => t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| format!("{s:?} is neither a number nor \"inf\"")),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaJson {
    pub alpha: f64,
    pub beta: f64,
    pub d: f64,
    pub gamma: Exponent,
    pub tau: Exponent,
    pub nu_max: Option<f64>,
    pub c_alpha: Option<f64>,
    pub c_beta: Option<f64>,
    pub t_gamma: Option<f64>,
    pub c_gamma: Option<f64>,
    pub t_tau: Option<f64>,
    pub c_tau: Option<f64>,
}

impl GammaJson {
    pub fn to_params(&self) -> noiseknn_core::Result<GammaParams> {
        let mut g = GammaParams::new(self.alpha, self.beta, self.d, self.gamma.0, self.tau.0)?;
        let overrides = [
            (&mut g.nu_max, self.nu_max),
            (&mut g.c_alpha, self.c_alpha),
            (&mut g.c_beta, self.c_beta),
            (&mut g.t_gamma, self.t_gamma),
            (&mut g.c_gamma, self.c_gamma),
            (&mut g.t_tau, self.t_tau),
            (&mut g.c_tau, self.c_tau),
        ];
        for (field, value) in overrides {
            if let Some(v) = value {
                *field = v;
            }
        }
        g.validate()?;
        Ok(g)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableAtomJson {
    pub mass: f64,
    pub eta: f64,
    pub omega: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyJson {
    /// Either `schedule_n` (the lower-bound schedule) or all of
    /// `delta, r, u, v, w`.
    FourPoint {
        iota: u8,
        schedule_n: Option<usize>,
        delta: Option<f64>,
        r: Option<f64>,
        u: Option<f64>,
        v: Option<f64>,
        w: Option<f64>,
    },
    /// Either `schedule_n` (with `construction_seed`) or all of
    /// `l, w, delta, m, signs`. The metric exponent is `gamma.d`.
    Hypercube {
        schedule_n: Option<usize>,
        construction_seed: Option<u64>,
        l: Option<usize>,
        w: Option<f64>,
        delta: Option<f64>,
        m: Option<usize>,
        signs: Option<Vec<i8>>,
    },
    LaplaceLogistic {
        tau: f64,
        #[serde(default)]
        pi0: f64,
        #[serde(default)]
        pi1: f64,
    },
    Table {
        atoms: Vec<TableAtomJson>,
        metric: MetricJson,
        #[serde(default)]
        pi0: f64,
        #[serde(default)]
        pi1: f64,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecJson {
    pub family: FamilyJson,
    pub gamma: GammaJson,
}

fn param(message: String) -> noiseknn_core::Error {
    noiseknn_core::Error::Parameter(message)
}

impl SpecJson {
    pub fn build(&self) -> noiseknn_core::Result<DistributionSpec> {
        let g = self.gamma.to_params()?;
        let family = match &self.family {
            FamilyJson::FourPoint { iota, schedule_n, delta, r, u, v, w } => {
                let f = match (schedule_n, delta, r, u, v, w) {
                    (Some(n), None, None, None, None, None) => lb_parameters_unknown_noise(*n, &g)?.0,
                    (None, Some(dl), Some(r), Some(u), Some(v), Some(w)) => {
                        FourPointFamily::new(0, *dl, *r, *u, *v, *w, g.nu_max)?
                    }
                    _ => return Err(param("four-point needs either schedule_n or all of delta, r, u, v, w".into())),
                };
                match iota {
                    0 => Family::FourPoint(f),
                    1 => Family::FourPoint(f.twin()),
                    _ => return Err(param(format!("iota = {iota} must be 0 or 1"))),
                }
            }
            FamilyJson::Hypercube { schedule_n, construction_seed, l, w, delta, m, signs } => {
                match (schedule_n, l, w, delta, m, signs) {
                    (Some(n), None, None, None, None, None) => {
                        Family::Hypercube(lb_parameters_hypercube(*n, &g, construction_seed.unwrap_or(0))?)
                    }
                    (None, Some(l), Some(w), Some(dl), Some(m), Some(s)) if construction_seed.is_none() => {
                        Family::Hypercube(HypercubeFamily::new(*l, *w, *dl, *m, g.d, s.clone())?)
                    }
                    _ => {
                        return Err(param(
                            "hypercube needs either schedule_n (and optionally construction_seed) or all of l, w, delta, m, signs".into(),
                        ))
                    }
                }
            }
            FamilyJson::LaplaceLogistic { tau, pi0, pi1 } => {
                Family::LaplaceLogistic(LaplaceLogisticFamily::new(*tau, NoiseSpec::new(*pi0, *pi1, g.nu_max)?)?)
            }
            FamilyJson::Table { atoms, metric, pi0, pi1 } => {
                let entries = atoms.iter().map(|a| (a.mass, a.eta, a.omega)).collect();
                Family::UserTable(UserTable::from_atoms(entries, metric.to_metric()?, NoiseSpec::new(*pi0, *pi1, g.nu_max)?)?)
            }
        };
        DistributionSpec::new(family, g)
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(path, e.line().max(1), e.to_string()))
}

pub fn read_spec(path: &Path) -> Result<DistributionSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: SpecJson = read_json(path, &text)?;
    raw.build().map_err(|e| Error::invalid(path, e.to_string()))
}

/// `exact` or `mc:<count>`.
pub fn parse_risk_mode(s: &str) -> std::result::Result<RiskMode, String> {
    match s.trim() {
        "exact" => Ok(RiskMode::Exact),
        t => match t.strip_prefix("mc:").map(str::parse::<usize>) {
            Some(Ok(count)) if count > 0 => Ok(RiskMode::MonteCarlo(count)),
            _ => Err(format!("risk mode {s:?} must be \"exact\" or \"mc:<positive count>\"")),
        },
    }
}

pub fn risk_mode_str(mode: RiskMode) -> String {
    match mode {
        RiskMode::Exact => "exact".into(),
        RiskMode::MonteCarlo(count) => format!("mc:{count}"),
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SpecRef {
    Inline(SpecJson),
    /// Relative paths resolve against the config file's directory.
    Path(PathBuf),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepJson {
    pub spec: SpecRef,
    pub n_grid: Vec<usize>,
    pub trials_per_n: usize,
    pub delta: f64,
    pub risk_mode: String,
    #[serde(default)]
    pub base_seed: u64,
}

/// Reads and validates a sweep configuration.
pub fn read_sweep_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: SweepJson = read_json(path, &text)?;
    let spec = match &raw.spec {
        SpecRef::Inline(s) => s.build().map_err(|e| Error::invalid(path, e.to_string()))?,
        SpecRef::Path(p) => read_spec(&path.parent().unwrap_or(Path::new(".")).join(p))?,
    };
    let risk_mode = parse_risk_mode(&raw.risk_mode).map_err(|m| Error::invalid(path, m))?;
    let cfg = ExperimentConfig {
        spec,
        n_grid: raw.n_grid,
        trials_per_n: raw.trials_per_n,
        delta: raw.delta,
        risk_mode,
        base_seed: raw.base_seed,
    };
    cfg.validate().map_err(|e| Error::invalid(path, e.to_string()))?;
    Ok(cfg)
}
