//! Finite families given atom by atom.

use alloc::format;
use alloc::vec::Vec;

use super::{symbol_index, Atom, NoiseSpec};
use crate::error::{Error, Result};
use crate::metric::{Metric, Point};

/// Atoms `0..len` of a [`Metric::DiscreteTable`] with explicit masses,
/// regression values and `omega` values.
#[derive(Clone, Debug, PartialEq)]
pub struct UserTable {
    masses: Vec<f64>,
    etas: Vec<f64>,
    omegas: Vec<f64>,
    metric: Metric,
    pub noise: NoiseSpec,
}

impl UserTable {
    /// `entries[i] = (mass, eta, omega)` of symbol `i`. Masses must be
    /// non-negative and sum to one within `1e-12`.
    pub fn from_atoms(entries: Vec<(f64, f64, f64)>, metric: Metric, noise: NoiseSpec) -> Result<Self> {
        let Metric::DiscreteTable(table) = &metric else {
            return Err(Error::SpaceMismatch(format!("table families need a discrete-table metric, got {}", metric.name())));
        };
        if entries.len() != table.size() {
            return Err(Error::Parameter(format!("{} atoms for a table of size {}", entries.len(), table.size())));
        }
        for (i, &(mass, eta, omega)) in entries.iter().enumerate() {
            if !(mass >= 0.0 && mass.is_finite()) {
                return Err(Error::Parameter(format!("atom {i}: mass {mass} must be non-negative")));
            }
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::Parameter(format!("atom {i}: eta {eta} outside [0, 1]")));
            }
            if !(omega > 0.0 && omega < 1.0) {
                return Err(Error::Parameter(format!("atom {i}: omega {omega} outside (0, 1)")));
            }
        }
        let total: f64 = entries.iter().map(|e| e.0).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("masses sum to {total}, not 1")));
        }
        Ok(UserTable {
            masses: entries.iter().map(|e| e.0).collect(),
            etas: entries.iter().map(|e| e.1).collect(),
            omegas: entries.iter().map(|e| e.2).collect(),
            metric,
            noise,
        })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn metric(&self) -> Metric {
        self.metric.clone()
    }

    pub fn atoms(&self) -> Vec<Atom> {
        (0..self.len())
            .map(|i| Atom { point: Point::Symbol(i as u32), mass: self.masses[i], eta: self.etas[i], omega: self.omegas[i] })
            .collect()
    }

    pub fn eta(&self, x: &Point) -> Result<f64> {
        Ok(self.etas[symbol_index(x, self.len())?])
    }

    pub fn omega(&self, x: &Point) -> Result<f64> {
        Ok(self.omegas[symbol_index(x, self.len())?])
    }
}
