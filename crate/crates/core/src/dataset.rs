use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::metric::{Point, PointKind};

/// An immutable sample of `(point, response)` pairs with responses in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    points: Vec<Point>,
    responses: Vec<f64>,
}

impl Dataset {
    pub fn new(points: Vec<Point>, responses: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidDataset("no records".into()));
        }
        if points.len() != responses.len() {
            return Err(Error::InvalidDataset(format!(
                "{} points but {} responses",
                points.len(),
                responses.len()
            )));
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidDataset("too many records".into()));
        }
        let kind = points[0].kind();
        for (i, p) in points.iter().enumerate() {
            if p.kind() != kind {
                return Err(Error::InvalidDataset(format!("record {i} mixes {:?} with {kind:?} points", p.kind())));
            }
            if let (Point::RealVector(a), Point::RealVector(b)) = (p, &points[0]) {
                if a.len() != b.len() {
                    return Err(Error::InvalidDataset(format!("record {i} has dimension {}, expected {}", a.len(), b.len())));
                }
                if a.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFinite);
                }
            }
        }
        for (index, &value) in responses.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidResponse { index, value });
            }
        }
        Ok(Dataset { points, responses })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn point_kind(&self) -> PointKind {
        self.points[0].kind()
    }

    /// True when every response is exactly `0` or `1`.
    pub fn is_binary(&self) -> bool {
        self.responses.iter().all(|&z| z == 0.0 || z == 1.0)
    }

    pub fn check_binary(&self) -> Result<()> {
        match self.responses.iter().position(|&z| z != 0.0 && z != 1.0) {
            None => Ok(()),
            Some(index) => Err(Error::InvalidResponse { index, value: self.responses[index] }),
        }
    }

    /// The same points with every response `z` replaced by `1 - z`.
    pub fn complement(&self) -> Dataset {
        Dataset {
            points: self.points.clone(),
            responses: self.responses.iter().map(|z| 1.0 - z).collect(),
        }
    }

    /// Reorders the records; `perm[j]` is the old index placed at position `j`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Dataset> {
        if perm.len() != self.len() {
            return Err(Error::InvalidDataset("permutation length mismatch".into()));
        }
        let mut seen = alloc::vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || core::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidDataset("not a permutation".into()));
            }
        }
        Ok(Dataset {
            points: perm.iter().map(|&i| self.points[i].clone()).collect(),
            responses: perm.iter().map(|&i| self.responses[i]).collect(),
        })
    }

    pub fn mean_response(&self) -> f64 {
        self.responses.iter().sum::<f64>() / self.len() as f64
    }
}
