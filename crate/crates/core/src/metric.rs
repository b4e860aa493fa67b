//! Points and the metrics the estimators run over.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::num;

/// Longest bit string the hypercube space supports.
pub const MAX_BITS: usize = 63;

/// A binary string of length `1..=63`, packed so that character `q`
/// (zero-based, left to right) is bit `q` of `bits`.
///
/// Length-one strings `"0"` and `"1"` are the two anchor atoms of the
/// hypercube space; every other atom has the family's full length.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    bits: u64,
    len: u8,
}

impl BitString {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_BITS {
            return Err(Error::Parameter(format!("bit string length {len} outside 1..={MAX_BITS}")));
        }
        let mask = (1u64 << len) - 1;
        if bits & !mask != 0 {
            return Err(Error::Parameter(format!("bits {bits:#x} exceed length {len}")));
        }
        Ok(BitString { bits, len: len as u8 })
    }

    /// Builds the string whose characters, read left to right, are the binary
    /// digits of `value` read most-significant first. Lexicographic order of
    /// the strings matches numeric order of `value`.
    pub fn from_msb_value(value: u64, len: usize) -> Result<Self> {
        if len == 0 || len > MAX_BITS || (len < 64 && value >> len != 0) {
            return Err(Error::Parameter(format!("value {value} does not fit {len} bits")));
        }
        let mut bits = 0u64;
        for q in 0..len {
            if (value >> (len - 1 - q)) & 1 == 1 {
                bits |= 1 << q;
            }
        }
        BitString::new(bits, len)
    }

    /// Inverse of [`BitString::from_msb_value`].
    pub fn msb_value(&self) -> u64 {
        let mut value = 0u64;
        for q in 0..self.len() {
            value = (value << 1) | u64::from(self.bit(q));
        }
        value
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut bits = 0u64;
        for (q, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' if q < MAX_BITS => bits |= 1 << q,
                '1' => {}
                _ => return Err(Error::Parameter(format!("not a bit string: {s:?}"))),
            }
        }
        BitString::new(bits, s.len())
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Character `q` (zero-based) as `0` or `1`.
    pub fn bit(&self, q: usize) -> u8 {
        ((self.bits >> q) & 1) as u8
    }

    pub fn last_bit(&self) -> u8 {
        self.bit(self.len() - 1)
    }

    /// Length of the longest common prefix of two equal-length strings.
    pub fn common_prefix(&self, other: &BitString) -> usize {
        let diff = self.bits ^ other.bits;
        (diff.trailing_zeros() as usize).min(self.len().min(other.len()))
    }

    pub fn is_anchor(&self) -> bool {
        self.len == 1
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.len() {
            f.write_str(if self.bit(q) == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

/// A point of one of the supported spaces.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    RealVector(Vec<f64>),
    /// Atom of a finite space, indexing a [`DistanceTable`].
    Symbol(u32),
    BitString(BitString),
}

impl Point {
    pub fn real(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::SpaceMismatch("empty coordinate vector".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point::RealVector(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Point::real(alloc::vec![x])
    }

    pub fn kind(&self) -> PointKind {
        match self {
            Point::RealVector(_) => PointKind::RealVector,
            Point::Symbol(_) => PointKind::Symbol,
            Point::BitString(_) => PointKind::BitString,
        }
    }

    /// Total order on the bit patterns of the point, used to group identical
    /// points. Two points compare equal only if every distance computed from
    /// them is bit-identical.
    pub(crate) fn identity_cmp(&self, other: &Point) -> Ordering {
        match (self, other) {
            (Point::RealVector(a), Point::RealVector(b)) => a
                .len()
                .cmp(&b.len())
                .then_with(|| a.iter().map(|c| c.to_bits()).cmp(b.iter().map(|c| c.to_bits()))),
            (Point::Symbol(a), Point::Symbol(b)) => a.cmp(b),
            (Point::BitString(a), Point::BitString(b)) => a.cmp(b),
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointKind {
    RealVector,
    Symbol,
    BitString,
}

/// Symmetric distance matrix over the atoms `0..size` of a finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceTable {
    size: usize,
    distances: Vec<f64>,
}

impl DistanceTable {
    /// Validates symmetry, a zero diagonal and finite, strictly positive
    /// off-diagonal entries. The triangle inequality is checked separately by
    /// [`DistanceTable::check_triangle_inequality`].
    pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::Parameter("distance table has no atoms".into()));
        }
        let mut distances = Vec::with_capacity(size * size);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Parameter(format!("distance table row {i} has {} entries, expected {size}", row.len())));
            }
            distances.extend_from_slice(row);
        }
        for i in 0..size {
            for j in 0..size {
                let dij = distances[i * size + j];
                if !dij.is_finite() || dij < 0.0 {
                    return Err(Error::Parameter(format!("distance ({i}, {j}) = {dij} is not a finite nonnegative number")));
                }
                if (i == j) != (dij == 0.0) {
                    return Err(Error::Parameter(format!("distance ({i}, {j}) = {dij} violates identity of indiscernibles")));
                }
                if dij != distances[j * size + i] {
                    return Err(Error::Parameter(format!("distance table is not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(DistanceTable { size, distances })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.distances.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    /// Exhaustive triangle-inequality check over all ordered triples.
    pub fn check_triangle_inequality(&self) -> Result<()> {
        let n = self.size;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) {
                        return Err(Error::Parameter(format!("triangle inequality fails for atoms ({i}, {j}, {k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The metric `rho` of the space.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Euclidean,
    DiscreteTable(DistanceTable),
    /// `rho(x, y) = 2^(-|x ^ y| / d)` for distinct strings of equal length,
    /// where `|x ^ y|` is the longest common prefix; `1` whenever one side is
    /// an anchor atom.
    HypercubeUltrametric { d: f64 },
}

impl Metric {
    pub fn hypercube(d: f64) -> Result<Self> {
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Parameter(format!("hypercube exponent d = {d} must be positive")));
        }
        Ok(Metric::HypercubeUltrametric { d })
    }

    /// Checks that `p` belongs to the space this metric describes.
    pub fn check_point(&self, p: &Point) -> Result<()> {
        match (self, p) {
            (Metric::Euclidean, Point::RealVector(c)) => {
                if c.iter().all(|v| v.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::NonFinite)
                }
            }
            (Metric::DiscreteTable(t), Point::Symbol(s)) if (*s as usize) < t.size() => Ok(()),
            (Metric::DiscreteTable(t), Point::Symbol(s)) => {
                Err(Error::SpaceMismatch(format!("symbol {s} outside table of {} atoms", t.size())))
            }
            (Metric::HypercubeUltrametric { .. }, Point::BitString(_)) => Ok(()),
            _ => Err(Error::SpaceMismatch(format!("{:?} point under {} metric", p.kind(), self.name()))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::DiscreteTable(_) => "discrete-table",
            Metric::HypercubeUltrametric { .. } => "hypercube",
        }
    }
}

/// `rho(a, b)`.
pub fn distance(m: &Metric, a: &Point, b: &Point) -> Result<f64> {
    match (m, a, b) {
        (Metric::Euclidean, Point::RealVector(x), Point::RealVector(y)) => {
            if x.len() != y.len() {
                return Err(Error::SpaceMismatch(format!("dimensions {} and {}", x.len(), y.len())));
            }
            Ok(euclidean(x, y))
        }
        (Metric::DiscreteTable(t), Point::Symbol(i), Point::Symbol(j)) => {
            let (i, j) = (*i as usize, *j as usize);
            if i >= t.size() || j >= t.size() {
                return Err(Error::SpaceMismatch(format!("symbols ({i}, {j}) outside table of {} atoms", t.size())));
            }
            Ok(t.get(i, j))
        }
        (Metric::HypercubeUltrametric { d }, Point::BitString(x), Point::BitString(y)) => hypercube(*d, x, y),
        _ => Err(Error::SpaceMismatch(format!(
            "{:?} and {:?} points under {} metric",
            a.kind(),
            b.kind(),
            m.name()
        ))),
    }
}

#[inline]
pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y) {
        let diff = a - b;
        acc += diff * diff;
    }
    num::sqrt(acc)
}

fn hypercube(d: f64, x: &BitString, y: &BitString) -> Result<f64> {
    if x == y {
        return Ok(0.0);
    }
    if x.is_anchor() || y.is_anchor() {
        return Ok(1.0);
    }
    if x.len() != y.len() {
        return Err(Error::SpaceMismatch(format!("bit strings of lengths {} and {}", x.len(), y.len())));
    }
    let prefix = x.common_prefix(y) as f64;
    Ok(num::powf(2.0, -prefix / d))
}

/// Human-readable rendering used in error messages.
pub fn describe(p: &Point) -> String {
    match p {
        Point::RealVector(c) => format!("{c:?}"),
        Point::Symbol(s) => format!("#{s}"),
        Point::BitString(b) => format!("{b}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn bits(s: &str) -> Point {
        Point::BitString(BitString::parse(s).unwrap())
    }

    #[test]
    fn euclidean_identity() {
        let a = Point::real(vec![0.3, -1.2]).unwrap();
        assert_eq!(distance(&Metric::Euclidean, &a, &a).unwrap(), 0.0);
    }

    #[test]
    fn hypercube_prefix_distance() {
        let m = Metric::hypercube(1.0).unwrap();
        assert_eq!(distance(&m, &bits("0110"), &bits("0100")).unwrap(), 0.25);
        assert_eq!(distance(&m, &bits("0110"), &bits("1110")).unwrap(), 1.0);
        assert_eq!(distance(&m, &bits("0"), &bits("0110")).unwrap(), 1.0);
        assert_eq!(distance(&m, &bits("0"), &bits("1")).unwrap(), 1.0);
        assert_eq!(distance(&m, &bits("1"), &bits("1")).unwrap(), 0.0);
    }

    #[test]
    fn hypercube_exponent_scales_distance() {
        let m = Metric::hypercube(2.0).unwrap();
        let got = distance(&m, &bits("0110"), &bits("0100")).unwrap();
        assert!((got - 0.5).abs() < 1e-15);
    }

    #[test]
    fn mismatched_kinds_are_rejected() {
        let m = Metric::Euclidean;
        let a = Point::scalar(1.0).unwrap();
        assert!(matches!(distance(&m, &a, &Point::Symbol(0)), Err(Error::SpaceMismatch(_))));
        let b = Point::real(vec![1.0, 2.0]).unwrap();
        assert!(matches!(distance(&m, &a, &b), Err(Error::SpaceMismatch(_))));
        let h = Metric::hypercube(1.0).unwrap();
        assert!(distance(&h, &bits("011"), &bits("0110")).is_err());
    }

    #[test]
    fn non_finite_coordinates_are_rejected() {
        assert_eq!(Point::real(vec![f64::NAN]), Err(Error::NonFinite));
        assert_eq!(Point::real(vec![1.0, f64::INFINITY]), Err(Error::NonFinite));
    }

    #[test]
    fn distance_table_validation() {
        assert!(DistanceTable::new(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceTable::new(&[vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
        let t = DistanceTable::new(&[vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]]).unwrap();
        assert!(t.check_triangle_inequality().is_err());
    }

    #[test]
    fn bitstring_round_trip_and_order() {
        let b = BitString::parse("0110").unwrap();
        assert_eq!(alloc::format!("{b}"), "0110");
        assert_eq!(b.last_bit(), 0);
        assert_eq!(BitString::from_msb_value(0b0110, 4).unwrap(), b);
        assert!(BitString::parse("01a").is_err());
        assert!(BitString::parse("").is_err());
    }
}
