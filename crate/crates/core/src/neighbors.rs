//! Exact neighbour orderings and prefix means.
//!
//! Every estimator in the crate consumes the sample sorted by distance to a
//! query point, ties broken by ascending sample index. [`neighbor_order`] is
//! the reference implementation (full sort). [`NeighborIndex`] produces the
//! same sequence lazily and, for one-dimensional Euclidean data, in `O(k)`
//! per query by merging outward from the query's position in a pre-sorted
//! copy of the sample.

use alloc::borrow::Cow;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metric::{self, distance, Metric, Point};

/// Running arithmetic mean, kept as `first + sum(z - first) / k`.
///
/// A constant stream keeps the mean exactly equal to the constant, and for
/// binary responses the shifted sum is an exact integer. The only loop-carried
/// operation is the addition.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct RunningMean {
    count: usize,
    first: f64,
    shifted: f64,
}

impl RunningMean {
    #[inline]
    pub(crate) fn push(&mut self, z: f64) -> f64 {
        if self.count == 0 {
            self.first = z;
        }
        self.count += 1;
        self.shifted += z - self.first;
        (self.first + self.shifted / self.count as f64).clamp(0.0, 1.0)
    }
}

/// The sample sorted by distance to `query`, with the means of the `k`
/// nearest responses for every `k`.
///
/// Indices are zero-based positions in the dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborOrder {
    query: Point,
    order: Vec<u32>,
    distances: Vec<f64>,
    prefix_means: Vec<f64>,
}

impl NeighborOrder {
    fn from_sorted(query: Point, sorted: impl Iterator<Item = (u32, f64)>, responses: &[f64]) -> Self {
        let n = responses.len();
        let mut order = Vec::with_capacity(n);
        let mut distances = Vec::with_capacity(n);
        let mut prefix_means = Vec::with_capacity(n);
        let mut mean = RunningMean::default();
        for (i, d) in sorted {
            order.push(i);
            distances.push(d);
            prefix_means.push(mean.push(responses[i as usize]));
        }
        NeighborOrder { query, order, distances, prefix_means }
    }

    pub fn query(&self) -> &Point {
        &self.query
    }

    /// Sample indices, nearest first.
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Nondecreasing distances aligned with [`NeighborOrder::order`].
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// Entry `k - 1` is the mean response of the `k` nearest points.
    pub fn prefix_means(&self) -> &[f64] {
        &self.prefix_means
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Sorts the sample by distance to `x` (ties by ascending index) and computes
/// all prefix means.
pub fn neighbor_order(ds: &Dataset, m: &Metric, x: &Point) -> Result<NeighborOrder> {
    let sorted = sorted_by_distance(ds, m, x)?;
    Ok(NeighborOrder::from_sorted(x.clone(), sorted.into_iter().map(|(d, i)| (i, d)), ds.responses()))
}

fn sorted_by_distance(ds: &Dataset, m: &Metric, x: &Point) -> Result<Vec<(f64, u32)>> {
    m.check_point(x)?;
    let mut keyed = Vec::with_capacity(ds.len());
    for (i, p) in ds.points().iter().enumerate() {
        keyed.push((distance(m, x, p)?, i as u32));
    }
    keyed.sort_unstable_by(by_distance_then_index);
    Ok(keyed)
}

#[inline]
fn by_distance_then_index(a: &(f64, u32), b: &(f64, u32)) -> Ordering {
    // distances are never NaN
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// `f_hat_{n,k}(x)`: the mean response of the `k` nearest points.
pub fn knn_estimate(no: &NeighborOrder, k: usize) -> Result<f64> {
    if k == 0 || k > no.len() {
        return Err(Error::KOutOfRange { k, n: no.len() });
    }
    Ok(no.prefix_means[k - 1])
}

/// Produces neighbour sequences for many queries against one sample.
///
/// Output is identical to [`neighbor_order`], element for element.
#[derive(Clone, Debug)]
pub struct NeighborIndex<'a> {
    ds: &'a Dataset,
    metric: &'a Metric,
    line: Option<Cow<'a, [(f64, u32)]>>,
}

/// Sample coordinates sorted ascending (ties by index), kept by owners of a
/// dataset that want to build [`NeighborIndex`] values cheaply.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedLine(Vec<(f64, u32)>);

impl SortedLine {
    /// `Some` for one-dimensional Euclidean samples, the only case with a
    /// merge-based fast path.
    pub fn build(ds: &Dataset, metric: &Metric) -> Option<SortedLine> {
        match (metric, &ds.points()[0]) {
            (Metric::Euclidean, Point::RealVector(c)) if c.len() == 1 => {
                let mut line: Vec<(f64, u32)> = ds
                    .points()
                    .iter()
                    .enumerate()
                    .map(|(i, p)| match p {
                        Point::RealVector(c) => (c[0], i as u32),
                        _ => unreachable!("dataset points share one kind"),
                    })
                    .collect();
                line.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                Some(SortedLine(line))
            }
            _ => None,
        }
    }
}

impl<'a> NeighborIndex<'a> {
    pub fn new(ds: &'a Dataset, metric: &'a Metric) -> Result<Self> {
        for p in ds.points() {
            metric.check_point(p)?;
        }
        let line = SortedLine::build(ds, metric).map(|l| Cow::Owned(l.0));
        Ok(NeighborIndex { ds, metric, line })
    }

    /// Reuses a line previously built by [`SortedLine::build`] for this
    /// dataset and metric. Points are assumed validated.
    pub fn with_line(ds: &'a Dataset, metric: &'a Metric, line: Option<&'a SortedLine>) -> Self {
        NeighborIndex { ds, metric, line: line.map(|l| Cow::Borrowed(&l.0[..])) }
    }

    pub fn dataset(&self) -> &'a Dataset {
        self.ds
    }

    pub fn metric(&self) -> &'a Metric {
        self.metric
    }

    /// Calls `visit(index, distance)` for the sample in neighbour order until
    /// it returns `false` or the sample is exhausted.
    pub fn visit(&self, x: &Point, mut visit: impl FnMut(u32, f64) -> bool) -> Result<()> {
        self.metric.check_point(x)?;
        match (&self.line, x) {
            (Some(line), Point::RealVector(c)) if c.len() == 1 => {
                merge_outward(line, c[0], visit);
                Ok(())
            }
            (Some(_), _) => Err(Error::SpaceMismatch("query dimension differs from the sample".into())),
            (None, _) => {
                for (d, i) in sorted_by_distance(self.ds, self.metric, x)? {
                    if !visit(i, d) {
                        break;
                    }
                }
                Ok(())
            }
        }
    }

    /// Like [`NeighborIndex::visit`] but hands over responses and running
    /// prefix means: `visit(k, index, f_hat_{n,k}(x))`.
    pub fn visit_means(&self, x: &Point, mut visit: impl FnMut(usize, u32, f64) -> bool) -> Result<()> {
        let responses = self.ds.responses();
        let mut mean = RunningMean::default();
        let mut k = 0;
        self.visit(x, |i, _| {
            k += 1;
            visit(k, i, mean.push(responses[i as usize]))
        })
    }

    pub fn order(&self, x: &Point) -> Result<NeighborOrder> {
        let mut sorted = Vec::with_capacity(self.ds.len());
        self.visit(x, |i, d| {
            sorted.push((i, d));
            true
        })?;
        Ok(NeighborOrder::from_sorted(x.clone(), sorted.into_iter(), self.ds.responses()))
    }
}

/// `metric::euclidean(&[x], &[c])`. In binary floating point
/// `sqrt(fl(a * a)) == |a|` unless `a * a` under- or overflows, so the square
/// root is skipped inside that range.
#[inline]
fn line_distance(x: f64, c: f64) -> f64 {
    let a = (x - c).abs();
    if (1e-150..=1e150).contains(&a) {
        a
    } else {
        metric::euclidean(&[x], &[c])
    }
}

/// Emits `(index, distance)` sorted by distance then index from a line sorted
/// by coordinate. Distances grow monotonically away from `x` on each side, so
/// the two frontiers are merged; equal-distance groups are re-sorted by index.
fn merge_outward(line: &[(f64, u32)], x: f64, mut visit: impl FnMut(u32, f64) -> bool) {
    let n = line.len();
    let mut right = line.partition_point(|&(c, _)| c < x);
    let mut left = right;
    let mut group: Vec<u32> = Vec::new();
    let mut dl = if left > 0 { line_distance(x, line[left - 1].0) } else { f64::INFINITY };
    let mut dr = if right < n { line_distance(x, line[right].0) } else { f64::INFINITY };
    while left > 0 || right < n {
        // Strictly closer frontier whose next element is not tied either.
        if dl < dr && (left < 2 || line_distance(x, line[left - 2].0) != dl) {
            let i = line[left - 1].1;
            left -= 1;
            let d = dl;
            dl = if left > 0 { line_distance(x, line[left - 1].0) } else { f64::INFINITY };
            if !visit(i, d) {
                return;
            }
            continue;
        }
        if dr < dl && (right + 1 >= n || line_distance(x, line[right + 1].0) != dr) {
            let i = line[right].1;
            right += 1;
            let d = dr;
            dr = if right < n { line_distance(x, line[right].0) } else { f64::INFINITY };
            if !visit(i, d) {
                return;
            }
            continue;
        }
        let d = dl.min(dr);
        group.clear();
        while left > 0 && dl == d {
            group.push(line[left - 1].1);
            left -= 1;
            dl = if left > 0 { line_distance(x, line[left - 1].0) } else { f64::INFINITY };
        }
        while right < n && dr == d {
            group.push(line[right].1);
            right += 1;
            dr = if right < n { line_distance(x, line[right].0) } else { f64::INFINITY };
        }
        if group.len() > 1 {
            group.sort_unstable();
        }
        for &i in &group {
            if !visit(i, d) {
                return;
            }
        }
    }
}

/// Groups sample indices by identical point. Queries at identical points
/// produce identical neighbour sequences, so estimators sweeping every sample
/// point only need one pass per group. Groups are returned in ascending order
/// of their smallest index, and indices inside a group ascend.
pub(crate) fn identical_point_groups(ds: &Dataset) -> Vec<Vec<u32>> {
    let mut idx: Vec<u32> = (0..ds.len() as u32).collect();
    let pts = ds.points();
    idx.sort_by(|&a, &b| pts[a as usize].identity_cmp(&pts[b as usize]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<u32>> = Vec::new();
    for i in idx {
        match groups.last_mut() {
            Some(g) if pts[g[0] as usize].identity_cmp(&pts[i as usize]) == Ordering::Equal => g.push(i),
            _ => groups.push(alloc::vec![i]),
        }
    }
    groups.sort_by_key(|g| g[0]);
    groups
}
