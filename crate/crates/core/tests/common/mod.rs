//! Brute-force oracles and seeded random datasets shared by the integration
//! tests (also included by the acceptance suite of the `noiseknn` crate).
#![allow(dead_code)]

use noiseknn_core::metric::{distance, DistanceTable};
use noiseknn_core::rng::CounterRng;
use noiseknn_core::{BitString, Dataset, Metric, Point};

/// Sequential draws from a [`CounterRng`] stream.
pub struct Draws {
    rng: CounterRng,
    record: u64,
    slot: usize,
    words: [u64; 8],
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        let mut rng = CounterRng::new(seed, 99);
        let words = rng.record(0).0;
        Draws { rng, record: 0, slot: 0, words }
    }

    pub fn word(&mut self) -> u64 {
        if self.slot == 8 {
            self.record += 1;
            self.words = self.rng.record(self.record).0;
            self.slot = 0;
        }
        self.slot += 1;
        self.words[self.slot - 1]
    }

    pub fn uniform(&mut self) -> f64 {
        (self.word() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform on `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

#[derive(Clone, Debug)]
pub struct Case {
    pub ds: Dataset,
    pub metric: Metric,
    pub queries: Vec<Point>,
    pub kind: &'static str,
}

fn response(d: &mut Draws, style: usize) -> f64 {
    match style {
        0 => (d.uniform() < 0.5) as u8 as f64,
        1 => d.below(5) as f64 / 4.0,
        _ => d.uniform(),
    }
}

/// A random dataset with `1..=n_max` records in one of five spaces, chosen
/// so that distance ties and duplicate points are common.
pub fn random_case(seed: u64, n_max: usize) -> Case {
    let mut d = Draws::new(seed);
    let n = 1 + d.below(n_max);
    let style = d.below(3);
    let kind = d.below(5);
    let (metric, point): (Metric, Box<dyn Fn(&mut Draws) -> Point>) = match kind {
        0 => (Metric::Euclidean, Box::new(|d: &mut Draws| Point::scalar(d.below(17) as f64 / 4.0 - 2.0).unwrap())),
        1 => (Metric::Euclidean, Box::new(|d: &mut Draws| Point::scalar(d.range(-3.0, 3.0)).unwrap())),
        2 => (
            Metric::Euclidean,
            Box::new(|d: &mut Draws| Point::real(vec![d.below(5) as f64, d.below(5) as f64 - 2.0]).unwrap()),
        ),
        3 => {
            let len = 1 + d.below(6);
            let dim = [0.5, 1.0, 2.0][d.below(3)];
            (
                Metric::hypercube(dim).unwrap(),
                Box::new(move |d: &mut Draws| {
                    // Occasionally an anchor-length string.
                    let l = if d.below(8) == 0 { 1 } else { len };
                    Point::BitString(BitString::from_msb_value(d.word() & ((1u64 << l) - 1), l).unwrap())
                }),
            )
        }
        _ => {
            let size = 2 + d.below(5);
            let mut rows = vec![vec![0.0; size]; size];
            for i in 0..size {
                for j in i + 1..size {
                    // Entries in [1, 2] always satisfy the triangle inequality.
                    let v = 1.0 + d.below(5) as f64 / 4.0;
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            let table = DistanceTable::new(&rows).unwrap();
            (Metric::DiscreteTable(table), Box::new(move |d: &mut Draws| Point::Symbol(d.below(size) as u32)))
        }
    };
    let points: Vec<Point> = (0..n).map(|_| point(&mut d)).collect();
    let responses: Vec<f64> = (0..n).map(|_| response(&mut d, style)).collect();
    let mut queries: Vec<Point> = (0..3).map(|_| point(&mut d)).collect();
    queries.push(points[d.below(n)].clone());
    let names = ["line-grid", "line", "plane-grid", "bit-strings", "table"];
    Case { ds: Dataset::new(points, responses).unwrap(), metric, queries, kind: names[kind] }
}

/// `(distance, index)` pairs sorted lexicographically by a full sort.
pub fn brute_order(ds: &Dataset, m: &Metric, x: &Point) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = ds.points().iter().enumerate().map(|(i, p)| (distance(m, x, p).unwrap(), i)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    v
}

/// Mean of the first `k` responses in `order`, summed from scratch.
pub fn brute_mean(ds: &Dataset, order: &[(f64, usize)], k: usize) -> f64 {
    order[..k].iter().map(|&(_, i)| ds.responses()[i]).sum::<f64>() / k as f64
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteLepski {
    pub k: usize,
    pub value: f64,
    pub fallback: bool,
}

/// Lepski's rule by testing, for every `k` independently, whether the bands
/// of all `q` in `[k_min, k]` share a point. Quadratic in `n`.
pub fn brute_lepski(ds: &Dataset, m: &Metric, x: &Point, delta: f64) -> BruteLepski {
    let n = ds.len();
    let order = brute_order(ds, m, x);
    let k_min = (8.0 * (2.0 * n as f64 / delta).ln()).ceil() as usize;
    let k_max = n / 2;
    if k_min > k_max {
        return BruteLepski { k: n, value: brute_mean(ds, &order, n), fallback: true };
    }
    let means: Vec<f64> = (1..=n).map(|k| brute_mean(ds, &order, k)).collect();
    let half = |k: usize| (2.0 * (4.0 * n as f64 / delta).ln() / k as f64).sqrt();
    let mut best = k_min;
    for k in k_min..=k_max {
        let lower = (k_min..=k).map(|q| means[q - 1] - half(q)).fold(f64::NEG_INFINITY, f64::max);
        let upper = (k_min..=k).map(|q| means[q - 1] + half(q)).fold(f64::INFINITY, f64::min);
        if lower <= upper {
            best = k;
        }
    }
    BruteLepski { k: best, value: means[best - 1], fallback: false }
}

/// `max over (i, k)` of `f_hat_{n,k}(X_i) - sqrt(ln(4n/delta)/k)`, earliest
/// `(i, k)` on ties. Cubic in `n`.
pub fn brute_sup(ds: &Dataset, m: &Metric, delta: f64) -> (f64, usize, usize) {
    let n = ds.len();
    let log_term = (4.0 * n as f64 / delta).ln();
    let mut best = (f64::NEG_INFINITY, 0, 0);
    for (i, xi) in ds.points().iter().enumerate() {
        let order = brute_order(ds, m, xi);
        for k in 1..=n {
            let v = brute_mean(ds, &order, k) - (log_term / k as f64).sqrt();
            if v > best.0 {
                best = (v, i, k);
            }
        }
    }
    best
}
