//! JSON encodings of points and metrics, and the JSON Lines data files.
//!
//! A point is a number (scalar), an array of numbers (vector), a string of
//! `0`/`1` (bit string) or `{"symbol": i}` (atom of a finite space). A data
//! file holds one `{"x": point, "y": response}` record per line, optionally
//! preceded by a `{"metric": ...}` header; without the header the points must
//! be real and the metric is Euclidean. Query files hold `{"x": point}` lines.

use std::fs;
use std::io::Write;
use std::path::Path;

use noiseknn_core::metric::DistanceTable;
use noiseknn_core::{BitString, Dataset, Metric, Point};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MetricJson {
    Euclidean,
    Hypercube { d: f64 },
    Table { rows: Vec<Vec<f64>> },
}

impl MetricJson {
    pub fn from_metric(m: &Metric) -> Self {
        match m {
            Metric::Euclidean => MetricJson::Euclidean,
            Metric::HypercubeUltrametric { d } => MetricJson::Hypercube { d: *d },
            Metric::DiscreteTable(t) => MetricJson::Table { rows: t.rows() },
        }
    }

    pub fn to_metric(&self) -> noiseknn_core::Result<Metric> {
        match self {
            MetricJson::Euclidean => Ok(Metric::Euclidean),
            MetricJson::Hypercube { d } => Metric::hypercube(*d),
            MetricJson::Table { rows } => Ok(Metric::DiscreteTable(DistanceTable::new(rows)?)),
        }
    }
}

pub fn point_to_json(p: &Point) -> Value {
    match p {
        Point::RealVector(c) if c.len() == 1 => json!(c[0]),
        Point::RealVector(c) => json!(c),
        Point::BitString(b) => json!(b.to_string()),
        Point::Symbol(s) => json!({ "symbol": s }),
    }
}

pub fn point_from_json(v: &Value) -> std::result::Result<Point, String> {
    match v {
        Value::Number(n) => {
            let x = n.as_f64().ok_or("number out of range")?;
            Point::scalar(x).map_err(|e| e.to_string())
        }
        Value::Array(items) => {
            let coords = items
                .iter()
                .map(|c| c.as_f64().ok_or_else(|| format!("coordinate {c} is not a number")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            Point::real(coords).map_err(|e| e.to_string())
        }
        Value::String(s) => BitString::parse(s).map(Point::BitString).map_err(|e| e.to_string()),
        Value::Object(map) => match (map.get("symbol"), map.len()) {
            (Some(s), 1) => {
                let i = s.as_u64().filter(|&i| i <= u32::MAX as u64).ok_or_else(|| format!("symbol {s} is not a small non-negative integer"))?;
                Ok(Point::Symbol(i as u32))
            }
            _ => Err("object points must be {\"symbol\": index}".into()),
        },
        _ => Err(format!("{v} is not a point")),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Non-blank lines with their 1-based numbers.
fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    metric: MetricJson,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    x: Value,
    y: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Query {
    x: Value,
}

/// Checks a point against the metric and against the first point's dimension.
fn check_point(metric: &Metric, p: &Point, first: Option<&Point>) -> std::result::Result<(), String> {
    metric.check_point(p).map_err(|e| e.to_string())?;
    if let (Point::RealVector(a), Some(Point::RealVector(b))) = (p, first) {
        if a.len() != b.len() {
            return Err(format!("dimension {} differs from {} on earlier lines", a.len(), b.len()));
        }
    }
    Ok(())
}

/// Reads a data file; errors name the first offending line.
pub fn read_dataset(path: &Path) -> Result<(Dataset, Metric)> {
    let text = read_text(path)?;
    let mut lines = numbered_lines(&text).peekable();
    let mut metric = None;
    if let Some((line, l)) = lines.peek().copied() {
        let v: Value = serde_json::from_str(l).map_err(|e| Error::parse(path, line, e.to_string()))?;
        if v.get("metric").is_some() {
            let h: Header = serde_json::from_value(v).map_err(|e| Error::parse(path, line, e.to_string()))?;
            metric = Some(h.metric.to_metric().map_err(|e| Error::parse(path, line, e.to_string()))?);
            lines.next();
        }
    }
    let metric = metric.unwrap_or(Metric::Euclidean);
    let mut points = Vec::new();
    let mut responses = Vec::new();
    for (line, l) in lines {
        let r: Record = serde_json::from_str(l).map_err(|e| Error::parse(path, line, e.to_string()))?;
        let p = point_from_json(&r.x).map_err(|m| Error::parse(path, line, m))?;
        check_point(&metric, &p, points.first()).map_err(|m| Error::parse(path, line, m))?;
        if !(0.0..=1.0).contains(&r.y) {
            return Err(Error::parse(path, line, format!("response {} outside [0, 1]", r.y)));
        }
        points.push(p);
        responses.push(r.y);
    }
    if points.is_empty() {
        return Err(Error::invalid(path, "no records"));
    }
    let ds = Dataset::new(points, responses).map_err(|e| Error::invalid(path, e.to_string()))?;
    Ok((ds, metric))
}

/// Reads a query file, checking every point against the sample's space.
pub fn read_queries(path: &Path, metric: &Metric, sample: &Dataset) -> Result<Vec<Point>> {
    let text = read_text(path)?;
    let reference = sample.points().first();
    let mut out = Vec::new();
    for (line, l) in numbered_lines(&text) {
        let q: Query = serde_json::from_str(l).map_err(|e| Error::parse(path, line, e.to_string()))?;
        let p = point_from_json(&q.x).map_err(|m| Error::parse(path, line, m))?;
        check_point(metric, &p, reference).map_err(|m| Error::parse(path, line, m))?;
        out.push(p);
    }
    Ok(out)
}

fn response_json(z: f64) -> Value {
    if z == 0.0 || z == 1.0 {
        json!(z as u8)
    } else {
        json!(z)
    }
}

/// Data file contents: the metric header and one record per line.
pub fn dataset_to_jsonl(ds: &Dataset, metric: &Metric) -> String {
    let mut out = json!({ "metric": MetricJson::from_metric(metric) }).to_string();
    out.push('\n');
    for (p, &z) in ds.points().iter().zip(ds.responses()) {
        out.push_str(&json!({ "x": point_to_json(p), "y": response_json(z) }).to_string());
        out.push('\n');
    }
    out
}

pub fn queries_to_jsonl(points: &[Point]) -> String {
    points.iter().map(|p| json!({ "x": point_to_json(p) }).to_string() + "\n").collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| Error::io(path, e))
}
