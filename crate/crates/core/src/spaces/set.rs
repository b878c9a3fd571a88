use serde::{Deserialize, Serialize};

use super::norm::{NormedSpace, Point};
use super::projection;
use crate::error::{Error, Result};

/// Membership and projection tolerance shared by the geometry layer.
pub const SET_TOL: f64 = 1e-9;

/// A nonempty compact subset of a finite-dimensional space.
///
/// `Interval` and `Polytope` are convex (the values a KC-valued map may take);
/// `Points` is a general finite set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub enum CompactSet {
    Interval { lo: f64, hi: f64 },
    Polytope { vertices: Vec<Point> },
    Points { points: Vec<Point> },
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawSet {
    Interval([f64; 2]),
    Polytope(Vec<Point>),
    Points(Vec<Point>),
}

impl TryFrom<RawSet> for CompactSet {
    type Error = Error;

    fn try_from(raw: RawSet) -> Result<Self> {
        match raw {
            RawSet::Interval([lo, hi]) => CompactSet::interval(lo, hi),
            RawSet::Polytope(v) => CompactSet::polytope(v),
            RawSet::Points(p) => CompactSet::points(p),
        }
    }
}

impl From<CompactSet> for RawSet {
    fn from(set: CompactSet) -> Self {
        match set {
            CompactSet::Interval { lo, hi } => RawSet::Interval([lo, hi]),
            CompactSet::Polytope { vertices } => RawSet::Polytope(vertices),
            CompactSet::Points { points } => RawSet::Points(points),
        }
    }
}

fn check_same_dim(points: &[Point], what: &str) -> Result<()> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidSet(format!("{what} must be nonempty")));
    };
    if let Some(bad) = points.iter().find(|p| p.dim() != first.dim()) {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            actual: bad.dim(),
        });
    }
    Ok(())
}

impl CompactSet {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lo > hi {
            return Err(Error::InvalidSet(format!(
                "interval with lo {lo} > hi {hi}"
            )));
        }
        Ok(CompactSet::Interval { lo, hi })
    }

    pub fn polytope(vertices: Vec<Point>) -> Result<Self> {
        check_same_dim(&vertices, "polytope vertex list")?;
        Ok(CompactSet::Polytope { vertices })
    }

    pub fn points(points: Vec<Point>) -> Result<Self> {
        check_same_dim(&points, "point set")?;
        Ok(CompactSet::Points { points })
    }

    /// `{p}` as a convex set: a degenerate interval on the line, a one-vertex
    /// polytope otherwise.
    pub fn singleton(p: Point) -> Self {
        if p.dim() == 1 {
            CompactSet::Interval {
                lo: p.x(),
                hi: p.x(),
            }
        } else {
            CompactSet::Polytope { vertices: vec![p] }
        }
    }

    /// Convex hull of a nonempty list of points, as an interval on the line.
    pub fn hull_of(points: Vec<Point>) -> Result<Self> {
        check_same_dim(&points, "hull input")?;
        if points[0].dim() == 1 {
            let lo = points.iter().map(Point::x).fold(f64::INFINITY, f64::min);
            let hi = points
                .iter()
                .map(Point::x)
                .fold(f64::NEG_INFINITY, f64::max);
            CompactSet::interval(lo, hi)
        } else {
            CompactSet::polytope(points)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            CompactSet::Interval { .. } => 1,
            CompactSet::Polytope { vertices } => vertices[0].dim(),
            CompactSet::Points { points } => points[0].dim(),
        }
    }

    pub fn is_convex(&self) -> bool {
        !matches!(self, CompactSet::Points { .. })
    }

    /// Extreme-point representation: interval endpoints, polytope vertices,
    /// or the finite points themselves.
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            CompactSet::Interval { lo, hi } if lo == hi => vec![Point::scalar(*lo)],
            CompactSet::Interval { lo, hi } => vec![Point::scalar(*lo), Point::scalar(*hi)],
            CompactSet::Polytope { vertices } => vertices.clone(),
            CompactSet::Points { points } => points.clone(),
        }
    }

    /// `[min, max]` for any one-dimensional convex set.
    pub fn as_interval(&self) -> Option<(f64, f64)> {
        match self {
            CompactSet::Interval { lo, hi } => Some((*lo, *hi)),
            CompactSet::Polytope { vertices } if vertices[0].dim() == 1 => {
                let lo = vertices.iter().map(Point::x).fold(f64::INFINITY, f64::min);
                let hi = vertices
                    .iter()
                    .map(Point::x)
                    .fold(f64::NEG_INFINITY, f64::max);
                Some((lo, hi))
            }
            _ => None,
        }
    }

    pub fn centroid(&self) -> Point {
        let v = self.vertices();
        let n = v.len() as f64;
        let dim = v[0].dim();
        let mut c = vec![0.0; dim];
        for p in &v {
            for (ci, pi) in c.iter_mut().zip(p.coords()) {
                *ci += pi / n;
            }
        }
        Point::from_vec_unchecked(c)
    }

    /// Axis-aligned bounding box as `(mins, maxs)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let v = self.vertices();
        let dim = v[0].dim();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in &v {
            for (k, c) in p.coords().iter().enumerate() {
                lo[k] = lo[k].min(*c);
                hi[k] = hi[k].max(*c);
            }
        }
        (lo, hi)
    }

    /// Whether `x` lies in the set within `tol` (Euclidean distance for polytopes).
    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        match self {
            CompactSet::Interval { lo, hi } => x.x() >= lo - tol && x.x() <= hi + tol,
            CompactSet::Polytope { .. } if x.dim() == 1 => {
                let (lo, hi) = self.as_interval().expect("one-dimensional");
                x.x() >= lo - tol && x.x() <= hi + tol
            }
            CompactSet::Polytope { vertices } => projection::euclidean_within(x, vertices, tol),
            CompactSet::Points { points } => {
                let space = NormedSpace::euclidean(x.dim());
                points.iter().any(|p| space.dist_unchecked(x, p) <= tol)
            }
        }
    }

    /// Deterministic probe points: an `n`-point grid per dimension.
    ///
    /// Intervals get `n` evenly spaced nodes including both endpoints.
    /// Polytopes get the box grid filtered to the hull, plus the vertices.
    /// Finite point sets return their points.
    pub fn grid(&self, n: usize) -> Vec<Point> {
        let n = n.max(2);
        match self {
            CompactSet::Interval { lo, hi } => linspace(*lo, *hi, n)
                .into_iter()
                .map(Point::scalar)
                .collect(),
            CompactSet::Polytope { vertices } => {
                let (lo, hi) = self.bounding_box();
                let axes: Vec<Vec<f64>> = lo
                    .iter()
                    .zip(&hi)
                    .map(|(a, b)| linspace(*a, *b, n))
                    .collect();
                let mut out = vertices.clone();
                let mut idx = vec![0usize; axes.len()];
                loop {
                    let p = Point::from_vec_unchecked(
                        idx.iter().zip(&axes).map(|(i, a)| a[*i]).collect(),
                    );
                    if self.contains(&p, SET_TOL) && !vertices.contains(&p) {
                        out.push(p);
                    }
                    // odometer increment
                    let mut k = 0;
                    loop {
                        if k == idx.len() {
                            return out;
                        }
                        idx[k] += 1;
                        if idx[k] < axes[k].len() {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                }
            }
            CompactSet::Points { points } => points.clone(),
        }
    }

    /// Vertices, pairwise midpoints and centroid; a cheap cover of a set's shape.
    pub fn probe_points(&self) -> Vec<Point> {
        let v = self.vertices();
        let mut out = v.clone();
        if self.is_convex() {
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    out.push(Point::midpoint(&v[i], &v[j]));
                }
            }
            out.push(self.centroid());
        }
        out
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}
