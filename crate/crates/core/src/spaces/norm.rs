use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The exponent `p` of an ℓ_p norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            Ok(Exponent::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(Exponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Finite(p) => p,
            Exponent::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Finite(p) => s.serialize_f64(*p),
            Exponent::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        let p = match Raw::deserialize(d)? {
            Raw::Number(p) => p,
            Raw::Text(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => f64::INFINITY,
            Raw::Text(s) => {
                return Err(serde::de::Error::custom(format!(
                    "expected a number >= 1 or \"inf\", got {s:?}"
                )))
            }
        };
        Exponent::new(p).map_err(serde::de::Error::custom)
    }
}

/// A finite-dimensional real vector space equipped with the ℓ_p norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormedSpace {
    pub dimension: usize,
    pub p: Exponent,
}

impl NormedSpace {
    pub fn new(dimension: usize, p: Exponent) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { dimension, p })
    }

    pub fn euclidean(dimension: usize) -> Self {
        Self {
            dimension,
            p: Exponent::Finite(2.0),
        }
    }

    /// The real line; every ℓ_p norm reduces to the absolute value there.
    pub fn real_line() -> Self {
        Self::euclidean(1)
    }

    /// Whether the unit sphere contains no line segments.
    ///
    /// For dimension >= 2 this holds exactly when `1 < p < ∞`. The real line
    /// is strictly convex under every `p`, since its unit sphere is `{-1, 1}`.
    pub fn strictly_convex(&self) -> bool {
        match self.p {
            Exponent::Finite(p) => p > 1.0 || self.dimension == 1,
            Exponent::Infinity => self.dimension == 1,
        }
    }

    pub fn check(&self, x: &Point) -> Result<()> {
        if x.dim() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                actual: x.dim(),
            });
        }
        Ok(())
    }

    pub fn norm(&self, x: &Point) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_of(x.coords()))
    }

    /// `‖x − y‖`, with dimensions checked.
    pub fn distance(&self, x: &Point, y: &Point) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.dist_unchecked(x, y))
    }

    pub(crate) fn dist_unchecked(&self, x: &Point, y: &Point) -> f64 {
        let (a, b) = (x.coords(), y.coords());
        if a.len() == 1 {
            return (a[0] - b[0]).abs();
        }
        match self.p {
            Exponent::Infinity => a
                .iter()
                .zip(b)
                .map(|(u, v)| (u - v).abs())
                .fold(0.0, f64::max),
            Exponent::Finite(1.0) => a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum(),
            Exponent::Finite(2.0) => a
                .iter()
                .zip(b)
                .map(|(u, v)| (u - v) * (u - v))
                .sum::<f64>()
                .sqrt(),
            Exponent::Finite(p) => {
                let diff: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
                lp_norm(&diff, p)
            }
        }
    }

    pub(crate) fn norm_of(&self, v: &[f64]) -> f64 {
        if v.len() == 1 {
            return v[0].abs();
        }
        match self.p {
            Exponent::Infinity => v.iter().map(|c| c.abs()).fold(0.0, f64::max),
            Exponent::Finite(1.0) => v.iter().map(|c| c.abs()).sum(),
            Exponent::Finite(2.0) => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Exponent::Finite(p) => lp_norm(v, p),
        }
    }
}

// Scaled by the max coordinate so large p does not overflow.
fn lp_norm(v: &[f64], p: f64) -> f64 {
    let scale = v.iter().map(|c| c.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = v.iter().map(|c| (c.abs() / scale).powf(p)).sum();
    scale * sum.powf(1.0 / p)
}

/// A point of a finite-dimensional space. Coordinates are always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    pub fn scalar(x: f64) -> Self {
        Point(vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; convenient on the real line.
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    /// `(1 − t)·a + t·b`, evaluated in exactly that form per coordinate.
    pub fn lerp(a: &Point, b: &Point, t: f64) -> Point {
        Point(
            a.0.iter()
                .zip(&b.0)
                .map(|(u, v)| (1.0 - t) * u + t * v)
                .collect(),
        )
    }

    pub fn midpoint(a: &Point, b: &Point) -> Point {
        Point::lerp(a, b, 0.5)
    }

    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(u, v)| u - v).collect()
    }

    pub fn scaled(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| s * c).collect())
    }

    /// Lexicographic order using `f64::total_cmp` per coordinate.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        lex_cmp_slices(&self.0, &other.0)
    }

    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

pub(crate) fn lex_cmp_slices(a: &[f64], b: &[f64]) -> Ordering {
    for (u, v) in a.iter().zip(b) {
        match u.total_cmp(v) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let joined: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&joined.join(";"))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Accepts either a coordinate array or a bare number (a point on the line).
impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Scalar(f64),
            Coords(Vec<f64>),
        }
        let coords = match Raw::deserialize(d)? {
            Raw::Scalar(x) => vec![x],
            Raw::Coords(c) => c,
        };
        if coords.is_empty() {
            return Err(serde::de::Error::custom(
                "point must have at least one coordinate",
            ));
        }
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> Point {
        Point::new(c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let l2 = NormedSpace::euclidean(2);
        let l1 = NormedSpace::new(2, Exponent::Finite(1.0)).unwrap();
        let linf = NormedSpace::new(2, Exponent::Infinity).unwrap();
        assert_eq!(l2.norm(&pt(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(l1.norm(&pt(&[1.0, -1.0])).unwrap(), 2.0);
        assert_eq!(linf.norm(&pt(&[0.2, -0.9])).unwrap(), 0.9);
    }

    #[test]
    fn general_p_norm() {
        let l3 = NormedSpace::new(2, Exponent::Finite(3.0)).unwrap();
        let n = l3.norm(&pt(&[1.0, 2.0])).unwrap();
        assert!((n - 9f64.powf(1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let l2 = NormedSpace::euclidean(2);
        assert_eq!(
            l2.norm(&pt(&[1.0])),
            Err(Error::DimensionMismatch {
                expected: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn strict_convexity_predicate_matches_midpoint_test() {
        let u = pt(&[1.0, 0.0]);
        let v = pt(&[1.0, 1.0]);
        for p in [1.0, 1.5, 2.0, 3.0, 7.0, f64::INFINITY] {
            let space = NormedSpace::new(2, Exponent::new(p).unwrap()).unwrap();
            // normalise v onto the unit sphere
            let v = v.scaled(1.0 / space.norm(&v).unwrap());
            let mid = space.norm(&Point::midpoint(&u, &v)).unwrap();
            if p == 1.0 {
                // l1: the segment between e1 and e2 lies on the sphere
                let m = space.norm(&Point::midpoint(&u, &pt(&[0.0, 1.0]))).unwrap();
                assert!((m - 1.0).abs() < 1e-15);
                assert!(!space.strictly_convex());
            } else if p.is_infinite() {
                assert!((mid - 1.0).abs() < 1e-15);
                assert!(!space.strictly_convex());
            } else {
                assert!(mid < 1.0 - 1e-6, "p = {p}: {mid}");
                assert!(space.strictly_convex());
            }
        }
    }

    #[test]
    fn exponent_validation() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!(Exponent::new(f64::INFINITY).unwrap(), Exponent::Infinity);
        let e: Exponent = serde_json::from_str("\"inf\"").unwrap();
        assert_eq!(e, Exponent::Infinity);
        assert!(serde_json::from_str::<Exponent>("0.3").is_err());
    }

    #[test]
    fn point_literal_forms() {
        let a: Point = serde_json::from_str("2.5").unwrap();
        let b: Point = serde_json::from_str("[2.5]").unwrap();
        assert_eq!(a, b);
        assert!(serde_json::from_str::<Point>("[]").is_err());
        assert!(Point::new(vec![f64::NAN]).is_err());
    }
}
