//! Hausdorff distance `H(A, B) = max { sup_{a∈A} dist(a, B), sup_{b∈B} dist(b, A) }`.
//!
//! For a convex `B`, the map `a ↦ dist(a, B)` is convex, so its supremum over
//! a polytope `A` is attained at a vertex of `A`. The polytope branch therefore
//! only evaluates `dist(v, B)` at the vertices of each side. That argument
//! needs the *target* set to be convex; a finite target set is only supported
//! on the line, where the supremum over an interval is found exactly among its
//! endpoints and the midpoints between consecutive target points.

use super::norm::{NormedSpace, Point};
use super::projection::{check_set_dim, distance_point_set};
use super::set::CompactSet;
use crate::error::{Error, Result};

pub fn hausdorff(space: &NormedSpace, a: &CompactSet, b: &CompactSet) -> Result<f64> {
    check_set_dim(space, a)?;
    check_set_dim(space, b)?;
    if space.dimension == 1 {
        return Ok(hausdorff_line(a, b));
    }
    let ab = directed(space, a, b)?;
    let ba = directed(space, b, a)?;
    Ok(ab.max(ba))
}

/// `sup_{a∈A} dist(a, B)`.
pub fn directed_hausdorff(space: &NormedSpace, a: &CompactSet, b: &CompactSet) -> Result<f64> {
    check_set_dim(space, a)?;
    check_set_dim(space, b)?;
    if space.dimension == 1 {
        return Ok(directed_line(&LineSet::of(a), &LineSet::of(b)));
    }
    directed(space, a, b)
}

fn directed(space: &NormedSpace, a: &CompactSet, b: &CompactSet) -> Result<f64> {
    if a.is_convex() && !b.is_convex() {
        return Err(Error::UnsupportedHausdorff(
            "a convex set and a finite point set",
        ));
    }
    a.vertices().iter().try_fold(0.0f64, |acc, v| {
        distance_point_set(space, v, b).map(|d| acc.max(d))
    })
}

enum LineSet {
    Interval(f64, f64),
    Sorted(Vec<f64>),
}

impl LineSet {
    fn of(s: &CompactSet) -> Self {
        match s.as_interval() {
            Some((lo, hi)) => LineSet::Interval(lo, hi),
            None => {
                let mut v: Vec<f64> = s.vertices().iter().map(Point::x).collect();
                v.sort_by(f64::total_cmp);
                LineSet::Sorted(v)
            }
        }
    }

    fn dist(&self, x: f64) -> f64 {
        match self {
            LineSet::Interval(lo, hi) => (x - x.clamp(*lo, *hi)).abs(),
            LineSet::Sorted(v) => v
                .iter()
                .map(|p| (x - p).abs())
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn hausdorff_line(a: &CompactSet, b: &CompactSet) -> f64 {
    let (la, lb) = (LineSet::of(a), LineSet::of(b));
    if let (LineSet::Interval(a0, a1), LineSet::Interval(b0, b1)) = (&la, &lb) {
        return (a0 - b0).abs().max((a1 - b1).abs());
    }
    directed_line(&la, &lb).max(directed_line(&lb, &la))
}

fn directed_line(a: &LineSet, b: &LineSet) -> f64 {
    match a {
        LineSet::Sorted(pts) => pts.iter().map(|x| b.dist(*x)).fold(0.0, f64::max),
        LineSet::Interval(lo, hi) => {
            let mut probes = vec![*lo, *hi];
            if let LineSet::Sorted(v) = b {
                probes.extend(
                    v.windows(2)
                        .map(|w| 0.5 * (w[0] + w[1]))
                        .filter(|m| m > lo && m < hi),
                );
            }
            probes.into_iter().map(|x| b.dist(x)).fold(0.0, f64::max)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> CompactSet {
        CompactSet::interval(lo, hi).unwrap()
    }

    #[test]
    fn interval_examples() {
        let line = NormedSpace::real_line();
        assert_eq!(hausdorff(&line, &iv(0.0, 1.0), &iv(0.0, 1.0)).unwrap(), 0.0);
        assert_eq!(hausdorff(&line, &iv(0.0, 1.0), &iv(0.0, 2.0)).unwrap(), 1.0);
        // H({1}, [0, 0.98]) = 1: the far endpoint 0 is 1 away from {1}
        assert_eq!(
            hausdorff(&line, &iv(1.0, 1.0), &iv(0.0, 0.98)).unwrap(),
            1.0
        );
    }

    #[test]
    fn interval_against_points_on_the_line() {
        let line = NormedSpace::real_line();
        let pts = CompactSet::points(vec![Point::scalar(0.0), Point::scalar(1.0)]).unwrap();
        // the gap midpoint 0.5 is the worst point of [0, 1]
        assert_eq!(hausdorff(&line, &iv(0.0, 1.0), &pts).unwrap(), 0.5);
        assert_eq!(hausdorff(&line, &pts, &iv(0.0, 1.0)).unwrap(), 0.5);
    }

    #[test]
    fn polytopes_in_the_plane() {
        let l2 = NormedSpace::euclidean(2);
        let sq = |s: f64| {
            CompactSet::polytope(vec![
                Point::new(vec![0.0, 0.0]).unwrap(),
                Point::new(vec![s, 0.0]).unwrap(),
                Point::new(vec![s, s]).unwrap(),
                Point::new(vec![0.0, s]).unwrap(),
            ])
            .unwrap()
        };
        let h = hausdorff(&l2, &sq(1.0), &sq(2.0)).unwrap();
        assert!((h - 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn convex_vs_finite_unsupported_in_the_plane() {
        let l2 = NormedSpace::euclidean(2);
        let seg = CompactSet::polytope(vec![
            Point::new(vec![0.0, 0.0]).unwrap(),
            Point::new(vec![1.0, 0.0]).unwrap(),
        ])
        .unwrap();
        let pts = CompactSet::points(vec![Point::new(vec![0.0, 1.0]).unwrap()]).unwrap();
        assert!(hausdorff(&l2, &seg, &pts).is_err());
    }
}
