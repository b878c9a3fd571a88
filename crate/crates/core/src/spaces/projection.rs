//! Nearest points and point-to-set distances.
//!
//! Polytopes are handled in barycentric coordinates: a point of the hull is
//! `V·w` with `w` on the probability simplex, and the search runs over `w`.
//!
//! * `p = 2`: pairwise Frank–Wolfe with exact line search. Converges linearly
//!   on polytopes, so the duality gap can be driven close to round-off.
//! * `1 < p < ∞`, `p ≠ 2`: projected gradient on `w` with Armijo backtracking.
//!   The norm is differentiable away from the target, and the minimizer is
//!   unique because the space is strictly convex.
//! * `p ∈ {1, ∞}`: the minimizer set can be a whole face. A projected
//!   subgradient search is started from every vertex and from the centroid;
//!   all near-optimal candidates are kept, the lexicographically smallest
//!   weight vector wins, and the result is flagged when the candidates
//!   disagree on the point.

use serde::Serialize;

use super::norm::{lex_cmp_slices, Exponent, NormedSpace, Point};
use super::set::CompactSet;
use crate::error::{Error, Result};

/// Iteration budget for every polytope search.
pub const PROJECTION_BUDGET: usize = 10_000;

/// Frank–Wolfe stops once the duality gap of `½‖Vw − x‖²` drops below
/// `FW_GAP_TOL · S²`, `S` being the scale of the instance. That bounds the
/// point error by roughly `4.5e-8 · S`.
const FW_GAP_TOL: f64 = 1e-15;

/// Candidates whose distance is this close to the best one count as ties.
const TIE_TOL: f64 = 1e-9;

/// Tied candidates farther apart than this mark the minimizer as non-unique.
const SPREAD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub point: Point,
    pub distance: f64,
    /// Convex-combination weights over the set's vertices (interval: `[lo, hi]`).
    pub weights: Vec<f64>,
    /// Raised when the search found distinct minimizers; only possible in a
    /// space that is not strictly convex.
    pub possibly_non_unique: bool,
}

/// `dist(x, S) = inf { ‖x − s‖ : s ∈ S }`.
///
/// Exact for intervals and finite point sets; for polytopes, the distance to
/// the point returned by [`nearest_point`].
pub fn distance_point_set(space: &NormedSpace, x: &Point, set: &CompactSet) -> Result<f64> {
    space.check(x)?;
    check_set_dim(space, set)?;
    Ok(match set {
        CompactSet::Interval { lo, hi } => (x.x() - x.x().clamp(*lo, *hi)).abs(),
        CompactSet::Points { points } => points
            .iter()
            .map(|p| space.dist_unchecked(x, p))
            .fold(f64::INFINITY, f64::min),
        CompactSet::Polytope { .. } => nearest_point(space, x, set)?.distance,
    })
}

pub(crate) fn check_set_dim(space: &NormedSpace, set: &CompactSet) -> Result<()> {
    if set.dim() != space.dimension {
        return Err(Error::DimensionMismatch {
            expected: space.dimension,
            actual: set.dim(),
        });
    }
    Ok(())
}

/// A minimizer of `‖x − s‖` over a convex set `S`.
pub fn nearest_point(space: &NormedSpace, x: &Point, set: &CompactSet) -> Result<Projection> {
    space.check(x)?;
    check_set_dim(space, set)?;
    match set {
        CompactSet::Points { .. } => Err(Error::NonConvexSet),
        CompactSet::Interval { lo, hi } => Ok(clamp_projection(x.x(), *lo, *hi)),
        CompactSet::Polytope { vertices } if space.dimension == 1 => {
            Ok(line_polytope_projection(x.x(), vertices))
        }
        CompactSet::Polytope { vertices } if vertices.len() == 1 => Ok(Projection {
            point: vertices[0].clone(),
            distance: space.dist_unchecked(x, &vertices[0]),
            weights: vec![1.0],
            possibly_non_unique: false,
        }),
        CompactSet::Polytope { vertices } => Ok(match space.p {
            Exponent::Finite(2.0) => pairwise_frank_wolfe(space, x, vertices),
            Exponent::Finite(p) if p > 1.0 => projected_gradient(space, x, vertices),
            _ => multistart_subgradient(space, x, vertices),
        }),
    }
}

fn clamp_projection(x: f64, lo: f64, hi: f64) -> Projection {
    let c = x.clamp(lo, hi);
    let t = if hi > lo { (c - lo) / (hi - lo) } else { 0.0 };
    Projection {
        point: Point::scalar(c),
        distance: (x - c).abs(),
        weights: vec![1.0 - t, t],
        possibly_non_unique: false,
    }
}

fn line_polytope_projection(x: f64, vertices: &[Point]) -> Projection {
    let (mut imin, mut imax) = (0, 0);
    for (i, v) in vertices.iter().enumerate() {
        if v.x() < vertices[imin].x() {
            imin = i;
        }
        if v.x() > vertices[imax].x() {
            imax = i;
        }
    }
    let inner = clamp_projection(x, vertices[imin].x(), vertices[imax].x());
    let mut weights = vec![0.0; vertices.len()];
    weights[imin] += inner.weights[0];
    weights[imax] += inner.weights[1];
    Projection { weights, ..inner }
}

pub(crate) fn combine(vertices: &[Point], w: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; vertices[0].dim()];
    for (v, wi) in vertices.iter().zip(w) {
        if *wi != 0.0 {
            for (ck, vk) in c.iter_mut().zip(v.coords()) {
                *ck += wi * vk;
            }
        }
    }
    c
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn instance_scale(x: &Point, vertices: &[Point]) -> f64 {
    let amax = |c: &[f64]| c.iter().map(|v| v.abs()).fold(0.0, f64::max);
    vertices
        .iter()
        .map(|v| amax(v.coords()))
        .fold(amax(x.coords()), f64::max)
        .max(1.0)
}

fn nearest_vertex(space: &NormedSpace, x: &Point, vertices: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, v) in vertices.iter().enumerate() {
        let d = space.dist_unchecked(x, v);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Whether the Euclidean distance from `x` to `hull(vertices)` is at most
/// `tol`. Stops as soon as the Frank–Wolfe bounds decide the question.
pub(crate) fn euclidean_within(x: &Point, vertices: &[Point], tol: f64) -> bool {
    let space = NormedSpace::euclidean(x.dim());
    let half_tol_sq = 0.5 * tol * tol;
    let (point, _) = pairwise_frank_wolfe_until(&space, x, vertices, |f, gap| {
        f <= half_tol_sq || f - gap > half_tol_sq || gap <= 0.0
    });
    space.dist_unchecked(x, &point) <= tol
}

fn pairwise_frank_wolfe(space: &NormedSpace, x: &Point, vertices: &[Point]) -> Projection {
    let scale = instance_scale(x, vertices);
    let gap_tol = FW_GAP_TOL * scale * scale;
    let (point, w) = pairwise_frank_wolfe_until(space, x, vertices, |_, gap| gap <= gap_tol);
    Projection {
        distance: space.dist_unchecked(x, &point),
        point,
        weights: w,
        possibly_non_unique: false,
    }
}

/// Pairwise Frank–Wolfe on `½‖Vw − x‖²` until `done(f, gap)`.
fn pairwise_frank_wolfe_until(
    space: &NormedSpace,
    x: &Point,
    vertices: &[Point],
    done: impl Fn(f64, f64) -> bool,
) -> (Point, Vec<f64>) {
    let m = vertices.len();
    let mut w = vec![0.0; m];
    w[nearest_vertex(space, x, vertices)] = 1.0;
    let mut c = combine(vertices, &w);

    for _ in 0..PROJECTION_BUDGET {
        let r: Vec<f64> = c.iter().zip(x.coords()).map(|(a, b)| a - b).collect();
        let g: Vec<f64> = vertices.iter().map(|v| dot(v.coords(), &r)).collect();
        let mut s = 0;
        let mut a = usize::MAX;
        for i in 0..m {
            if g[i] < g[s] {
                s = i;
            }
            if w[i] > 0.0 && (a == usize::MAX || g[i] > g[a]) {
                a = i;
            }
        }
        let fw_gap = dot(&c, &r) - g[s];
        if s == a || done(0.5 * dot(&r, &r), fw_gap) {
            break;
        }
        let d = vertices[s].sub(&vertices[a]);
        let dd = dot(&d, &d);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&r, &d) / dd).clamp(0.0, w[a]);
        if gamma <= 0.0 {
            break;
        }
        if gamma >= w[a] {
            w[s] += w[a];
            w[a] = 0.0;
        } else {
            w[s] += gamma;
            w[a] -= gamma;
        }
        c = combine(vertices, &w);
    }
    (Point::from_vec_unchecked(c), w)
}

/// Euclidean projection onto the probability simplex (sort-based).
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|vi| (vi - theta).max(0.0)).collect()
}

/// Gradient of `c ↦ ‖c − x‖_p` for `1 < p < ∞`, given `r = c − x ≠ 0`.
fn lp_norm_gradient(r: &[f64], norm: f64, p: f64) -> Vec<f64> {
    r.iter()
        .map(|ri| ri.signum() * (ri.abs() / norm).powf(p - 1.0))
        .collect()
}

/// A subgradient of `c ↦ ‖c − x‖` for `p ∈ {1, ∞}`.
fn polyhedral_subgradient(r: &[f64], p: Exponent) -> Vec<f64> {
    match p {
        Exponent::Infinity => {
            let mut j = 0;
            for (i, ri) in r.iter().enumerate() {
                if ri.abs() > r[j].abs() {
                    j = i;
                }
            }
            let mut g = vec![0.0; r.len()];
            if r[j] != 0.0 {
                g[j] = r[j].signum();
            }
            g
        }
        _ => r
            .iter()
            .map(|ri| if *ri == 0.0 { 0.0 } else { ri.signum() })
            .collect(),
    }
}

/// A subgradient of `c ↦ ‖c − x‖` at `r = c − x`.
pub(crate) fn norm_subgradient(space: &NormedSpace, r: &[f64]) -> Vec<f64> {
    match space.p {
        Exponent::Finite(p) if p > 1.0 => {
            let n = space.norm_of(r);
            if n == 0.0 {
                vec![0.0; r.len()]
            } else {
                lp_norm_gradient(r, n, p)
            }
        }
        p => polyhedral_subgradient(r, p),
    }
}

fn objective(space: &NormedSpace, x: &Point, vertices: &[Point], w: &[f64]) -> (f64, Vec<f64>) {
    let c = combine(vertices, w);
    let r: Vec<f64> = c.iter().zip(x.coords()).map(|(a, b)| a - b).collect();
    (space.norm_of(&r), r)
}

fn projected_gradient(space: &NormedSpace, x: &Point, vertices: &[Point]) -> Projection {
    let p = space.p.value();
    let m = vertices.len();
    let mut w = vec![0.0; m];
    w[nearest_vertex(space, x, vertices)] = 1.0;
    let (mut f, mut r) = objective(space, x, vertices, &w);
    let mut step = 1.0 / instance_scale(x, vertices);

    for _ in 0..PROJECTION_BUDGET {
        if f == 0.0 {
            break;
        }
        let grad_c = lp_norm_gradient(&r, f, p);
        let g: Vec<f64> = vertices.iter().map(|v| dot(v.coords(), &grad_c)).collect();
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            let trial = project_simplex(&trial);
            let moved: Vec<f64> = trial.iter().zip(&w).map(|(a, b)| a - b).collect();
            let (ft, rt) = objective(space, x, vertices, &trial);
            if ft <= f + 1e-4 * dot(&g, &moved) {
                accepted = Some((trial, ft, rt, moved));
                break;
            }
            step *= 0.5;
        }
        let Some((trial, ft, rt, moved)) = accepted else {
            break;
        };
        let shift = moved.iter().map(|d| d.abs()).fold(0.0, f64::max);
        let progress = f - ft;
        w = trial;
        f = ft;
        r = rt;
        if shift <= 1e-15 || progress <= 1e-17 * f.max(1.0) {
            break;
        }
        step *= 2.0;
    }
    let point = Point::from_vec_unchecked(combine(vertices, &w));
    Projection {
        distance: space.dist_unchecked(x, &point),
        point,
        weights: w,
        possibly_non_unique: false,
    }
}

fn multistart_subgradient(space: &NormedSpace, x: &Point, vertices: &[Point]) -> Projection {
    let m = vertices.len();
    let mut starts: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut w = vec![0.0; m];
            w[i] = 1.0;
            w
        })
        .collect();
    starts.push(vec![1.0 / m as f64; m]);
    let per_start = PROJECTION_BUDGET / starts.len();
    let scale = instance_scale(x, vertices);

    let mut candidates: Vec<(Vec<f64>, f64)> = Vec::new();
    for start in starts {
        let (f0, _) = objective(space, x, vertices, &start);
        candidates.push((start.clone(), f0));
        let mut w = start;
        let mut best = (w.clone(), f0);
        for k in 0..per_start {
            let (f, r) = objective(space, x, vertices, &w);
            if f < best.1 {
                best = (w.clone(), f);
            }
            let gc = polyhedral_subgradient(&r, space.p);
            let g: Vec<f64> = vertices.iter().map(|v| dot(v.coords(), &gc)).collect();
            let gnorm = dot(&g, &g).sqrt();
            if gnorm == 0.0 {
                break;
            }
            let step = 0.5 / ((k + 1) as f64).sqrt() / gnorm;
            let trial: Vec<f64> = w.iter().zip(&g).map(|(wi, gi)| wi - step * gi).collect();
            w = project_simplex(&trial);
        }
        let (f, _) = objective(space, x, vertices, &w);
        if f < best.1 {
            best = (w, f);
        }
        candidates.push(best);
    }

    let best_f = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let ties: Vec<&(Vec<f64>, f64)> = candidates
        .iter()
        .filter(|c| c.1 <= best_f + TIE_TOL * scale)
        .collect();
    let chosen = ties
        .iter()
        .min_by(|a, b| lex_cmp_slices(&a.0, &b.0))
        .expect("at least one candidate");
    let euclid = NormedSpace::euclidean(space.dimension);
    let tie_points: Vec<Point> = ties
        .iter()
        .map(|c| Point::from_vec_unchecked(combine(vertices, &c.0)))
        .collect();
    let spread = tie_points
        .iter()
        .flat_map(|a| tie_points.iter().map(move |b| (a, b)))
        .map(|(a, b)| euclid.dist_unchecked(a, b))
        .fold(0.0, f64::max);

    let point = Point::from_vec_unchecked(combine(vertices, &chosen.0));
    Projection {
        distance: space.dist_unchecked(x, &point),
        point,
        weights: chosen.0.clone(),
        possibly_non_unique: spread > SPREAD_TOL,
    }
}
