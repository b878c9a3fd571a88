//! Asymptotic radius and center of a finite sequence relative to a convex set.
//!
//! `limsup ‖x_n − c‖` is replaced by `maxTail(c) = max ‖x_n − c‖` over the
//! last `W` terms. For a sequence converging to `x*` this overestimates the
//! limsup by at most `max_{n > N−W} ‖x_n − x_N‖`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::projection::{combine, dot, norm_subgradient, project_simplex};
use crate::spaces::{linspace, CompactSet, NormedSpace, Point};

pub const DEFAULT_RESOLUTION: f64 = 1e-3;
pub const CENTER_TOL: f64 = 1e-6;
pub const MAX_DEFAULT_WINDOW: usize = 64;
/// Subgradient steps per start on polytopes.
pub const CENTER_BUDGET: usize = 10_000;
/// Interval refinement stops at this bracket width.
const REFINE_WIDTH: f64 = 1e-9;
/// Upper bound on grid nodes scanned for a polytope domain.
const POLYTOPE_GRID_CAP: usize = 20_000;

/// `min(64, len/2)`, at least 1.
pub fn default_window(len: usize) -> usize {
    (len / 2).clamp(1, MAX_DEFAULT_WINDOW)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsymptoticOptions {
    /// Tail window `W`; `None` picks [`default_window`].
    pub window: Option<usize>,
    pub resolution: f64,
    pub center_tol: f64,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            window: None,
            resolution: DEFAULT_RESOLUTION,
            center_tol: CENTER_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticResult {
    pub radius: f64,
    /// Best probed point.
    pub center: Point,
    /// Probed points within `center_tol` of the radius, lexicographically sorted.
    pub centers: Vec<Point>,
    pub window: usize,
    pub resolution: f64,
    /// Grid spacing actually scanned; coarser than `resolution` only for
    /// polytopes whose grid would exceed the node cap.
    pub grid_resolution: f64,
    pub center_tol: f64,
}

impl AsymptoticResult {
    /// Largest pairwise Euclidean distance within the center set.
    pub fn center_diameter(&self) -> f64 {
        let e = NormedSpace::euclidean(self.center.dim());
        let mut d = 0.0f64;
        for (i, a) in self.centers.iter().enumerate() {
            for b in &self.centers[i + 1..] {
                d = d.max(e.dist_unchecked(a, b));
            }
        }
        d
    }
}

/// `max ‖x_n − c‖` over `tail`.
pub fn max_tail(space: &NormedSpace, tail: &[Point], c: &Point) -> f64 {
    tail.iter()
        .map(|x| space.dist_unchecked(x, c))
        .fold(0.0, f64::max)
}

fn resolve_window(len: usize, window: Option<usize>) -> Result<usize> {
    if len == 0 {
        return Err(Error::Empty("sequence"));
    }
    let w = window.unwrap_or_else(|| default_window(len));
    if w == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "window",
            value: 0.0,
            expected: "W >= 1",
        });
    }
    if w > len {
        return Err(Error::SequenceTooShort {
            needed: w,
            actual: len,
        });
    }
    Ok(w)
}

/// Minimizes `maxTail` over `domain`.
///
/// Intervals: grid scan at `resolution`, then ternary refinement around the
/// best node (the objective is convex). Polytopes: grid scan plus projected
/// subgradient descent on convex-combination weights from every vertex, the
/// centroid and the best grid node.
pub fn asymptotic_radius_center(
    space: &NormedSpace,
    sequence: &[Point],
    domain: &CompactSet,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticResult> {
    let window = resolve_window(sequence.len(), opts.window)?;
    if !(opts.resolution > 0.0 && opts.resolution.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "resolution",
            value: opts.resolution,
            expected: "positive and finite",
        });
    }
    if !domain.is_convex() {
        return Err(Error::NonConvexSet);
    }
    crate::spaces::projection::check_set_dim(space, domain)?;
    for x in sequence {
        space.check(x)?;
    }
    let tail = &sequence[sequence.len() - window..];
    let (probes, grid_resolution) = match domain.as_interval() {
        Some((lo, hi)) => interval_probes(space, tail, lo, hi, opts.resolution),
        None => polytope_probes(space, tail, domain, opts.resolution),
    };
    let (center, radius) = probes
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.lex_cmp(&b.0)))
        .cloned()
        .expect("at least one probe");
    let mut centers: Vec<Point> = probes
        .into_iter()
        .filter(|(_, f)| *f <= radius + opts.center_tol)
        .map(|(p, _)| p)
        .collect();
    centers.sort_by(|a, b| a.lex_cmp(b));
    let euclid = NormedSpace::euclidean(space.dimension);
    centers.dedup_by(|a, b| euclid.dist_unchecked(a, b) <= REFINE_WIDTH);
    Ok(AsymptoticResult {
        radius,
        center,
        centers,
        window,
        resolution: opts.resolution,
        grid_resolution,
        center_tol: opts.center_tol,
    })
}

fn evaluate_all(space: &NormedSpace, tail: &[Point], pts: Vec<Point>) -> Vec<(Point, f64)> {
    pts.into_par_iter()
        .map(|p| {
            let f = max_tail(space, tail, &p);
            (p, f)
        })
        .collect()
}

fn interval_probes(
    space: &NormedSpace,
    tail: &[Point],
    lo: f64,
    hi: f64,
    resolution: f64,
) -> (Vec<(Point, f64)>, f64) {
    let n = (((hi - lo) / resolution).ceil() as usize + 1).clamp(2, 10_000_001);
    let nodes = linspace(lo, hi, n);
    let spacing = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    let mut probes = evaluate_all(
        space,
        tail,
        nodes.iter().copied().map(Point::scalar).collect(),
    );
    let mut best = 0;
    for (i, (_, f)) in probes.iter().enumerate() {
        if *f < probes[best].1 {
            best = i;
        }
    }
    let f = |x: f64| max_tail(space, tail, &Point::scalar(x));
    let mut a = nodes[best.saturating_sub(1)];
    let mut b = nodes[(best + 1).min(nodes.len() - 1)];
    while b - a > REFINE_WIDTH {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let x = 0.5 * (a + b);
    probes.push((Point::scalar(x), f(x)));
    (probes, spacing)
}

fn polytope_probes(
    space: &NormedSpace,
    tail: &[Point],
    domain: &CompactSet,
    resolution: f64,
) -> (Vec<(Point, f64)>, f64) {
    let (lo, hi) = domain.bounding_box();
    let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    let cap = (POLYTOPE_GRID_CAP as f64)
        .powf(1.0 / lo.len() as f64)
        .floor() as usize;
    let n = ((extent / resolution).ceil() as usize + 1).clamp(2, cap.max(2));
    let spacing = extent / (n - 1) as f64;
    let mut probes = evaluate_all(space, tail, domain.grid(n));

    let vertices = domain.vertices();
    let m = vertices.len();
    let weights_of = |i: usize| {
        let mut w = vec![0.0; m];
        w[i] = 1.0;
        w
    };
    let mut starts: Vec<Vec<f64>> = (0..m).map(weights_of).collect();
    starts.push(vec![1.0 / m as f64; m]);
    if let Some((p, _)) = probes.iter().min_by(|a, b| a.1.total_cmp(&b.1)) {
        if let Some(i) = vertices.iter().position(|v| v == p) {
            starts.push(weights_of(i));
        } else {
            starts.push(grid_weights(space, p, domain));
        }
    }
    let refined: Vec<(Point, f64)> = starts
        .into_par_iter()
        .map(|w| minimize_on_weights(space, tail, &vertices, w))
        .collect();
    probes.extend(refined);
    (probes, spacing)
}

fn grid_weights(space: &NormedSpace, p: &Point, domain: &CompactSet) -> Vec<f64> {
    let e = NormedSpace::euclidean(space.dimension);
    crate::spaces::nearest_point(&e, p, domain)
        .map(|pr| pr.weights)
        .unwrap_or_else(|_| {
            let m = domain.vertices().len();
            vec![1.0 / m as f64; m]
        })
}

/// Normalized projected subgradient steps on the weights; the step halves
/// after 20 non-improving iterations, restarting from the best iterate.
fn minimize_on_weights(
    space: &NormedSpace,
    tail: &[Point],
    vertices: &[Point],
    start: Vec<f64>,
) -> (Point, f64) {
    let eval = |w: &[f64]| {
        let c = Point::from_vec_unchecked(combine(vertices, w));
        let f = max_tail(space, tail, &c);
        (c, f)
    };
    let mut w = start;
    let (mut best_c, mut best_f) = eval(&w);
    let mut best_w = w.clone();
    let mut alpha = 0.5;
    let mut stall = 0;
    for _ in 0..CENTER_BUDGET {
        let c = Point::from_vec_unchecked(combine(vertices, &w));
        let mut j = 0;
        let mut fj = f64::NEG_INFINITY;
        for (k, x) in tail.iter().enumerate() {
            let d = space.dist_unchecked(x, &c);
            if d > fj {
                fj = d;
                j = k;
            }
        }
        let r = c.sub(&tail[j]);
        let gc = norm_subgradient(space, &r);
        let g: Vec<f64> = vertices.iter().map(|v| dot(v.coords(), &gc)).collect();
        let mean = g.iter().sum::<f64>() / g.len() as f64;
        let d: Vec<f64> = g.iter().map(|gi| gi - mean).collect();
        let dn = dot(&d, &d).sqrt();
        if dn == 0.0 {
            break;
        }
        let trial: Vec<f64> = w
            .iter()
            .zip(&d)
            .map(|(wi, di)| wi - alpha * di / dn)
            .collect();
        w = project_simplex(&trial);
        let (c_new, f_new) = eval(&w);
        if f_new < best_f {
            best_f = f_new;
            best_c = c_new;
            best_w = w.clone();
            stall = 0;
        } else {
            stall += 1;
            if stall >= 20 {
                alpha *= 0.5;
                stall = 0;
                w = best_w.clone();
                if alpha < 1e-12 {
                    break;
                }
            }
        }
    }
    (best_c, best_f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularityVerdict {
    /// Every probed subsequence matched the base radius within tolerance.
    NotRefuted,
    /// Some subsequence radius differs from the base radius.
    NotRegular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularityOptions {
    /// Number of random subsequences `K`.
    pub subsequences: usize,
    pub seed: u64,
    pub window: Option<usize>,
    pub resolution: f64,
    /// Redraws allowed per subsequence when it comes out shorter than `W`.
    pub max_retries: usize,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        Self {
            subsequences: 16,
            seed: 0,
            window: None,
            resolution: DEFAULT_RESOLUTION,
            max_retries: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub base_radius: f64,
    pub window: usize,
    /// Periodic keep-masks; index `i` of the sequence is kept when
    /// `pattern[i % pattern.len()]`.
    pub patterns: Vec<Vec<bool>>,
    pub subsequence_radii: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub verdict: RegularityVerdict,
    pub note: &'static str,
}

const PROBE_NOTE: &str =
    "finitely many sampled subsequences can refute regularity but never certify it";

fn apply_pattern(sequence: &[Point], pattern: &[bool]) -> Vec<Point> {
    sequence
        .iter()
        .enumerate()
        .filter(|(i, _)| pattern[i % pattern.len()])
        .map(|(_, x)| x.clone())
        .collect()
}

/// Asymptotic radius of the subsequence selected by a periodic keep-mask.
pub fn subsequence_radius(
    space: &NormedSpace,
    sequence: &[Point],
    domain: &CompactSet,
    pattern: &[bool],
    window: usize,
    resolution: f64,
) -> Result<f64> {
    if pattern.is_empty() {
        return Err(Error::Empty("pattern"));
    }
    let sub = apply_pattern(sequence, pattern);
    let opts = AsymptoticOptions {
        window: Some(window),
        resolution,
        center_tol: CENTER_TOL,
    };
    Ok(asymptotic_radius_center(space, &sub, domain, &opts)?.radius)
}

/// Compares the base radius with the radii of the given subsequence patterns.
pub fn regularity_with_patterns(
    space: &NormedSpace,
    sequence: &[Point],
    domain: &CompactSet,
    patterns: Vec<Vec<bool>>,
    window: Option<usize>,
    resolution: f64,
) -> Result<RegularityReport> {
    let window = resolve_window(sequence.len(), window)?;
    let base = asymptotic_radius_center(
        space,
        sequence,
        domain,
        &AsymptoticOptions {
            window: Some(window),
            resolution,
            center_tol: CENTER_TOL,
        },
    )?
    .radius;
    let radii = patterns
        .par_iter()
        .map(|p| subsequence_radius(space, sequence, domain, p, window, resolution))
        .collect::<Result<Vec<f64>>>()?;
    let max_deviation = radii.iter().map(|r| (r - base).abs()).fold(0.0, f64::max);
    let tolerance = 10.0 * resolution;
    Ok(RegularityReport {
        base_radius: base,
        window,
        patterns,
        subsequence_radii: radii,
        max_deviation,
        tolerance,
        verdict: if max_deviation > tolerance {
            RegularityVerdict::NotRegular
        } else {
            RegularityVerdict::NotRefuted
        },
        note: PROBE_NOTE,
    })
}

/// Draws `K` seeded periodic keep-masks (period 1 to 8, each bit kept with
/// probability 1/2) and compares subsequence radii with the base radius.
pub fn regularity_probe(
    space: &NormedSpace,
    sequence: &[Point],
    domain: &CompactSet,
    opts: &RegularityOptions,
) -> Result<RegularityReport> {
    if opts.subsequences == 0 {
        return Err(Error::ParameterOutOfRange {
            name: "subsequences",
            value: 0.0,
            expected: "K >= 1",
        });
    }
    let window = resolve_window(sequence.len(), opts.window)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut patterns = Vec::with_capacity(opts.subsequences);
    for _ in 0..opts.subsequences {
        let mut attempts = 0;
        let pattern = loop {
            if attempts > opts.max_retries {
                return Err(Error::SubsequenceRetryExhausted { window, attempts });
            }
            attempts += 1;
            let period = rng.random_range(1..=8usize);
            let pattern: Vec<bool> = (0..period).map(|_| rng.random_bool(0.5)).collect();
            let kept = (0..sequence.len()).filter(|i| pattern[i % period]).count();
            if kept >= window {
                break pattern;
            }
        };
        patterns.push(pattern);
    }
    regularity_with_patterns(
        space,
        sequence,
        domain,
        patterns,
        Some(window),
        opts.resolution,
    )
}
