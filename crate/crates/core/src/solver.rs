//! Common fixed points of a commuting pair `t: D → D`, `T: D → KC(D)`.
//!
//! Stages:
//!
//! 1. approximate `Fix(t)` by iterating `t` from a grid of starts and take the
//!    hull of the certified points as a surrogate `F`;
//! 2. check that `T(x)` meets `F` for sampled `x ∈ F`;
//! 3. run the averaged iteration of `T` inside `F` (selections projected onto
//!    `F` when they drift farther than `ε`);
//! 4. take the asymptotic center of that outer sequence relative to `F`;
//! 5. rerun the iteration from a center point, preferring selections in
//!    `T(z_n) ∩ hull(centers)`;
//! 6. re-verify `‖z − tz‖ ≤ ε` and `dist(z, Tz) ≤ ε` on the final point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotic::{asymptotic_radius_center, AsymptoticOptions, AsymptoticResult};
use crate::conditions::sample::random_point;
use crate::conditions::{check_clambda, check_e, minimal_mu, PairSample, SampleConfig};
use crate::error::{Error, Result};
use crate::iteration::{
    approximate_fix_set, goebel_kirk_check, select_nearest, FixSetApproximation, GoebelKirkReport,
    IterationOptions, IterationTrace, SelectionRule, Termination,
};
use crate::maps::{check_open_unit, MultiValuedMap, SelfMap, SingleValuedMap};
use crate::spaces::{distance_point_set, nearest_point, CompactSet, NormedSpace, Point, SET_TOL};

/// Commuting is accepted when `dist(t(x), T(t(y)))` stays below this.
pub const COMMUTING_TOL: f64 = 1e-8;
/// Goebel–Kirk tail tolerance applied to solver traces.
pub const TRACE_GAP_TOL: f64 = 1e-6;
const MAX_REPORTED_VIOLATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutingWitness {
    pub y: Point,
    /// A point of `T(y)`.
    pub x: Point,
    pub tx: Point,
    pub ty: Point,
    /// `dist(t(x), T(t(y)))`.
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommutingReport {
    pub y_samples: usize,
    pub pairs_checked: usize,
    /// Sampled `y` whose image `t(y)` left the domain.
    pub skipped: usize,
    pub threshold: f64,
    pub commuting: bool,
    pub violation_count: usize,
    /// The first violations in `(y, x)` order, at most 100.
    pub violations: Vec<CommutingWitness>,
}

/// Samples `y ∈ D` (probe points, exception points, `samples` seeded random
/// points) and, for `x` over probe points and an 11-node grid of `T(y)`,
/// checks `t(x) ∈ T(t(y))` within [`COMMUTING_TOL`].
pub fn check_commuting(
    t: &SingleValuedMap,
    big_t: &MultiValuedMap,
    samples: usize,
    seed: u64,
) -> Result<CommutingReport> {
    check_same_setting(t, big_t)?;
    let space = t.space();
    let domain = t.domain();
    let mut ys = domain.probe_points();
    for e in t
        .exception_points()
        .into_iter()
        .chain(big_t.exception_points())
    {
        if domain.contains(&e, SET_TOL) && !ys.contains(&e) {
            ys.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ys.extend((0..samples).map(|_| random_point(domain, &mut rng)));

    let per_y: Vec<(usize, bool, Vec<CommutingWitness>)> = ys
        .par_iter()
        .map(|y| {
            let ty = t.apply(y);
            if !domain.contains(&ty, SET_TOL) {
                return (0, true, Vec::new());
            }
            let target = big_t.apply(&ty);
            let ty_set = big_t.apply(y);
            let mut xs = ty_set.probe_points();
            for g in ty_set.grid(11) {
                if !xs.contains(&g) {
                    xs.push(g);
                }
            }
            let mut found = Vec::new();
            for x in &xs {
                let tx = t.apply(x);
                let d = set_distance_to_point(space, &tx, &target);
                if d > COMMUTING_TOL {
                    found.push(CommutingWitness {
                        y: y.clone(),
                        x: x.clone(),
                        tx,
                        ty: ty.clone(),
                        distance: d,
                    });
                }
            }
            (xs.len(), false, found)
        })
        .collect();

    let pairs_checked = per_y.iter().map(|r| r.0).sum();
    let skipped = per_y.iter().filter(|r| r.1).count();
    let mut violations: Vec<CommutingWitness> = per_y.into_iter().flat_map(|r| r.2).collect();
    violations.sort_by(|a, b| a.y.lex_cmp(&b.y).then_with(|| a.x.lex_cmp(&b.x)));
    let violation_count = violations.len();
    violations.truncate(MAX_REPORTED_VIOLATIONS);
    Ok(CommutingReport {
        y_samples: ys.len(),
        pairs_checked,
        skipped,
        threshold: COMMUTING_TOL,
        commuting: violation_count == 0,
        violation_count,
        violations,
    })
}

fn set_distance_to_point(space: &NormedSpace, x: &Point, set: &CompactSet) -> f64 {
    distance_point_set(space, x, set).expect("dimensions validated by the map")
}

fn check_same_setting(t: &SingleValuedMap, big_t: &MultiValuedMap) -> Result<()> {
    if t.space() != big_t.space() {
        return Err(Error::InvalidMap("t and T live in different spaces".into()));
    }
    if t.domain() != big_t.domain() {
        return Err(Error::InvalidMap("t and T must share their domain".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Residual target `ε` for the returned point.
    pub epsilon: f64,
    /// Iteration budget per run.
    pub budget: usize,
    /// Grid nodes per dimension for the `Fix(t)` starts.
    pub fix_grid: usize,
    pub window: Option<usize>,
    pub resolution: f64,
    /// Grid nodes per dimension when sampling `F` and `T(x)` in stage 2.
    pub intersection_grid: usize,
    pub commuting_samples: usize,
    pub seed: u64,
    /// Run the (C_λ) and (E) checks on both maps first; failures only warn.
    pub precheck: bool,
    pub sample: SampleConfig,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-9,
            budget: 100_000,
            fix_grid: 11,
            window: None,
            resolution: crate::asymptotic::DEFAULT_RESOLUTION,
            intersection_grid: 11,
            commuting_samples: 200,
            seed: 0,
            precheck: true,
            sample: SampleConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommonFixedPointProblem {
    pub t: SingleValuedMap,
    pub big_t: MultiValuedMap,
    pub lambda: f64,
    pub options: SolverOptions,
}

impl CommonFixedPointProblem {
    pub fn new(
        t: SingleValuedMap,
        big_t: MultiValuedMap,
        lambda: f64,
        options: SolverOptions,
    ) -> Result<Self> {
        check_same_setting(&t, &big_t)?;
        check_open_unit("lambda", lambda)?;
        if !big_t.is_kc_valued() {
            return Err(Error::InvalidMap("T must be compact-convex valued".into()));
        }
        if !(options.epsilon > 0.0 && options.epsilon.is_finite()) {
            return Err(Error::ParameterOutOfRange {
                name: "epsilon",
                value: options.epsilon,
                expected: "positive and finite",
            });
        }
        Ok(Self {
            t,
            big_t,
            lambda,
            options,
        })
    }

    fn space(&self) -> &NormedSpace {
        self.t.space()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionCheck {
    pub samples: usize,
    /// Largest `dist(T(x), F)` over sampled `x ∈ F`.
    pub max_distance: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRun {
    pub trace: IterationTrace,
    /// Largest distance a selection was moved to land in `F`.
    pub max_projection_distance: f64,
    pub goebel_kirk: Option<GoebelKirkReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CommonFixedPointResult {
    pub z: Point,
    pub residual_t: f64,
    pub residual_big_t: f64,
    pub epsilon: f64,
    pub certified: bool,
    /// `dist(z, F)`.
    pub distance_to_surrogate: f64,
    pub commuting: CommutingReport,
    pub fix_set: FixSetApproximation,
    pub surrogate: CompactSet,
    pub intersection: IntersectionCheck,
    pub outer: StageRun,
    pub center: AsymptoticResult,
    pub inner: StageRun,
    pub restarted: bool,
    pub warnings: Vec<String>,
}

impl CommonFixedPointResult {
    /// Recomputes both residuals and membership from the maps.
    pub fn reverify(&self, problem: &CommonFixedPointProblem) -> bool {
        problem.t.residual(&self.z) <= self.epsilon
            && problem.big_t.residual(&self.z) <= self.epsilon
            && problem.t.domain().contains(&self.z, SET_TOL)
    }
}

/// Runs the staged construction; see the module docs.
pub fn solve_common(problem: &CommonFixedPointProblem) -> Result<CommonFixedPointResult> {
    let opts = &problem.options;
    let eps = opts.epsilon;
    let space = problem.space();
    let domain = problem.t.domain();

    let commuting = check_commuting(
        &problem.t,
        &problem.big_t,
        opts.commuting_samples,
        opts.seed,
    )?;
    if let Some(w) = commuting.violations.first() {
        return Err(Error::NotCommuting {
            x: w.x.coords().to_vec(),
            y: w.y.coords().to_vec(),
            distance: w.distance,
        });
    }

    let mut warnings = Vec::new();
    if opts.precheck {
        precheck(problem, &mut warnings)?;
    }

    // stage 1
    let mut starts = domain.grid(opts.fix_grid);
    for p in domain.probe_points() {
        if !starts.contains(&p) {
            starts.push(p);
        }
    }
    let fix_opts = IterationOptions {
        step: problem.lambda,
        tol: 0.1 * eps,
        budget: opts.budget,
        rule: SelectionRule::Paper,
        declared_lambda: None,
    };
    let fix_set = approximate_fix_set(&problem.t, &starts, &fix_opts)?;
    let surrogate = fix_set
        .hull()
        .ok_or_else(|| Error::NoFixedPoints(fix_set.diagnostic.clone().unwrap_or_default()))?;
    if let Some(c) = &fix_set.convexity {
        if !c.passed {
            warnings.push(format!(
                "midpoints of approximate fixed points have residual up to {:e}; the hull surrogate may overstate Fix(t)",
                c.max_midpoint_residual
            ));
        }
    }

    // stage 2
    let intersection = intersection_check(problem, &surrogate);
    if !intersection.passed {
        let x = worst_intersection_point(problem, &surrogate);
        return Err(Error::EmptyIntersection {
            x: x.coords().to_vec(),
            distance: intersection.max_distance,
        });
    }

    // stage 3
    let outer_start = surrogate.centroid();
    let outer = guided_run(problem, &outer_start, &surrogate, None, false);
    if !outer.trace.converged() {
        warnings.push("outer sequence exhausted its budget".into());
    }

    // stage 4
    let center = asymptotic_radius_center(
        space,
        &outer.trace.points,
        &surrogate,
        &AsymptoticOptions {
            window: opts.window.map(|w| w.min(outer.trace.len())),
            resolution: opts.resolution,
            ..AsymptoticOptions::default()
        },
    )?;
    let center_hull = CompactSet::hull_of(center.centers.clone())?;

    // stage 5
    let mut inner = guided_run(
        problem,
        &center.center,
        &surrogate,
        Some(&center_hull),
        true,
    );
    let mut restarted = false;
    if !inner.trace.converged() {
        let alt = center
            .centers
            .iter()
            .rev()
            .find(|c| **c != center.center)
            .cloned()
            .unwrap_or_else(|| outer.trace.last_point().clone());
        let second = guided_run(problem, &alt, &surrogate, Some(&center_hull), true);
        restarted = true;
        if second.trace.final_residual() <= inner.trace.final_residual() {
            inner = second;
        }
    }

    // stage 6
    let z = inner.trace.last_point().clone();
    let residual_t = problem.t.residual(&z);
    let residual_big_t = problem.big_t.residual(&z);
    let certified = residual_t <= eps && residual_big_t <= eps && domain.contains(&z, SET_TOL);
    if !certified {
        warnings.push(format!(
            "residuals stalled at {residual_t:e} (t) and {residual_big_t:e} (T); best point returned uncertified"
        ));
    }
    let distance_to_surrogate = distance_point_set(space, &z, &surrogate)?;
    Ok(CommonFixedPointResult {
        z,
        residual_t,
        residual_big_t,
        epsilon: eps,
        certified,
        distance_to_surrogate,
        commuting,
        fix_set,
        surrogate,
        intersection,
        outer,
        center,
        inner,
        restarted,
        warnings,
    })
}

fn precheck(problem: &CommonFixedPointProblem, warnings: &mut Vec<String>) -> Result<()> {
    let sample = PairSample::for_map(&problem.t, &problem.options.sample);
    let c = check_clambda(&problem.t, problem.lambda, &sample)?;
    if !c.satisfied {
        warnings.push(format!("t violates (C_{}) on the sample", problem.lambda));
    }
    let mu = minimal_mu(&problem.t, &sample).mu;
    if !check_e(&problem.t, mu, &sample)?.satisfied {
        warnings.push("t violates (E) on the sample".into());
    }

    let sample = PairSample::for_map(&problem.big_t, &problem.options.sample);
    let c = check_clambda(&problem.big_t, problem.lambda, &sample)?;
    if !c.satisfied {
        warnings.push(format!("T violates (C_{}) on the sample", problem.lambda));
    }
    let mu = minimal_mu(&problem.big_t, &sample).mu;
    if !check_e(&problem.big_t, mu, &sample)?.satisfied {
        warnings.push("T violates (E) on the sample".into());
    }
    Ok(())
}

fn interval_gap(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.1).max(b.0 - a.1).max(0.0)
}

fn intersect_1d(a: &CompactSet, b: &CompactSet) -> Option<CompactSet> {
    let (alo, ahi) = a.as_interval()?;
    let (blo, bhi) = b.as_interval()?;
    let (lo, hi) = (alo.max(blo), ahi.min(bhi));
    (lo <= hi).then_some(CompactSet::Interval { lo, hi })
}

/// `dist(A, F)`: exact for one-dimensional convex sets, otherwise the least
/// distance from a grid of `A` to `F`.
fn set_gap(space: &NormedSpace, a: &CompactSet, f: &CompactSet, grid: usize) -> f64 {
    if let (Some(ia), Some(ib)) = (a.as_interval(), f.as_interval()) {
        return interval_gap(ia, ib);
    }
    let mut probes = a.probe_points();
    probes.extend(a.grid(grid));
    probes
        .iter()
        .map(|p| set_distance_to_point(space, p, f))
        .fold(f64::INFINITY, f64::min)
}

fn intersection_samples(surrogate: &CompactSet, grid: usize) -> Vec<Point> {
    let mut xs = surrogate.probe_points();
    for g in surrogate.grid(grid) {
        if !xs.contains(&g) {
            xs.push(g);
        }
    }
    xs
}

fn intersection_gaps(
    problem: &CommonFixedPointProblem,
    surrogate: &CompactSet,
) -> Vec<(Point, f64)> {
    let grid = problem.options.intersection_grid;
    intersection_samples(surrogate, grid)
        .into_par_iter()
        .map(|x| {
            let tx = problem.big_t.apply(&x);
            let d = set_gap(problem.space(), &tx, surrogate, grid);
            (x, d)
        })
        .collect()
}

fn intersection_check(
    problem: &CommonFixedPointProblem,
    surrogate: &CompactSet,
) -> IntersectionCheck {
    let gaps = intersection_gaps(problem, surrogate);
    let max_distance = gaps.iter().map(|g| g.1).fold(0.0, f64::max);
    let threshold = 10.0 * problem.options.epsilon;
    IntersectionCheck {
        samples: gaps.len(),
        max_distance,
        threshold,
        passed: max_distance <= threshold,
    }
}

fn worst_intersection_point(problem: &CommonFixedPointProblem, surrogate: &CompactSet) -> Point {
    intersection_gaps(problem, surrogate)
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|g| g.0)
        .expect("surrogate has probe points")
}

/// Averaged iteration of `T` with selections anchored at the previous one,
/// restricted to `restrict` when that meets `T(x_n)`, and pulled back onto
/// `surrogate` when farther than `ε` from it. With `include_t` the stopping
/// residual is `max(‖x − tx‖, dist(x, Tx))`.
fn guided_run(
    problem: &CommonFixedPointProblem,
    start: &Point,
    surrogate: &CompactSet,
    restrict: Option<&CompactSet>,
    include_t: bool,
) -> StageRun {
    let space = problem.space();
    let opts = &problem.options;
    let eps = opts.epsilon;
    let mut max_projection = 0.0f64;
    let mut choose = |anchor: &Point, image: &CompactSet| {
        let target = restrict.and_then(|r| intersect_1d(image, r));
        let y = select_nearest(space, anchor, target.as_ref().unwrap_or(image));
        let d = set_distance_to_point(space, &y, surrogate);
        if d > eps {
            max_projection = max_projection.max(d);
            nearest_point(space, &y, surrogate)
                .expect("surrogate is convex")
                .point
        } else {
            y
        }
    };

    let mut trace = IterationTrace {
        step: problem.lambda,
        rule: Some(SelectionRule::Paper),
        start: start.clone(),
        tol: eps,
        budget: opts.budget,
        points: Vec::new(),
        selections: Vec::new(),
        residuals: Vec::new(),
        termination: Termination::BudgetExhausted,
        warnings: Vec::new(),
    };
    let mut x = start.clone();
    let mut image = problem.big_t.apply(&x);
    let mut y = choose(&x, &image);
    loop {
        let mut res = set_distance_to_point(space, &x, &image);
        if include_t {
            res = res.max(problem.t.residual(&x));
        }
        let next = Point::lerp(&x, &y, problem.lambda);
        trace.points.push(x);
        trace.selections.push(y.clone());
        trace.residuals.push(res);
        if res <= eps {
            trace.termination = Termination::Converged;
            break;
        }
        if trace.points.len() > opts.budget {
            break;
        }
        image = problem.big_t.apply(&next);
        y = choose(&y, &image);
        x = next;
    }
    let goebel_kirk = (trace.len() >= 3)
        .then(|| {
            goebel_kirk_check(
                space,
                &trace.points,
                &trace.selections,
                problem.lambda,
                TRACE_GAP_TOL,
            )
            .ok()
        })
        .flatten();
    StageRun {
        trace,
        max_projection_distance: max_projection,
        goebel_kirk,
    }
}
