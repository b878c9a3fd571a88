//! Averaged (Krasnoselskii-type) iterations for single- and multivalued maps.
//!
//! Single-valued: `x_{n+1} = (1 − r)·x_n + r·t(x_n)`.
//!
//! Multivalued: `x_{n+1} = (1 − λ)·x_n + λ·y_n` with `y_n ∈ T(x_n)` chosen as
//! the nearest point of `T(x_n)` to an anchor. [`SelectionRule::Paper`]
//! anchors at the previous selection `y_{n−1}`; [`SelectionRule::ToX`] at
//! `x_n` itself, making `‖x_n − y_n‖ = dist(x_n, T x_n)`. The first selection
//! is always the nearest point to the start.
//!
//! Runs stop on the residual `dist(x_n, T x_n) ≤ tol`, not on Cauchy-ness of
//! the iterates.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::{check_open_unit, MultiValuedMap, SelfMap, SingleValuedMap};
use crate::spaces::{nearest_point, CompactSet, NormedSpace, Point, SET_TOL};

/// Componentwise tolerance for re-verifying a recorded recurrence.
pub const RECURRENCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SelectionRule {
    #[default]
    #[serde(rename = "paper")]
    Paper,
    #[serde(rename = "to-x")]
    ToX,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterationOptions {
    /// Averaging weight `r` (single-valued) or `λ` (multivalued), in `(0, 1)`.
    pub step: f64,
    pub tol: f64,
    /// Maximum number of updates.
    pub budget: usize,
    pub rule: SelectionRule,
    /// λ for which the map is known to satisfy (C_λ); a step below it only
    /// produces a warning.
    pub declared_lambda: Option<f64>,
}

impl Default for IterationOptions {
    fn default() -> Self {
        Self {
            step: 0.5,
            tol: 1e-8,
            budget: 100_000,
            rule: SelectionRule::Paper,
            declared_lambda: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    pub step: f64,
    /// `None` for single-valued runs.
    pub rule: Option<SelectionRule>,
    pub start: Point,
    pub tol: f64,
    pub budget: usize,
    /// `x_1, …, x_N`.
    pub points: Vec<Point>,
    /// `y_n` paired with `x_n`: the selected point of `T(x_n)`, or `t(x_n)`
    /// for a single-valued run.
    pub selections: Vec<Point>,
    /// `dist(x_n, T x_n)` or `‖x_n − t x_n‖`.
    pub residuals: Vec<f64>,
    pub termination: Termination,
    pub warnings: Vec<String>,
}

impl IterationTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn last_point(&self) -> &Point {
        self.points.last().expect("traces hold at least the start")
    }

    pub fn final_residual(&self) -> f64 {
        *self
            .residuals
            .last()
            .expect("traces hold at least the start")
    }

    /// Checks `x_{n+1} = (1 − r)·x_n + r·y_n` componentwise to 1e-12.
    pub fn verify_recurrence(&self) -> bool {
        recurrence_holds(&self.points, &self.selections, self.step)
    }

    /// CSV with header `n,x,y,residual`; coordinates joined by `;`, `n` from 1.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "x", "y", "residual"])?;
        for (k, ((x, y), r)) in self
            .points
            .iter()
            .zip(&self.selections)
            .zip(&self.residuals)
            .enumerate()
        {
            w.write_record([
                (k + 1).to_string(),
                x.to_string(),
                y.to_string(),
                r.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn recurrence_holds(z: &[Point], w: &[Point], step: f64) -> bool {
    z.windows(2).zip(w).all(|(pair, wn)| {
        pair[1]
            .coords()
            .iter()
            .zip(pair[0].coords().iter().zip(wn.coords()))
            .all(|(next, (cur, sel))| {
                (next - ((1.0 - step) * cur + step * sel)).abs() <= RECURRENCE_TOL
            })
    })
}

fn validate_start<M: SelfMap + ?Sized>(
    map: &M,
    x1: &Point,
    opts: &IterationOptions,
) -> Result<Vec<String>> {
    check_open_unit("step", opts.step)?;
    map.space().check(x1)?;
    if !map.domain().contains(x1, SET_TOL) {
        return Err(Error::OutOfDomain {
            point: x1.coords().to_vec(),
        });
    }
    let mut warnings = Vec::new();
    if let Some(lambda) = opts.declared_lambda {
        if opts.step < lambda {
            warnings.push(format!(
                "step {} is below the declared lambda {lambda}; the residual guarantee needs step in [lambda, 1)",
                opts.step
            ));
        }
    }
    Ok(warnings)
}

/// `x_{n+1} = r·t(x_n) + (1 − r)·x_n` until `‖x_n − t x_n‖ ≤ tol` or the budget runs out.
pub fn krasnoselskii_single(
    t: &SingleValuedMap,
    x1: &Point,
    opts: &IterationOptions,
) -> Result<IterationTrace> {
    let warnings = validate_start(t, x1, opts)?;
    let space = t.space();
    let mut trace = IterationTrace {
        step: opts.step,
        rule: None,
        start: x1.clone(),
        tol: opts.tol,
        budget: opts.budget,
        points: Vec::new(),
        selections: Vec::new(),
        residuals: Vec::new(),
        termination: Termination::BudgetExhausted,
        warnings,
    };
    let mut x = x1.clone();
    loop {
        let tx = t.apply(&x);
        let res = space.dist_unchecked(&x, &tx);
        let next = Point::lerp(&x, &tx, opts.step);
        trace.points.push(x);
        trace.selections.push(tx);
        trace.residuals.push(res);
        if res <= opts.tol {
            trace.termination = Termination::Converged;
            break;
        }
        if trace.points.len() > opts.budget {
            break;
        }
        x = next;
    }
    Ok(trace)
}

/// Nearest point of `set` to `anchor`; finite sets pick the closest member
/// (lowest index on ties).
pub fn select_nearest(space: &NormedSpace, anchor: &Point, set: &CompactSet) -> Point {
    match set {
        CompactSet::Points { points } => {
            let mut best = &points[0];
            let mut best_d = f64::INFINITY;
            for p in points {
                let d = space.dist_unchecked(anchor, p);
                if d < best_d {
                    best = p;
                    best_d = d;
                }
            }
            best.clone()
        }
        _ => {
            nearest_point(space, anchor, set)
                .expect("dimensions validated by the map")
                .point
        }
    }
}

/// `x_{n+1} = (1 − λ)·x_n + λ·y_n` with nearest-point selections `y_n ∈ T(x_n)`.
pub fn krasnoselskii_multi(
    map: &MultiValuedMap,
    x1: &Point,
    opts: &IterationOptions,
) -> Result<IterationTrace> {
    let warnings = validate_start(map, x1, opts)?;
    let space = map.space();
    let mut trace = IterationTrace {
        step: opts.step,
        rule: Some(opts.rule),
        start: x1.clone(),
        tol: opts.tol,
        budget: opts.budget,
        points: Vec::new(),
        selections: Vec::new(),
        residuals: Vec::new(),
        termination: Termination::BudgetExhausted,
        warnings,
    };
    let mut x = x1.clone();
    let mut tx = map.apply(&x);
    let mut y = select_nearest(space, &x, &tx);
    loop {
        let res = crate::spaces::distance_point_set(space, &x, &tx).expect("validated");
        let next = Point::lerp(&x, &y, opts.step);
        trace.points.push(x);
        trace.selections.push(y.clone());
        trace.residuals.push(res);
        if res <= opts.tol {
            trace.termination = Termination::Converged;
            break;
        }
        if trace.points.len() > opts.budget {
            break;
        }
        tx = map.apply(&next);
        let anchor = match opts.rule {
            SelectionRule::Paper => &y,
            SelectionRule::ToX => &next,
        };
        y = select_nearest(space, anchor, &tx);
        x = next;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoebelKirkReport {
    /// `z_{n+1} = λ·w_n + (1 − λ)·z_n` holds to 1e-12.
    pub recurrence_holds: bool,
    /// `‖w_{n+1} − w_n‖ ≤ ‖z_{n+1} − z_n‖ + 1e-12` for every `n`.
    pub increments_dominated: bool,
    /// Min of `‖w_n − z_n‖` over the last 10% of the trace; only evaluated
    /// when both hypotheses hold.
    pub tail_min_gap: Option<f64>,
    pub final_gap: f64,
    pub tol: f64,
    /// `Some(tail_min_gap ≤ tol)` when the hypotheses hold, else `None`.
    pub conclusion: Option<bool>,
}

impl GoebelKirkReport {
    pub fn passed(&self) -> bool {
        self.conclusion == Some(true)
    }
}

/// Checks the hypotheses of the Goebel–Kirk averaging lemma on a finite
/// trace and, if they hold, whether `‖w_n − z_n‖` has dropped below `tol`.
pub fn goebel_kirk_check(
    space: &NormedSpace,
    z: &[Point],
    w: &[Point],
    lambda: f64,
    tol: f64,
) -> Result<GoebelKirkReport> {
    if z.len() != w.len() {
        return Err(Error::LengthMismatch(z.len(), w.len()));
    }
    if z.len() < 3 {
        return Err(Error::SequenceTooShort {
            needed: 3,
            actual: z.len(),
        });
    }
    for p in z.iter().chain(w) {
        space.check(p)?;
    }
    let recurrence = recurrence_holds(z, w, lambda);
    let increments = (0..z.len() - 1).all(|n| {
        space.dist_unchecked(&w[n + 1], &w[n])
            <= space.dist_unchecked(&z[n + 1], &z[n]) + RECURRENCE_TOL
    });
    let gaps: Vec<f64> = z
        .iter()
        .zip(w)
        .map(|(a, b)| space.dist_unchecked(a, b))
        .collect();
    let final_gap = *gaps.last().expect("length >= 3");
    let (tail_min_gap, conclusion) = if recurrence && increments {
        let tail = gaps.len().div_ceil(10);
        let m = gaps[gaps.len() - tail..]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        (Some(m), Some(m <= tol))
    } else {
        (None, None)
    };
    Ok(GoebelKirkReport {
        recurrence_holds: recurrence,
        increments_dominated: increments,
        tail_min_gap,
        final_gap,
        tol,
        conclusion,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexityCheck {
    pub pairs_checked: usize,
    pub max_midpoint_residual: f64,
    pub threshold: f64,
    pub passed: bool,
    /// The fixed-point set is only guaranteed convex in strictly convex spaces.
    pub strictly_convex_space: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixSetApproximation {
    /// Certified points, `‖x − t x‖ ≤ tol`, deduplicated.
    pub points: Vec<Point>,
    pub residuals: Vec<f64>,
    pub dedup_radius: f64,
    pub tol: f64,
    pub runs: usize,
    pub converged_runs: usize,
    pub convexity: Option<ConvexityCheck>,
    pub diagnostic: Option<String>,
}

impl FixSetApproximation {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Convex hull of the certified points.
    pub fn hull(&self) -> Option<CompactSet> {
        if self.points.is_empty() {
            None
        } else {
            CompactSet::hull_of(self.points.clone()).ok()
        }
    }

    /// Each kept point still satisfies its residual bound.
    pub fn reverify(&self, t: &SingleValuedMap) -> bool {
        self.points.iter().all(|p| t.residual(p) <= self.tol)
    }
}

/// Runs the single-valued iteration from every start and keeps the certified
/// endpoints, merged within `10·tol`.
pub fn approximate_fix_set(
    t: &SingleValuedMap,
    starts: &[Point],
    opts: &IterationOptions,
) -> Result<FixSetApproximation> {
    if starts.is_empty() {
        return Err(Error::Empty("start list"));
    }
    let traces: Vec<IterationTrace> = starts
        .par_iter()
        .map(|s| krasnoselskii_single(t, s, opts))
        .collect::<Result<_>>()?;
    let space = t.space();
    let radius = 10.0 * opts.tol;

    let mut points: Vec<Point> = Vec::new();
    let mut residuals = Vec::new();
    let mut converged_runs = 0;
    for tr in &traces {
        if !tr.converged() {
            continue;
        }
        converged_runs += 1;
        let end = tr.last_point();
        if points.iter().all(|p| space.dist_unchecked(p, end) > radius) {
            points.push(end.clone());
            residuals.push(tr.final_residual());
        }
    }

    if points.is_empty() {
        return Ok(FixSetApproximation {
            points,
            residuals,
            dedup_radius: radius,
            tol: opts.tol,
            runs: traces.len(),
            converged_runs,
            convexity: None,
            diagnostic: Some(format!(
                "no run converged to tol {} within {} iterations",
                opts.tol, opts.budget
            )),
        });
    }

    let mut worst = 0.0f64;
    let mut pairs = 0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let m = Point::midpoint(&points[i], &points[j]);
            worst = worst.max(t.residual(&m));
            pairs += 1;
        }
    }
    Ok(FixSetApproximation {
        points,
        residuals,
        dedup_radius: radius,
        tol: opts.tol,
        runs: traces.len(),
        converged_runs,
        convexity: Some(ConvexityCheck {
            pairs_checked: pairs,
            max_midpoint_residual: worst,
            threshold: radius,
            passed: worst <= radius,
            strictly_convex_space: space.strictly_convex(),
        }),
        diagnostic: None,
    })
}
