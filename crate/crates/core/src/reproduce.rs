//! The built-in suite behind `commonfix reproduce-paper`.

use std::fmt::Write as _;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::asymptotic::{asymptotic_radius_center, AsymptoticOptions};
use crate::conditions::{
    check_c, check_clambda, check_e, check_nonexpansive, minimal_mu, monotonicity_probe,
    PairSample, SampleConfig,
};
use crate::error::{Error, Result};
use crate::iteration::{
    goebel_kirk_check, krasnoselskii_multi, krasnoselskii_single, IterationOptions, IterationTrace,
    SelectionRule,
};
use crate::maps::{
    garcia_example, multivalued_example, suzuki_example, AnyMap, MapSpec, MultiValuedMap, Offset,
    Rule, SelfMap, SingleValuedMap,
};
use crate::solver::{solve_common, CommonFixedPointProblem, SolverOptions};
use crate::spaces::{hausdorff, nearest_point, CompactSet, Exponent, NormedSpace, Point};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteCheck {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<SuiteCheck>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One line per check: `[PASS] 3 name: detail`.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(out, "[{tag}] {} {}: {}", c.id, c.name, c.detail);
        }
        out
    }
}

type Outcome = Result<(bool, String)>;

pub fn run_suite(seed: u64) -> SuiteReport {
    let sample = SampleConfig {
        seed,
        ..SampleConfig::default()
    };
    let mut traces: Vec<(String, NormedSpace, IterationTrace)> = Vec::new();
    let checks: Vec<(u8, &'static str, Outcome)> = vec![
        (1, "suzuki", suzuki(&sample)),
        (2, "garcia", garcia(&sample, &mut traces)),
        (3, "multivalued", multivalued(&sample, &mut traces)),
        (4, "monotonicity", monotonicity(&sample, seed)),
        (5, "nonexpansive_implies_e1", contractions(&sample, seed)),
        (
            7,
            "asymptotic_and_hausdorff",
            asymptotic_and_hausdorff(seed),
        ),
        (8, "solver", solver(seed, &mut traces)),
        (9, "strict_convexity", strict_convexity()),
    ];
    let gk = goebel_kirk_all(&traces);
    let mut out: Vec<SuiteCheck> = checks
        .into_iter()
        .chain(std::iter::once((6, "goebel_kirk", gk)))
        .map(|(id, name, o)| {
            let (passed, detail) = o.unwrap_or_else(|e| (false, format!("error: {e}")));
            SuiteCheck {
                id,
                name,
                passed,
                detail,
            }
        })
        .collect();
    out.sort_by_key(|c| c.id);
    SuiteReport { seed, checks: out }
}

fn suzuki(cfg: &SampleConfig) -> Outcome {
    let t = suzuki_example();
    let s = PairSample::for_map(&t, cfg);
    let c = check_c(&t, &s);
    let has_three = s
        .description()
        .exception_points
        .contains(&Point::scalar(3.0));
    let ne = check_nonexpansive(&t, &s);
    let margin = ne
        .worst_violation()
        .map_or(f64::NEG_INFINITY, |w| w.margin());
    let ok =
        c.satisfied && c.violations.is_empty() && has_three && s.len() >= 10_000 && margin >= 0.9;
    Ok((
        ok,
        format!(
            "(C) satisfied={} on {} pairs; nonexpansive violated with margin {margin:.4}",
            c.satisfied,
            s.len()
        ),
    ))
}

fn garcia(cfg: &SampleConfig, traces: &mut Vec<(String, NormedSpace, IterationTrace)>) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for lambda in [0.3, 0.5, 0.8] {
        let t = garcia_example(lambda)?;
        let s = PairSample::for_map(&t, cfg);
        let at = check_clambda(&t, lambda, &s)?;
        let half = check_clambda(&t, lambda / 2.0, &s)?;
        let witness_at_one = half.violations.iter().any(|w| w.x == Point::scalar(1.0));
        let mu = minimal_mu(&t, &s).mu;
        let target = (2.0 + lambda) / 2.0;
        ok &= at.satisfied
            && !half.satisfied
            && witness_at_one
            && half.reproduce(&t, 1e-12)
            && (mu - target).abs() <= 0.01;
        detail.push(format!("l={lambda}: mu={mu:.4} vs {target}"));
        let tr = krasnoselskii_single(&t, &Point::scalar(1.0), &iteration(lambda))?;
        traces.push((format!("garcia {lambda}"), *t.space(), tr));
    }
    Ok((ok, detail.join("; ")))
}

fn iteration(step: f64) -> IterationOptions {
    IterationOptions {
        step,
        ..IterationOptions::default()
    }
}

fn multivalued(
    cfg: &SampleConfig,
    traces: &mut Vec<(String, NormedSpace, IterationTrace)>,
) -> Outcome {
    let m = multivalued_example();
    let s = PairSample::for_map(&m, cfg);
    let c = check_clambda(&m, 0.5, &s)?;
    let mu = minimal_mu(&m, &s).mu;
    let e = check_e(&m, mu, &s)?;
    let ne = check_nonexpansive(&m, &s);
    let near_five = ne
        .worst_violation()
        .is_some_and(|w| w.x.x().max(w.y.x()) >= 4.9);
    let mut ok = c.satisfied && e.satisfied && !ne.satisfied && near_five;
    let mut steps = Vec::new();
    let mut limits = Vec::new();
    for rule in [SelectionRule::Paper, SelectionRule::ToX] {
        let opts = IterationOptions {
            step: 0.5,
            tol: 1e-6,
            budget: 200,
            rule,
            declared_lambda: Some(0.5),
        };
        let tr = krasnoselskii_multi(&m, &Point::scalar(5.0), &opts)?;
        ok &= tr.converged() && tr.len() <= 201;
        steps.push(tr.len() - 1);
        // the same sequence continued far into its tail estimates the limit
        let long = krasnoselskii_multi(
            &m,
            &Point::scalar(5.0),
            &IterationOptions {
                tol: 1e-12,
                budget: 10_000,
                ..opts
            },
        )?;
        ok &= long.points[..tr.len()] == tr.points[..] && long.last_point().x().abs() <= 1e-6;
        limits.push(long.last_point().x());
        traces.push((format!("mv5 {rule:?}"), *m.space(), tr));
    }
    Ok((
        ok,
        format!("mu={mu:.4}; iterations to 1e-6: {steps:?}; limit estimates {limits:?}"),
    ))
}

fn catalog_maps() -> Result<Vec<AnyMap>> {
    Ok(vec![
        AnyMap::Single(suzuki_example()),
        AnyMap::Single(garcia_example(0.3)?),
        AnyMap::Single(garcia_example(0.5)?),
        AnyMap::Single(garcia_example(0.8)?),
        AnyMap::Multi(multivalued_example()),
    ])
}

fn monotonicity(cfg: &SampleConfig, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut ok = true;
    for map in catalog_maps()? {
        let s = PairSample::for_map(&map, cfg);
        for _ in 0..10 {
            let (a, b) = lambda_pair(&mut rng);
            ok &= monotonicity_probe(&map, a, b, &s)?;
            checked += 1;
        }
    }
    Ok((ok, format!("{checked} (l1 < l2) pairs")))
}

/// Two distinct values in `(0.01, 0.99)`, ascending.
pub fn lambda_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    loop {
        let a = 0.01 + 0.98 * rng.random::<f64>();
        let b = 0.01 + 0.98 * rng.random::<f64>();
        if a != b {
            return (a.min(b), a.max(b));
        }
    }
}

/// Seeded affine contractions `x ↦ a·x + b` mapping the unit interval or
/// the unit square into itself; `p` cycles through 1, 1.5, 2, 3, ∞.
pub fn seeded_contractions(seed: u64, count: usize) -> Vec<SingleValuedMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ps = [
        Exponent::Finite(1.0),
        Exponent::Finite(1.5),
        Exponent::Finite(2.0),
        Exponent::Finite(3.0),
        Exponent::Infinity,
    ];
    (0..count)
        .map(|k| {
            let dim = 1 + k % 2;
            let space = NormedSpace::new(dim, ps[k % ps.len()]).expect("valid exponent");
            let a: f64 = rng.random::<f64>() * 0.99;
            let b: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * (1.0 - a)).collect();
            let domain = if dim == 1 {
                CompactSet::interval(0.0, 1.0).expect("valid interval")
            } else {
                CompactSet::polytope(vec![
                    Point::new(vec![0.0, 0.0]).expect("finite"),
                    Point::new(vec![1.0, 0.0]).expect("finite"),
                    Point::new(vec![1.0, 1.0]).expect("finite"),
                    Point::new(vec![0.0, 1.0]).expect("finite"),
                ])
                .expect("valid square")
            };
            let spec = MapSpec {
                rule: Rule::Affine {
                    scale: a,
                    offset: Offset::Vector(b),
                },
                exception: None,
            };
            SingleValuedMap::new(space, domain, spec).expect("valid contraction")
        })
        .collect()
}

fn contractions(cfg: &SampleConfig, seed: u64) -> Outcome {
    let maps = seeded_contractions(seed, 20);
    let mut passed = 0;
    for t in &maps {
        let s = PairSample::for_map(t, cfg);
        if check_nonexpansive(t, &s).satisfied && check_e(t, 1.0, &s)?.satisfied {
            passed += 1;
        }
    }
    Ok((
        passed == maps.len(),
        format!("{passed}/{} pass (E_1)", maps.len()),
    ))
}

fn alternating(n: usize) -> Vec<Point> {
    (0..n).map(|i| Point::scalar((i % 2) as f64)).collect()
}

/// `H([a, b], [c, d])` by brute force over `n`-node grids of both intervals.
pub fn hausdorff_grid_oracle(a: (f64, f64), b: (f64, f64), n: usize) -> f64 {
    let grid = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let (ga, gb) = (grid(a), grid(b));
    let directed = |u: &[f64], v: &[f64]| {
        u.iter()
            .map(|x| {
                v.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    directed(&ga, &gb).max(directed(&gb, &ga))
}

/// Seeded interval pairs with endpoints in `[-5, 5]`.
pub fn seeded_interval_pairs(seed: u64, count: usize) -> Vec<((f64, f64), (f64, f64))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let u = -5.0 + 10.0 * rng.random::<f64>();
        let v = -5.0 + 10.0 * rng.random::<f64>();
        (u.min(v), u.max(v))
    };
    (0..count).map(|_| (draw(), draw())).collect()
}

fn asymptotic_and_hausdorff(seed: u64) -> Outcome {
    let line = NormedSpace::real_line();
    let seq = alternating(200);
    let mut ok = true;
    for (lo, hi, r, c) in [(0.0, 1.0, 0.5, 0.5), (2.0, 3.0, 2.0, 2.0)] {
        let d = CompactSet::interval(lo, hi)?;
        let res = asymptotic_radius_center(&line, &seq, &d, &AsymptoticOptions::default())?;
        ok &= (res.radius - r).abs() <= 1e-4 && (res.center.x() - c).abs() <= 1e-4;
    }
    let n = 401;
    let mut worst = 0.0f64;
    for (a, b) in seeded_interval_pairs(seed, 100) {
        let exact = hausdorff(
            &line,
            &CompactSet::interval(a.0, a.1)?,
            &CompactSet::interval(b.0, b.1)?,
        )?;
        let oracle = hausdorff_grid_oracle(a, b, n);
        let spacing = (a.1 - a.0).max(b.1 - b.0) / (n - 1) as f64;
        let err = (exact - oracle).abs();
        ok &= err <= spacing;
        worst = worst.max(err);
    }
    Ok((
        ok,
        format!("centers match; worst Hausdorff gap to grid oracle {worst:.2e}"),
    ))
}

fn unit_setting(spec: MapSpec) -> Result<(NormedSpace, CompactSet, MapSpec)> {
    Ok((
        NormedSpace::real_line(),
        CompactSet::interval(0.0, 1.0)?,
        spec,
    ))
}

fn solver(seed: u64, traces: &mut Vec<(String, NormedSpace, IterationTrace)>) -> Outcome {
    let opts = SolverOptions {
        seed,
        ..SolverOptions::default()
    };
    let (s, d, spec) = unit_setting(MapSpec::affine(0.5, 0.0))?;
    let t = SingleValuedMap::new(s, d.clone(), spec)?;
    let big_t = MultiValuedMap::new(s, d.clone(), MapSpec::interval_scaling(0.5))?;
    let p = CommonFixedPointProblem::new(t.clone(), big_t, 0.5, opts)?;
    let r = solve_common(&p)?;
    let max_res = r.residual_t.max(r.residual_big_t);
    let mut ok = r.certified && r.reverify(&p) && max_res <= 1e-8 && r.z.x().abs() <= 1e-6;
    for (name, run) in [("outer", &r.outer), ("inner", &r.inner)] {
        if run.trace.converged() && run.trace.len() >= 3 {
            traces.push((format!("solver {name}"), s, run.trace.clone()));
        }
    }

    let one = MultiValuedMap::new(s, d, MapSpec::constant_set(CompactSet::interval(1.0, 1.0)?))?;
    let p = CommonFixedPointProblem::new(t, one, 0.5, opts)?;
    let aborted = match solve_common(&p) {
        Err(Error::NotCommuting { x, .. }) => x == vec![1.0],
        _ => false,
    };
    ok &= aborted;
    Ok((
        ok,
        format!(
            "z={:e}, max residual {max_res:e}; T=1 aborted at commuting: {aborted}",
            r.z.x()
        ),
    ))
}

fn goebel_kirk_all(traces: &[(String, NormedSpace, IterationTrace)]) -> Outcome {
    let mut ok = true;
    let mut failed = Vec::new();
    let mut checked = 0;
    for (name, space, tr) in traces {
        if !tr.converged() || tr.len() < 3 {
            continue;
        }
        checked += 1;
        let gk = goebel_kirk_check(space, &tr.points, &tr.selections, tr.step, 1e-6)?;
        if !(gk.passed() && gk.final_gap <= 1e-6) {
            ok = false;
            failed.push(name.clone());
        }
    }
    ok &= checked > 0;
    Ok((
        ok,
        format!("{checked} converged traces; failing: {failed:?}"),
    ))
}

fn strict_convexity() -> Outcome {
    let pt = |c: [f64; 2]| Point::new(c.to_vec()).expect("finite");
    let seg = |a, b| CompactSet::polytope(vec![pt(a), pt(b)]);
    let origin = pt([0.0, 0.0]);
    let vertical = seg([1.0, -1.0], [1.0, 1.0])?;
    let diagonal = seg([1.0, 0.0], [0.0, 1.0])?;
    let sup = NormedSpace::new(2, Exponent::Infinity)?;
    let taxi = NormedSpace::new(2, Exponent::Finite(1.0))?;
    let l2 = NormedSpace::euclidean(2);
    let flag = |s: &NormedSpace, set: &CompactSet| -> Result<bool> {
        Ok(nearest_point(s, &origin, set)?.possibly_non_unique)
    };
    let inf_flag = flag(&sup, &vertical)?;
    let one_flag = flag(&taxi, &diagonal)?;
    let two_flags = flag(&l2, &vertical)? || flag(&l2, &diagonal)?;
    Ok((
        inf_flag && one_flag && !two_flags,
        format!("p=inf flagged {inf_flag}, p=1 flagged {one_flag}, p=2 flagged {two_flags}"),
    ))
}
