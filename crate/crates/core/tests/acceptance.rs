use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use commonfix::asymptotic::{asymptotic_radius_center, AsymptoticOptions};
use commonfix::conditions::{
    check_c, check_clambda, check_e, check_nonexpansive, minimal_mu, monotonicity_probe,
    PairSample, SampleConfig,
};
use commonfix::error::Error;
use commonfix::iteration::{
    goebel_kirk_check, krasnoselskii_multi, krasnoselskii_single, IterationOptions, IterationTrace,
    SelectionRule,
};
use commonfix::maps::{
    garcia_example, multivalued_example, suzuki_example, AnyMap, MapSpec, MultiValuedMap, SelfMap,
    SingleValuedMap,
};
use commonfix::reproduce::seeded_contractions;
use commonfix::solver::{solve_common, CommonFixedPointProblem, SolverOptions};
use commonfix::spaces::{hausdorff, nearest_point, CompactSet, Exponent, NormedSpace, Point};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn lib<T>(r: commonfix::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn sample() -> SampleConfig {
    SampleConfig {
        seed: SEED,
        ..SampleConfig::default()
    }
}

fn suzuki_value(x: f64) -> f64 {
    if x == 3.0 {
        1.0
    } else {
        0.0
    }
}

fn suzuki() -> Outcome {
    let start = Instant::now();
    let t = suzuki_example();
    let s = PairSample::for_map(&t, &sample());
    ensure(s.len() >= 10_000, format!("only {} pairs", s.len()))?;
    ensure(
        s.description()
            .exception_points
            .contains(&Point::scalar(3.0)),
        "x = 3 not sampled",
    )?;
    let c = check_c(&t, &s);
    ensure(
        c.satisfied && c.violations.is_empty(),
        format!("(C) has {} violations", c.violations.len()),
    )?;
    let ne = check_nonexpansive(&t, &s);
    let w = ne.worst_violation().ok_or("no nonexpansive witness")?;
    let (x, y) = (w.x.x(), w.y.x());
    let margin = (suzuki_value(x) - suzuki_value(y)).abs() - (x - y).abs();
    ensure(
        (margin - w.margin()).abs() <= 1e-12 && margin >= 0.9,
        format!("witness ({x}, {y}) margin {margin}"),
    )?;
    let direct = (suzuki_value(3.0) - suzuki_value(2.9)).abs() - 0.1;
    ensure(direct >= 0.9 - 1e-12, "pair (3, 2.9) does not violate")?;
    let elapsed = start.elapsed();
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{} pairs, (C) clean, nonexpansive witness ({x}, {y}) margin {margin:.4}, {elapsed:.2?}",
        s.len()
    ))
}

fn garcia_value(lambda: f64, x: f64) -> f64 {
    if x == 1.0 {
        (1.0 + lambda) / (2.0 + lambda)
    } else {
        x / 2.0
    }
}

/// `sup (|x − t y| − |x − y|) / |x − t x|` over an `n`-node grid of `[0, 1]`.
fn garcia_mu_oracle(lambda: f64, n: usize) -> f64 {
    let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut best = 1.0f64;
    for &x in &grid {
        let res = (x - garcia_value(lambda, x)).abs();
        if res == 0.0 {
            continue;
        }
        for &y in &grid {
            let ratio = ((x - garcia_value(lambda, y)).abs() - (x - y).abs()) / res;
            best = best.max(ratio);
        }
    }
    best
}

fn garcia(traces: &mut Vec<(String, NormedSpace, IterationTrace)>) -> Outcome {
    let mut details = Vec::new();
    for lambda in [0.3, 0.5, 0.8] {
        let t = lib(garcia_example(lambda))?;
        let s = PairSample::for_map(&t, &sample());
        let at = lib(check_clambda(&t, lambda, &s))?;
        ensure(at.satisfied, format!("(C_{lambda}) violated"))?;
        let half = lib(check_clambda(&t, lambda / 2.0, &s))?;
        ensure(!half.satisfied, format!("(C_{}) satisfied", lambda / 2.0))?;
        ensure(
            half.violations.iter().any(|w| w.x == Point::scalar(1.0)),
            "no witness at x = 1",
        )?;
        ensure(half.reproduce(&t, 1e-12), "witness does not reproduce")?;
        let again = lib(check_clambda(&t, lambda / 2.0, &s))?;
        ensure(
            again.violations == half.violations,
            "witnesses differ on rerun",
        )?;

        let mu = minimal_mu(&t, &s).mu;
        let target = (2.0 + lambda) / 2.0;
        ensure(
            (mu - target).abs() <= 0.01,
            format!("mu {mu} vs {target} at lambda {lambda}"),
        )?;
        let oracle = garcia_mu_oracle(lambda, 201);
        ensure(
            (oracle - target).abs() <= 0.01,
            format!("grid oracle {oracle} vs {target}"),
        )?;

        let opts = IterationOptions {
            step: lambda,
            ..IterationOptions::default()
        };
        let tr = lib(krasnoselskii_single(&t, &Point::scalar(1.0), &opts))?;
        traces.push((format!("garcia {lambda}"), *t.space(), tr));
        details.push(format!("l={lambda} mu={mu:.4}"));
    }
    Ok(details.join(", "))
}

fn mv5_selection_ok(x: f64, y: f64) -> bool {
    if x == 5.0 {
        y == 1.0
    } else {
        (-1e-12..=x / 5.0 + 1e-12).contains(&y)
    }
}

fn multivalued(traces: &mut Vec<(String, NormedSpace, IterationTrace)>) -> Outcome {
    let m = multivalued_example();
    let s = PairSample::for_map(&m, &sample());
    let c = lib(check_clambda(&m, 0.5, &s))?;
    ensure(c.satisfied, "(C_0.5) violated")?;
    let mu = minimal_mu(&m, &s).mu;
    let e = lib(check_e(&m, mu, &s))?;
    ensure(e.satisfied, format!("(E_{mu}) violated"))?;
    let ne = check_nonexpansive(&m, &s);
    let w = ne.worst_violation().ok_or("nonexpansive not violated")?;
    ensure(
        w.x.x().max(w.y.x()) >= 4.9,
        format!("worst witness ({}, {}) not near 5", w.x.x(), w.y.x()),
    )?;

    let mut steps = Vec::new();
    for rule in [SelectionRule::Paper, SelectionRule::ToX] {
        let opts = IterationOptions {
            step: 0.5,
            tol: 1e-6,
            budget: 200,
            rule,
            declared_lambda: Some(0.5),
        };
        let tr = lib(krasnoselskii_multi(&m, &Point::scalar(5.0), &opts))?;
        ensure(
            tr.converged() && tr.len() <= 201,
            format!("{rule:?}: {} points", tr.len()),
        )?;
        for (x, y) in tr.points.iter().zip(&tr.selections) {
            ensure(mv5_selection_ok(x.x(), y.x()), "selection outside T(x)")?;
        }
        for (k, pair) in tr.points.windows(2).enumerate() {
            let expect = 0.5 * pair[0].x() + 0.5 * tr.selections[k].x();
            ensure((pair[1].x() - expect).abs() <= 1e-12, "recurrence broken")?;
        }
        let long = lib(krasnoselskii_multi(
            &m,
            &Point::scalar(5.0),
            &IterationOptions {
                tol: 1e-12,
                budget: 10_000,
                ..opts
            },
        ))?;
        ensure(
            long.points[..tr.len()] == tr.points[..],
            "continued sequence diverges from the run",
        )?;
        let limit = long.last_point().x();
        ensure(limit.abs() <= 1e-6, format!("limit estimate {limit}"))?;
        steps.push(tr.len() - 1);
        traces.push((format!("mv5 {rule:?}"), *m.space(), tr));
    }
    Ok(format!("mu={mu:.4}, steps to 1e-6 {steps:?}"))
}

fn monotonicity() -> Outcome {
    let maps = vec![
        AnyMap::Single(suzuki_example()),
        AnyMap::Single(lib(garcia_example(0.3))?),
        AnyMap::Single(lib(garcia_example(0.5))?),
        AnyMap::Single(lib(garcia_example(0.8))?),
        AnyMap::Multi(multivalued_example()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xa5a5);
    let mut checked = 0;
    for map in &maps {
        let s = PairSample::for_map(map, &sample());
        let mut n = 0;
        while n < 10 {
            let a = 0.01 + 0.98 * rng.random::<f64>();
            let b = 0.01 + 0.98 * rng.random::<f64>();
            if a == b {
                continue;
            }
            let (l1, l2) = (a.min(b), a.max(b));
            ensure(
                lib(monotonicity_probe(map, l1, l2, &s))?,
                format!("C_{l1} holds but C_{l2} fails"),
            )?;
            n += 1;
            checked += 1;
        }
    }
    Ok(format!("{checked} pairs over {} maps", maps.len()))
}

fn contractions() -> Outcome {
    let maps = seeded_contractions(SEED, 20);
    ensure(maps.len() == 20, "wrong count")?;
    for (k, t) in maps.iter().enumerate() {
        let s = PairSample::for_map(t, &sample());
        ensure(
            check_nonexpansive(t, &s).satisfied,
            format!("map {k} expansive"),
        )?;
        ensure(
            lib(check_e(t, 1.0, &s))?.satisfied,
            format!("map {k} fails (E_1)"),
        )?;
    }
    Ok("20/20 contractions satisfy (E_1)".into())
}

fn goebel_kirk(traces: &[(String, NormedSpace, IterationTrace)]) -> Outcome {
    let mut checked = 0;
    for (name, space, tr) in traces {
        if !tr.converged() || tr.len() < 3 {
            continue;
        }
        let gk = lib(goebel_kirk_check(
            space,
            &tr.points,
            &tr.selections,
            tr.step,
            1e-6,
        ))?;
        let last = tr.len() - 1;
        let gap = space
            .distance(&tr.points[last], &tr.selections[last])
            .map_err(|e| e.to_string())?;
        ensure(
            gk.passed() && gap <= 1e-6,
            format!("{name}: final gap {gap}"),
        )?;
        checked += 1;
    }
    ensure(checked > 0, "no converged traces")?;
    Ok(format!("{checked} converged traces"))
}

/// Brute-force `min_c max_tail |x_n − c|` over a grid of `[lo, hi]`.
fn center_oracle(tail: &[f64], lo: f64, hi: f64, n: usize) -> (f64, f64) {
    let mut best = (f64::INFINITY, lo);
    for i in 0..n {
        let c = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let r = tail.iter().map(|x| (x - c).abs()).fold(0.0, f64::max);
        if r < best.0 {
            best = (r, c);
        }
    }
    best
}

fn hausdorff_oracle(a: (f64, f64), b: (f64, f64), n: usize) -> f64 {
    let nodes = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let (u, v) = (nodes(a), nodes(b));
    let one_way = |p: &[f64], q: &[f64]| {
        p.iter()
            .map(|x| {
                q.iter()
                    .map(|y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    one_way(&u, &v).max(one_way(&v, &u))
}

fn asymptotic_and_hausdorff() -> Outcome {
    let line = NormedSpace::real_line();
    let seq: Vec<Point> = (0..200).map(|i| Point::scalar((i % 2) as f64)).collect();
    let tail: Vec<f64> = seq[seq.len() - 64..].iter().map(Point::x).collect();
    for (lo, hi, r, c) in [(0.0, 1.0, 0.5, 0.5), (2.0, 3.0, 2.0, 2.0)] {
        let d = lib(CompactSet::interval(lo, hi))?;
        let res = lib(asymptotic_radius_center(
            &line,
            &seq,
            &d,
            &AsymptoticOptions::default(),
        ))?;
        let (or, oc) = center_oracle(&tail, lo, hi, 10_001);
        ensure(
            (res.radius - or).abs() <= 1e-4 && (res.center.x() - oc).abs() <= 1e-4,
            format!(
                "D=[{lo},{hi}]: ({}, {}) vs oracle ({or}, {oc})",
                res.radius,
                res.center.x()
            ),
        )?;
        ensure(
            (res.radius - r).abs() <= 1e-4 && (res.center.x() - c).abs() <= 1e-4,
            format!("D=[{lo},{hi}]: expected r={r} c={c}"),
        )?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
    let mut draw = || {
        let u = -5.0 + 10.0 * rng.random::<f64>();
        let v = -5.0 + 10.0 * rng.random::<f64>();
        (u.min(v), u.max(v))
    };
    let n = 401;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b) = (draw(), draw());
        let exact = lib(hausdorff(
            &line,
            &lib(CompactSet::interval(a.0, a.1))?,
            &lib(CompactSet::interval(b.0, b.1))?,
        ))?;
        let formula = (a.0 - b.0).abs().max((a.1 - b.1).abs());
        let oracle = hausdorff_oracle(a, b, n);
        let spacing = (a.1 - a.0).max(b.1 - b.0) / (n - 1) as f64;
        ensure(
            (exact - formula).abs() <= 1e-12 && (exact - oracle).abs() <= spacing,
            format!("H({a:?}, {b:?}) = {exact}, oracle {oracle}"),
        )?;
        worst = worst.max((exact - oracle).abs());
    }
    Ok(format!(
        "centers match grid oracle; 100 Hausdorff pairs, worst gap {worst:.2e}"
    ))
}

fn solver(traces: &mut Vec<(String, NormedSpace, IterationTrace)>) -> Outcome {
    let line = NormedSpace::real_line();
    let d = lib(CompactSet::interval(0.0, 1.0))?;
    let opts = SolverOptions {
        seed: SEED,
        ..SolverOptions::default()
    };
    let t = lib(SingleValuedMap::new(
        line,
        d.clone(),
        MapSpec::affine(0.5, 0.0),
    ))?;
    let big_t = lib(MultiValuedMap::new(
        line,
        d.clone(),
        MapSpec::interval_scaling(0.5),
    ))?;
    let p = lib(CommonFixedPointProblem::new(t.clone(), big_t, 0.5, opts))?;
    let r = lib(solve_common(&p))?;
    let z = r.z.x();
    let res_t = (z - z / 2.0).abs();
    let res_big_t = if z < 0.0 {
        -z
    } else if z > z / 2.0 {
        z - z / 2.0
    } else {
        0.0
    };
    let max_res = res_t.max(res_big_t);
    ensure(
        max_res <= 1e-8 && z.abs() <= 1e-6 && (0.0..=1.0).contains(&z),
        format!("z={z}, residual {max_res}"),
    )?;
    ensure(r.certified && r.reverify(&p), "result not certified")?;
    for (name, run) in [("outer", &r.outer), ("inner", &r.inner)] {
        traces.push((format!("solver {name}"), line, run.trace.clone()));
    }

    let one = lib(MultiValuedMap::new(
        line,
        d.clone(),
        MapSpec::constant_set(lib(CompactSet::interval(1.0, 1.0))?),
    ))?;
    let p = lib(CommonFixedPointProblem::new(t, one, 0.5, opts))?;
    match solve_common(&p) {
        Err(Error::NotCommuting { x, y, distance }) => {
            // t(x) = x/2 against T(t(y)) = {1}
            let expected = (x[0] / 2.0 - 1.0).abs();
            ensure(
                x == vec![1.0]
                    && (distance - expected).abs() <= 1e-12
                    && d.contains(&Point::scalar(y[0]), 1e-12),
                format!("witness x={x:?} y={y:?} distance {distance}"),
            )?;
        }
        other => return Err(format!("expected a commuting abort, got {other:?}")),
    }

    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_commonfix"))
        .arg("reproduce-paper")
        .output()
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let table = String::from_utf8_lossy(&out.stdout);
    ensure(
        out.status.success() && table.lines().filter(|l| l.starts_with("[PASS]")).count() == 9,
        format!("reproduce-paper exited {:?}:\n{table}", out.status.code()),
    )?;
    ensure(
        elapsed < Duration::from_secs(30),
        format!("reproduce-paper took {elapsed:?}"),
    )?;
    Ok(format!(
        "z={z:e}, residual {max_res:e}; T=1 aborted at commuting; reproduce-paper {elapsed:.2?}"
    ))
}

fn strict_convexity() -> Outcome {
    let pt = |a: f64, b: f64| Point::new(vec![a, b]).expect("finite");
    let origin = pt(0.0, 0.0);
    let vertical = lib(CompactSet::polytope(vec![pt(1.0, -1.0), pt(1.0, 1.0)]))?;
    let diagonal = lib(CompactSet::polytope(vec![pt(1.0, 0.0), pt(0.0, 1.0)]))?;
    let flag = |p: Exponent, set: &CompactSet| -> Result<bool, String> {
        let space = lib(NormedSpace::new(2, p))?;
        Ok(lib(nearest_point(&space, &origin, set))?.possibly_non_unique)
    };
    // under the sup norm every (1, s) with |s| ≤ 1 is at distance 1
    ensure(flag(Exponent::Infinity, &vertical)?, "p=inf not flagged")?;
    // under ℓ1 every point of the diagonal segment is at distance 1
    ensure(flag(Exponent::Finite(1.0), &diagonal)?, "p=1 not flagged")?;
    ensure(
        !flag(Exponent::Finite(2.0), &vertical)? && !flag(Exponent::Finite(2.0), &diagonal)?,
        "p=2 flagged",
    )?;
    Ok("p=1 and p=inf flagged, p=2 not".into())
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".to_string()));
    match outcome {
        Ok(detail) => {
            println!("PASS  {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL  {name}: {detail}");
            false
        }
    }
}

fn main() {
    let mut traces = Vec::new();
    let results = [
        run("1 suzuki", suzuki),
        run("2 garcia", || garcia(&mut traces)),
        run("3 multivalued", || multivalued(&mut traces)),
        run("4 monotonicity", monotonicity),
        run("5 nonexpansive_implies_e1", contractions),
        run("7 asymptotic_and_hausdorff", asymptotic_and_hausdorff),
        run("8 solver", || solver(&mut traces)),
        run("9 strict_convexity", strict_convexity),
    ];
    let gk = run("6 goebel_kirk", || goebel_kirk(&traces));
    let failed = results.iter().filter(|ok| !**ok).count() + usize::from(!gk);
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
