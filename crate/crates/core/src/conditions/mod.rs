//! Sampled checks of generalized nonexpansiveness conditions.
//!
//! Every condition is a per-pair inequality over `D × D`; here it is checked
//! on a [`PairSample`]. Premises are compared with exact `≤`; a consequent is
//! violated only when `lhs > rhs + 1e-12`. Both flavors share one code path:
//! for a multivalued map `‖x − Tx‖` reads `dist(x, Tx)`, `‖Tx − Ty‖` reads
//! `H(Tx, Ty)`, and `‖x − Ty‖` reads `dist(x, Ty)`.
//!
//! | condition      | premise                 | lhs          | rhs                     |
//! |----------------|-------------------------|--------------|-------------------------|
//! | `C_λ`          | `λ‖x − Tx‖ ≤ ‖x − y‖`   | `‖Tx − Ty‖`  | `‖x − y‖`               |
//! | `C` = `C_1/2`  | `½‖x − Tx‖ ≤ ‖x − y‖`   | `‖Tx − Ty‖`  | `‖x − y‖`               |
//! | `E_μ`          | always                  | `‖x − Ty‖`   | `μ‖x − Tx‖ + ‖x − y‖`   |
//! | nonexpansive   | always                  | `‖Tx − Ty‖`  | `‖x − y‖`               |

pub(crate) mod sample;

use rayon::prelude::*;
use serde::Serialize;

pub use sample::{PairSample, SampleConfig, SampleDescription};

use crate::error::{Error, Result};
use crate::maps::{check_open_unit, Image, SelfMap, Valuedness};
use crate::spaces::{NormedSpace, Point};

/// Slack a consequent must exceed before a pair counts as a violation.
pub const VIOLATION_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConditionId {
    C,
    #[serde(rename = "C_lambda")]
    CLambda,
    #[serde(rename = "E_mu")]
    EMu,
    #[serde(rename = "nonexpansive")]
    Nonexpansive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    /// Condition (C_λ); condition (C) is `CLambda(0.5)`.
    CLambda(f64),
    EMu(f64),
    Nonexpansive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairOutcome {
    pub premise: bool,
    pub lhs: f64,
    pub rhs: f64,
}

impl PairOutcome {
    pub fn violated(&self) -> bool {
        self.premise && self.lhs > self.rhs + VIOLATION_MARGIN
    }
}

impl Condition {
    pub fn is_conditional(&self) -> bool {
        matches!(self, Condition::CLambda(_))
    }

    /// Evaluates one pair from scratch.
    pub fn evaluate_pair<M: SelfMap + ?Sized>(&self, map: &M, x: &Point, y: &Point) -> PairOutcome {
        let (tx, ty) = (map.image(x), map.image(y));
        let res_x = tx.distance_from(map.space(), x);
        self.outcome(map.space(), x, y, &tx, &ty, res_x)
    }

    fn outcome(
        &self,
        space: &NormedSpace,
        x: &Point,
        y: &Point,
        tx: &Image,
        ty: &Image,
        res_x: f64,
    ) -> PairOutcome {
        let dxy = space.dist_unchecked(x, y);
        match *self {
            Condition::CLambda(lambda) => {
                let premise = lambda * res_x <= dxy;
                let lhs = if premise { tx.gap(space, ty) } else { f64::NAN };
                PairOutcome {
                    premise,
                    lhs,
                    rhs: dxy,
                }
            }
            Condition::EMu(mu) => PairOutcome {
                premise: true,
                lhs: ty.distance_from(space, x),
                rhs: mu * res_x + dxy,
            },
            Condition::Nonexpansive => PairOutcome {
                premise: true,
                lhs: tx.gap(space, ty),
                rhs: dxy,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub x: Point,
    pub y: Point,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    pub fn margin(&self) -> f64 {
        self.lhs - self.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition: ConditionId,
    pub flavor: Valuedness,
    /// λ for (C)/(C_λ), μ for (E_μ).
    pub parameter: Option<f64>,
    pub sample: SampleDescription,
    pub pairs_checked: usize,
    /// Pairs whose premise held (equals `pairs_checked` for unconditional checks).
    pub premise_held: usize,
    pub satisfied: bool,
    /// The sample carried no information for this check: it was empty, or,
    /// for a conditional check, every sampled `x` was a fixed point so the
    /// λ-premise never discriminated.
    pub vacuous: bool,
    /// Sorted lexicographically by `(x, y)`.
    pub violations: Vec<Witness>,
}

impl ConditionReport {
    pub fn condition(&self) -> Condition {
        match self.condition {
            ConditionId::C | ConditionId::CLambda => {
                Condition::CLambda(self.parameter.expect("parameterised"))
            }
            ConditionId::EMu => Condition::EMu(self.parameter.expect("parameterised")),
            ConditionId::Nonexpansive => Condition::Nonexpansive,
        }
    }

    /// The violation with the largest `lhs − rhs`.
    pub fn worst_violation(&self) -> Option<&Witness> {
        self.violations
            .iter()
            .max_by(|a, b| a.margin().total_cmp(&b.margin()))
    }

    /// Re-evaluates every witness against the map; true when each one still
    /// violates and reproduces its recorded values to `tol`.
    pub fn reproduce<M: SelfMap + ?Sized>(&self, map: &M, tol: f64) -> bool {
        let cond = self.condition();
        self.violations.iter().all(|w| {
            let o = cond.evaluate_pair(map, &w.x, &w.y);
            o.violated() && (o.lhs - w.lhs).abs() <= tol && (o.rhs - w.rhs).abs() <= tol
        })
    }
}

fn run_check<M: SelfMap + ?Sized>(
    map: &M,
    condition: Condition,
    id: ConditionId,
    parameter: Option<f64>,
    sample: &PairSample,
) -> ConditionReport {
    let space = map.space();
    let images: Vec<Image> = sample.points.par_iter().map(|p| map.image(p)).collect();
    let residuals: Vec<f64> = sample
        .points
        .par_iter()
        .zip(&images)
        .map(|(p, img)| img.distance_from(space, p))
        .collect();

    let outcomes: Vec<PairOutcome> = sample
        .pairs
        .par_iter()
        .map(|&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            condition.outcome(
                space,
                &sample.points[i],
                &sample.points[j],
                &images[i],
                &images[j],
                residuals[i],
            )
        })
        .collect();

    let premise_held = outcomes.iter().filter(|o| o.premise).count();
    let mut violations: Vec<Witness> = sample
        .pairs
        .iter()
        .zip(&outcomes)
        .filter(|(_, o)| o.violated())
        .map(|(&(i, j), o)| Witness {
            x: sample.points[i as usize].clone(),
            y: sample.points[j as usize].clone(),
            lhs: o.lhs,
            rhs: o.rhs,
        })
        .collect();
    violations.sort_by(|a, b| a.x.lex_cmp(&b.x).then_with(|| a.y.lex_cmp(&b.y)));

    let all_fixed = sample
        .pairs
        .iter()
        .all(|&(i, _)| residuals[i as usize] == 0.0);
    let vacuous = sample.is_empty() || (condition.is_conditional() && all_fixed);

    ConditionReport {
        condition: id,
        flavor: map.valuedness(),
        parameter,
        sample: sample.description.clone(),
        pairs_checked: sample.len(),
        premise_held,
        satisfied: violations.is_empty(),
        vacuous,
        violations,
    }
}

/// Condition (C): the λ = 1/2 case of (C_λ).
pub fn check_c<M: SelfMap + ?Sized>(map: &M, sample: &PairSample) -> ConditionReport {
    run_check(
        map,
        Condition::CLambda(0.5),
        ConditionId::C,
        Some(0.5),
        sample,
    )
}

pub fn check_clambda<M: SelfMap + ?Sized>(
    map: &M,
    lambda: f64,
    sample: &PairSample,
) -> Result<ConditionReport> {
    check_open_unit("lambda", lambda)?;
    Ok(run_check(
        map,
        Condition::CLambda(lambda),
        ConditionId::CLambda,
        Some(lambda),
        sample,
    ))
}

pub fn check_e<M: SelfMap + ?Sized>(
    map: &M,
    mu: f64,
    sample: &PairSample,
) -> Result<ConditionReport> {
    if !(mu >= 1.0 && mu.is_finite()) {
        return Err(Error::ParameterOutOfRange {
            name: "mu",
            value: mu,
            expected: ">= 1",
        });
    }
    Ok(run_check(
        map,
        Condition::EMu(mu),
        ConditionId::EMu,
        Some(mu),
        sample,
    ))
}

pub fn check_nonexpansive<M: SelfMap + ?Sized>(map: &M, sample: &PairSample) -> ConditionReport {
    run_check(
        map,
        Condition::Nonexpansive,
        ConditionId::Nonexpansive,
        None,
        sample,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MuEstimate {
    /// Sample supremum of the (E_μ) ratio, floored at 1. A lower estimate of
    /// the least admissible μ.
    pub mu: f64,
    pub is_lower_estimate: bool,
    /// The pair attaining the supremum, if any pair had `‖x − Tx‖ > 0`.
    pub witness: Option<Witness>,
    pub sample: SampleDescription,
}

/// `sup (‖x − Ty‖ − ‖x − y‖) / ‖x − Tx‖` over sampled pairs with `‖x − Tx‖ > 0`.
pub fn minimal_mu<M: SelfMap + ?Sized>(map: &M, sample: &PairSample) -> MuEstimate {
    let space = map.space();
    let images: Vec<Image> = sample.points.par_iter().map(|p| map.image(p)).collect();
    let residuals: Vec<f64> = sample
        .points
        .par_iter()
        .zip(&images)
        .map(|(p, img)| img.distance_from(space, p))
        .collect();
    let ratios: Vec<Option<(f64, f64, f64)>> = sample
        .pairs
        .par_iter()
        .map(|&(i, j)| {
            let (i, j) = (i as usize, j as usize);
            if residuals[i] > 0.0 {
                let (x, y) = (&sample.points[i], &sample.points[j]);
                let lhs = images[j].distance_from(space, x);
                let dxy = space.dist_unchecked(x, y);
                Some(((lhs - dxy) / residuals[i], lhs, residuals[i]))
            } else {
                None
            }
        })
        .collect();

    let mut best: Option<(usize, f64, f64, f64)> = None;
    for (k, r) in ratios.iter().enumerate() {
        if let Some((ratio, lhs, res)) = r {
            if best.is_none_or(|b| *ratio > b.1) {
                best = Some((k, *ratio, *lhs, *res));
            }
        }
    }
    let witness = best.map(|(k, _, lhs, _)| {
        let (i, j) = sample.pairs[k];
        let (x, y) = (&sample.points[i as usize], &sample.points[j as usize]);
        Witness {
            x: x.clone(),
            y: y.clone(),
            lhs,
            rhs: space.dist_unchecked(x, y),
        }
    });
    MuEstimate {
        mu: best.map_or(1.0, |b| b.1.max(1.0)),
        is_lower_estimate: true,
        witness,
        sample: sample.description.clone(),
    }
}

/// `(C_λ1 holds) ⟹ (C_λ2 holds)` on one shared sample, for `0 < λ1 < λ2 < 1`.
pub fn monotonicity_probe<M: SelfMap + ?Sized>(
    map: &M,
    lambda1: f64,
    lambda2: f64,
    sample: &PairSample,
) -> Result<bool> {
    check_open_unit("lambda1", lambda1)?;
    check_open_unit("lambda2", lambda2)?;
    if lambda1 >= lambda2 {
        return Err(Error::ParameterOutOfRange {
            name: "lambda1",
            value: lambda1,
            expected: "< lambda2",
        });
    }
    let first = check_clambda(map, lambda1, sample)?;
    if !first.satisfied {
        return Ok(true);
    }
    Ok(check_clambda(map, lambda2, sample)?.satisfied)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{
        garcia_example, multivalued_example, suzuki_example, MapSpec, SingleValuedMap,
    };
    use crate::spaces::CompactSet;

    fn default_sample<M: SelfMap>(m: &M) -> PairSample {
        PairSample::for_map(m, &SampleConfig::default())
    }

    fn identity_on_unit() -> SingleValuedMap {
        SingleValuedMap::new(
            NormedSpace::real_line(),
            CompactSet::interval(0.0, 1.0).unwrap(),
            MapSpec::identity(),
        )
        .unwrap()
    }

    #[test]
    fn suzuki_satisfies_c_but_is_not_nonexpansive() {
        let t = suzuki_example();
        let s = default_sample(&t);
        let c = check_c(&t, &s);
        assert!(c.satisfied && c.violations.is_empty());
        let ne = check_nonexpansive(&t, &s);
        assert!(!ne.satisfied);
        assert!(ne.reproduce(&t, 1e-12));
        let o = Condition::Nonexpansive.evaluate_pair(&t, &Point::scalar(3.0), &Point::scalar(2.9));
        assert!(o.violated());
        assert_eq!(o.lhs, 1.0);
    }

    #[test]
    fn identity_satisfies_everything() {
        let t = identity_on_unit();
        let s = default_sample(&t);
        assert!(check_c(&t, &s).satisfied);
        assert!(check_nonexpansive(&t, &s).satisfied);
        assert!(check_e(&t, 1.0, &s).unwrap().satisfied);
        assert_eq!(minimal_mu(&t, &s).mu, 1.0);
    }

    #[test]
    fn garcia_lambda_checks() {
        let t = garcia_example(0.5).unwrap();
        let s = default_sample(&t);
        assert!(check_c(&t, &s).satisfied);
        assert!(check_clambda(&t, 0.5, &s).unwrap().satisfied);
        let r = check_clambda(&t, 0.25, &s).unwrap();
        assert!(!r.satisfied);
        // violations at x = 1 fill y ∈ (0.8, 0.9]; y = 0.9 is the premise
        // boundary and 1 - 0.9 rounds below 0.1, so probe the interior
        let o =
            Condition::CLambda(0.25).evaluate_pair(&t, &Point::scalar(1.0), &Point::scalar(0.85));
        assert!(o.premise && o.violated());
        assert!((o.lhs - 0.175).abs() < 1e-12);
        assert!((o.rhs - 0.15).abs() < 1e-12);
        assert!(r
            .violations
            .iter()
            .any(|w| w.x.x() == 1.0 && w.y.x() > 0.8 && w.y.x() <= 0.9));
    }

    #[test]
    fn garcia_e_mu() {
        let t = garcia_example(0.5).unwrap();
        let s = default_sample(&t);
        assert!(check_e(&t, 1.25, &s).unwrap().satisfied);
        assert!(!check_e(&t, 1.0, &s).unwrap().satisfied);
        let o = Condition::EMu(1.0).evaluate_pair(&t, &Point::scalar(1.0), &Point::scalar(0.999));
        assert!(o.violated());
        let est = minimal_mu(&t, &s);
        assert!((est.mu - 1.25).abs() <= 0.01, "{}", est.mu);
        let est = minimal_mu(&garcia_example(0.8).unwrap(), &s);
        assert!((est.mu - 1.4).abs() <= 0.01, "{}", est.mu);
    }

    #[test]
    fn multivalued_example_checks() {
        let t = multivalued_example();
        let s = default_sample(&t);
        assert!(check_clambda(&t, 0.5, &s).unwrap().satisfied);
        let ne = check_nonexpansive(&t, &s);
        assert!(!ne.satisfied);
        let o = Condition::Nonexpansive.evaluate_pair(&t, &Point::scalar(5.0), &Point::scalar(4.9));
        assert!(o.violated());
        assert_eq!(o.lhs, 1.0);
        assert!(monotonicity_probe(&t, 0.5, 0.75, &s).unwrap());
    }

    #[test]
    fn parameter_ranges() {
        let t = identity_on_unit();
        let s = PairSample::all_pairs(vec![Point::scalar(0.5)]);
        assert!(check_clambda(&t, 1.0, &s).is_err());
        assert!(check_e(&t, 0.9, &s).is_err());
        assert!(monotonicity_probe(&t, 0.6, 0.4, &s).is_err());
    }

    #[test]
    fn fixed_point_sample_is_vacuous() {
        let t = garcia_example(0.5).unwrap();
        let s = PairSample::all_pairs(vec![Point::scalar(0.0)]);
        let r = check_clambda(&t, 0.3, &s).unwrap();
        assert!(r.satisfied && r.vacuous);
        let empty = PairSample::all_pairs(vec![]);
        let r = check_c(&t, &empty);
        assert!(r.satisfied && r.vacuous);
    }

    #[test]
    fn violations_are_sorted() {
        let t = suzuki_example();
        let r = check_nonexpansive(&t, &default_sample(&t));
        for w in r.violations.windows(2) {
            let ord = w[0]
                .x
                .lex_cmp(&w[1].x)
                .then_with(|| w[0].y.lex_cmp(&w[1].y));
            assert!(ord.is_le());
        }
    }
}
