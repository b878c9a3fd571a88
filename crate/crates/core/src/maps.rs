//! Single- and multivalued self-maps described by closed-form tagged rules.
//!
//! A [`MapSpec`] is a base rule plus an optional exceptional point where the
//! rule is overridden. Exception matching is exact coordinate equality: the
//! classic examples are defined pointwise and are discontinuous precisely at
//! that point.
//!
//! JSON forms:
//!
//! ```text
//! {"affine": {"scale": s, "offset": b}}          x ↦ s·x + b
//! {"catalog": "suzuki"}                          on [0,3]: 0, except T(3) = 1
//! {"catalog": "garcia", "lambda": l}             on [0,1]: x/2, except T(1) = (1+l)/(2+l)
//! {"catalog": "mv5"}                             on [0,5]: [0, x/5], except T(5) = {1}
//! {"interval_scaling": {"c": c}}                 x ↦ conv{0, c·x}
//! {"constant_set": <set literal>}                x ↦ S
//! ... , "exception": {"at": x0, "value": v}      override at exactly x0
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::{distance_point_set, hausdorff, CompactSet, NormedSpace, Point, SET_TOL};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Offset {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Default for Offset {
    fn default() -> Self {
        Offset::Scalar(0.0)
    }
}

impl Offset {
    fn at(&self, k: usize) -> f64 {
        match self {
            Offset::Scalar(b) => *b,
            Offset::Vector(v) => v[k],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Catalog {
    Suzuki,
    Garcia { lambda: f64 },
    Mv5,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Affine { scale: f64, offset: Offset },
    Catalog(Catalog),
    IntervalScaling { c: f64 },
    ConstantSet(CompactSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExceptionValue {
    Point(Point),
    Set(CompactSet),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exception {
    pub at: Point,
    pub value: ExceptionValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuedness {
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMapSpec", into = "RawMapSpec")]
pub struct MapSpec {
    pub rule: Rule,
    pub exception: Option<Exception>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAffine {
    scale: f64,
    #[serde(default)]
    offset: Offset,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScaling {
    c: f64,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    affine: Option<RawAffine>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    catalog: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    interval_scaling: Option<RawScaling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constant_set: Option<CompactSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exception: Option<Exception>,
}

impl TryFrom<RawMapSpec> for MapSpec {
    type Error = Error;

    fn try_from(raw: RawMapSpec) -> Result<Self> {
        let given = [
            raw.affine.is_some(),
            raw.catalog.is_some(),
            raw.interval_scaling.is_some(),
            raw.constant_set.is_some(),
        ]
        .iter()
        .filter(|b| **b)
        .count();
        if given != 1 {
            return Err(Error::InvalidMap(
                "expected exactly one of `affine`, `catalog`, `interval_scaling`, `constant_set`"
                    .into(),
            ));
        }
        if raw.lambda.is_some() && raw.catalog.as_deref() != Some("garcia") {
            return Err(Error::InvalidMap(
                "`lambda` is only valid with catalog \"garcia\"".into(),
            ));
        }
        let rule = if let Some(a) = raw.affine {
            Rule::Affine {
                scale: a.scale,
                offset: a.offset,
            }
        } else if let Some(name) = raw.catalog {
            Rule::Catalog(match name.as_str() {
                "suzuki" => Catalog::Suzuki,
                "mv5" => Catalog::Mv5,
                "garcia" => {
                    let lambda = raw.lambda.ok_or_else(|| {
                        Error::InvalidMap("catalog \"garcia\" requires `lambda`".into())
                    })?;
                    check_open_unit("lambda", lambda)?;
                    Catalog::Garcia { lambda }
                }
                other => return Err(Error::InvalidMap(format!("unknown catalog map {other:?}"))),
            })
        } else if let Some(s) = raw.interval_scaling {
            Rule::IntervalScaling { c: s.c }
        } else {
            Rule::ConstantSet(raw.constant_set.expect("counted above"))
        };
        Ok(MapSpec {
            rule,
            exception: raw.exception,
        })
    }
}

impl From<MapSpec> for RawMapSpec {
    fn from(spec: MapSpec) -> Self {
        let mut raw = RawMapSpec {
            exception: spec.exception,
            ..RawMapSpec::default()
        };
        match spec.rule {
            Rule::Affine { scale, offset } => raw.affine = Some(RawAffine { scale, offset }),
            Rule::Catalog(Catalog::Suzuki) => raw.catalog = Some("suzuki".into()),
            Rule::Catalog(Catalog::Mv5) => raw.catalog = Some("mv5".into()),
            Rule::Catalog(Catalog::Garcia { lambda }) => {
                raw.catalog = Some("garcia".into());
                raw.lambda = Some(lambda);
            }
            Rule::IntervalScaling { c } => raw.interval_scaling = Some(RawScaling { c }),
            Rule::ConstantSet(s) => raw.constant_set = Some(s),
        }
        raw
    }
}

pub(crate) fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange {
            name,
            value,
            expected: "in (0, 1)",
        })
    }
}

/// The value of a map at a point: a point for single-valued maps, a set otherwise.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Image {
    Point(Point),
    Set(CompactSet),
}

impl Image {
    /// `‖x − Tx‖`, or `dist(x, Tx)` for a set value.
    pub fn distance_from(&self, space: &NormedSpace, x: &Point) -> f64 {
        match self {
            Image::Point(p) => space.dist_unchecked(x, p),
            Image::Set(s) => distance_point_set(space, x, s).expect("validated dimensions"),
        }
    }

    /// `‖Tx − Ty‖`, or `H(Tx, Ty)` for set values.
    pub fn gap(&self, space: &NormedSpace, other: &Image) -> f64 {
        match (self, other) {
            (Image::Point(a), Image::Point(b)) => space.dist_unchecked(a, b),
            (a, b) => hausdorff(space, &a.clone().into_set(), &b.clone().into_set())
                .expect("map values were validated as Hausdorff-comparable"),
        }
    }

    pub fn into_set(self) -> CompactSet {
        match self {
            Image::Point(p) => CompactSet::singleton(p),
            Image::Set(s) => s,
        }
    }

    pub fn as_point(&self) -> Option<&Point> {
        match self {
            Image::Point(p) => Some(p),
            Image::Set(_) => None,
        }
    }
}

impl MapSpec {
    pub fn affine(scale: f64, offset: f64) -> Self {
        MapSpec {
            rule: Rule::Affine {
                scale,
                offset: Offset::Scalar(offset),
            },
            exception: None,
        }
    }

    pub fn identity() -> Self {
        Self::affine(1.0, 0.0)
    }

    pub fn interval_scaling(c: f64) -> Self {
        MapSpec {
            rule: Rule::IntervalScaling { c },
            exception: None,
        }
    }

    pub fn constant_set(set: CompactSet) -> Self {
        MapSpec {
            rule: Rule::ConstantSet(set),
            exception: None,
        }
    }

    pub fn catalog(c: Catalog) -> Self {
        MapSpec {
            rule: Rule::Catalog(c),
            exception: None,
        }
    }

    pub fn with_exception(mut self, at: Point, value: ExceptionValue) -> Self {
        self.exception = Some(Exception { at, value });
        self
    }

    pub fn valuedness(&self) -> Valuedness {
        match &self.rule {
            Rule::Affine { .. } | Rule::Catalog(Catalog::Suzuki | Catalog::Garcia { .. }) => {
                Valuedness::Single
            }
            Rule::Catalog(Catalog::Mv5) | Rule::IntervalScaling { .. } | Rule::ConstantSet(_) => {
                Valuedness::Multi
            }
        }
    }

    /// The domain a catalog map is defined on.
    pub fn default_domain(&self) -> Option<CompactSet> {
        let hi = match self.rule {
            Rule::Catalog(Catalog::Suzuki) => 3.0,
            Rule::Catalog(Catalog::Garcia { .. }) => 1.0,
            Rule::Catalog(Catalog::Mv5) => 5.0,
            _ => return None,
        };
        Some(CompactSet::Interval { lo: 0.0, hi })
    }

    fn expanded(c: Catalog) -> MapSpec {
        match c {
            Catalog::Suzuki => MapSpec::affine(0.0, 0.0).with_exception(
                Point::scalar(3.0),
                ExceptionValue::Point(Point::scalar(1.0)),
            ),
            Catalog::Garcia { lambda } => MapSpec::affine(0.5, 0.0).with_exception(
                Point::scalar(1.0),
                ExceptionValue::Point(Point::scalar((1.0 + lambda) / (2.0 + lambda))),
            ),
            Catalog::Mv5 => MapSpec::interval_scaling(0.2).with_exception(
                Point::scalar(5.0),
                ExceptionValue::Set(CompactSet::Interval { lo: 1.0, hi: 1.0 }),
            ),
        }
    }

    /// Every point where the rule is overridden, the catalog's own included.
    pub fn exception_points(&self) -> Vec<Point> {
        let mut out: Vec<Point> = self.exception.iter().map(|e| e.at.clone()).collect();
        if let Rule::Catalog(c) = self.rule {
            out.extend(Self::expanded(c).exception_points());
        }
        out
    }

    /// Applies the rule without any domain check.
    pub fn apply(&self, x: &Point) -> Image {
        if let Some(e) = &self.exception {
            if e.at == *x {
                return match (&e.value, self.valuedness()) {
                    (ExceptionValue::Point(p), Valuedness::Single) => Image::Point(p.clone()),
                    (ExceptionValue::Point(p), Valuedness::Multi) => {
                        Image::Set(CompactSet::singleton(p.clone()))
                    }
                    (ExceptionValue::Set(s), _) => Image::Set(s.clone()),
                };
            }
        }
        match &self.rule {
            Rule::Affine { scale, offset } => Image::Point(Point::from_vec_unchecked(
                x.coords()
                    .iter()
                    .enumerate()
                    .map(|(k, xi)| scale * xi + offset.at(k))
                    .collect(),
            )),
            Rule::Catalog(c) => Self::expanded(*c).apply(x),
            Rule::IntervalScaling { c } => {
                let end = x.scaled(*c);
                Image::Set(if x.dim() == 1 {
                    CompactSet::Interval {
                        lo: end.x().min(0.0),
                        hi: end.x().max(0.0),
                    }
                } else {
                    CompactSet::Polytope {
                        vertices: vec![Point::zeros(x.dim()), end],
                    }
                })
            }
            Rule::ConstantSet(s) => Image::Set(s.clone()),
        }
    }

    fn validate(&self, space: &NormedSpace) -> Result<()> {
        let dim = space.dimension;
        let bad_dim = |actual: usize| Error::DimensionMismatch {
            expected: dim,
            actual,
        };
        match &self.rule {
            Rule::Affine {
                offset: Offset::Vector(v),
                ..
            } if v.len() != dim => return Err(bad_dim(v.len())),
            Rule::Catalog(_) if dim != 1 => return Err(bad_dim(dim)),
            Rule::ConstantSet(s) => {
                if s.dim() != dim {
                    return Err(bad_dim(s.dim()));
                }
                if dim > 1 && !s.is_convex() {
                    return Err(Error::InvalidMap(
                        "finite point-set values are only supported on the line".into(),
                    ));
                }
            }
            _ => {}
        }
        if let Some(e) = &self.exception {
            if e.at.dim() != dim {
                return Err(bad_dim(e.at.dim()));
            }
            match (&e.value, self.valuedness()) {
                (ExceptionValue::Point(p), _) if p.dim() != dim => return Err(bad_dim(p.dim())),
                (ExceptionValue::Set(_), Valuedness::Single) => {
                    return Err(Error::InvalidMap(
                        "a single-valued rule needs a point as exception value".into(),
                    ))
                }
                (ExceptionValue::Set(s), Valuedness::Multi) => {
                    if s.dim() != dim {
                        return Err(bad_dim(s.dim()));
                    }
                    if dim > 1 && !s.is_convex() {
                        return Err(Error::InvalidMap(
                            "finite point-set values are only supported on the line".into(),
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Common surface of single- and multivalued self-maps on a convex domain.
pub trait SelfMap: Sync {
    fn space(&self) -> &NormedSpace;
    fn domain(&self) -> &CompactSet;
    fn spec(&self) -> &MapSpec;

    fn valuedness(&self) -> Valuedness {
        self.spec().valuedness()
    }

    /// Rule application with no domain check.
    fn image(&self, x: &Point) -> Image {
        self.spec().apply(x)
    }

    fn exception_points(&self) -> Vec<Point> {
        self.spec().exception_points()
    }

    /// Rule application for `x` in the domain (within 1e-9).
    fn evaluate(&self, x: &Point) -> Result<Image> {
        self.space().check(x)?;
        if !self.domain().contains(x, SET_TOL) {
            return Err(Error::OutOfDomain {
                point: x.coords().to_vec(),
            });
        }
        Ok(self.image(x))
    }

    /// `‖x − Tx‖` or `dist(x, Tx)`.
    fn residual(&self, x: &Point) -> f64 {
        self.image(x).distance_from(self.space(), x)
    }
}

fn check_domain(space: &NormedSpace, domain: &CompactSet) -> Result<()> {
    if domain.dim() != space.dimension {
        return Err(Error::DimensionMismatch {
            expected: space.dimension,
            actual: domain.dim(),
        });
    }
    if !domain.is_convex() {
        return Err(Error::NonConvexSet);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingleValuedMap {
    space: NormedSpace,
    domain: CompactSet,
    spec: MapSpec,
}

impl SingleValuedMap {
    pub fn new(space: NormedSpace, domain: CompactSet, spec: MapSpec) -> Result<Self> {
        check_domain(&space, &domain)?;
        if spec.valuedness() != Valuedness::Single {
            return Err(Error::InvalidMap("rule is set-valued".into()));
        }
        spec.validate(&space)?;
        Ok(Self {
            space,
            domain,
            spec,
        })
    }

    /// `t(x)` without a domain check.
    pub fn apply(&self, x: &Point) -> Point {
        match self.spec.apply(x) {
            Image::Point(p) => p,
            Image::Set(_) => unreachable!("validated single-valued"),
        }
    }

    pub fn evaluate_point(&self, x: &Point) -> Result<Point> {
        self.evaluate(x).map(|img| match img {
            Image::Point(p) => p,
            Image::Set(_) => unreachable!("validated single-valued"),
        })
    }
}

impl SelfMap for SingleValuedMap {
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn domain(&self) -> &CompactSet {
        &self.domain
    }
    fn spec(&self) -> &MapSpec {
        &self.spec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiValuedMap {
    space: NormedSpace,
    domain: CompactSet,
    spec: MapSpec,
}

impl MultiValuedMap {
    pub fn new(space: NormedSpace, domain: CompactSet, spec: MapSpec) -> Result<Self> {
        check_domain(&space, &domain)?;
        if spec.valuedness() != Valuedness::Multi {
            return Err(Error::InvalidMap("rule is single-valued".into()));
        }
        spec.validate(&space)?;
        Ok(Self {
            space,
            domain,
            spec,
        })
    }

    /// `T(x)` without a domain check.
    pub fn apply(&self, x: &Point) -> CompactSet {
        self.spec.apply(x).into_set()
    }

    pub fn evaluate_set(&self, x: &Point) -> Result<CompactSet> {
        self.evaluate(x).map(Image::into_set)
    }

    /// Whether every value the rule can produce is convex.
    pub fn is_kc_valued(&self) -> bool {
        let base = match &self.spec.rule {
            Rule::ConstantSet(s) => s.is_convex(),
            _ => true,
        };
        let exc = match &self.spec.exception {
            Some(Exception {
                value: ExceptionValue::Set(s),
                ..
            }) => s.is_convex(),
            _ => true,
        };
        base && exc
    }
}

impl SelfMap for MultiValuedMap {
    fn space(&self) -> &NormedSpace {
        &self.space
    }
    fn domain(&self) -> &CompactSet {
        &self.domain
    }
    fn spec(&self) -> &MapSpec {
        &self.spec
    }
}

/// Either flavor, chosen from the rule's valuedness.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMap {
    Single(SingleValuedMap),
    Multi(MultiValuedMap),
}

impl AnyMap {
    pub fn new(space: NormedSpace, domain: CompactSet, spec: MapSpec) -> Result<Self> {
        Ok(match spec.valuedness() {
            Valuedness::Single => AnyMap::Single(SingleValuedMap::new(space, domain, spec)?),
            Valuedness::Multi => AnyMap::Multi(MultiValuedMap::new(space, domain, spec)?),
        })
    }

    fn inner(&self) -> &dyn SelfMap {
        match self {
            AnyMap::Single(m) => m,
            AnyMap::Multi(m) => m,
        }
    }
}

impl SelfMap for AnyMap {
    fn space(&self) -> &NormedSpace {
        self.inner().space()
    }
    fn domain(&self) -> &CompactSet {
        self.inner().domain()
    }
    fn spec(&self) -> &MapSpec {
        self.inner().spec()
    }
}

/// Suzuki's map on `[0, 3]`: `0` everywhere except `T(3) = 1`.
pub fn suzuki_example() -> SingleValuedMap {
    let spec = MapSpec::catalog(Catalog::Suzuki);
    let domain = spec.default_domain().expect("catalog map");
    SingleValuedMap::new(NormedSpace::real_line(), domain, spec).expect("catalog map is valid")
}

/// `x/2` on `[0, 1]` except `T(1) = (1+λ)/(2+λ)`, for `λ ∈ (0, 1)`.
pub fn garcia_example(lambda: f64) -> Result<SingleValuedMap> {
    check_open_unit("lambda", lambda)?;
    let spec = MapSpec::catalog(Catalog::Garcia { lambda });
    let domain = spec.default_domain().expect("catalog map");
    SingleValuedMap::new(NormedSpace::real_line(), domain, spec)
}

/// `[0, x/5]` on `[0, 5]` except `T(5) = {1}`.
pub fn multivalued_example() -> MultiValuedMap {
    let spec = MapSpec::catalog(Catalog::Mv5);
    let domain = spec.default_domain().expect("catalog map");
    MultiValuedMap::new(NormedSpace::real_line(), domain, spec).expect("catalog map is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(m: &SingleValuedMap, x: f64) -> f64 {
        m.evaluate_point(&Point::scalar(x)).unwrap().x()
    }

    fn set_at(m: &MultiValuedMap, x: f64) -> CompactSet {
        m.evaluate_set(&Point::scalar(x)).unwrap()
    }

    #[test]
    fn suzuki_values() {
        let t = suzuki_example();
        assert_eq!(at(&t, 0.0), 0.0);
        assert_eq!(at(&t, 3.0), 1.0);
        assert_eq!(at(&t, 2.9), 0.0);
        assert_eq!(at(&t, 1.7), 0.0);
    }

    #[test]
    fn garcia_values() {
        let t = garcia_example(0.5).unwrap();
        assert_eq!(at(&t, 0.6), 0.3);
        assert!((at(&t, 1.0) - 0.6).abs() < 1e-15);
        assert_eq!(at(&t, 0.0), 0.0);
        assert!(garcia_example(1.0).is_err());
        assert!(garcia_example(0.0).is_err());
    }

    #[test]
    fn multivalued_values() {
        let t = multivalued_example();
        assert_eq!(set_at(&t, 2.0), CompactSet::Interval { lo: 0.0, hi: 0.4 });
        assert_eq!(set_at(&t, 5.0), CompactSet::Interval { lo: 1.0, hi: 1.0 });
        assert_eq!(set_at(&t, 0.0), CompactSet::Interval { lo: 0.0, hi: 0.0 });
    }

    #[test]
    fn generic_rules() {
        let line = NormedSpace::real_line();
        let unit = CompactSet::interval(0.0, 1.0).unwrap();
        let half = SingleValuedMap::new(line, unit.clone(), MapSpec::affine(0.5, 0.0)).unwrap();
        assert_eq!(at(&half, 0.8), 0.4);
        let scaling = MultiValuedMap::new(line, unit, MapSpec::interval_scaling(0.5)).unwrap();
        assert_eq!(
            set_at(&scaling, 1.0),
            CompactSet::Interval { lo: 0.0, hi: 0.5 }
        );
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let t = suzuki_example();
        assert!(matches!(
            t.evaluate(&Point::scalar(3.5)),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn exception_matching_is_exact() {
        let t = suzuki_example();
        assert_eq!(at(&t, 3.0 - 1e-15), 0.0);
    }

    #[test]
    fn json_forms_round_trip() {
        for text in [
            r#"{"affine":{"scale":0.5,"offset":0.0}}"#,
            r#"{"catalog":"suzuki"}"#,
            r#"{"catalog":"garcia","lambda":0.3}"#,
            r#"{"catalog":"mv5"}"#,
            r#"{"interval_scaling":{"c":0.5}}"#,
            r#"{"constant_set":{"interval":[1.0,1.0]}}"#,
            r#"{"affine":{"scale":0.0,"offset":0.0},"exception":{"at":[3.0],"value":[1.0]}}"#,
        ] {
            let spec: MapSpec = serde_json::from_str(text).unwrap();
            let back: serde_json::Value = serde_json::to_value(&spec).unwrap();
            let again: MapSpec = serde_json::from_value(back).unwrap();
            assert_eq!(spec, again, "{text}");
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        for text in [
            r#"{}"#,
            r#"{"catalog":"garcia"}"#,
            r#"{"catalog":"garcia","lambda":1.5}"#,
            r#"{"catalog":"nope"}"#,
            r#"{"affine":{"scale":1},"catalog":"mv5"}"#,
            r#"{"affine":{"scale":1},"lambda":0.5}"#,
            r#"{"affine":{"offset":1}}"#,
        ] {
            assert!(serde_json::from_str::<MapSpec>(text).is_err(), "{text}");
        }
    }

    #[test]
    fn user_exception_builds_suzuki_by_hand() {
        let spec: MapSpec = serde_json::from_str(
            r#"{"affine":{"scale":0,"offset":0},"exception":{"at":3,"value":1}}"#,
        )
        .unwrap();
        let t = SingleValuedMap::new(
            NormedSpace::real_line(),
            CompactSet::interval(0.0, 3.0).unwrap(),
            spec,
        )
        .unwrap();
        let s = suzuki_example();
        for x in [0.0, 1.0, 2.9, 3.0] {
            assert_eq!(at(&t, x), at(&s, x));
        }
    }

    #[test]
    fn set_valued_exception_on_single_map_is_rejected() {
        let spec = MapSpec::affine(0.5, 0.0).with_exception(
            Point::scalar(1.0),
            ExceptionValue::Set(CompactSet::Interval { lo: 0.0, hi: 1.0 }),
        );
        let r = SingleValuedMap::new(
            NormedSpace::real_line(),
            CompactSet::interval(0.0, 1.0).unwrap(),
            spec,
        );
        assert!(r.is_err());
    }
}
