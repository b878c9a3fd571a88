//! JSON problem files.
//!
//! ```json
//! {
//!   "space": {"dimension": 1, "p": 2},
//!   "domain": {"interval": [0, 1]},
//!   "map": {"catalog": "garcia", "lambda": 0.5},
//!   "condition": "C_lambda",
//!   "params": {"lambda": 0.25}
//! }
//! ```
//!
//! `space` defaults to the real line; `domain` defaults to a catalog map's
//! own domain. Everything under `params` is optional.

use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::asymptotic::{AsymptoticOptions, RegularityOptions, DEFAULT_RESOLUTION};
use crate::conditions::SampleConfig;
use crate::iteration::{IterationOptions, SelectionRule};
use crate::maps::{AnyMap, MapSpec, MultiValuedMap, SingleValuedMap};
use crate::solver::SolverOptions;
use crate::spaces::{CompactSet, Exponent, NormedSpace, Point};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// Dotted path of the offending field, `.` for the document root.
    pub path: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            path: path.into(),
            message: message.to_string(),
        }
    }

    fn missing(path: &str) -> Self {
        Self::new(path, "missing required field")
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub dimension: usize,
    pub p: Exponent,
}

impl Default for SpaceConfig {
    fn default() -> Self {
        Self {
            dimension: 1,
            p: Exponent::Finite(2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub enum ConditionName {
    C,
    #[serde(rename = "C_lambda")]
    CLambda,
    #[serde(rename = "E_mu")]
    EMu,
    /// Estimate the least μ, then check (E_μ) at that value.
    E,
    #[serde(rename = "nonexpansive")]
    Nonexpansive,
    #[serde(rename = "minimal_mu")]
    MinimalMu,
    #[serde(rename = "monotonicity")]
    Monotonicity,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    pub lambda: Option<f64>,
    /// Upper λ for the monotonicity probe.
    pub lambda2: Option<f64>,
    pub mu: Option<f64>,
    /// Averaging weight of `iterate`; defaults to `lambda`, then 0.5.
    #[serde(alias = "r")]
    pub step: Option<f64>,
    pub tol: Option<f64>,
    pub budget: Option<usize>,
    pub rule: Option<SelectionRule>,
    pub window: Option<usize>,
    pub resolution: Option<f64>,
    pub seed: Option<u64>,
    pub sample: Option<SampleConfig>,
    /// Regularity probe subsequence count; the probe only runs when set.
    pub subsequences: Option<usize>,
    pub commuting_samples: Option<usize>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub space: SpaceConfig,
    pub domain: Option<CompactSet>,
    pub map: Option<MapSpec>,
    pub t: Option<MapSpec>,
    #[serde(rename = "T")]
    pub big_t: Option<MapSpec>,
    pub condition: Option<ConditionName>,
    pub start: Option<Point>,
    pub sequence: Option<Vec<Point>>,
    #[serde(default)]
    pub params: Params,
}

/// Command-line overrides applied on top of `params`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

pub fn parse(text: &str) -> Result<ProblemConfig, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::new(path, e.into_inner())
    })
}

pub fn load(path: &Path) -> Result<ProblemConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new(".", format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

impl ProblemConfig {
    pub fn space(&self) -> Result<NormedSpace, ConfigError> {
        NormedSpace::new(self.space.dimension, self.space.p)
            .map_err(|e| ConfigError::new("space", e))
    }

    fn domain_for(&self, spec: &MapSpec) -> Result<CompactSet, ConfigError> {
        self.domain
            .clone()
            .or_else(|| spec.default_domain())
            .ok_or_else(|| ConfigError::missing("domain"))
    }

    fn spec(&self, field: &str) -> Result<&MapSpec, ConfigError> {
        match field {
            "map" => self.map.as_ref(),
            "t" => self.t.as_ref(),
            _ => self.big_t.as_ref(),
        }
        .ok_or_else(|| ConfigError::missing(field))
    }

    pub fn any_map(&self) -> Result<AnyMap, ConfigError> {
        let spec = self.spec("map")?;
        AnyMap::new(self.space()?, self.domain_for(spec)?, spec.clone())
            .map_err(|e| ConfigError::new("map", e))
    }

    pub fn single_t(&self) -> Result<SingleValuedMap, ConfigError> {
        let spec = self.spec("t")?;
        SingleValuedMap::new(self.space()?, self.domain_for(spec)?, spec.clone())
            .map_err(|e| ConfigError::new("t", e))
    }

    pub fn multi_t(&self) -> Result<MultiValuedMap, ConfigError> {
        let spec = self.spec("T")?;
        MultiValuedMap::new(self.space()?, self.domain_for(spec)?, spec.clone())
            .map_err(|e| ConfigError::new("T", e))
    }

    pub fn condition(&self) -> Result<ConditionName, ConfigError> {
        self.condition
            .ok_or_else(|| ConfigError::missing("condition"))
    }

    pub fn start(&self) -> Result<&Point, ConfigError> {
        self.start
            .as_ref()
            .ok_or_else(|| ConfigError::missing("start"))
    }

    pub fn sequence(&self) -> Result<&[Point], ConfigError> {
        self.sequence
            .as_deref()
            .ok_or_else(|| ConfigError::missing("sequence"))
    }

    pub fn explicit_domain(&self) -> Result<&CompactSet, ConfigError> {
        self.domain
            .as_ref()
            .ok_or_else(|| ConfigError::missing("domain"))
    }

    pub fn require_lambda(&self) -> Result<f64, ConfigError> {
        self.params
            .lambda
            .ok_or_else(|| ConfigError::missing("params.lambda"))
    }

    pub fn require_lambda2(&self) -> Result<f64, ConfigError> {
        self.params
            .lambda2
            .ok_or_else(|| ConfigError::missing("params.lambda2"))
    }

    pub fn require_mu(&self) -> Result<f64, ConfigError> {
        self.params
            .mu
            .ok_or_else(|| ConfigError::missing("params.mu"))
    }

    pub fn seed(&self, o: &Overrides) -> u64 {
        o.seed.or(self.params.seed).unwrap_or(0)
    }

    pub fn sample_config(&self, o: &Overrides) -> SampleConfig {
        let mut s = self.params.sample.unwrap_or_default();
        if let Some(seed) = o.seed.or(self.params.seed) {
            s.seed = seed;
        }
        s
    }

    pub fn iteration_options(&self, o: &Overrides) -> IterationOptions {
        let d = IterationOptions::default();
        IterationOptions {
            step: self.params.step.or(self.params.lambda).unwrap_or(d.step),
            tol: o.tol.or(self.params.tol).unwrap_or(d.tol),
            budget: self.params.budget.unwrap_or(d.budget),
            rule: self.params.rule.unwrap_or(d.rule),
            declared_lambda: self.params.lambda,
        }
    }

    pub fn asymptotic_options(&self) -> AsymptoticOptions {
        AsymptoticOptions {
            window: self.params.window,
            resolution: self.params.resolution.unwrap_or(DEFAULT_RESOLUTION),
            ..AsymptoticOptions::default()
        }
    }

    pub fn regularity_options(&self, o: &Overrides) -> Option<RegularityOptions> {
        self.params.subsequences.map(|k| RegularityOptions {
            subsequences: k,
            seed: self.seed(o),
            window: self.params.window,
            resolution: self.params.resolution.unwrap_or(DEFAULT_RESOLUTION),
            ..RegularityOptions::default()
        })
    }

    pub fn commuting_samples(&self) -> usize {
        self.params
            .commuting_samples
            .unwrap_or(SolverOptions::default().commuting_samples)
    }

    pub fn solver_options(&self, o: &Overrides) -> SolverOptions {
        let d = SolverOptions::default();
        SolverOptions {
            epsilon: o.tol.or(self.params.epsilon).unwrap_or(d.epsilon),
            budget: self.params.budget.unwrap_or(d.budget),
            window: self.params.window,
            resolution: self.params.resolution.unwrap_or(d.resolution),
            commuting_samples: self.commuting_samples(),
            seed: self.seed(o),
            sample: self.sample_config(o),
            ..d
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_catalog_config() {
        let c = parse(r#"{"map": {"catalog": "suzuki"}, "condition": "C"}"#).unwrap();
        assert_eq!(c.condition().unwrap(), ConditionName::C);
        let m = c.any_map().unwrap();
        assert!(matches!(m, AnyMap::Single(_)));
    }

    #[test]
    fn missing_required_field_names_path() {
        let e = parse(r#"{"space": {"p": 2}}"#).unwrap_err();
        assert_eq!(e.path, "space");
        assert!(e.message.contains("dimension"));

        let e = parse(r#"{"params": {"sample": {"grid": "x"}}}"#).unwrap_err();
        assert_eq!(e.path, "params.sample.grid");

        let e = parse(r#"{"params": {"lamda": 0.5}}"#).unwrap_err();
        assert!(e.path.starts_with("params"));
    }

    #[test]
    fn subcommand_requirements() {
        let c = parse(r#"{"map": {"affine": {"scale": 0.5}}}"#).unwrap();
        assert_eq!(c.any_map().unwrap_err().path, "domain");
        assert_eq!(c.condition().unwrap_err().path, "condition");
        assert_eq!(c.single_t().unwrap_err().path, "t");
    }

    #[test]
    fn overrides_win() {
        let c = parse(r#"{"params": {"seed": 3, "tol": 1e-4}}"#).unwrap();
        let o = Overrides {
            seed: Some(9),
            tol: None,
        };
        assert_eq!(c.sample_config(&o).seed, 9);
        assert_eq!(c.iteration_options(&o).tol, 1e-4);
        assert_eq!(c.sample_config(&Overrides::default()).seed, 3);
    }
}
