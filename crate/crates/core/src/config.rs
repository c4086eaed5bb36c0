//! Versioned JSON experiment configuration.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::functions::TestFunction;
use crate::analysis::quadrature::QuadratureSpec;
use crate::analysis::classes::l_of;
use crate::field::ScalarField;
use crate::geometry::{Domain, DomainSpec};
use crate::operators::stechkin::embedding_loss;
use crate::polynomials::order;
use crate::{Error, Result};

pub const CONFIG_VERSION: u32 = 1;

/// Experiment families run by [`crate::operators::rate_experiment`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Approx,
    Recovery,
    Stechkin,
    Extension,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Approx => "approx",
            Kind::Recovery => "recovery",
            Kind::Stechkin => "stechkin",
            Kind::Extension => "extension",
        }
    }
}

/// `L_p` exponent; `"inf"` in JSON for `p = ∞`.
pub mod exponent {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Word(String),
    }

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Word(w) if w == "inf" || w == "infinity" => Ok(f64::INFINITY),
            Repr::Word(w) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {w:?}"))),
        }
    }
}

fn two() -> f64 {
    2.0
}
fn measure_levels() -> [i32; 2] {
    [4, 10]
}
fn class_levels() -> [i32; 2] {
    [0, 8]
}
fn tolerance() -> f64 {
    0.25
}
fn trials() -> usize {
    8
}
fn kappa_max() -> u32 {
    3
}
fn pairs() -> usize {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub domain: DomainSpec,
    /// Smoothness of the family; `null` measures `α̂` per function.
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Inclusive `j` range of `t = 2^{-j}` used when measuring `α̂`.
    #[serde(default = "measure_levels")]
    pub measure_levels: [i32; 2],
    #[serde(default = "two", with = "exponent")]
    pub p: f64,
    #[serde(default = "two", with = "exponent")]
    pub q: f64,
    #[serde(default = "two", with = "exponent")]
    pub s: f64,
    /// Besov `θ`; `null` is the Nikolskii case.
    #[serde(default)]
    pub theta: Option<f64>,
    /// `α` of the class norm used for extension stability; defaults to `α̂ - 1/4`.
    #[serde(default)]
    pub class_alpha: Option<f64>,
    #[serde(default = "class_levels")]
    pub class_levels: [i32; 2],
    /// Difference order; defaults to `l(α)`.
    #[serde(default)]
    pub l: Option<u32>,
    /// B-spline order; defaults to `l`.
    #[serde(default)]
    pub m: Option<usize>,
    /// Sobolev order `𝔪` of the recovery error.
    #[serde(default)]
    pub sobolev_order: u32,
    #[serde(default)]
    pub lambda: Option<Vec<u32>>,
    /// Inclusive level range `k`.
    pub levels: [u32; 2],
    /// Start level of the extension series; defaults to the first level with interior cells.
    #[serde(default)]
    pub k0: Option<u32>,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    pub family: Vec<TestFunction>,
    #[serde(default = "tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "trials")]
    pub trials: usize,
    #[serde(default = "kappa_max")]
    pub kappa_max: u32,
    #[serde(default = "pairs")]
    pub pairs_per_level: usize,
    #[serde(default)]
    pub dump_field: bool,
}

/// Which hypotheses a run needs checked.
pub const JACKSON: &str = "Jackson condition";
pub const RECOVERY: &str = "recovery condition";
pub const STECHKIN_TAU: &str = "Stechkin order condition";
pub const STECHKIN_GAMMA: &str = "Stechkin smoothness condition";

impl ExperimentConfig {
    /// Parse and validate the structure (no kind-specific checks).
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.validate_common()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn domain(&self) -> Result<Domain> {
        Domain::from_spec(&self.domain).map_err(|e| cfg_err("domain", e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn level_range(&self) -> std::ops::RangeInclusive<u32> {
        self.levels[0]..=self.levels[1]
    }

    pub fn lambda(&self) -> Vec<u32> {
        self.lambda.clone().unwrap_or_else(|| vec![0; self.dim()])
    }

    /// `l` from the config, or `l(α)` for the given smoothness.
    pub fn l_for(&self, alpha: f64) -> u32 {
        self.l.unwrap_or_else(|| l_of(alpha))
    }

    pub fn m_for(&self, l: u32) -> usize {
        self.m.unwrap_or(l as usize)
    }

    fn validate_common(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(cfg_err("version", format!("unsupported version {}, expected {CONFIG_VERSION}", self.version)));
        }
        let d = self.dim();
        if d == 0 || d > 3 {
            return Err(cfg_err("domain", "dimension must lie in 1..=3"));
        }
        for (name, v) in [("p", self.p), ("q", self.q), ("s", self.s)] {
            if v.is_nan() || v < 1.0 {
                return Err(cfg_err(name, "exponent must satisfy 1 ≤ value ≤ inf"));
            }
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return Err(cfg_err("alpha", "must be positive, or null to measure"));
            }
        }
        if let Some(t) = self.theta {
            if !(t >= 1.0) {
                return Err(cfg_err("theta", "must be at least 1, or null for the Nikolskii case"));
            }
        }
        if self.measure_levels[0] >= self.measure_levels[1] - 1 {
            return Err(cfg_err("measure_levels", "need at least three levels"));
        }
        if self.levels[0] > self.levels[1] || self.levels[1] > 14 {
            return Err(cfg_err("levels", "need levels[0] ≤ levels[1] ≤ 14"));
        }
        if self.l == Some(0) {
            return Err(cfg_err("l", "must be at least 1"));
        }
        if let (Some(l), Some(m)) = (self.l, self.m) {
            if m < l as usize {
                return Err(cfg_err("m", "B-spline order must satisfy l ≤ m"));
            }
        }
        if let Some(lambda) = &self.lambda {
            if lambda.len() != d {
                return Err(cfg_err("lambda", format!("needs {d} components")));
            }
        }
        if !(self.tolerance > 0.0) {
            return Err(cfg_err("tolerance", "must be positive"));
        }
        self.quadrature
            .validate()
            .map_err(|e| cfg_err("quadrature", e.to_string()))?;
        if self.family.is_empty() {
            return Err(cfg_err("family", "needs at least one function"));
        }
        for (i, f) in self.family.iter().enumerate() {
            f.validate().map_err(|e| cfg_err(&format!("family[{i}]"), e.to_string()))?;
            if f.dim() != d {
                return Err(cfg_err(&format!("family[{i}]"), format!("function has dimension {}, domain {d}", f.dim())));
            }
        }
        Ok(())
    }

    /// Hypotheses for `kind` at smoothness `alpha` (config value or measured).
    pub fn check_conditions(&self, kind: Kind, alpha: f64) -> Result<()> {
        let d = self.dim();
        let lambda = self.lambda();
        match kind {
            Kind::Approx => positive(
                JACKSON,
                "α - |λ| - (d/p - d/q)_+",
                alpha - order(&lambda) as f64 - embedding_loss(d, self.p, self.q),
            ),
            Kind::Recovery => positive(
                RECOVERY,
                "α - 𝔪 - (d/p - d/q)_+",
                alpha - self.sobolev_order as f64 - embedding_loss(d, self.p, self.q),
            ),
            Kind::Stechkin => {
                positive(STECHKIN_TAU, "|λ| + (d/s - d/q)_+", order(&lambda) as f64 + embedding_loss(d, self.s, self.q))?;
                positive(
                    STECHKIN_GAMMA,
                    "α - |λ| - (d/p - d/q)_+",
                    alpha - order(&lambda) as f64 - embedding_loss(d, self.p, self.q),
                )
            }
            Kind::Extension => positive("extension smoothness condition", "α", alpha),
        }
    }

    /// Checks that do not need `α̂`; conditions are checked here when `alpha` is given.
    pub fn validate_for(&self, kind: Kind) -> Result<()> {
        let lambda = self.lambda();
        let m_check = |l: u32| -> Result<()> {
            let m = self.m_for(l);
            if m < l as usize {
                return Err(cfg_err("m", "B-spline order must satisfy l ≤ m"));
            }
            if lambda.iter().any(|&r| r as usize > m) {
                return Err(cfg_err("lambda", "components must not exceed m"));
            }
            Ok(())
        };
        match kind {
            Kind::Stechkin => {
                if self.lambda.is_none() {
                    return Err(cfg_err("lambda", "required for the stechkin experiment"));
                }
            }
            Kind::Recovery => {
                if self.sobolev_order > 0 && self.m.is_some_and(|m| m < 2) {
                    return Err(cfg_err("m", "Sobolev errors need m ≥ 2"));
                }
            }
            Kind::Extension => {
                if self.p.is_infinite() {
                    return Err(cfg_err("p", "class norms need p < inf"));
                }
            }
            Kind::Approx => {}
        }
        if self.levels[1] - self.levels[0] < 2 {
            return Err(cfg_err("levels", "rate fits need at least three levels"));
        }
        if let Some(a) = self.alpha {
            self.check_conditions(kind, a)?;
            m_check(self.l_for(a))?;
        } else if let Some(l) = self.l {
            m_check(l)?;
        }
        Ok(())
    }
}

/// Config for the self-test suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelftestConfig {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
}

impl SelftestConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: SelftestConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        if cfg.version != CONFIG_VERSION {
            return Err(cfg_err("version", format!("unsupported version {}, expected {CONFIG_VERSION}", cfg.version)));
        }
        Ok(cfg)
    }
}

fn positive(condition: &'static str, expression: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::ConditionViolated { condition, expression, value })
    }
}

fn cfg_err(path: &str, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.to_string(),
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> serde_json::Value {
        serde_json::json!({
            "version": 1,
            "domain": {"kind": "unit-cube", "dim": 1},
            "levels": [3, 6],
            "family": [{"kind": "tensor", "factors": [{"kind": "cusp", "beta": 0.75, "anchor": 0.5, "side": "both"}]}]
        })
    }

    #[test]
    fn defaults_and_roundtrip() {
        let cfg = ExperimentConfig::from_json(&base().to_string()).unwrap();
        assert_eq!(cfg.p, 2.0);
        assert_eq!(cfg.alpha, None);
        assert_eq!(cfg.lambda(), vec![0]);
        let again = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn infinity_exponent() {
        let mut v = base();
        v["q"] = "inf".into();
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert!(cfg.q.is_infinite());
        assert!(cfg.to_json().contains("\"inf\""));
    }

    #[test]
    fn errors_carry_field_paths() {
        let mut v = base();
        v["quadrature"] = serde_json::json!({"points": "x"});
        match ExperimentConfig::from_json(&v.to_string()) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "quadrature.points"),
            other => panic!("{other:?}"),
        }
        // Tagged enums are buffered, so the path stops at the enum value.
        let mut v = base();
        v["family"][0]["factors"][0]["beta"] = "x".into();
        match ExperimentConfig::from_json(&v.to_string()) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "family[0]"),
            other => panic!("{other:?}"),
        }
        let mut v = base();
        v["extra"] = 1.into();
        assert!(matches!(ExperimentConfig::from_json(&v.to_string()), Err(Error::Config { .. })));
        let mut v = base();
        v["version"] = 7.into();
        match ExperimentConfig::from_json(&v.to_string()) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "version"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn recovery_condition_is_named() {
        let mut v = base();
        v["alpha"] = 1.25.into();
        v["sobolev_order"] = 1.into();
        v["q"] = "inf".into();
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        let err = cfg.validate_for(Kind::Recovery).unwrap_err();
        assert!(matches!(err, Error::ConditionViolated { condition: RECOVERY, .. }));
        assert!(err.to_string().contains("recovery condition"));
        assert!(cfg.validate_for(Kind::Approx).is_ok());
    }

    #[test]
    fn stechkin_needs_lambda_and_tau() {
        let mut v = base();
        v["alpha"] = 1.75.into();
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert!(matches!(cfg.validate_for(Kind::Stechkin), Err(Error::Config { .. })));
        v["lambda"] = serde_json::json!([0]);
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert!(matches!(
            cfg.validate_for(Kind::Stechkin),
            Err(Error::ConditionViolated { condition: STECHKIN_TAU, .. })
        ));
        v["lambda"] = serde_json::json!([1]);
        let cfg = ExperimentConfig::from_json(&v.to_string()).unwrap();
        assert!(cfg.validate_for(Kind::Stechkin).is_ok());
    }
}
