//! Declarative scan description read from TOML.
//!
//! Every physical parameter is dimensionless in units of the reference
//! frequency `Ω`: distances in `Λ = 2πc/Ω`, temperatures in `ħΩ/k_B`,
//! material frequencies in `Ω`.

use std::fmt;
use std::path::Path;

use casimir_core::lifshitz::MIN_SEPARATION;
use casimir_core::modes::ModeSumSpec;
use casimir_core::units::lambda_to_natural;
use casimir_core::{CavityConfig, Mirror, QuadratureSpec, ResponseModel};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Lifshitz,
    ModeSum,
    PlasmonApprox,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Lifshitz => "lifshitz",
            Method::ModeSum => "mode_sum",
            Method::PlasmonApprox => "plasmon_approx",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lifshitz" => Ok(Method::Lifshitz),
            "mode_sum" => Ok(Method::ModeSum),
            "plasmon_approx" => Ok(Method::PlasmonApprox),
            _ => Err(format!("unknown method `{s}`")),
        }
    }
}

/// One method or a list of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Methods {
    One(Method),
    Many(Vec<Method>),
}

impl Methods {
    pub fn to_vec(&self) -> Vec<Method> {
        match self {
            Methods::One(m) => vec![*m],
            Methods::Many(v) => v.clone(),
        }
    }
}

impl Default for Methods {
    fn default() -> Self {
        Methods::One(Method::Lifshitz)
    }
}

/// Distances in units of `Λ`, either listed or log-spaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DistanceGrid {
    Values { values: Vec<f64> },
    LogSpaced { min: f64, max: f64, points: usize },
}

impl DistanceGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            DistanceGrid::Values { values } => values.clone(),
            DistanceGrid::LogSpaced { min, max, points } => match points {
                0 => vec![],
                1 => vec![*min],
                n => (0..*n)
                    .map(|i| min * (max / min).powf(i as f64 / (n - 1) as f64))
                    .collect(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_subdivisions: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_matsubara_terms: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorConfig {
    #[serde(default = "vacuum")]
    pub epsilon: ResponseModel,
    #[serde(default = "vacuum")]
    pub mu: ResponseModel,
}

fn vacuum() -> ResponseModel {
    ResponseModel::Vacuum
}

impl MirrorConfig {
    pub fn mirror(&self) -> casimir_core::Result<Mirror> {
        Mirror::new(self.epsilon.clone(), self.mu.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    #[serde(default)]
    pub method: Methods,
    pub distances: DistanceGrid,
    #[serde(default = "zero_temperature")]
    pub temperatures: Vec<f64>,
    #[serde(default)]
    pub quadrature: Tolerances,
    pub mirror1: MirrorConfig,
    pub mirror2: MirrorConfig,
}

fn zero_temperature() -> Vec<f64> {
    vec![0.0]
}

/// A config that passed validation, with everything resolved to library types.
#[derive(Debug, Clone)]
pub struct ScanSpec {
    pub config: ScanConfig,
    pub methods: Vec<Method>,
    /// In units of `Λ`.
    pub distances: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub mirror1: Mirror,
    pub mirror2: Mirror,
    pub quadrature: QuadratureSpec,
    pub mode_sum: ModeSumSpec,
}

impl ScanConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// SHA-256 of the canonical JSON form, so formatting and comments in
    /// the source file do not change it.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&canonical)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn resolve(&self) -> Result<ScanSpec, ConfigError> {
        let invalid = |m: String| ConfigError::Invalid(m);
        let methods = self.method.to_vec();
        if methods.is_empty() {
            return Err(invalid("no method given".into()));
        }
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].contains(m) {
                return Err(invalid(format!("method `{m}` listed twice")));
            }
        }

        let distances = self.distances.values();
        check_sorted("distances", &distances)?;
        if let Some(&l) = distances.iter().find(|&&l| !(lambda_to_natural(l) >= MIN_SEPARATION)) {
            return Err(invalid(format!("distance {l} is below the minimum {:e}", MIN_SEPARATION / lambda_to_natural(1.0))));
        }
        check_sorted("temperatures", &self.temperatures)?;
        if let Some(t) = self.temperatures.iter().find(|&&t| !(t >= 0.0)) {
            return Err(invalid(format!("negative temperature {t}")));
        }

        let mirror1 = self.mirror1.mirror().map_err(|e| invalid(format!("mirror1: {e}")))?;
        let mirror2 = self.mirror2.mirror().map_err(|e| invalid(format!("mirror2: {e}")))?;

        let mut quadrature = QuadratureSpec::default();
        let mut mode_sum = ModeSumSpec::default();
        if let Some(t) = self.quadrature.relative_tolerance {
            quadrature.relative_tolerance = t;
            mode_sum.relative_tolerance = t;
            mode_sum.inner_tolerance = mode_sum.inner_tolerance.min(t);
        }
        if let Some(n) = self.quadrature.max_subdivisions {
            quadrature.max_subdivisions = n;
        }
        if let Some(n) = self.quadrature.max_matsubara_terms {
            quadrature.max_matsubara_terms = n;
        }
        quadrature.validate().map_err(|e| invalid(e.to_string()))?;
        mode_sum.validate().map_err(|e| invalid(e.to_string()))?;

        let positive_t = self.temperatures.iter().any(|&t| t > 0.0);
        for m in &methods {
            match m {
                Method::Lifshitz => {}
                Method::ModeSum | Method::PlasmonApprox => {
                    if mirror1 != mirror2 {
                        return Err(invalid(format!("method `{m}` needs identical mirrors")));
                    }
                    if positive_t {
                        return Err(invalid(format!("method `{m}` is zero-temperature only")));
                    }
                }
            }
        }
        if methods.contains(&Method::PlasmonApprox) && drude_only(&mirror1).is_none() {
            return Err(invalid("method `plasmon_approx` needs Drude mirrors with mu = vacuum".into()));
        }

        Ok(ScanSpec {
            config: self.clone(),
            methods,
            distances,
            temperatures: self.temperatures.clone(),
            mirror1,
            mirror2,
            quadrature,
            mode_sum,
        })
    }
}

impl ScanSpec {
    /// Cavity at a distance given in units of `Λ`.
    pub fn cavity(&self, l: f64, t: f64) -> casimir_core::Result<CavityConfig> {
        CavityConfig::new(lambda_to_natural(l), t, self.mirror1.clone(), self.mirror2.clone())
    }
}

/// Drude parameters of a plain metal mirror.
pub fn drude_only(m: &Mirror) -> Option<casimir_core::DrudeParams> {
    match (&m.epsilon, &m.mu) {
        (ResponseModel::DrudeEpsilon(p), ResponseModel::Vacuum) => Some(*p),
        _ => None,
    }
}

fn check_sorted(name: &str, v: &[f64]) -> Result<(), ConfigError> {
    if v.is_empty() {
        return Err(ConfigError::Invalid(format!("{name} must not be empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(ConfigError::Invalid(format!("{name} must be finite")));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ConfigError::Invalid(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        method = ["lifshitz", "mode_sum"]
        distances = { min = 0.1, max = 10.0, points = 3 }

        [mirror1.epsilon]
        kind = "drude_epsilon"
        plasma_frequency = 1.0
        damping = 0.0

        [mirror2.epsilon]
        kind = "drude_epsilon"
        plasma_frequency = 1.0
        damping = 0.0
    "#;

    #[test]
    fn parses_and_resolves() {
        let cfg = ScanConfig::from_toml(BASIC).unwrap();
        let spec = cfg.resolve().unwrap();
        assert_eq!(spec.methods, vec![Method::Lifshitz, Method::ModeSum]);
        assert_eq!(spec.temperatures, vec![0.0]);
        let d = spec.distances;
        assert_eq!(d.len(), 3);
        assert!((d[1] - 1.0).abs() < 1e-12);
        assert_eq!(spec.mirror1.mu, ResponseModel::Vacuum);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ScanConfig::from_toml(BASIC).unwrap();
        let b = ScanConfig::from_toml(&BASIC.replace("    ", "  ").replace("0.1,", "0.1 ,")).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.temperatures = vec![0.0, 0.1];
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |s: String| ScanConfig::from_toml(&s).and_then(|c| c.resolve()).is_err();
        assert!(bad(BASIC.replace("points = 3", "points = 0")));
        assert!(bad(BASIC.replace("min = 0.1, max = 10.0", "min = 10.0, max = 0.1")));
        assert!(bad(BASIC.replace("method = [", "temperatures = [0.0, 0.1]\nmethod = [")));
        assert!(bad(BASIC.replace("damping = 0.0\n\n        [mirror2", "damping = 0.1\n\n        [mirror2")));
        assert!(bad(BASIC.replace("drude_epsilon", "plasma")));
        assert!(bad(BASIC.replace("method = [", "colour = 1\nmethod = [")));
        assert!(bad(BASIC.replace("plasma_frequency = 1.0", "plasma_frequency = -1.0")));
    }
}
