//! Run configuration files.

use std::path::Path;

use num_complex::Complex64;
use qonsager::onsager::ModelParams;
use qonsager::qkernel::QPoint;
use qonsager::suite::{Suite, Tolerances};
use qonsager::Precision;
use serde::Deserialize;

/// Model parameters as written in a config file. Complex numbers are
/// `[re, im]` pairs; `alpha` and `exp_alpha` (likewise the starred pair) are
/// mutually exclusive.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub spins2: Vec<u32>,
    pub q: Complex64,
    #[serde(default)]
    pub eta: Complex64,
    #[serde(default)]
    pub etaprime: Complex64,
    pub alpha: Option<Complex64>,
    pub exp_alpha: Option<Complex64>,
    pub alphastar: Option<Complex64>,
    pub exp_alphastar: Option<Complex64>,
    pub evals: Vec<Complex64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: Option<ParamsConfig>,
    pub seed: Option<u64>,
    pub precision: Option<Precision>,
    #[serde(default)]
    pub tolerances: Option<Tolerances>,
    #[serde(default)]
    pub suites: Vec<Suite>,
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn exponential(name: &str, direct: Option<Complex64>, exp: Option<Complex64>) -> Result<Complex64, ConfigError> {
    match (direct, exp) {
        (Some(a), None) => Ok(a.exp()),
        (None, Some(e)) => Ok(e),
        (Some(_), Some(_)) => Err(ConfigError(format!("give either `{name}` or `exp_{name}`, not both"))),
        (None, None) => Err(ConfigError(format!("missing `{name}` or `exp_{name}`"))),
    }
}

impl ParamsConfig {
    pub fn to_params(&self) -> Result<ModelParams, ConfigError> {
        let q = QPoint::new(self.q).map_err(|e| ConfigError(format!("invalid q: {e}")))?;
        ModelParams::new(
            q,
            self.eta,
            self.etaprime,
            exponential("alpha", self.alpha, self.exp_alpha)?,
            exponential("alphastar", self.alphastar, self.exp_alphastar)?,
            self.evals.clone(),
            self.spins2.clone(),
        )
        .map_err(|e| ConfigError(format!("invalid parameters: {e}")))
    }
}

/// Parses a config file, reporting JSON errors with line, column and the offending line.
pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    serde_json::from_str(text).map_err(|e| {
        let line = text.lines().nth(e.line().saturating_sub(1)).unwrap_or("");
        ConfigError(format!("line {}, column {}: {e}\n  | {line}", e.line(), e.column()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{
        "params": {
            "spins2": [1, 2],
            "q": [0.6, 0.4],
            "eta": [0.1, 0.0],
            "alpha": [0.2, 0.3],
            "exp_alphastar": [0.7, -0.6],
            "evals": [[0.9, 0.1], [1.1, -0.4]]
        },
        "seed": 5,
        "suites": ["relations", "spectra"]
    }"#;

    #[test]
    fn parses_a_full_config() {
        let c = parse(GOOD).unwrap();
        let p = c.params.unwrap().to_params().unwrap();
        assert_eq!(p.spins2, vec![1, 2]);
        assert!((p.exp_alpha - Complex64::new(0.2, 0.3).exp()).norm() < 1e-15);
        assert_eq!(c.suites, vec![Suite::Relations, Suite::Spectra]);
    }

    #[test]
    fn both_alpha_forms_is_an_error() {
        let text = GOOD.replace("\"alpha\": [0.2, 0.3],", "\"alpha\": [0.2, 0.3], \"exp_alpha\": [1.0, 0.0],");
        let e = parse(&text).unwrap().params.unwrap().to_params().unwrap_err();
        assert!(e.0.contains("not both"));
    }

    #[test]
    fn zero_spin_is_rejected() {
        let text = GOOD.replace("[1, 2]", "[1, 0]");
        assert!(parse(&text).unwrap().params.unwrap().to_params().is_err());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let e = parse("{\n  \"seed\": 1,\n  \"suites\": [relations]\n}").unwrap_err();
        assert!(e.0.starts_with("line 3"), "{}", e.0);
        assert!(e.0.contains("\"suites\": [relations]"));
    }
}
