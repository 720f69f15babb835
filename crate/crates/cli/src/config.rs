use oqbm::{InitialCondition, Params};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

/// A single run: rates, initial condition, snapshot times and an optional
/// explicit grid. The JSON is flat, e.g.
/// `{"gamma_p": 1e-3, "gamma_z": 1e-3, "delta": 1e-2, "omega": 0,
///   "ic": "gaussian_mixture", "p": 0.75, "sigma1": 1, "sigma2": 2,
///   "times": [0, 50, 100]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub params: Params,
    #[serde(flatten)]
    pub ic: InitialCondition,
    pub times: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
}

impl RunConfig {
    /// Parses and validates. A Laplace-coherent state without `scale` gets
    /// `delta / omega`.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let mut v: Value =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let Value::Object(m) = &mut v {
            if m.get("ic").and_then(Value::as_str) == Some("laplace_coherent")
                && !m.contains_key("scale")
            {
                let num = |k: &str| m.get(k).and_then(Value::as_f64).unwrap_or(0.0);
                let (d, w) = (num("delta"), num("omega"));
                if w > 0.0 {
                    m.insert("scale".into(), (d / w).into());
                }
            }
        }
        let cfg: RunConfig =
            serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |e: oqbm::Error| CliError::Config(e.to_string());
        self.params.validate().map_err(bad)?;
        self.ic.validate().map_err(bad)?;
        if self.times.is_empty() {
            return Err(CliError::Config("no snapshot times".into()));
        }
        if self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(CliError::Config(
                "snapshot times must be finite and non-negative".into(),
            ));
        }
        if self.half_width.is_some() != self.n_points.is_some() {
            return Err(CliError::Config(
                "half_width and n_points must be given together".into(),
            ));
        }
        Ok(())
    }

    pub fn t_max(&self) -> f64 {
        self.times.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let c = RunConfig::from_json(
            r#"{"gamma_p": 1e-3, "gamma_z": 1e-3, "delta": 1e-2, "omega": 0,
                "ic": "gaussian_mixture", "p": 0.75, "sigma1": 1, "sigma2": 2, "times": [0, 50]}"#,
        )
        .unwrap();
        assert_eq!(
            c.ic,
            InitialCondition::GaussianMixture {
                p: 0.75,
                sigma1: 1.0,
                sigma2: 2.0
            }
        );
        assert_eq!(c.params.delta, 1e-2);
    }

    #[test]
    fn laplace_scale_defaults_to_rate_ratio() {
        let c = RunConfig::from_json(
            r#"{"gamma_p": 1e-2, "gamma_z": 0, "delta": 0.1, "omega": 0.01,
                "ic": "laplace_coherent", "p": 0.25, "r": 0, "q": -0.5, "times": [25]}"#,
        )
        .unwrap();
        assert!(
            matches!(c.ic, InitialCondition::LaplaceCoherent { scale, .. } if (scale - 10.0).abs() < 1e-12)
        );
    }

    #[test]
    fn zero_diffusion_is_a_config_error() {
        let e = RunConfig::from_json(
            r#"{"gamma_p": 0, "gamma_z": 0, "delta": 0, "omega": 0,
                "ic": "gaussian_mixture", "p": 0.5, "sigma1": 1, "sigma2": 1, "times": [1]}"#,
        )
        .unwrap_err();
        assert!(matches!(e, CliError::Config(_)));
    }
}
