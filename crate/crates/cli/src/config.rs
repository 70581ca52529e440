//! Strict TOML job configuration: sections for model, params, grid, time,
//! perturbation and outputs, with unknown keys rejected and every derived
//! default materialized before hashing.

use nsp_core::sim::{GridSpec, ModelConfig, PerturbShape, Perturbation, SimConfig};
use nsp_core::{PhysParamsOne, PhysParamsTwo};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config rejected: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: ModelSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub time: Option<TimeSection>,
    #[serde(default)]
    pub perturbation: Option<PerturbationSection>,
    #[serde(default)]
    pub outputs: Option<OutputsSection>,
    #[serde(default)]
    pub profile: Option<ProfileSection>,
    #[serde(default)]
    pub linear: Option<LinearSection>,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub energy: Option<EnergySection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub kind: ModelKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    OneFluid,
    TwoFluid,
}

/// Union of the one- and two-fluid parameter keys; the model kind selects
/// which subset must be present.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub m_ion: Option<f64>,
    #[serde(default)]
    pub m_electron: Option<f64>,
    #[serde(default)]
    pub t_ion: Option<f64>,
    #[serde(default)]
    pub t_electron: Option<f64>,
    #[serde(default)]
    pub mu_ion: Option<f64>,
    #[serde(default)]
    pub mu_electron: Option<f64>,
    pub n_minus: f64,
    pub n_plus: f64,
    pub u_minus: f64,
    pub eps_smooth: f64,
    /// never an input to the construction: if present it is checked against
    /// the value derived from the 2-rarefaction curve
    #[serde(default)]
    pub u_plus: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub l: f64,
    pub dx: f64,
    #[serde(default)]
    pub x_min: Option<f64>,
    #[serde(default)]
    pub x_max: Option<f64>,
    #[serde(default)]
    pub fan_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSection {
    pub t_final: f64,
    #[serde(default)]
    pub cfl: Option<f64>,
    #[serde(default)]
    pub viscous_theta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSection {
    pub shape: String,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default)]
    pub width: Option<f64>,
    #[serde(default)]
    pub center: Option<f64>,
    #[serde(default)]
    pub on_velocity: Option<bool>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    #[serde(default)]
    pub stride: Option<f64>,
    #[serde(default)]
    pub dump_times: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSection {
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub a: Option<f64>,
    #[serde(default)]
    pub coeff_mode: Option<String>,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_count: usize,
    #[serde(default)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergySection {
    pub input: String,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        if text.trim().is_empty() {
            return Err(ConfigError::Invalid(
                "empty config: required sections [model], [params] are missing \
                 (plus [grid] and [time] for simulation jobs)"
                    .into(),
            ));
        }
        Ok(toml::from_str(text)?)
    }

    /// Build the validated physical parameters, deriving `u_plus` from the
    /// 2-rarefaction curve and rejecting an inconsistent user-supplied one.
    pub fn model_config(&self) -> Result<ModelConfig, ConfigError> {
        let p = &self.params;
        let model = match self.model.kind {
            ModelKind::OneFluid => {
                let a = p.a.ok_or_else(|| {
                    ConfigError::Invalid("one_fluid model requires params.a".into())
                })?;
                for (key, set) in [
                    ("m_ion", p.m_ion.is_some()),
                    ("m_electron", p.m_electron.is_some()),
                    ("t_ion", p.t_ion.is_some()),
                    ("t_electron", p.t_electron.is_some()),
                    ("mu_ion", p.mu_ion.is_some()),
                    ("mu_electron", p.mu_electron.is_some()),
                ] {
                    if set {
                        return Err(ConfigError::Invalid(format!(
                            "params.{key} does not apply to the one_fluid model"
                        )));
                    }
                }
                let params = PhysParamsOne::new(a, p.n_minus, p.n_plus, p.u_minus, p.eps_smooth)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                check_u_plus(p.u_plus, params.u_plus())?;
                ModelConfig::OneFluid(params)
            }
            ModelKind::TwoFluid => {
                if p.a.is_some() {
                    return Err(ConfigError::Invalid(
                        "params.a does not apply to the two_fluid model".into(),
                    ));
                }
                let need = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| {
                        ConfigError::Invalid(format!("two_fluid model requires params.{key}"))
                    })
                };
                let mut params = PhysParamsTwo::new(
                    need(p.m_ion, "m_ion")?,
                    need(p.m_electron, "m_electron")?,
                    need(p.t_ion, "t_ion")?,
                    need(p.t_electron, "t_electron")?,
                    p.n_minus,
                    p.n_plus,
                    p.u_minus,
                    p.eps_smooth,
                )
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                if let Some(mu) = p.mu_ion {
                    params.mu_ion = mu;
                }
                if let Some(mu) = p.mu_electron {
                    params.mu_electron = mu;
                }
                params.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
                check_u_plus(p.u_plus, params.u_plus())?;
                ModelConfig::TwoFluid(params)
            }
        };
        Ok(model)
    }

    /// Full simulation job with all defaults materialized.
    pub fn sim_config(&self, seed_override: Option<u64>) -> Result<SimConfig, ConfigError> {
        let model = self.model_config()?;
        let grid = self.grid.as_ref().ok_or_else(|| {
            ConfigError::Invalid("simulation jobs require a [grid] section".into())
        })?;
        let time = self.time.as_ref().ok_or_else(|| {
            ConfigError::Invalid("simulation jobs require a [time] section".into())
        })?;

        let mut spec = GridSpec::new(grid.l, grid.dx);
        spec.x_min = grid.x_min;
        spec.x_max = grid.x_max;
        if let Some(m) = grid.fan_margin {
            spec.fan_margin = m;
        }

        let perturbation = match &self.perturbation {
            None => Perturbation::none(),
            Some(p) => {
                let shape = match p.shape.as_str() {
                    "none" => PerturbShape::None,
                    "gaussian" => PerturbShape::Gaussian,
                    "random_bumps" => PerturbShape::RandomBumps { count: p.count.unwrap_or(4) },
                    other => {
                        return Err(ConfigError::Invalid(format!(
                            "unknown perturbation shape '{other}' \
                             (expected none | gaussian | random_bumps)"
                        )))
                    }
                };
                if p.count.is_some() && !matches!(shape, PerturbShape::RandomBumps { .. }) {
                    return Err(ConfigError::Invalid(
                        "perturbation.count only applies to random_bumps".into(),
                    ));
                }
                Perturbation {
                    shape,
                    amplitude: p.amplitude.unwrap_or(0.0),
                    width: p.width.unwrap_or(1.0),
                    center: p.center.unwrap_or(0.0),
                    on_velocity: p.on_velocity.unwrap_or(false),
                    seed: p.seed.unwrap_or(0),
                }
            }
        };

        let mut config = SimConfig::new(model, spec, time.t_final, perturbation);
        if let Some(cfl) = time.cfl {
            config.cfl_number = cfl;
        }
        if let Some(theta) = time.viscous_theta {
            config.viscous_theta = theta;
        }
        if let Some(out) = &self.outputs {
            if let Some(stride) = out.stride {
                config.output_stride = stride;
            }
            if let Some(times) = &out.dump_times {
                config.dump_times = times.clone();
            }
        }
        if let Some(seed) = seed_override {
            config.perturbation.seed = seed;
        }
        config.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(config)
    }
}

fn check_u_plus(supplied: Option<f64>, derived: f64) -> Result<(), ConfigError> {
    if let Some(u) = supplied {
        if (u - derived).abs() > 1e-9 * derived.abs().max(1.0) {
            return Err(ConfigError::Invalid(format!(
                "params.u_plus = {u} is inconsistent with the 2-rarefaction curve; \
                 the derived value is u_plus = {derived:.15} (u_minus + c ln(n_plus/n_minus)); \
                 omit the key or supply the derived value"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [model]
        kind = "one_fluid"
        [params]
        a = 1.0
        n_minus = 1.0
        n_plus = 2.0
        u_minus = 0.0
        eps_smooth = 0.1
        [grid]
        l = 100.0
        dx = 0.1
        [time]
        t_final = 50.0
    "#;

    #[test]
    fn minimal_config_accepted_with_derived_u_plus() {
        let cfg = FileConfig::parse(MINIMAL).unwrap();
        let model = cfg.model_config().unwrap();
        let expected = 2.0f64.sqrt() * 2.0f64.ln();
        assert!((model.u_plus() - expected).abs() < 1e-12);
        assert!((model.u_plus() - 0.980258).abs() < 1e-6);
        let sim = cfg.sim_config(None).unwrap();
        assert_eq!(sim.cfl_number, 0.4);
        assert_eq!(sim.viscous_theta, 0.5);
    }

    #[test]
    fn inconsistent_u_plus_rejected_with_expected_value() {
        let text = MINIMAL.replace("eps_smooth = 0.1", "eps_smooth = 0.1\nu_plus = 1.5");
        let cfg = FileConfig::parse(&text).unwrap();
        let err = cfg.model_config().unwrap_err().to_string();
        assert!(err.contains("0.980258"), "message should carry the derived value: {err}");
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = MINIMAL.replace("dx = 0.1", "dx = 0.1\ntypo_key = 3");
        assert!(FileConfig::parse(&text).is_err());
    }

    #[test]
    fn empty_config_lists_missing_sections() {
        let err = FileConfig::parse("").unwrap_err().to_string();
        assert!(err.contains("[model]"));
        assert!(err.contains("[params]"));
    }

    #[test]
    fn cross_model_keys_rejected() {
        let text = MINIMAL.replace("a = 1.0", "a = 1.0\nm_ion = 2.0");
        let cfg = FileConfig::parse(&text).unwrap();
        assert!(cfg.model_config().is_err());
    }
}
