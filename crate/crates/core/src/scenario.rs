//! Scenario configuration, validated before any computation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{InitialData, InitialSpec, StepperConfig, DEFAULT_GRADIENT_CEILING};
use crate::spectral::Grid;
use crate::symbols::SymbolTriple;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid_n: usize,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta: f64,
    /// Cap of the modulus `(−log r)^{−β}`; the default keeps it concave.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_cap: Option<f64>,
    pub theta0: InitialSpec,
    pub t_end: f64,
    #[serde(default = "default_cfl")]
    pub cfl_factor: f64,
    /// Upper limit on the step; defaults to `record_dt`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_max: Option<f64>,
    pub record_dt: f64,
    /// No snapshots when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snapshot_dt: Option<f64>,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "yes")]
    pub dealias: bool,
    #[serde(default = "yes")]
    pub transport: bool,
    #[serde(default = "default_ceiling")]
    pub gradient_ceiling: f64,
    #[serde(default)]
    pub diagnostics: DiagnosticsToggles,
}

/// Optional diagnostics columns; disabled columns are written as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsToggles {
    pub moc_ratio: bool,
    pub total_dissipation: bool,
    /// Largest dyadic level `j` of the MOC shifts `2^j Δx`; all levels when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_max_level: Option<u32>,
}

impl Default for DiagnosticsToggles {
    fn default() -> Self {
        Self {
            moc_ratio: true,
            total_dissipation: true,
            shift_max_level: None,
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

fn default_ceiling() -> f64 {
    DEFAULT_GRADIENT_CEILING
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{field}: {msg}"))
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        Grid::new(self.grid_n).map_err(|e| field_error("grid_n", e))?;
        if !(self.alpha1 >= 0.0 && self.alpha1.is_finite()) {
            return Err(field_error(
                "alpha1",
                format!("must be a finite number ≥ 0, got {}", self.alpha1),
            ));
        }
        if !(self.alpha2 >= 0.0 && self.alpha2.is_finite()) {
            return Err(field_error(
                "alpha2",
                format!("must be a finite number ≥ 0, got {}", self.alpha2),
            ));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(field_error("beta", format!("must be positive, got {}", self.beta)));
        }
        self.triple().map_err(|e| field_error("r_cap", e))?;
        InitialData::from_spec(&self.theta0)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(field_error("t_end", format!("must be ≥ 0, got {}", self.t_end)));
        }
        if !(self.cfl_factor > 0.0 && self.cfl_factor <= 1.0) {
            return Err(field_error(
                "cfl_factor",
                format!("must lie in (0, 1], got {}", self.cfl_factor),
            ));
        }
        if !(self.record_dt > 0.0 && self.record_dt.is_finite()) {
            return Err(field_error(
                "record_dt",
                format!("must be positive, got {}", self.record_dt),
            ));
        }
        if let Some(dt) = self.dt_max {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(field_error("dt_max", format!("must be positive, got {dt}")));
            }
        }
        if let Some(dt) = self.snapshot_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(field_error("snapshot_dt", format!("must be positive, got {dt}")));
            }
        }
        if !(self.gradient_ceiling > 0.0) {
            return Err(field_error(
                "gradient_ceiling",
                format!("must be positive, got {}", self.gradient_ceiling),
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid_n)
    }

    pub fn triple(&self) -> Result<SymbolTriple> {
        SymbolTriple::new(self.alpha1, self.alpha2, self.beta, self.r_cap)
    }

    pub fn initial_data(&self) -> Result<InitialData> {
        InitialData::from_spec(&self.theta0)
    }

    pub fn stepper_config(&self) -> Result<StepperConfig> {
        Ok(StepperConfig {
            triple: self.triple()?,
            cfl_factor: self.cfl_factor,
            dt_max: self.dt_max.unwrap_or(self.record_dt),
            dealias: self.dealias,
            transport: self.transport,
            gradient_ceiling: self.gradient_ceiling,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> serde_json::Value {
        json!({
            "grid_n": 64,
            "alpha1": 0.0,
            "alpha2": 0.0,
            "beta": 1.0,
            "theta0": {"kind": "random", "params": {"k_max": 4}, "seed": 3},
            "t_end": 0.5,
            "record_dt": 0.1
        })
    }

    #[test]
    fn defaults_fill_in() {
        let cfg = ScenarioConfig::from_json(&base().to_string()).unwrap();
        assert_eq!(cfg.cfl_factor, 0.5);
        assert!(cfg.dealias && cfg.transport);
        assert_eq!(cfg.stepper_config().unwrap().dt_max, 0.1);
        assert_eq!(cfg.out_dir, PathBuf::from("out"));
    }

    #[test]
    fn negative_alpha_names_field() {
        let mut v = base();
        v["alpha1"] = json!(-1.0);
        let err = ScenarioConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("alpha1"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = base();
        v["colour"] = json!("blue");
        let err = ScenarioConfig::from_json(&v.to_string()).unwrap_err().to_string();
        assert!(err.contains("colour"), "{err}");
        let mut v = base();
        v["diagnostics"] = json!({"moc": false});
        assert!(ScenarioConfig::from_json(&v.to_string()).is_err());
    }

    #[test]
    fn bad_grid_and_cadence() {
        for (key, val) in [
            ("grid_n", json!(100)),
            ("record_dt", json!(0.0)),
            ("cfl_factor", json!(1.5)),
        ] {
            let mut v = base();
            v[key] = val;
            let err = ScenarioConfig::from_json(&v.to_string()).unwrap_err().to_string();
            assert!(err.contains(key), "{err}");
        }
    }
}
