use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rbffd::{IdwConfig, RbffdConfig};

/// Node spacing around the dendrite: `h_min` on its boundary, growing
/// linearly to `h_max` over `transition_radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpacingConfig {
    pub h_min: f64,
    pub h_max: f64,
    pub transition_radius: f64,
}

impl Default for SpacingConfig {
    fn default() -> Self {
        Self { h_min: 0.015, h_max: 0.095, transition_radius: 0.3 }
    }
}

/// Fill parameters; the fill seed is derived from [`SimConfig::seed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FillParams {
    pub candidates: usize,
    pub acceptance: f64,
}

impl Default for FillParams {
    fn default() -> Self {
        let d = crate::discretize::FillConfig::default();
        Self { candidates: d.candidates, acceptance: d.acceptance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    #[serde(rename = "R_m")]
    pub r_m: f64,
    #[serde(rename = "R_d")]
    pub r_d: f64,
    pub v_d: f64,
    pub dt: f64,
    #[serde(rename = "N_t")]
    pub n_t: usize,
    pub spacing: SpacingConfig,
    pub idw: IdwConfig,
    pub rbffd: RbffdConfig,
    pub fill: FillParams,
    pub seed: u64,
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
    /// Place the initial dendrite nodes at uniform angles, a multiple of four
    /// of them, starting on the x axis.
    pub symmetrize_initial: bool,
    /// Initial interior temperature; `null` starts from the steady state of
    /// the initial annulus.
    pub initial_temperature: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            r_m: 1.0,
            r_d: 0.1,
            v_d: 0.04,
            dt: 0.01,
            n_t: 500,
            spacing: SpacingConfig::default(),
            idw: IdwConfig::default(),
            rbffd: RbffdConfig::default(),
            fill: FillParams::default(),
            seed: 0,
            snapshot_every: 25,
            output_dir: PathBuf::from("sim_output"),
            symmetrize_initial: true,
            initial_temperature: None,
        }
    }
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInput(msg.to_string()));
        if !(self.r_d > 0.0 && self.r_d < self.r_m) {
            return bad("need 0 < R_d < R_m");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if self.n_t == 0 {
            return bad("N_t must be at least 1");
        }
        if !(self.v_d >= 0.0 && self.v_d.is_finite()) {
            return bad("v_d must be non-negative");
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1");
        }
        let s = &self.spacing;
        if !(s.h_min > 0.0 && s.h_min <= s.h_max && s.transition_radius > 0.0) {
            return bad("spacing needs 0 < h_min <= h_max and transition_radius > 0");
        }
        if let Some(t) = self.initial_temperature {
            if !t.is_finite() {
                return bad("initial_temperature must be finite");
            }
        }
        Ok(())
    }
}
