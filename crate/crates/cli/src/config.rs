//! Run configuration: a JSON file merged under the command-line flags.

use crate::CliError;
use fogsim_core::lidar::{LidarConfig, SimConfig};
use fogsim_core::recording::{DEFAULT_SIGMA, DEFAULT_SIGMA_ROI, DEFAULT_STABILITY_WINDOW};
use serde::Deserialize;
use std::path::{Path, PathBuf};

/// Fog-trace source: either replay a measured CSV or synthesize a
/// dissipation profile from parameters.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TraceSpec {
    /// Replay this `t_s,visibility_m` CSV instead of synthesizing.
    pub csv: Option<PathBuf>,
    pub v_start: f64,
    pub v_end: f64,
    pub duration_s: u64,
    pub noise_std: f64,
}

impl Default for TraceSpec {
    fn default() -> Self {
        TraceSpec { csv: None, v_start: 10.0, v_end: 300.0, duration_s: 300, noise_std: 0.5 }
    }
}

/// Hyperparameter-training knobs.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GprParams {
    pub starts: Option<u32>,
    pub cap: Option<usize>,
    /// Held-out fraction of the dataset used for evaluation.
    pub eval_fraction: Option<f64>,
}

/// JSON pipeline configuration. Every field is optional; command-line flags
/// take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Named scenario preset (see `presets`).
    pub preset: Option<String>,
    /// Path to a single scene JSON (alternative to `preset`).
    pub scene: Option<PathBuf>,
    pub trace: Option<TraceSpec>,
    /// Sensor overrides; unspecified fields keep their defaults.
    pub lidar: Option<LidarConfig>,
    pub koschmieder: Option<f64>,
    pub wetness_gain: Option<f64>,
    pub wetness_v_scale: Option<f64>,
    /// Lock threshold on the averaged range (m).
    pub sigma: Option<f64>,
    /// Lock stability window (s).
    pub window: Option<u32>,
    /// Clear-air ROI range gate (m).
    pub sigma_roi: Option<f64>,
    pub gpr: Option<GprParams>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read config {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::Validation(format!("config {}: {e}", path.display()))
        })
    }

    /// Simulation parameters with this config's overrides applied.
    pub fn sim_config(&self) -> SimConfig {
        let mut cfg = SimConfig::default();
        if let Some(lidar) = &self.lidar {
            cfg.lidar = lidar.clone();
        }
        if let Some(k) = self.koschmieder {
            cfg.koschmieder = k;
        }
        if let Some(g) = self.wetness_gain {
            cfg.wetness_gain = g;
        }
        if let Some(v) = self.wetness_v_scale {
            cfg.wetness_v_scale = v;
        }
        cfg
    }

    pub fn sigma(&self) -> f64 {
        self.sigma.unwrap_or(DEFAULT_SIGMA)
    }

    pub fn window(&self) -> u32 {
        self.window.unwrap_or(DEFAULT_STABILITY_WINDOW)
    }

    pub fn sigma_roi(&self) -> f64 {
        self.sigma_roi.unwrap_or(DEFAULT_SIGMA_ROI)
    }
}
