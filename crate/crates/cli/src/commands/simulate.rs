//! `fogsim simulate`: run the configured scenarios and write recordings.

use super::{ensure_dir, sha256_hex, write_bytes};
use crate::config::{RunConfig, TraceSpec};
use crate::presets::{self, Scenario};
use crate::{runtime, CliError};
use fogsim_core::atmosphere::{dissipation_profile, VisibilityTrace};
use fogsim_core::lidar::{simulate_clear_reference, simulate_test, SimConfig};
use fogsim_core::rng::StreamKey;
use fogsim_core::scene::{build_scene, SceneConfig};
use serde::{Deserialize, Serialize};
use std::io::BufReader;
use std::path::{Path, PathBuf};

/// Duration of the clear-air reference recordings (s).
const CLEAR_REFERENCE_SECONDS: u64 = 5;
/// Margin added around the scene's angular footprint (degrees).
const WINDOW_MARGIN_DEG: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct SimulateArgs {
    pub config: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
    /// Also write CSV mirrors of every recording.
    pub csv_mirror: bool,
}

/// Per-scenario manifest entry with content hashes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub scenario: String,
    pub clear: String,
    pub fog: String,
    pub sha256_clear: String,
    pub sha256_fog: String,
}

/// Manifest written next to the recordings; replaying the same config and
/// seed reproduces it byte for byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub source: String,
    pub outputs: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Validation(format!("cannot read manifest {}: {e}", path.display()))
        })?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("manifest {}: {e}", path.display())))
    }
}

fn resolve_scenarios(config: &RunConfig) -> Result<(String, Vec<Scenario>), CliError> {
    match (&config.preset, &config.scene) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "config names both `preset` and `scene`; pick one".into(),
        )),
        (Some(preset), None) => Ok((format!("preset:{preset}"), presets::resolve(preset)?)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read scene {}: {e}", path.display()))
            })?;
            let scene_cfg: SceneConfig = serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("scene {}: {e}", path.display())))?;
            let scene = build_scene(&scene_cfg)
                .map_err(|e| CliError::Validation(format!("scene {}: {e}", path.display())))?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "scene".into());
            Ok((format!("scene:{}", path.display()), vec![Scenario { name, scene }]))
        }
        (None, None) => Err(CliError::Validation(
            "config must name a `preset` or a `scene` file".into(),
        )),
    }
}

fn scenario_trace(
    spec: &TraceSpec,
    replayed: &Option<VisibilityTrace>,
    scenario_key: StreamKey,
) -> Result<VisibilityTrace, CliError> {
    if let Some(trace) = replayed {
        return Ok(trace.clone());
    }
    let mut rng = scenario_key.child(1).rng();
    dissipation_profile(spec.v_start, spec.v_end, spec.duration_s, spec.noise_std, &mut rng)
        .map_err(|e| CliError::Validation(format!("trace parameters: {e}")))
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    // Validate everything up front so a bad config leaves no partial output.
    let (source, scenarios) = resolve_scenarios(&args.config)?;
    let trace_spec = args.config.trace.clone().unwrap_or_default();
    let replayed = match &trace_spec.csv {
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| {
                CliError::Validation(format!("cannot read trace {}: {e}", path.display()))
            })?;
            Some(
                VisibilityTrace::read_csv(BufReader::new(file))
                    .map_err(|e| CliError::Validation(format!("trace {}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let base_cfg = args.config.sim_config();
    base_cfg.lidar.validate().map_err(|e| CliError::Validation(e.to_string()))?;
    let auto_window =
        base_cfg.lidar.azimuth_window_deg == SimConfig::default().lidar.azimuth_window_deg;

    ensure_dir(&args.out)?;
    let root = StreamKey::root(args.seed);
    let mut outputs = Vec::with_capacity(scenarios.len());
    for (idx, scenario) in scenarios.iter().enumerate() {
        let mut cfg = base_cfg.clone();
        if auto_window {
            cfg.lidar.azimuth_window_deg = presets::azimuth_window(&scenario.scene, WINDOW_MARGIN_DEG);
        }
        let key = root.child(idx as u64);
        let trace = scenario_trace(&trace_spec, &replayed, key)?;
        // One seed for both recordings of a scenario: the surface-texture
        // realization must be identical in the reference and under fog.
        let scenario_seed = key.child(0).rng().next_u64();

        let clear =
            simulate_clear_reference(&scenario.scene, &cfg, scenario_seed, CLEAR_REFERENCE_SECONDS)
                .map_err(runtime)?;
        let fog = simulate_test(&scenario.scene, &trace, &cfg, scenario_seed).map_err(runtime)?;

        let clear_name = format!("{}_clear.jsonl", scenario.name);
        let fog_name = format!("{}_fog.jsonl", scenario.name);
        let mut clear_bytes = Vec::new();
        clear.write_jsonl(&mut clear_bytes).map_err(runtime)?;
        let mut fog_bytes = Vec::new();
        fog.write_jsonl(&mut fog_bytes).map_err(runtime)?;
        write_bytes(&args.out.join(&clear_name), &clear_bytes)?;
        write_bytes(&args.out.join(&fog_name), &fog_bytes)?;
        if args.csv_mirror {
            let mut csv = Vec::new();
            fog.write_returns_csv(&mut csv).map_err(runtime)?;
            write_bytes(&args.out.join(format!("{}_fog.csv", scenario.name)), &csv)?;
        }
        outputs.push(ManifestEntry {
            scenario: scenario.name.clone(),
            clear: clear_name,
            fog: fog_name,
            sha256_clear: sha256_hex(&clear_bytes),
            sha256_fog: sha256_hex(&fog_bytes),
        });
        eprintln!(
            "simulated {}: {} fog returns, {} clear returns",
            scenario.name,
            fog.returns.len(),
            clear.returns.len()
        );
    }

    let manifest = Manifest { seed: args.seed, source, outputs };
    let json = serde_json::to_string_pretty(&manifest).map_err(runtime)?;
    write_bytes(&args.out.join("manifest.json"), format!("{json}\n").as_bytes())?;
    Ok(())
}
