//! `fogsim extract`: reduce recordings to the disappear-visibility dataset.

use super::simulate::Manifest;
use super::{ensure_dir, write_bytes};
use crate::{runtime, CliError};
use fogsim_core::recording::{
    assemble_dataset, extract_roi, write_dataset_csv, LaserRoi, Recording,
};
use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct ExtractArgs {
    /// Manifest written by `simulate` (or a directory containing one).
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub sigma: f64,
    pub window: u32,
    pub sigma_roi: f64,
}

fn load_recording(dir: &Path, name: &str) -> Result<Recording, CliError> {
    let path = dir.join(name);
    let file = std::fs::File::open(&path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    Recording::read_jsonl(BufReader::new(file))
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

pub fn run(args: &ExtractArgs) -> Result<(), CliError> {
    let manifest_path = if args.manifest.is_dir() {
        args.manifest.join("manifest.json")
    } else {
        args.manifest.clone()
    };
    let manifest = Manifest::load(&manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();

    let mut pairs_owned = Vec::with_capacity(manifest.outputs.len());
    for entry in &manifest.outputs {
        let clear = load_recording(&dir, &entry.clear)?;
        let fog = load_recording(&dir, &entry.fog)?;
        pairs_owned.push((fog, clear, entry.scenario.clone()));
    }

    ensure_dir(&args.out)?;

    // Per-scenario ROI files.
    for (_, clear, scenario) in &pairs_owned {
        let mut rois: Vec<LaserRoi> = Vec::new();
        for target in &clear.scene.targets {
            match extract_roi(clear, &target.target_id, args.sigma_roi) {
                Ok(mut r) => rois.append(&mut r),
                Err(e) => eprintln!("warning: {scenario}: {e}"),
            }
        }
        let json = serde_json::to_string_pretty(&rois).map_err(runtime)?;
        write_bytes(&args.out.join(format!("rois_{scenario}.json")), format!("{json}\n").as_bytes())?;
    }

    let pairs: Vec<(&Recording, &Recording)> =
        pairs_owned.iter().map(|(fog, clear, _)| (fog, clear)).collect();
    let build = assemble_dataset(&pairs, args.sigma, args.window, args.sigma_roi);
    for w in &build.warnings {
        eprintln!("warning: {w}");
    }

    let mut dataset_bytes = Vec::new();
    write_dataset_csv(&build.samples, &mut dataset_bytes).map_err(runtime)?;
    write_bytes(&args.out.join("dataset.csv"), &dataset_bytes)?;

    // Per-beam lock log.
    let mut log = String::from(
        "scenario,target,part,ring,az,clear_range_m,clear_refl,lock_t_s,v_dis_m\n",
    );
    for entry in &build.lock_log {
        let scenario = &pairs_owned[entry.recording].2;
        let _ = writeln!(
            log,
            "{},{},{},{},{},{},{},{},{}",
            scenario,
            entry.target_id,
            entry.part_id,
            entry.ring,
            entry.azimuth_code,
            entry.clear_range,
            entry.clear_reflectivity,
            entry.lock_second.map_or(String::new(), |s| s.to_string()),
            entry.v_dis.map_or(String::new(), |v| v.to_string()),
        );
    }
    write_bytes(&args.out.join("extraction_log.csv"), log.as_bytes())?;

    eprintln!(
        "extracted {} samples from {} recordings ({} beams tracked)",
        build.samples.len(),
        pairs.len(),
        build.lock_log.len()
    );
    Ok(())
}
