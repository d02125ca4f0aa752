//! Data reduction: from raw recordings to disappear-visibility samples.
//!
//! A fog test yields a [`Recording`] of laser returns synchronized with the
//! 1 Hz visibility trace. The pipeline mirrors the measurement protocol:
//!
//! 1. extract per-part laser ROIs from a clear-air reference recording,
//! 2. average each ROI beam's 10 Hz ranges into 1 Hz series,
//! 3. find the disappear visibility — the lowest visibility at which the
//!    averaged range stays on the true distance,
//! 4. assemble (mean range, reflectivity, v_dis) samples across tests.

use crate::atmosphere::VisibilityTrace;
use crate::lidar::{LaserReturn, SimConfig};
use crate::scene::{ReflectorClass, Scene};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Range agreement threshold of the lock test (m): 3x the sensor accuracy.
pub const DEFAULT_SIGMA: f64 = 0.15;
/// Seconds the lock must persist.
pub const DEFAULT_STABILITY_WINDOW: u32 = 5;
/// Clear-air range gate for ROI membership (m).
pub const DEFAULT_SIGMA_ROI: f64 = 0.3;

#[derive(Debug, Error)]
pub enum RecordingError {
    #[error("target `{0}` produced an empty ROI (not visible in clear air)")]
    EmptyRoi(String),
    #[error("target `{0}` not present in the recording's scene")]
    UnknownTarget(String),
    #[error("ROI extraction requires a clear-air reference recording")]
    NotClearReference,
    #[error("recording io: {0}")]
    Io(#[from] std::io::Error),
    #[error("recording format: {0}")]
    Format(String),
}

/// A full simulated (or replayed) test: returns, fog trace and ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recording {
    pub returns: Vec<LaserReturn>,
    pub trace: VisibilityTrace,
    pub scene: Scene,
    pub config: SimConfig,
    pub config_hash: String,
    pub seed: u64,
    pub clear_reference: bool,
}

/// Hash identifying a simulation setup (scene, config, trace, seed).
pub fn config_hash(scene: &Scene, cfg: &SimConfig, trace: &VisibilityTrace, seed: u64) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(scene).expect("scene serializes"));
    hasher.update(serde_json::to_vec(cfg).expect("config serializes"));
    hasher.update(serde_json::to_vec(trace).expect("trace serializes"));
    hasher.update(seed.to_le_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct JsonlHeader {
    config_hash: String,
    seed: u64,
    clear_reference: bool,
    scene: Scene,
    config: SimConfig,
    trace: VisibilityTrace,
}

#[derive(Serialize, Deserialize)]
struct JsonlReturn {
    t: f64,
    ring: u16,
    az: u16,
    range_m: f64,
    refl: f64,
}

impl Recording {
    /// Serialize as JSON Lines: a header record followed by one object per
    /// return `{t, ring, az, range_m, refl}`.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<(), RecordingError> {
        let header = JsonlHeader {
            config_hash: self.config_hash.clone(),
            seed: self.seed,
            clear_reference: self.clear_reference,
            scene: self.scene.clone(),
            config: self.config.clone(),
            trace: self.trace.clone(),
        };
        serde_json::to_writer(&mut w, &header).map_err(|e| RecordingError::Format(e.to_string()))?;
        writeln!(w)?;
        for r in &self.returns {
            let row = JsonlReturn {
                t: r.timestamp,
                ring: r.ring,
                az: r.azimuth_code,
                range_m: r.range,
                refl: r.reflectivity,
            };
            serde_json::to_writer(&mut w, &row).map_err(|e| RecordingError::Format(e.to_string()))?;
            writeln!(w)?;
        }
        Ok(())
    }

    /// Parse the JSON Lines format produced by [`Recording::write_jsonl`].
    pub fn read_jsonl<R: BufRead>(r: R) -> Result<Self, RecordingError> {
        let mut lines = r.lines();
        let header_line = lines
            .next()
            .ok_or_else(|| RecordingError::Format("missing header record".into()))??;
        let header: JsonlHeader = serde_json::from_str(&header_line)
            .map_err(|e| RecordingError::Format(format!("bad header record: {e}")))?;
        let mut returns = Vec::new();
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let row: JsonlReturn = serde_json::from_str(&line)
                .map_err(|e| RecordingError::Format(format!("bad return on line {}: {e}", i + 2)))?;
            returns.push(LaserReturn {
                ring: row.ring,
                azimuth_code: row.az,
                range: row.range_m,
                reflectivity: row.refl,
                timestamp: row.t,
            });
        }
        let (t0, t1) = (header.trace.t_start(), header.trace.t_end());
        if let Some(r) = returns.iter().find(|r| r.timestamp < t0 || r.timestamp > t1) {
            return Err(RecordingError::Format(format!(
                "return at t={} outside trace span [{t0}, {t1}]",
                r.timestamp
            )));
        }
        Ok(Recording {
            returns,
            trace: header.trace,
            scene: header.scene,
            config: header.config,
            config_hash: header.config_hash,
            seed: header.seed,
            clear_reference: header.clear_reference,
        })
    }

    /// CSV mirror of the returns (for plotting).
    pub fn write_returns_csv<W: Write>(&self, mut w: W) -> Result<(), RecordingError> {
        writeln!(w, "t,ring,az,range_m,refl")?;
        for r in &self.returns {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.timestamp, r.ring, r.azimuth_code, r.range, r.reflectivity
            )?;
        }
        Ok(())
    }
}

/// One beam of a laser ROI with its clear-air statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoiBeam {
    pub ring: u16,
    pub azimuth_code: u16,
    /// Mean clear-air range of this beam (m) — the beam's true distance.
    pub clear_range: f64,
    /// Mean clear-air reflectivity byte of this beam.
    pub clear_reflectivity: f64,
}

/// Beams striking one target part, with ground truth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaserRoi {
    pub target_id: String,
    pub part_id: String,
    pub beams: Vec<RoiBeam>,
    /// Placement range of the target (m).
    pub truth_range: f64,
}

/// Extract one ROI per visible part of `target_id` from a clear-air
/// reference.
///
/// A beam belongs to a part's ROI when its direction intersects the part's
/// extent and its mean clear-air range lies within `sigma_roi` of the target
/// placement. Parts left without beams are omitted; if no part is visible at
/// all the target yields [`RecordingError::EmptyRoi`].
pub fn extract_roi(
    clear: &Recording,
    target_id: &str,
    sigma_roi: f64,
) -> Result<Vec<LaserRoi>, RecordingError> {
    if !clear.clear_reference {
        return Err(RecordingError::NotClearReference);
    }
    let (t_idx, target) = clear
        .scene
        .targets
        .iter()
        .enumerate()
        .find(|(_, t)| t.target_id == target_id)
        .ok_or_else(|| RecordingError::UnknownTarget(target_id.to_string()))?;

    // Per-beam clear-air means.
    let mut stats: BTreeMap<(u16, u16), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &clear.returns {
        stats
            .entry((r.ring, r.azimuth_code))
            .or_default()
            .push((r.range, r.reflectivity));
    }

    let mut rois: Vec<LaserRoi> = Vec::new();
    for (p_idx, part) in target.parts.iter().enumerate() {
        let mut beams = Vec::new();
        for (&(ring, az), obs) in &stats {
            let ray = clear.config.lidar.beam_ray(ring, az);
            let hit = match clear.scene.intersect(&ray) {
                Some(h) if h.target == t_idx && h.part == p_idx => h,
                _ => continue,
            };
            let _ = hit;
            let (mean_range, mean_refl) = sorted_means(obs);
            if (mean_range - target.range).abs() <= sigma_roi {
                beams.push(RoiBeam {
                    ring,
                    azimuth_code: az,
                    clear_range: mean_range,
                    clear_reflectivity: mean_refl,
                });
            }
        }
        if !beams.is_empty() {
            rois.push(LaserRoi {
                target_id: target.target_id.clone(),
                part_id: part.part_id.clone(),
                beams,
                truth_range: target.range,
            });
        }
    }
    if rois.is_empty() {
        return Err(RecordingError::EmptyRoi(target_id.to_string()));
    }
    Ok(rois)
}

/// Mean of ranges and bytes in a canonical order, so the result is exactly
/// permutation-invariant.
fn sorted_means(obs: &[(f64, f64)]) -> (f64, f64) {
    let mut ranges: Vec<f64> = obs.iter().map(|o| o.0).collect();
    let mut refls: Vec<f64> = obs.iter().map(|o| o.1).collect();
    ranges.sort_by(f64::total_cmp);
    refls.sort_by(f64::total_cmp);
    let n = obs.len() as f64;
    (ranges.iter().sum::<f64>() / n, refls.iter().sum::<f64>() / n)
}

/// Per-second averages of one beam's detections.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedSeries {
    pub ring: u16,
    pub azimuth_code: u16,
    /// (whole second, mean range, mean reflectivity, visibility at that second).
    pub values: Vec<(i64, f64, f64, f64)>,
}

/// Average each ROI beam's detections over whole seconds.
///
/// The mean covers whatever was detected that second — clutter included —
/// and seconds without any detection yield no tuple.
pub fn per_second_average(recording: &Recording, roi: &LaserRoi) -> Vec<AveragedSeries> {
    let beams: BTreeSet<(u16, u16)> =
        roi.beams.iter().map(|b| (b.ring, b.azimuth_code)).collect();
    let mut grouped: BTreeMap<(u16, u16), BTreeMap<i64, Vec<(f64, f64)>>> = BTreeMap::new();
    for r in &recording.returns {
        let key = (r.ring, r.azimuth_code);
        if beams.contains(&key) {
            grouped
                .entry(key)
                .or_default()
                .entry(r.timestamp.floor() as i64)
                .or_default()
                .push((r.range, r.reflectivity));
        }
    }
    roi.beams
        .iter()
        .map(|b| {
            let values = grouped
                .get(&(b.ring, b.azimuth_code))
                .map(|per_sec| {
                    per_sec
                        .iter()
                        .filter_map(|(&sec, obs)| {
                            let (r_mean, refl_mean) = sorted_means(obs);
                            recording
                                .trace
                                .visibility_at_second(sec)
                                .map(|v| (sec, r_mean, refl_mean, v))
                        })
                        .collect()
                })
                .unwrap_or_default();
            AveragedSeries { ring: b.ring, azimuth_code: b.azimuth_code, values }
        })
        .collect()
}

/// Disappear visibility of one averaged series.
///
/// Finds the earliest second `t*` such that for every second in
/// `[t*, t* + window)` a tuple exists and its mean range lies within `sigma`
/// of the true distance, then reports the visibility at `t*`. Returns `None`
/// when no such second exists. `window = 1` is the literal first-crossing
/// rule.
pub fn disappear_visibility(
    series: &AveragedSeries,
    truth_range: f64,
    sigma: f64,
    window: u32,
) -> Option<f64> {
    debug_assert!(sigma > 0.0 && window >= 1);
    lock_second(series, truth_range, sigma, window).map(|i| series.values[i].3)
}

/// Index of the lock second within the series, if any.
pub fn lock_second(
    series: &AveragedSeries,
    truth_range: f64,
    sigma: f64,
    window: u32,
) -> Option<usize> {
    let vals = &series.values;
    let w = window as usize;
    'outer: for start in 0..vals.len() {
        if vals.len() - start < w {
            return None;
        }
        let t_star = vals[start].0;
        for k in 0..w {
            let (sec, r_mean, _, _) = vals[start + k];
            // consecutive seconds must all carry a tuple
            if sec != t_star + k as i64 || (r_mean - truth_range).abs() >= sigma {
                continue 'outer;
            }
        }
        return Some(start);
    }
    None
}

/// One training/evaluation triple with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisappearSample {
    /// Clear-air mean range of the beam (m).
    pub mean_range: f64,
    /// Clear-air mean reflectivity byte of the beam.
    pub reflectivity: f64,
    /// Disappear visibility (m).
    pub v_dis: f64,
    pub target_id: String,
    pub part_id: String,
    pub ring: u16,
    pub azimuth_code: u16,
}

impl DisappearSample {
    pub fn reflector_class(&self) -> ReflectorClass {
        ReflectorClass::from_byte(self.reflectivity)
    }
}

/// Per-beam extraction trace for the log file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LockLogEntry {
    pub recording: usize,
    pub target_id: String,
    pub part_id: String,
    pub ring: u16,
    pub azimuth_code: u16,
    pub clear_range: f64,
    pub clear_reflectivity: f64,
    /// Second at which the lock was established, if any.
    pub lock_second: Option<i64>,
    pub v_dis: Option<f64>,
}

/// Result of dataset assembly.
#[derive(Clone, Debug, Default)]
pub struct DatasetBuild {
    pub samples: Vec<DisappearSample>,
    pub lock_log: Vec<LockLogEntry>,
    /// Targets that produced empty ROIs, with their recording index.
    pub warnings: Vec<String>,
}

/// Assemble disappear-visibility samples from (fog, clear-reference) pairs.
///
/// One sample per ROI beam with a defined disappear visibility; beams that
/// never lock contribute no sample. Samples are keyed by
/// (recording, ring, azimuth) and emitted in that deterministic order.
pub fn assemble_dataset(
    pairs: &[(&Recording, &Recording)],
    sigma: f64,
    window: u32,
    sigma_roi: f64,
) -> DatasetBuild {
    let mut build = DatasetBuild::default();
    for (rec_idx, (fog, clear)) in pairs.iter().enumerate() {
        for target in &clear.scene.targets {
            let rois = match extract_roi(clear, &target.target_id, sigma_roi) {
                Ok(r) => r,
                Err(e) => {
                    build.warnings.push(format!("recording {rec_idx}: {e}"));
                    continue;
                }
            };
            for roi in rois {
                let series = per_second_average(fog, &roi);
                for (beam, s) in roi.beams.iter().zip(series.iter()) {
                    let lock = lock_second(s, beam.clear_range, sigma, window);
                    let v_dis = lock.map(|i| s.values[i].3);
                    build.lock_log.push(LockLogEntry {
                        recording: rec_idx,
                        target_id: roi.target_id.clone(),
                        part_id: roi.part_id.clone(),
                        ring: beam.ring,
                        azimuth_code: beam.azimuth_code,
                        clear_range: beam.clear_range,
                        clear_reflectivity: beam.clear_reflectivity,
                        lock_second: lock.map(|i| s.values[i].0),
                        v_dis,
                    });
                    if let Some(v) = v_dis {
                        build.samples.push(DisappearSample {
                            mean_range: beam.clear_range,
                            reflectivity: beam.clear_reflectivity,
                            v_dis: v,
                            target_id: roi.target_id.clone(),
                            part_id: roi.part_id.clone(),
                            ring: beam.ring,
                            azimuth_code: beam.azimuth_code,
                        });
                    }
                }
            }
        }
    }
    build
}

/// Partition samples into diffuse (byte < 100) and retro (byte >= 100).
pub fn split_by_class(
    samples: &[DisappearSample],
) -> (Vec<DisappearSample>, Vec<DisappearSample>) {
    samples
        .iter()
        .cloned()
        .partition(|s| s.reflector_class() == ReflectorClass::Diffuse)
}

/// Dataset CSV: `range_m,reflectivity,v_dis_m,target,part,ring,az`.
pub fn write_dataset_csv<W: Write>(samples: &[DisappearSample], mut w: W) -> Result<(), RecordingError> {
    writeln!(w, "range_m,reflectivity,v_dis_m,target,part,ring,az")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            s.mean_range, s.reflectivity, s.v_dis, s.target_id, s.part_id, s.ring, s.azimuth_code
        )?;
    }
    Ok(())
}

/// Parse the dataset CSV format.
pub fn read_dataset_csv<R: BufRead>(r: R) -> Result<Vec<DisappearSample>, RecordingError> {
    let mut samples = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if i == 0 {
            if line != "range_m,reflectivity,v_dis_m,target,part,ring,az" {
                return Err(RecordingError::Format(format!("unexpected dataset header `{line}`")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(RecordingError::Format(format!("bad dataset row on line {}", i + 1)));
        }
        let parse_f = |s: &str, what: &str| -> Result<f64, RecordingError> {
            s.parse()
                .map_err(|_| RecordingError::Format(format!("bad {what} on line {}", i + 1)))
        };
        samples.push(DisappearSample {
            mean_range: parse_f(fields[0], "range_m")?,
            reflectivity: parse_f(fields[1], "reflectivity")?,
            v_dis: parse_f(fields[2], "v_dis_m")?,
            target_id: fields[3].to_string(),
            part_id: fields[4].to_string(),
            ring: fields[5]
                .parse()
                .map_err(|_| RecordingError::Format(format!("bad ring on line {}", i + 1)))?,
            azimuth_code: fields[6]
                .parse()
                .map_err(|_| RecordingError::Format(format!("bad az on line {}", i + 1)))?,
        });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lidar::{simulate_clear_reference, SimConfig};
    use crate::scene::{build_scene, SceneConfig, TargetConfig};
    use approx::assert_relative_eq;

    fn scene_cfg(targets: Vec<(&str, f64, f64)>) -> SceneConfig {
        SceneConfig {
            targets: targets
                .into_iter()
                .map(|(t, r, o)| TargetConfig {
                    template: t.into(),
                    range_m: r,
                    offset_m: o,
                    height_m: None,
                })
                .collect(),
            chamber_length_m: 30.0,
        }
    }

    fn series(values: Vec<(i64, f64, f64, f64)>) -> AveragedSeries {
        AveragedSeries { ring: 3, azimuth_code: 40, values }
    }

    #[test]
    fn roi_beams_match_placement_range() {
        let scene = build_scene(&scene_cfg(vec![("board_b", 15.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (-5.0, 5.0);
        let clear = simulate_clear_reference(&scene, &cfg, 11, 5).unwrap();
        let rois = extract_roi(&clear, "board_b_0", DEFAULT_SIGMA_ROI).unwrap();
        assert_eq!(rois.len(), 1);
        let roi = &rois[0];
        assert!(!roi.beams.is_empty());
        for b in &roi.beams {
            assert!(
                (b.clear_range - 15.0).abs() <= DEFAULT_SIGMA_ROI,
                "beam range {} outside gate",
                b.clear_range
            );
        }
    }

    #[test]
    fn roi_requires_clear_reference_and_known_target() {
        let scene = build_scene(&scene_cfg(vec![("board_b", 15.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (-5.0, 5.0);
        let clear = simulate_clear_reference(&scene, &cfg, 11, 5).unwrap();
        assert!(matches!(
            extract_roi(&clear, "board_a_0", DEFAULT_SIGMA_ROI),
            Err(RecordingError::UnknownTarget(_))
        ));
        let mut fake_fog = clear.clone();
        fake_fog.clear_reference = false;
        assert!(matches!(
            extract_roi(&fake_fog, "board_b_0", DEFAULT_SIGMA_ROI),
            Err(RecordingError::NotClearReference)
        ));
    }

    #[test]
    fn roi_empty_when_target_out_of_window() {
        // Window looks away from the target: nothing is recorded for it.
        let scene = build_scene(&scene_cfg(vec![("board_b", 15.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (30.0, 60.0);
        let clear = simulate_clear_reference(&scene, &cfg, 11, 5).unwrap();
        assert!(matches!(
            extract_roi(&clear, "board_b_0", DEFAULT_SIGMA_ROI),
            Err(RecordingError::EmptyRoi(_))
        ));
    }

    #[test]
    fn car_roi_has_retro_plate_part() {
        let scene = build_scene(&scene_cfg(vec![("car", 10.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (-8.0, 8.0);
        let clear = simulate_clear_reference(&scene, &cfg, 13, 5).unwrap();
        let rois = extract_roi(&clear, "car_0", DEFAULT_SIGMA_ROI).unwrap();
        assert!(rois.len() >= 3, "expected plate/strong/weak ROIs, got {}", rois.len());
        let plate = rois.iter().find(|r| r.part_id == "plate").expect("plate ROI");
        for b in &plate.beams {
            assert!(b.clear_reflectivity > 100.0, "plate byte {}", b.clear_reflectivity);
        }
    }

    fn synthetic_recording(returns: Vec<LaserReturn>, trace: VisibilityTrace) -> Recording {
        let scene = build_scene(&scene_cfg(vec![])).unwrap();
        let cfg = SimConfig::default();
        let hash = config_hash(&scene, &cfg, &trace, 0);
        Recording {
            returns,
            trace,
            scene,
            config: cfg,
            config_hash: hash,
            seed: 0,
            clear_reference: false,
        }
    }

    fn flat_trace(v: f64, secs: u64) -> VisibilityTrace {
        VisibilityTrace::new((0..=secs).map(|t| (t as f64, v)).collect()).unwrap()
    }

    fn roi_of_beam(ring: u16, az: u16) -> LaserRoi {
        LaserRoi {
            target_id: "t".into(),
            part_id: "p".into(),
            beams: vec![RoiBeam { ring, azimuth_code: az, clear_range: 15.0, clear_reflectivity: 20.0 }],
            truth_range: 15.0,
        }
    }

    #[test]
    fn per_second_mean_of_identical_returns() {
        let returns: Vec<LaserReturn> = (0..10)
            .map(|f| LaserReturn {
                ring: 1,
                azimuth_code: 2,
                range: 15.0,
                reflectivity: 20.0,
                timestamp: f as f64 / 10.0,
            })
            .collect();
        let rec = synthetic_recording(returns, flat_trace(50.0, 2));
        let series = per_second_average(&rec, &roi_of_beam(1, 2));
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].values, vec![(0, 15.0, 20.0, 50.0)]);
    }

    #[test]
    fn per_second_mean_of_alternating_returns() {
        let returns: Vec<LaserReturn> = (0..10)
            .map(|f| LaserReturn {
                ring: 1,
                azimuth_code: 2,
                range: if f % 2 == 0 { 14.9 } else { 15.1 },
                reflectivity: 20.0,
                timestamp: f as f64 / 10.0,
            })
            .collect();
        let rec = synthetic_recording(returns, flat_trace(50.0, 2));
        let series = per_second_average(&rec, &roi_of_beam(1, 2));
        assert_relative_eq!(series[0].values[0].1, 15.0, epsilon = 1e-12);
    }

    #[test]
    fn per_second_mean_averages_clutter_mix() {
        let ranges = [5.1, 5.2, 15.0];
        let returns: Vec<LaserReturn> = ranges
            .iter()
            .enumerate()
            .map(|(i, &r)| LaserReturn {
                ring: 1,
                azimuth_code: 2,
                range: r,
                reflectivity: 1.0,
                timestamp: i as f64 / 10.0,
            })
            .collect();
        let rec = synthetic_recording(returns, flat_trace(30.0, 2));
        let series = per_second_average(&rec, &roi_of_beam(1, 2));
        assert_relative_eq!(series[0].values[0].1, 8.433333333333334, epsilon = 1e-12);
    }

    #[test]
    fn per_second_gap_when_no_detection() {
        let returns = vec![
            LaserReturn { ring: 1, azimuth_code: 2, range: 15.0, reflectivity: 1.0, timestamp: 0.1 },
            LaserReturn { ring: 1, azimuth_code: 2, range: 15.0, reflectivity: 1.0, timestamp: 2.4 },
        ];
        let rec = synthetic_recording(returns, flat_trace(30.0, 3));
        let series = per_second_average(&rec, &roi_of_beam(1, 2));
        let secs: Vec<i64> = series[0].values.iter().map(|v| v.0).collect();
        assert_eq!(secs, vec![0, 2]);
    }

    #[test]
    fn disappear_immediate_lock_reads_first_visibility() {
        let s = series((0..10).map(|t| (t, 15.0, 5.0, 10.0 + t as f64)).collect());
        assert_eq!(disappear_visibility(&s, 15.0, DEFAULT_SIGMA, 5), Some(10.0));
    }

    #[test]
    fn disappear_none_when_never_within_sigma() {
        let s = series((0..10).map(|t| (t, 8.0, 5.0, 10.0 + t as f64)).collect());
        assert_eq!(disappear_visibility(&s, 15.0, DEFAULT_SIGMA, 5), None);
    }

    #[test]
    fn disappear_requires_consecutive_window() {
        // lock at t=3 fails because second 5 is missing; next full window starts at 6
        let mut vals: Vec<(i64, f64, f64, f64)> = vec![
            (0, 5.0, 1.0, 10.0),
            (1, 5.0, 1.0, 12.0),
            (2, 5.0, 1.0, 14.0),
            (3, 15.0, 1.0, 16.0),
            (4, 15.05, 1.0, 18.0),
        ];
        vals.extend((6..=12).map(|t| (t, 15.0, 1.0, 20.0 + t as f64)));
        let s = series(vals);
        assert_eq!(disappear_visibility(&s, 15.0, DEFAULT_SIGMA, 5), Some(26.0));
    }

    #[test]
    fn disappear_monotone_in_sigma() {
        let vals: Vec<(i64, f64, f64, f64)> =
            (0..20).map(|t| (t, 15.0 - 2.0 / (t as f64 + 1.0), 1.0, 10.0 + t as f64)).collect();
        let s = series(vals);
        let tight = disappear_visibility(&s, 15.0, 0.1, 3);
        let loose = disappear_visibility(&s, 15.0, 0.8, 3);
        match (tight, loose) {
            (Some(t), Some(l)) => assert!(l <= t),
            (None, _) => {}
            (Some(_), None) => panic!("loosening sigma lost the lock"),
        }
    }

    #[test]
    fn split_by_class_boundary() {
        let mk = |refl: f64| DisappearSample {
            mean_range: 15.0,
            reflectivity: refl,
            v_dis: 40.0,
            target_id: "t".into(),
            part_id: "p".into(),
            ring: 0,
            azimuth_code: 0,
        };
        let samples: Vec<DisappearSample> =
            vec![mk(99.9), mk(100.0), mk(3.0), mk(250.0), mk(45.0)];
        let (diffuse, retro) = split_by_class(&samples);
        assert_eq!(diffuse.len() + retro.len(), samples.len());
        assert!(diffuse.iter().all(|s| s.reflectivity < 100.0));
        assert!(retro.iter().all(|s| s.reflectivity >= 100.0));
        assert_eq!(diffuse.len(), 3);
    }

    #[test]
    fn dataset_csv_round_trip() {
        let samples = vec![
            DisappearSample {
                mean_range: 15.04,
                reflectivity: 2.9,
                v_dis: 44.2,
                target_id: "board_a_0".into(),
                part_id: "board".into(),
                ring: 16,
                azimuth_code: 12,
            },
            DisappearSample {
                mean_range: 10.01,
                reflectivity: 209.0,
                v_dis: 14.0,
                target_id: "traffic_sign_2_0".into(),
                part_id: "sign".into(),
                ring: 18,
                azimuth_code: 1795,
            },
        ];
        let mut buf = Vec::new();
        write_dataset_csv(&samples, &mut buf).unwrap();
        let back = read_dataset_csv(&buf[..]).unwrap();
        assert_eq!(samples, back);
    }

    #[test]
    fn jsonl_round_trip() {
        let scene = build_scene(&scene_cfg(vec![("board_c", 10.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (-4.0, 4.0);
        let rec = simulate_clear_reference(&scene, &cfg, 21, 3).unwrap();
        let mut buf = Vec::new();
        rec.write_jsonl(&mut buf).unwrap();
        let back = Recording::read_jsonl(&buf[..]).unwrap();
        assert_eq!(rec, back);
    }

    #[test]
    fn assemble_counts_locking_beams() {
        // Synthetic: craft a fog recording in which every ROI beam locks.
        let scene = build_scene(&scene_cfg(vec![("board_c", 10.0, 0.0)])).unwrap();
        let mut cfg = SimConfig::default();
        cfg.lidar.azimuth_window_deg = (-4.0, 4.0);
        let clear = simulate_clear_reference(&scene, &cfg, 31, 5).unwrap();
        let rois = extract_roi(&clear, "board_c_0", DEFAULT_SIGMA_ROI).unwrap();
        let n_beams: usize = rois.iter().map(|r| r.beams.len()).sum();

        let trace = flat_trace(80.0, 12);
        let mut returns = Vec::new();
        for roi in &rois {
            for b in &roi.beams {
                for sec in 0..12 {
                    returns.push(LaserReturn {
                        ring: b.ring,
                        azimuth_code: b.azimuth_code,
                        range: b.clear_range,
                        reflectivity: b.clear_reflectivity,
                        timestamp: sec as f64 + 0.05,
                    });
                }
            }
        }
        let mut fog = synthetic_recording(returns, trace);
        fog.scene = scene;
        fog.config = cfg;

        let build = assemble_dataset(
            &[(&fog, &clear)],
            DEFAULT_SIGMA,
            DEFAULT_STABILITY_WINDOW,
            DEFAULT_SIGMA_ROI,
        );
        assert_eq!(build.samples.len(), n_beams);
        assert!(build.warnings.is_empty());
        assert!(build.samples.iter().all(|s| s.v_dis == 80.0));
    }
}
