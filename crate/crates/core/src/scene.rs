//! Test scenes: calibrated boards, a dummy model, a car and traffic signs.
//!
//! Targets are axis-aligned planar rectangles facing the sensor, placed at a
//! range along the boresight with a lateral offset and a base height. A target
//! is split into parts stacked bottom-to-top, each with its own surface
//! reflectivity distribution (byte scale, 0-255). Bytes below 100 mark diffuse
//! reflectors, 100 and above retro-reflectors.
//!
//! The built-in template table is documented in `docs/targets.md`.

use crate::rng::DetRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Chamber length when the scene config does not override it (m).
pub const DEFAULT_CHAMBER_LENGTH: f64 = 30.0;

/// Byte value separating diffuse from retro-reflective surfaces.
pub const RETRO_THRESHOLD: f64 = 100.0;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("unknown target template `{0}`")]
    UnknownTemplate(String),
    #[error("target `{id}` at {range} m is outside the chamber (0, {chamber}]")]
    RangeOutOfChamber { id: String, range: f64, chamber: f64 },
    #[error("targets `{0}` and `{1}` overlap in the sensor's angular domain")]
    OverlappingTargets(String, String),
    #[error("invalid scene: {0}")]
    Invalid(String),
}

/// Gaussian surface-reflectivity model on the sensor's byte scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReflectivityDistribution {
    pub mean: f64,
    pub std_dev: f64,
    pub clamp_min: f64,
    pub clamp_max: f64,
}

impl ReflectivityDistribution {
    pub fn new(mean: f64, std_dev: f64) -> Self {
        ReflectivityDistribution { mean, std_dev, clamp_min: 0.0, clamp_max: 255.0 }
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        let ok = 0.0 <= self.clamp_min
            && self.clamp_min <= self.mean
            && self.mean <= self.clamp_max
            && self.clamp_max <= 255.0
            && self.std_dev >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(SceneError::Invalid(format!("bad reflectivity distribution {self:?}")))
        }
    }
}

/// Reflector class, decided by the distribution mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReflectorClass {
    Diffuse,
    Retro,
}

impl ReflectorClass {
    pub fn from_byte(byte: f64) -> Self {
        if byte < RETRO_THRESHOLD {
            ReflectorClass::Diffuse
        } else {
            ReflectorClass::Retro
        }
    }
}

/// One homogeneous rectangle of a target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetPart {
    pub part_id: String,
    pub reflectivity: ReflectivityDistribution,
    /// Planar extent in the target's local frame: (width m, height m).
    pub extent: (f64, f64),
}

impl TargetPart {
    pub fn reflector_class(&self) -> ReflectorClass {
        ReflectorClass::from_byte(self.reflectivity.mean)
    }
}

/// A placed target: parts stacked bottom-to-top from `base_height`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub target_id: String,
    pub parts: Vec<TargetPart>,
    /// Range along the boresight (m).
    pub range: f64,
    /// Lateral offset of the target center (m, positive to the left).
    pub lateral_offset: f64,
    /// Height of the lowest part's bottom edge (m).
    pub base_height: f64,
}

/// World-frame rectangle of one part, on the plane x = range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PartRect {
    pub y_min: f64,
    pub y_max: f64,
    pub z_min: f64,
    pub z_max: f64,
}

impl TargetSpec {
    /// Rectangle of part `i` in world coordinates.
    pub fn part_rect(&self, i: usize) -> PartRect {
        let z_min = self.base_height
            + self.parts[..i].iter().map(|p| p.extent.1).sum::<f64>();
        let part = &self.parts[i];
        PartRect {
            y_min: self.lateral_offset - part.extent.0 / 2.0,
            y_max: self.lateral_offset + part.extent.0 / 2.0,
            z_min,
            z_max: z_min + part.extent.1,
        }
    }

    /// Azimuth interval covered by the target, radians, from the sensor origin.
    pub fn azimuth_interval(&self) -> (f64, f64) {
        let half_w = self.parts.iter().map(|p| p.extent.0).fold(0.0_f64, f64::max) / 2.0;
        let lo = (self.lateral_offset - half_w).atan2(self.range);
        let hi = (self.lateral_offset + half_w).atan2(self.range);
        (lo, hi)
    }
}

/// An immutable arrangement of targets inside the fog chamber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub targets: Vec<TargetSpec>,
    pub chamber_length: f64,
}

/// A ray from the sensor; `direction` must be normalized.
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub origin: [f64; 3],
    pub direction: [f64; 3],
}

/// Nearest beam-target intersection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    /// Euclidean range along the ray (m).
    pub range: f64,
    pub target: usize,
    pub part: usize,
}

impl Scene {
    /// Nearest intersection of `ray` with any target part, if any.
    ///
    /// Deterministic and pure: same scene and ray give the same result.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for (ti, target) in self.targets.iter().enumerate() {
            if ray.direction[0] <= 1e-12 {
                continue; // plane x = range is in front of the sensor only
            }
            let t = (target.range - ray.origin[0]) / ray.direction[0];
            if t <= 0.0 {
                continue;
            }
            let y = ray.origin[1] + t * ray.direction[1];
            let z = ray.origin[2] + t * ray.direction[2];
            for pi in 0..target.parts.len() {
                let rect = target.part_rect(pi);
                if y >= rect.y_min && y <= rect.y_max && z >= rect.z_min && z <= rect.z_max {
                    let range = t; // direction is unit length
                    if best.map_or(true, |b| range < b.range) {
                        best = Some(Hit { range, target: ti, part: pi });
                    }
                }
            }
        }
        best
    }

    /// Angular footprint of the whole scene, degrees. Empty scenes give None.
    pub fn azimuth_span_deg(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.targets {
            let (a, b) = t.azimuth_interval();
            lo = lo.min(a);
            hi = hi.max(b);
        }
        if lo.is_finite() {
            Some((lo.to_degrees(), hi.to_degrees()))
        } else {
            None
        }
    }
}

/// Gaussian surface draw, clamped into the distribution's bounds.
///
/// Deterministic given the caller's stream.
pub fn sample_reflectivity(part: &TargetPart, rng: &mut DetRng) -> f64 {
    let d = &part.reflectivity;
    rng.gaussian(d.mean, d.std_dev).clamp(d.clamp_min, d.clamp_max)
}

// --- scene configuration -----------------------------------------------

/// One placed target in a scene config.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TargetConfig {
    pub template: String,
    pub range_m: f64,
    #[serde(default)]
    pub offset_m: f64,
    /// Base height override (m); template default when absent.
    #[serde(default)]
    pub height_m: Option<f64>,
}

/// JSON scene description consumed by [`build_scene`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneConfig {
    pub targets: Vec<TargetConfig>,
    #[serde(default = "default_chamber")]
    pub chamber_length_m: f64,
}

fn default_chamber() -> f64 {
    DEFAULT_CHAMBER_LENGTH
}

struct Template {
    name: &'static str,
    base_height: f64,
    /// (part id, mean byte, std dev, width m, height m)
    parts: &'static [(&'static str, f64, f64, f64, f64)],
}

/// Built-in target templates. Means are the per-target averages measured at
/// 15 m in clear conditions; geometry is nominal (see docs/targets.md).
const TEMPLATES: &[Template] = &[
    Template { name: "board_a", base_height: 1.0, parts: &[("board", 2.75, 1.0, 0.5, 0.5)] },
    Template { name: "board_b", base_height: 1.0, parts: &[("board", 22.2, 1.0, 0.5, 0.5)] },
    Template { name: "board_c", base_height: 1.0, parts: &[("board", 45.54, 1.0, 0.5, 0.5)] },
    Template {
        name: "dummy_model",
        base_height: 0.2,
        parts: &[("lower", 2.67, 5.0, 0.5, 0.9), ("upper", 17.7, 5.0, 0.5, 0.9)],
    },
    Template {
        name: "car",
        base_height: 0.3,
        parts: &[
            ("plate", 133.04, 5.0, 0.6, 0.15),
            ("strong", 15.6, 5.0, 1.8, 0.75),
            ("weak", 1.17, 5.0, 1.6, 0.45),
        ],
    },
    Template { name: "traffic_sign_1", base_height: 1.5, parts: &[("sign", 169.9, 5.0, 0.6, 0.6)] },
    Template { name: "traffic_sign_2", base_height: 1.5, parts: &[("sign", 209.2, 5.0, 0.6, 0.6)] },
];

fn lookup_template(name: &str) -> Option<&'static Template> {
    let lower = name.to_ascii_lowercase();
    TEMPLATES.iter().find(|t| t.name == lower)
}

/// Known template names, for diagnostics.
pub fn template_names() -> Vec<&'static str> {
    TEMPLATES.iter().map(|t| t.name).collect()
}

/// Materialize a scene from a config and the built-in template table.
pub fn build_scene(config: &SceneConfig) -> Result<Scene, SceneError> {
    let chamber = config.chamber_length_m;
    if chamber <= 0.0 {
        return Err(SceneError::Invalid(format!("chamber length {chamber} must be positive")));
    }
    let mut targets = Vec::with_capacity(config.targets.len());
    for (i, tc) in config.targets.iter().enumerate() {
        let tpl = lookup_template(&tc.template)
            .ok_or_else(|| SceneError::UnknownTemplate(tc.template.clone()))?;
        let target_id = format!("{}_{i}", tpl.name);
        if !(tc.range_m > 0.0 && tc.range_m <= chamber) {
            return Err(SceneError::RangeOutOfChamber {
                id: target_id,
                range: tc.range_m,
                chamber,
            });
        }
        let parts = tpl
            .parts
            .iter()
            .map(|&(id, mean, std, w, h)| TargetPart {
                part_id: id.to_string(),
                reflectivity: ReflectivityDistribution::new(mean, std),
                extent: (w, h),
            })
            .collect();
        targets.push(TargetSpec {
            target_id,
            parts,
            range: tc.range_m,
            lateral_offset: tc.offset_m,
            base_height: tc.height_m.unwrap_or(tpl.base_height),
        });
    }

    // Footprints must stay disjoint in the angular domain so every beam sees
    // at most one target.
    for i in 0..targets.len() {
        for j in (i + 1)..targets.len() {
            let (a_lo, a_hi) = targets[i].azimuth_interval();
            let (b_lo, b_hi) = targets[j].azimuth_interval();
            if a_lo < b_hi && b_lo < a_hi {
                return Err(SceneError::OverlappingTargets(
                    targets[i].target_id.clone(),
                    targets[j].target_id.clone(),
                ));
            }
        }
    }
    Ok(Scene { targets, chamber_length: chamber })
}
