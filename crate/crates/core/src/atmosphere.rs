//! Fog optics: visibility, extinction and transmission.
//!
//! Fog density is characterized by the meteorological visibility `V` (m). The
//! extinction coefficient follows the Koschmieder relation `alpha = K / V`
//! with a configurable constant (default 3.912, the 2% contrast convention).
//! The medium is assumed homogeneous, so the round-trip transmission over a
//! path of length `R` collapses to `T = exp(-2 * alpha * R)`.
//!
//! Fog tests start dense and dissipate; [`dissipation_profile`] synthesizes
//! the corresponding 1 Hz visibility trace with an exponential-in-time law
//! between the requested endpoints.

use crate::rng::DetRng;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Koschmieder constant for the 2% contrast threshold convention.
pub const DEFAULT_KOSCHMIEDER: f64 = 3.912;

/// Transmissometer validity range (m).
pub const VISIBILITY_MIN: f64 = 5.0;
pub const VISIBILITY_MAX: f64 = 10_000.0;

#[derive(Debug, Error)]
pub enum AtmosphereError {
    #[error("visibility must be strictly positive, got {0}")]
    NonPositiveVisibility(f64),
    #[error("invalid dissipation range: {0}")]
    InvalidRange(String),
    #[error("visibility trace: {0}")]
    InvalidTrace(String),
    #[error("trace io: {0}")]
    Io(#[from] std::io::Error),
}

/// Extinction coefficient (1/m) from meteorological visibility.
pub fn extinction_from_visibility(visibility_m: f64, koschmieder: f64) -> Result<f64, AtmosphereError> {
    if visibility_m <= 0.0 {
        return Err(AtmosphereError::NonPositiveVisibility(visibility_m));
    }
    debug_assert!(koschmieder > 0.0);
    Ok(koschmieder / visibility_m)
}

/// Round-trip transmission through a homogeneous medium: `exp(-2 * alpha * R)`.
pub fn transmission(extinction: f64, range_m: f64) -> f64 {
    debug_assert!(extinction >= 0.0 && range_m >= 0.0);
    (-2.0 * extinction * range_m).exp()
}

/// Effective reflectivity of a wet surface.
///
/// A thin liquid film weakens diffuse reflection; the attenuation fades as the
/// air dries out (visibility grows). Disabled by default (`wetness_gain = 0`).
pub fn wet_reflectivity(byte: f64, visibility_m: f64, wetness_gain: f64, v_scale_m: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&wetness_gain));
    byte * (1.0 - wetness_gain * (-visibility_m / v_scale_m).exp())
}

/// Fog condition at an instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FogState {
    /// Meteorological visibility (m).
    pub visibility: f64,
    /// Extinction coefficient (1/m).
    pub extinction: f64,
}

impl FogState {
    pub fn from_visibility(visibility: f64, koschmieder: f64) -> Result<Self, AtmosphereError> {
        Ok(FogState {
            visibility,
            extinction: extinction_from_visibility(visibility, koschmieder)?,
        })
    }

    /// Clear air: no extinction. Visibility is reported as the instrument cap.
    pub fn clear() -> Self {
        FogState { visibility: VISIBILITY_MAX, extinction: 0.0 }
    }
}

/// 1 Hz meteorological visibility time series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilityTrace {
    /// (t seconds, visibility m) at exactly 1 s spacing.
    pub samples: Vec<(f64, f64)>,
}

impl VisibilityTrace {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, AtmosphereError> {
        if samples.is_empty() {
            return Err(AtmosphereError::InvalidTrace("empty trace".into()));
        }
        for w in samples.windows(2) {
            if (w[1].0 - w[0].0 - 1.0).abs() > 1e-9 {
                return Err(AtmosphereError::InvalidTrace(format!(
                    "timestamps must advance by exactly 1 s, got {} -> {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(t, v)) = samples.iter().find(|&&(_, v)| !(VISIBILITY_MIN..=VISIBILITY_MAX).contains(&v)) {
            return Err(AtmosphereError::InvalidTrace(format!(
                "visibility {v} m at t={t} s outside [{VISIBILITY_MIN}, {VISIBILITY_MAX}]"
            )));
        }
        Ok(VisibilityTrace { samples })
    }

    pub fn t_start(&self) -> f64 {
        self.samples[0].0
    }

    pub fn t_end(&self) -> f64 {
        self.samples[self.samples.len() - 1].0
    }

    /// Duration covered by the trace (s).
    pub fn duration(&self) -> f64 {
        self.t_end() - self.t_start()
    }

    /// Visibility at time `t`, piecewise-constant per 1 s sample.
    pub fn visibility_at(&self, t: f64) -> Option<f64> {
        if t < self.t_start() || t > self.t_end() {
            return None;
        }
        let idx = (t - self.t_start()).floor() as usize;
        self.samples.get(idx.min(self.samples.len() - 1)).map(|&(_, v)| v)
    }

    /// Visibility at the sample covering whole second `sec`.
    pub fn visibility_at_second(&self, sec: i64) -> Option<f64> {
        let first = self.t_start().floor() as i64;
        if sec < first {
            return None;
        }
        self.samples.get((sec - first) as usize).map(|&(_, v)| v)
    }

    /// Serialize as CSV with header `t_s,visibility_m`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), AtmosphereError> {
        writeln!(w, "t_s,visibility_m")?;
        for &(t, v) in &self.samples {
            writeln!(w, "{t},{v}")?;
        }
        Ok(())
    }

    /// Parse the CSV format produced by [`VisibilityTrace::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, AtmosphereError> {
        let mut samples = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if i == 0 {
                if line != "t_s,visibility_m" {
                    return Err(AtmosphereError::InvalidTrace(format!(
                        "expected header `t_s,visibility_m`, got `{line}`"
                    )));
                }
                continue;
            }
            let mut parts = line.split(',');
            let (t, v) = (parts.next(), parts.next());
            match (t, v) {
                (Some(t), Some(v)) => {
                    let t: f64 = t.trim().parse().map_err(|_| {
                        AtmosphereError::InvalidTrace(format!("bad t_s on line {}", i + 1))
                    })?;
                    let v: f64 = v.trim().parse().map_err(|_| {
                        AtmosphereError::InvalidTrace(format!("bad visibility_m on line {}", i + 1))
                    })?;
                    samples.push((t, v));
                }
                _ => {
                    return Err(AtmosphereError::InvalidTrace(format!(
                        "malformed row on line {}",
                        i + 1
                    )))
                }
            }
        }
        VisibilityTrace::new(samples)
    }
}

/// Synthesize a fog-dissipation visibility trace.
///
/// The underlying deterministic curve is exponential in time,
/// `V(t) = V_start * (V_end / V_start)^(t / duration)`, which rises convexly
/// from the dense-fog floor to clear conditions. Optional additive Gaussian
/// noise models transmissometer scatter; samples are clamped to stay within
/// the instrument's validity range.
pub fn dissipation_profile(
    v_start: f64,
    v_end: f64,
    duration_s: u64,
    noise_std: f64,
    rng: &mut DetRng,
) -> Result<VisibilityTrace, AtmosphereError> {
    if !(VISIBILITY_MIN..VISIBILITY_MAX).contains(&v_start) || v_end <= v_start || v_end > VISIBILITY_MAX {
        return Err(AtmosphereError::InvalidRange(format!(
            "need {VISIBILITY_MIN} <= v_start < v_end <= {VISIBILITY_MAX}, got {v_start}..{v_end}"
        )));
    }
    if duration_s < 2 {
        return Err(AtmosphereError::InvalidRange(format!(
            "duration must be >= 2 s, got {duration_s}"
        )));
    }
    let ratio = v_end / v_start;
    let samples = (0..=duration_s)
        .map(|t| {
            let frac = t as f64 / duration_s as f64;
            let mut v = v_start * ratio.powf(frac);
            if noise_std > 0.0 {
                v += rng.gaussian(0.0, noise_std);
            }
            (t as f64, v.clamp(VISIBILITY_MIN, VISIBILITY_MAX))
        })
        .collect();
    VisibilityTrace::new(samples)
}
