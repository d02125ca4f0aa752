//! Simulation and modeling of a scanning time-of-flight LiDAR in dissipating fog.
//!
//! The crate covers the full chain from physics to statistics:
//!
//! - [`scene`]: calibrated boards, a dummy model, a car and traffic signs as
//!   planar targets with stochastic surface reflectivity.
//! - [`atmosphere`]: meteorological visibility, extinction and round-trip
//!   transmission, plus synthetic fog-dissipation traces.
//! - [`lidar`]: the 32-beam sensor model — received-power radiometry, fog
//!   backscatter clutter and threshold pulse detection at 10 Hz.
//! - [`recording`]: ROI extraction, per-second averaging and the
//!   disappear-visibility statistic extracted per beam.
//! - [`gpr`]: exact Gaussian-process regression of disappear visibility over
//!   (mean range, reflectivity) with a Matérn 3/2 kernel.
//! - [`eval`]: confidence-region failure rates, binned absolute-error tables
//!   and prediction grids.
//!
//! All randomness flows from a single 64-bit seed through counter-based
//! substreams ([`rng`]), so parallel and serial runs produce identical output.

pub mod atmosphere;
pub mod eval;
pub mod gpr;
pub mod lidar;
pub mod recording;
pub mod rng;
pub mod scene;

pub use atmosphere::{FogState, VisibilityTrace};
pub use gpr::{GpModel, KernelParams, NormalizationBounds, Regime};
pub use lidar::{LaserReturn, LidarConfig, SimConfig};
pub use recording::{AveragedSeries, DisappearSample, LaserRoi, Recording};
pub use rng::{DetRng, StreamKey};
pub use scene::{ReflectivityDistribution, Scene, SceneConfig, TargetPart, TargetSpec};
