//! Exact Gaussian-process regression of disappear visibility over
//! (mean range, reflectivity byte).
//!
//! Zero-mean GP with a Matérn 3/2 kernel and i.i.d. Gaussian observation
//! noise. Inputs and the output are min-max normalized to [0, 1]; the bounds
//! travel with the model so predictions are reversible. Diffuse and retro
//! reflectors get separate models.
//!
//! Inference goes through the Cholesky factor of `K + sigma_n^2 I`:
//!
//! ```text
//! mean(x*) = k*^T (K + sigma_n^2 I)^-1 y
//! var(x*)  = k(x*, x*) - k*^T (K + sigma_n^2 I)^-1 k*
//! log p(y) = -1/2 y^T alpha - sum(ln L_ii) - n/2 ln(2 pi)
//! ```
//!
//! Hyperparameters maximize the marginal likelihood by multi-start gradient
//! ascent in log-space with analytic gradients (see [`optimize`]).

pub mod kernel;
mod optimize;

pub use optimize::FitConfig;

use crate::recording::DisappearSample;
use crate::rng::{domain, StreamKey};
use crate::scene::ReflectorClass;
use kernel::{distance_matrix, gram_from_distances, matern32_dlog_lengthscale, matern32_of_distance};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use thiserror::Error;

/// Noise-variance floor on the normalized scale; keeps duplicate inputs
/// factorizable during hyperparameter optimization.
pub const NOISE_VARIANCE_FLOOR: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GprError {
    #[error("kernel matrix is not positive definite for {0:?}")]
    NotPositiveDefinite(KernelParams),
    #[error("insufficient data for the {regime:?} regime: {n} samples")]
    InsufficientData { regime: Regime, n: usize },
    #[error("all optimizer starts failed")]
    AllStartsFailed,
    #[error("model file: {0}")]
    Model(String),
    #[error("model io: {0}")]
    Io(#[from] std::io::Error),
}

/// Reflector regime a model is trained for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Diffuse,
    Retro,
}

impl Regime {
    pub fn matches(self, byte: f64) -> bool {
        match self {
            Regime::Diffuse => ReflectorClass::from_byte(byte) == ReflectorClass::Diffuse,
            Regime::Retro => ReflectorClass::from_byte(byte) == ReflectorClass::Retro,
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Diffuse => write!(f, "diffuse"),
            Regime::Retro => write!(f, "retro"),
        }
    }
}

/// Kernel and noise hyperparameters, on the normalized scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub amplitude: f64,
    pub lengthscale: f64,
    pub noise_std: f64,
}

impl KernelParams {
    pub fn validate(&self) -> bool {
        self.amplitude > 0.0 && self.lengthscale > 0.0 && self.noise_std > 0.0
    }

    fn from_log(v: [f64; 3]) -> Self {
        KernelParams { amplitude: v[0].exp(), lengthscale: v[1].exp(), noise_std: v[2].exp() }
    }
}

/// Per-dimension min-max bounds for the affine [0, 1] maps.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub range: (f64, f64),
    pub reflectivity: (f64, f64),
    pub v_dis: (f64, f64),
}

/// Map `v` into [0, 1] over `(min, max)`.
pub fn normalize(v: f64, bounds: (f64, f64)) -> f64 {
    (v - bounds.0) / (bounds.1 - bounds.0)
}

/// Inverse of [`normalize`].
pub fn denormalize(v: f64, bounds: (f64, f64)) -> f64 {
    bounds.0 + v * (bounds.1 - bounds.0)
}

impl NormalizationBounds {
    /// Bounds spanning the given samples. Degenerate spans are widened so the
    /// affine maps stay invertible.
    pub fn from_samples(samples: &[DisappearSample]) -> Self {
        let span = |f: fn(&DisappearSample) -> f64| {
            let lo = samples.iter().map(f).fold(f64::INFINITY, f64::min);
            let hi = samples.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo < 1e-9 {
                (lo - 0.5, hi + 0.5)
            } else {
                (lo, hi)
            }
        };
        NormalizationBounds {
            range: span(|s| s.mean_range),
            reflectivity: span(|s| s.reflectivity),
            v_dis: span(|s| s.v_dis),
        }
    }

    /// Normalize an input point, clamping into [0, 1]. The flag reports
    /// whether clamping occurred (extrapolation outside the training bounds).
    pub fn normalize_input(&self, range_m: f64, reflectivity: f64) -> ([f64; 2], bool) {
        let r = normalize(range_m, self.range);
        let b = normalize(reflectivity, self.reflectivity);
        let clamped = !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&b);
        ([r.clamp(0.0, 1.0), b.clamp(0.0, 1.0)], clamped)
    }
}

/// Prediction with its denormalized uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Predictive mean (m).
    pub mean: f64,
    /// Predictive standard deviation (m).
    pub std: f64,
    /// True when the query lay outside the training bounds and was clamped.
    pub extrapolated: bool,
}

/// A trained exact-GP regressor.
#[derive(Clone, Debug)]
pub struct GpModel {
    /// Normalized training inputs, n x 2.
    pub x_train: DMatrix<f64>,
    /// Normalized training targets.
    pub y_train: DVector<f64>,
    pub params: KernelParams,
    pub bounds: NormalizationBounds,
    pub regime: Regime,
    /// Cholesky factor of `K + sigma_n^2 I`.
    chol: Cholesky<f64, Dyn>,
    /// `(K + sigma_n^2 I)^-1 y`.
    alpha: DVector<f64>,
    /// Log marginal likelihood at the trained hyperparameters.
    pub lml: f64,
    /// Fit provenance (seed, starts); zero for hand-built models.
    pub meta: FitMeta,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FitMeta {
    pub seed: u64,
    pub n_starts: u32,
}

/// Factored `K + sigma_n^2 I` or the positive-definiteness failure.
fn factorize(
    dists: &DMatrix<f64>,
    params: &KernelParams,
) -> Result<Cholesky<f64, Dyn>, GprError> {
    let n = dists.nrows();
    let mut k = gram_from_distances(dists, params.amplitude, params.lengthscale);
    let noise = params.noise_std * params.noise_std;
    for i in 0..n {
        k[(i, i)] += noise;
    }
    k.cholesky().ok_or(GprError::NotPositiveDefinite(*params))
}

/// Log marginal likelihood of normalized data under the given parameters.
pub fn log_marginal_likelihood(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &KernelParams,
) -> Result<f64, GprError> {
    let dists = distance_matrix(x);
    lml_from_distances(&dists, y, params)
}

fn lml_from_distances(
    dists: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &KernelParams,
) -> Result<f64, GprError> {
    let chol = factorize(dists, params)?;
    let alpha = chol.solve(y);
    let n = y.len() as f64;
    let log_det_half: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    Ok(-0.5 * y.dot(&alpha) - log_det_half - 0.5 * n * (2.0 * std::f64::consts::PI).ln())
}

/// Gradient of the log marginal likelihood with respect to
/// `(ln amplitude, ln lengthscale, ln noise_std)`.
pub fn lml_gradient(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &KernelParams,
) -> Result<[f64; 3], GprError> {
    let dists = distance_matrix(x);
    lml_gradient_from_distances(&dists, y, params)
}

fn lml_gradient_from_distances(
    dists: &DMatrix<f64>,
    y: &DVector<f64>,
    params: &KernelParams,
) -> Result<[f64; 3], GprError> {
    let n = dists.nrows();
    let chol = factorize(dists, params)?;
    let alpha = chol.solve(y);
    let k_inv = chol.inverse();

    // d(LML)/d(theta) = 1/2 * (alpha^T dK alpha - tr(K_y^-1 dK))
    let dk_amp = gram_from_distances(dists, params.amplitude, params.lengthscale);
    let dk_len = dists.map(|d| matern32_dlog_lengthscale(d, params.amplitude, params.lengthscale));

    let quad = |dk: &DMatrix<f64>| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += alpha[i] * dk[(i, j)] * alpha[j];
            }
        }
        acc
    };
    let trace_prod = |dk: &DMatrix<f64>| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += k_inv[(i, j)] * dk[(j, i)];
            }
        }
        acc
    };

    let g_amp = 0.5 * (quad(&dk_amp) - trace_prod(&dk_amp));
    let g_len = 0.5 * (quad(&dk_len) - trace_prod(&dk_len));
    // dK_y/d(ln sigma_n) = 2 sigma_n^2 I
    let noise = params.noise_std * params.noise_std;
    let g_noise = noise * (alpha.dot(&alpha) - k_inv.trace());
    Ok([g_amp, g_len, g_noise])
}

impl GpModel {
    /// Build a model from already-normalized data and fixed hyperparameters.
    ///
    /// The given noise level is honored exactly (no floor); the floor only
    /// applies while optimizing.
    pub fn from_normalized(
        x_train: DMatrix<f64>,
        y_train: DVector<f64>,
        params: KernelParams,
        bounds: NormalizationBounds,
        regime: Regime,
    ) -> Result<Self, GprError> {
        assert!(x_train.nrows() >= 1 && x_train.nrows() == y_train.len());
        let dists = distance_matrix(&x_train);
        let chol = factorize(&dists, &params)?;
        let alpha = chol.solve(&y_train);
        let lml = lml_from_distances(&dists, &y_train, &params)?;
        Ok(GpModel { x_train, y_train, params, bounds, regime, chol, alpha, lml, meta: FitMeta::default() })
    }

    pub fn n_train(&self) -> usize {
        self.x_train.nrows()
    }

    /// Predictive mean and standard deviation of the latent function at
    /// denormalized inputs.
    pub fn predict(&self, range_m: f64, reflectivity: f64) -> Prediction {
        let (x, extrapolated) = self.bounds.normalize_input(range_m, reflectivity);
        let (mean_n, var_n) = self.predict_normalized(x);
        let scale = self.bounds.v_dis.1 - self.bounds.v_dis.0;
        Prediction {
            mean: denormalize(mean_n, self.bounds.v_dis),
            std: var_n.sqrt() * scale,
            extrapolated,
        }
    }

    /// Predictive distribution of a new noisy observation: the latent
    /// variance plus the observation noise variance.
    pub fn predict_observation(&self, range_m: f64, reflectivity: f64) -> Prediction {
        let (x, extrapolated) = self.bounds.normalize_input(range_m, reflectivity);
        let (mean_n, var_n) = self.predict_normalized(x);
        let scale = self.bounds.v_dis.1 - self.bounds.v_dis.0;
        let var_obs = var_n + self.params.noise_std * self.params.noise_std;
        Prediction {
            mean: denormalize(mean_n, self.bounds.v_dis),
            std: var_obs.sqrt() * scale,
            extrapolated,
        }
    }

    /// Predictive mean and variance on the normalized scale.
    pub fn predict_normalized(&self, x: [f64; 2]) -> (f64, f64) {
        let n = self.n_train();
        let k_star = DVector::from_fn(n, |i, _| {
            matern32_of_distance(
                kernel::distance(x, [self.x_train[(i, 0)], self.x_train[(i, 1)]]),
                self.params.amplitude,
                self.params.lengthscale,
            )
        });
        let mean = k_star.dot(&self.alpha);
        let w = self.chol.solve(&k_star);
        let var = (self.params.amplitude - k_star.dot(&w)).max(0.0);
        (mean, var)
    }

    /// Serialize the model as JSON.
    pub fn write_json<W: Write>(&self, mut w: W) -> Result<(), GprError> {
        let file = GpModelFile {
            regime: self.regime,
            bounds: self.bounds,
            params: self.params,
            x: (0..self.n_train())
                .map(|i| [self.x_train[(i, 0)], self.x_train[(i, 1)]])
                .collect(),
            y: self.y_train.iter().copied().collect(),
            meta: GpModelMeta { seed: self.meta.seed, n_starts: self.meta.n_starts, lml: self.lml },
        };
        let json = serde_json::to_string_pretty(&file).map_err(|e| GprError::Model(e.to_string()))?;
        writeln!(w, "{json}")?;
        Ok(())
    }

    /// Load a model from JSON, re-factorize, and verify the stored log
    /// marginal likelihood to 1e-6.
    pub fn read_json<R: BufRead>(mut r: R) -> Result<Self, GprError> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let file: GpModelFile =
            serde_json::from_str(&text).map_err(|e| GprError::Model(e.to_string()))?;
        if file.x.is_empty() || file.x.len() != file.y.len() {
            return Err(GprError::Model(format!(
                "inconsistent training data: {} inputs, {} targets",
                file.x.len(),
                file.y.len()
            )));
        }
        if !file.params.validate() {
            return Err(GprError::Model(format!("invalid hyperparameters {:?}", file.params)));
        }
        let n = file.x.len();
        let x_train = DMatrix::from_fn(n, 2, |i, j| file.x[i][j]);
        let y_train = DVector::from_vec(file.y.clone());
        let mut model =
            GpModel::from_normalized(x_train, y_train, file.params, file.bounds, file.regime)?;
        if (model.lml - file.meta.lml).abs() > 1e-6 {
            return Err(GprError::Model(format!(
                "stored log marginal likelihood {} disagrees with recomputed {}",
                file.meta.lml, model.lml
            )));
        }
        model.meta = FitMeta { seed: file.meta.seed, n_starts: file.meta.n_starts };
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct GpModelFile {
    regime: Regime,
    bounds: NormalizationBounds,
    params: KernelParams,
    x: Vec<[f64; 2]>,
    y: Vec<f64>,
    meta: GpModelMeta,
}

#[derive(Serialize, Deserialize)]
struct GpModelMeta {
    seed: u64,
    n_starts: u32,
    lml: f64,
}

/// Train a model for one regime on disappear-visibility samples.
///
/// Samples outside the regime are ignored. Bounds come from the regime's full
/// sample set; the training subset is a seeded stratified draw over an
/// (r, beta) grid with a per-cell cap (see [`FitConfig`]). Hyperparameters
/// maximize the marginal likelihood by multi-start gradient ascent; the
/// winner is the highest likelihood with ties broken by start index, so the
/// fit is deterministic given (data, seed).
pub fn fit(
    samples: &[DisappearSample],
    regime: Regime,
    config: &FitConfig,
    seed: u64,
) -> Result<GpModel, GprError> {
    let regime_samples: Vec<&DisappearSample> =
        samples.iter().filter(|s| regime.matches(s.reflectivity)).collect();
    if regime_samples.len() < 2 {
        return Err(GprError::InsufficientData { regime, n: regime_samples.len() });
    }
    let owned: Vec<DisappearSample> = regime_samples.iter().map(|&s| s.clone()).collect();
    let bounds = NormalizationBounds::from_samples(&owned);

    let root = StreamKey::root(seed).child(domain::GPR).child(match regime {
        Regime::Diffuse => 0,
        Regime::Retro => 1,
    });
    let subset = optimize::stratified_subset(&owned, &bounds, config, root.child(0));

    let n = subset.len();
    let x_train = DMatrix::from_fn(n, 2, |i, j| {
        if j == 0 {
            normalize(subset[i].mean_range, bounds.range)
        } else {
            normalize(subset[i].reflectivity, bounds.reflectivity)
        }
    });
    let y_train = DVector::from_fn(n, |i, _| normalize(subset[i].v_dis, bounds.v_dis));

    let (params, lml) = optimize::multistart_ascent(&x_train, &y_train, config, root.child(1))?;
    let dists = distance_matrix(&x_train);
    let chol = factorize(&dists, &params)?;
    let alpha = chol.solve(&y_train);
    Ok(GpModel {
        x_train,
        y_train,
        params,
        bounds,
        regime,
        chol,
        alpha,
        lml,
        meta: FitMeta { seed, n_starts: config.n_starts },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use kernel::gram;

    fn sample(r: f64, b: f64, v: f64) -> DisappearSample {
        DisappearSample {
            mean_range: r,
            reflectivity: b,
            v_dis: v,
            target_id: "t".into(),
            part_id: "p".into(),
            ring: 0,
            azimuth_code: 0,
        }
    }

    #[test]
    fn normalize_endpoints_and_midpoint() {
        assert_eq!(normalize(100.0, (100.0, 255.0)), 0.0);
        assert_eq!(normalize(255.0, (100.0, 255.0)), 1.0);
        assert_eq!(normalize(177.5, (100.0, 255.0)), 0.5);
        assert_relative_eq!(normalize(120.0, (100.0, 255.0)), 0.12903225806451613, epsilon = 1e-15);
    }

    #[test]
    fn normalize_round_trip_identity() {
        let bounds = (3.7, 91.2);
        for v in [3.7, 10.0, 55.5, 91.2] {
            assert_relative_eq!(denormalize(normalize(v, bounds), bounds), v, epsilon = 1e-12);
        }
    }

    #[test]
    fn lml_single_unit_point() {
        // n = 1, y = 0, K + noise = 1: LML = -1/2 ln(2 pi)
        let x = DMatrix::from_row_slice(1, 2, &[0.5, 0.5]);
        let y = DVector::from_vec(vec![0.0]);
        let params = KernelParams { amplitude: 0.5, lengthscale: 1.0, noise_std: 0.5f64.sqrt() };
        let lml = log_marginal_likelihood(&x, &y, &params).unwrap();
        assert_relative_eq!(lml, -0.9189385332046727, epsilon = 1e-12);
    }

    #[test]
    fn lml_two_independent_unit_points() {
        // Two points far apart: off-diagonal underflows to exactly zero, and
        // amplitude + noise variance = 1 makes K_y the identity.
        let x = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1e6, 1e6]);
        let y = DVector::from_vec(vec![1.0, 1.0]);
        let params = KernelParams { amplitude: 0.5, lengthscale: 1.0, noise_std: 0.5f64.sqrt() };
        let lml = log_marginal_likelihood(&x, &y, &params).unwrap();
        let expect = -1.0 - (2.0 * std::f64::consts::PI).ln();
        assert_relative_eq!(lml, expect, epsilon = 1e-12);
    }

    #[test]
    fn duplicate_rows_need_noise() {
        let x = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let y = DVector::from_vec(vec![0.2, 0.8]);
        // eigenvalue 0 without jitter: the noiseless gram is singular
        let k = gram(&x, 1.0, 0.3);
        assert_eq!(k[(0, 1)], k[(0, 0)]);
        let params = KernelParams { amplitude: 1.0, lengthscale: 0.3, noise_std: 1e-5 };
        assert!(log_marginal_likelihood(&x, &y, &params).is_ok());
    }

    #[test]
    fn interpolation_at_training_points() {
        let x = DMatrix::from_row_slice(4, 2, &[0.1, 0.2, 0.4, 0.9, 0.7, 0.3, 0.95, 0.6]);
        let y = DVector::from_vec(vec![0.3, 0.9, 0.1, 0.55]);
        let params = KernelParams { amplitude: 1.0, lengthscale: 0.4, noise_std: 1e-8 };
        let bounds = NormalizationBounds {
            range: (0.0, 1.0),
            reflectivity: (0.0, 1.0),
            v_dis: (0.0, 1.0),
        };
        let model =
            GpModel::from_normalized(x.clone(), y.clone(), params, bounds, Regime::Diffuse).unwrap();
        for i in 0..4 {
            let (mean, var) = model.predict_normalized([x[(i, 0)], x[(i, 1)]]);
            assert_abs_diff_eq!(mean, y[i], epsilon = 1e-6);
            assert!(var >= 0.0);
        }
    }

    #[test]
    fn prior_reversion_far_from_data() {
        let x = DMatrix::from_row_slice(2, 2, &[0.1, 0.1, 0.2, 0.2]);
        let y = DVector::from_vec(vec![0.7, 0.9]);
        let params = KernelParams { amplitude: 0.25, lengthscale: 0.05, noise_std: 0.01 };
        let bounds = NormalizationBounds {
            range: (0.0, 1.0),
            reflectivity: (0.0, 1.0),
            v_dis: (0.0, 1.0),
        };
        let model = GpModel::from_normalized(x, y, params, bounds, Regime::Diffuse).unwrap();
        let (mean, var) = model.predict_normalized([1.0, 1.0]);
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-6);
        assert_abs_diff_eq!(var, 0.25, epsilon = 1e-6);
    }

    #[test]
    fn predict_flags_extrapolation() {
        let samples: Vec<DisappearSample> = (0..12)
            .map(|i| sample(10.0 + i as f64, 5.0 + i as f64 * 3.0, 30.0 + i as f64))
            .collect();
        let model = fit(&samples, Regime::Diffuse, &FitConfig::fast(), 3).unwrap();
        assert!(!model.predict(15.0, 20.0).extrapolated);
        let out = model.predict(50.0, 20.0);
        assert!(out.extrapolated);
        // clamped to the boundary, so it equals the boundary prediction
        let edge = model.predict(21.0, 20.0);
        assert_relative_eq!(out.mean, edge.mean, epsilon = 1e-9);
    }

    #[test]
    fn fit_rejects_insufficient_data() {
        let samples = vec![sample(10.0, 5.0, 30.0)];
        match fit(&samples, Regime::Diffuse, &FitConfig::default(), 1) {
            Err(GprError::InsufficientData { n: 1, .. }) => {}
            other => panic!("expected InsufficientData, got {other:?}"),
        }
        // no retro samples at all
        match fit(&samples, Regime::Retro, &FitConfig::default(), 1) {
            Err(GprError::InsufficientData { n: 0, .. }) => {}
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    #[test]
    fn fit_handles_duplicate_inputs_with_conflicting_targets() {
        let mut samples = Vec::new();
        for i in 0..10 {
            samples.push(sample(15.0, 20.0, if i % 2 == 0 { 40.0 } else { 50.0 }));
            samples.push(sample(10.0 + i as f64, 30.0, 35.0 + i as f64));
        }
        let model = fit(&samples, Regime::Diffuse, &FitConfig::fast(), 5).unwrap();
        assert!(model.params.noise_std > 1e-4, "noise must absorb the conflict");
    }

    #[test]
    fn fit_is_deterministic() {
        let samples: Vec<DisappearSample> = (0..40)
            .map(|i| {
                let r = 10.0 + (i % 8) as f64 * 2.0;
                let b = 2.0 + (i / 8) as f64 * 10.0;
                sample(r, b, 120.0 - b * 1.5 + r * 2.0)
            })
            .collect();
        let m1 = fit(&samples, Regime::Diffuse, &FitConfig::fast(), 42).unwrap();
        let m2 = fit(&samples, Regime::Diffuse, &FitConfig::fast(), 42).unwrap();
        assert_eq!(m1.params, m2.params);
        assert_eq!(m1.lml, m2.lml);
    }

    #[test]
    fn model_json_round_trip_verifies_lml() {
        let samples: Vec<DisappearSample> =
            (0..20).map(|i| sample(10.0 + i as f64, 3.0 + i as f64, 40.0 + (i as f64).sin() * 5.0)).collect();
        let model = fit(&samples, Regime::Diffuse, &FitConfig::fast(), 9).unwrap();
        let mut buf = Vec::new();
        model.write_json(&mut buf).unwrap();
        let back = GpModel::read_json(&buf[..]).unwrap();
        assert_eq!(back.params, model.params);
        assert_relative_eq!(back.lml, model.lml, epsilon = 1e-9);
        let p1 = model.predict(14.0, 10.0);
        let p2 = back.predict(14.0, 10.0);
        assert_relative_eq!(p1.mean, p2.mean, epsilon = 1e-9);

        // corrupt the stored likelihood: load must fail
        let text = String::from_utf8(buf).unwrap();
        let corrupted = {
            let file: serde_json::Value = serde_json::from_str(&text).unwrap();
            let mut file = file;
            file["meta"]["lml"] = serde_json::json!(model.lml + 1.0);
            serde_json::to_string(&file).unwrap()
        };
        assert!(matches!(GpModel::read_json(corrupted.as_bytes()), Err(GprError::Model(_))));
    }
}
