//! Marginal-likelihood maximization: multi-start gradient ascent in
//! log-parameter space with a backtracking (Armijo) line search.
//!
//! Starts are drawn log-uniformly, run in parallel, and the winner is picked
//! by (likelihood, lowest start index), so training is deterministic for a
//! fixed seed regardless of thread count.

use super::kernel::distance_matrix;
use super::{
    lml_from_distances, lml_gradient_from_distances, GprError, KernelParams,
    NormalizationBounds, NOISE_VARIANCE_FLOOR,
};
use crate::recording::DisappearSample;
use crate::rng::StreamKey;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// Hyperparameter-optimization settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitConfig {
    /// Number of optimizer starts.
    pub n_starts: u32,
    /// Ascent iteration cap per start.
    pub max_iters: u32,
    /// Stop when the gradient infinity-norm drops below this.
    pub grad_tol: f64,
    /// Training-subset size cap.
    pub training_cap: usize,
    /// Stratification grid resolution per input dimension.
    pub strat_grid: usize,
    /// Log-uniform initialization range for all three hyperparameters.
    pub init_range: (f64, f64),
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            n_starts: 8,
            max_iters: 300,
            grad_tol: 1e-7,
            training_cap: 565,
            strat_grid: 8,
            init_range: (1e-3, 1.0),
        }
    }
}

impl FitConfig {
    /// Reduced settings for quick tests.
    pub fn fast() -> Self {
        FitConfig { n_starts: 4, max_iters: 150, training_cap: 200, ..Default::default() }
    }
}

/// Log-space box keeping the optimizer away from degenerate kernels. The
/// noise floor guarantees factorization even with duplicate inputs.
fn clamp_theta(theta: [f64; 3]) -> [f64; 3] {
    [
        theta[0].clamp((1e-8f64).ln(), (1e3f64).ln()),
        theta[1].clamp((1e-4f64).ln(), (1e3f64).ln()),
        theta[2].clamp(NOISE_VARIANCE_FLOOR.sqrt().ln(), (1e2f64).ln()),
    ]
}

/// Seeded stratified subsample over an (r, beta) grid with a per-cell cap.
///
/// Cells are visited round-robin so dense regions cannot crowd out sparse
/// ones; the selection keeps the dataset's deterministic order.
pub(super) fn stratified_subset(
    samples: &[DisappearSample],
    bounds: &NormalizationBounds,
    config: &FitConfig,
    key: StreamKey,
) -> Vec<DisappearSample> {
    if samples.len() <= config.training_cap {
        return samples.to_vec();
    }
    let g = config.strat_grid.max(1);
    let mut cells: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        let (x, _) = bounds.normalize_input(s.mean_range, s.reflectivity);
        let gi = ((x[0] * g as f64) as usize).min(g - 1);
        let gj = ((x[1] * g as f64) as usize).min(g - 1);
        cells.entry((gi, gj)).or_default().push(i);
    }
    for (&(gi, gj), members) in cells.iter_mut() {
        let mut rng = key.child((gi * g + gj) as u64).rng();
        rng.shuffle(members);
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(config.training_cap);
    while chosen.len() < config.training_cap {
        let mut took_any = false;
        for members in cells.values_mut() {
            if chosen.len() >= config.training_cap {
                break;
            }
            if let Some(i) = members.pop() {
                chosen.push(i);
                took_any = true;
            }
        }
        if !took_any {
            break;
        }
    }
    chosen.sort_unstable();
    chosen.into_iter().map(|i| samples[i].clone()).collect()
}

/// Run all starts and return the winning hyperparameters and likelihood.
pub(super) fn multistart_ascent(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &FitConfig,
    key: StreamKey,
) -> Result<(KernelParams, f64), GprError> {
    let dists = distance_matrix(x);
    let ln_lo = config.init_range.0.ln();
    let ln_hi = config.init_range.1.ln();

    let results: Vec<Option<(f64, [f64; 3])>> = (0..config.n_starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = key.child(s as u64).rng();
            let theta0 = [
                rng.uniform(ln_lo, ln_hi),
                rng.uniform(ln_lo, ln_hi),
                rng.uniform(ln_lo, ln_hi),
            ];
            ascend(&dists, y, theta0, config)
        })
        .collect();

    let mut best: Option<(f64, [f64; 3])> = None;
    for r in results.into_iter().flatten() {
        if r.0.is_finite() && best.map_or(true, |b| r.0 > b.0) {
            best = Some(r);
        }
    }
    best.map(|(lml, theta)| (KernelParams::from_log(theta), lml))
        .ok_or(GprError::AllStartsFailed)
}

type V3 = [f64; 3];
type M3 = [[f64; 3]; 3];

fn m3_identity() -> M3 {
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}

fn m3_mul_v(m: &M3, v: &V3) -> V3 {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// BFGS update of the inverse-Hessian approximation (of the negated
/// objective) from step `s` and gradient change `z` of the ascent objective.
fn bfgs_update(h: &M3, s: &V3, z: &V3) -> Option<M3> {
    // minimizing -f, so the curvature pair is (s, -z)
    let yy = [-z[0], -z[1], -z[2]];
    let sy = dot(s, &yy);
    if sy <= 1e-12 {
        return None;
    }
    let rho = 1.0 / sy;
    // (I - rho s y^T) H (I - rho y s^T) + rho s s^T
    let mut a = m3_identity();
    for i in 0..3 {
        for j in 0..3 {
            a[i][j] -= rho * s[i] * yy[j];
        }
    }
    let mut ah = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                ah[i][j] += a[i][k] * h[k][j];
            }
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = rho * s[i] * s[j];
            for k in 0..3 {
                acc += ah[i][k] * a[j][k];
            }
            out[i][j] = acc;
        }
    }
    Some(out)
}

/// Gradient ascent preconditioned with a BFGS inverse-Hessian estimate and a
/// backtracking Armijo line search. Steps are projected into the parameter
/// box; projections reset the curvature estimate.
fn ascend(
    dists: &DMatrix<f64>,
    y: &DVector<f64>,
    theta0: V3,
    config: &FitConfig,
) -> Option<(f64, V3)> {
    let eval = |theta: V3| lml_from_distances(dists, y, &KernelParams::from_log(theta)).ok();
    let grad = |theta: V3| {
        lml_gradient_from_distances(dists, y, &KernelParams::from_log(theta))
            .ok()
            .filter(|g| g.iter().all(|v| v.is_finite()))
    };

    let mut theta = clamp_theta(theta0);
    let mut f = eval(theta)?;
    let mut g = grad(theta)?;
    let mut h = m3_identity();
    for _ in 0..config.max_iters {
        if g.iter().map(|v| v.abs()).fold(0.0, f64::max) < config.grad_tol {
            break;
        }
        let mut dir = m3_mul_v(&h, &g);
        if dot(&dir, &g) <= 0.0 {
            h = m3_identity();
            dir = g;
        }
        let mut step = 1.0_f64;
        let mut accepted = None;
        while step > 1e-14 {
            let raw = [theta[0] + step * dir[0], theta[1] + step * dir[1], theta[2] + step * dir[2]];
            let cand = clamp_theta(raw);
            let clamped = cand != raw;
            let disp = [cand[0] - theta[0], cand[1] - theta[1], cand[2] - theta[2]];
            let slope = dot(&g, &disp);
            if slope <= 0.0 {
                // pinned against the box along the ascent direction
                break;
            }
            if let Some(fc) = eval(cand) {
                if fc.is_finite() && fc > f + 1e-4 * slope {
                    accepted = Some((cand, fc, clamped));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((next, fc, clamped)) = accepted else { break };
        let g_next = match grad(next) {
            Some(g) => g,
            None => {
                theta = next;
                f = fc;
                break;
            }
        };
        let s = [next[0] - theta[0], next[1] - theta[1], next[2] - theta[2]];
        let z = [g_next[0] - g[0], g_next[1] - g[1], g_next[2] - g[2]];
        h = if clamped {
            m3_identity()
        } else {
            bfgs_update(&h, &s, &z).unwrap_or_else(m3_identity)
        };
        theta = next;
        f = fc;
        g = g_next;
    }
    Some((f, theta))
}
