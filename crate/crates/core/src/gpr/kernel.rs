//! Matérn 3/2 covariance and its Gram-matrix derivatives.
//!
//! ```text
//! k(x, x') = amplitude * (1 + sqrt(3) d / l) * exp(-sqrt(3) d / l),
//! d = ||x - x'||_2
//! ```
//!
//! The once-differentiable sample paths of Matérn 3/2 match rough physical
//! processes better than the squared exponential.

use nalgebra::DMatrix;

/// Matérn 3/2 kernel between two 2-D inputs.
pub fn matern32(x: [f64; 2], x_prime: [f64; 2], amplitude: f64, lengthscale: f64) -> f64 {
    debug_assert!(amplitude > 0.0 && lengthscale > 0.0);
    let d = distance(x, x_prime);
    matern32_of_distance(d, amplitude, lengthscale)
}

#[inline]
pub fn distance(x: [f64; 2], y: [f64; 2]) -> f64 {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    (dx * dx + dy * dy).sqrt()
}

#[inline]
pub fn matern32_of_distance(d: f64, amplitude: f64, lengthscale: f64) -> f64 {
    if d == 0.0 {
        return amplitude;
    }
    let s = 3f64.sqrt() * d / lengthscale;
    amplitude * (1.0 + s) * (-s).exp()
}

/// Derivative of the kernel with respect to `ln lengthscale` at distance `d`.
///
/// With s = sqrt(3) d / l: dk/d(ln l) = amplitude * s^2 * exp(-s).
#[inline]
pub fn matern32_dlog_lengthscale(d: f64, amplitude: f64, lengthscale: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let s = 3f64.sqrt() * d / lengthscale;
    amplitude * s * s * (-s).exp()
}

/// Pairwise distance matrix of the rows of `x` (n x 2).
pub fn distance_matrix(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = distance([x[(i, 0)], x[(i, 1)]], [x[(j, 0)], x[(j, 1)]]);
            d[(i, j)] = dij;
            d[(j, i)] = dij;
        }
    }
    d
}

/// Noise-free Gram matrix from a precomputed distance matrix.
pub fn gram_from_distances(dists: &DMatrix<f64>, amplitude: f64, lengthscale: f64) -> DMatrix<f64> {
    dists.map(|d| matern32_of_distance(d, amplitude, lengthscale))
}

/// Noise-free Gram matrix of the rows of `x`.
pub fn gram(x: &DMatrix<f64>, amplitude: f64, lengthscale: f64) -> DMatrix<f64> {
    gram_from_distances(&distance_matrix(x), amplitude, lengthscale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::DetRng;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn kernel_at_zero_distance_is_amplitude_exactly() {
        assert_eq!(matern32([0.3, 0.4], [0.3, 0.4], 0.0678, 0.1128), 0.0678);
        assert_eq!(matern32([1.0, 2.0], [1.0, 2.0], 1.0, 0.5), 1.0);
    }

    #[test]
    fn kernel_closed_form_at_characteristic_distance() {
        // d = l / sqrt(3) makes s = 1, so k = amplitude * 2 / e
        let l = 0.37;
        let d = l / 3f64.sqrt();
        let k = matern32([0.0, 0.0], [d, 0.0], 1.0, l);
        assert_relative_eq!(k, 2.0 * (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(k, 0.7358, epsilon = 1e-4);
    }

    #[test]
    fn kernel_with_reported_hyperparameters() {
        // amplitude 0.0678, lengthscale 0.1128 at d = 0.1
        let k = matern32([0.0, 0.0], [0.1, 0.0], 0.0678, 0.1128);
        let s = 3f64.sqrt() * 0.1 / 0.1128;
        let expect = 0.0678 * (1.0 + s) * (-s).exp();
        assert_relative_eq!(k, expect, epsilon = 1e-15);
        assert_abs_diff_eq!(k, 0.03702, epsilon = 5e-5);
    }

    #[test]
    fn kernel_symmetric_and_bounded() {
        let mut rng = DetRng::new(17);
        for _ in 0..500 {
            let a = [rng.next_f64(), rng.next_f64()];
            let b = [rng.next_f64(), rng.next_f64()];
            let k1 = matern32(a, b, 0.7, 0.2);
            let k2 = matern32(b, a, 0.7, 0.2);
            assert_eq!(k1, k2);
            assert!(k1 > 0.0 && k1 <= 0.7);
        }
    }

    #[test]
    fn gram_diagonal_is_amplitude() {
        let x = DMatrix::from_row_slice(3, 2, &[0.1, 0.2, 0.5, 0.1, 0.9, 0.8]);
        let k = gram(&x, 0.3, 0.25);
        for i in 0..3 {
            assert_eq!(k[(i, i)], 0.3);
        }
        assert_eq!(k[(0, 1)], k[(1, 0)]);
    }

    #[test]
    fn single_point_gram() {
        let x = DMatrix::from_row_slice(1, 2, &[0.4, 0.6]);
        let k = gram(&x, 0.0678, 0.1128);
        assert_eq!(k.nrows(), 1);
        assert_eq!(k[(0, 0)], 0.0678);
    }

    #[test]
    fn log_lengthscale_derivative_matches_finite_differences() {
        let h = 1e-6;
        for &(d, a, l) in &[(0.05, 0.7, 0.1), (0.3, 1.2, 0.4), (1.0, 0.05, 0.9)] {
            let analytic = matern32_dlog_lengthscale(d, a, l);
            let up = matern32_of_distance(d, a, (l.ln() + h).exp());
            let dn = matern32_of_distance(d, a, (l.ln() - h).exp());
            let fd = (up - dn) / (2.0 * h);
            assert_relative_eq!(analytic, fd, epsilon = 1e-6, max_relative = 1e-6);
        }
    }
}
