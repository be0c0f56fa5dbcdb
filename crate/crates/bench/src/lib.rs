//! Shared fixtures for the criterion benchmarks.

use disktree::geometry::Scenario;
use num_complex::Complex64;

pub fn triangle_demo(eps: f64) -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], eps, 0.25).expect("demo triangle")
}

pub fn quad_demo(eps: f64) -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5], eps, 0.25).expect("demo quad")
}

/// Points spread over the upper half plane, from near the real axis to |z| ~ 10.
pub fn sample_points(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            Complex64::from_polar(10f64.powf(2.0 * t - 1.0), std::f64::consts::PI * (0.05 + 0.9 * t * t))
        })
        .collect()
}
