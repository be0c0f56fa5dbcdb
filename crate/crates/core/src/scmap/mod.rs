//! Schwarz-Christoffel maps from the upper half plane onto triangles and
//! quadrilaterals, evaluated by local hypergeometric expansions with a
//! quadrature fallback.

mod dispatch;
mod oracle;
mod series;

pub use dispatch::{quad_map, quad_map_rescaled, triangle_map, DiskMap, RegionTag};
pub use oracle::{sc_quadrature, ScOracle};
pub use series::{AnnulusExpansion, LocalExpansion, Prevertex, Series};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{interior_angles, intersections, Scenario};
use crate::specfun::{gamma_ratio, gauss_2f1_real, SeriesControl};

/// Tolerance on Σα = k − 2 and on the parallel-sides guard.
pub const ANGLE_SUM_TOL: f64 = 1e-12;
pub const PARALLEL_TOL: f64 = 1e-9;

/// w^e with arg w clamped to [0, π], the branch used on the closed upper half plane.
pub fn pow_uhp(w: Complex64, e: f64) -> Complex64 {
    let r = w.norm();
    if r == 0.0 {
        return if e > 0.0 { Complex64::new(0.0, 0.0) } else { Complex64::new(f64::INFINITY, 0.0) };
    }
    let arg = w.im.atan2(w.re).clamp(0.0, PI);
    Complex64::from_polar(r.powf(e), e * arg)
}

pub(crate) fn cis(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// w(z) = A + B ∫₀^z Π (ζ − z_j)^{α_j − 1} dζ with finite prevertices
/// 0 = z_0 < z_1 (< z_2) and the last vertex at ∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SCSpec {
    pub prevertices: Vec<f64>,
    pub exponents: Vec<f64>,
    pub alpha_inf: f64,
    pub images: Vec<Complex64>,
    pub image_inf: Complex64,
    pub a: Complex64,
    pub b: Complex64,
}

impl SCSpec {
    /// Build from prevertices, angles and vertex images; B is fixed by the
    /// first side through its closed form.
    pub fn new(
        prevertices: Vec<f64>,
        exponents: Vec<f64>,
        alpha_inf: f64,
        images: Vec<Complex64>,
        image_inf: Complex64,
    ) -> Result<Self> {
        let n = prevertices.len();
        if !(2..=3).contains(&n) || exponents.len() != n || images.len() != n {
            return Err(Error::Domain("expected two or three finite prevertices".into()));
        }
        if prevertices[0] != 0.0 || prevertices.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain(format!("prevertices {prevertices:?} must start at 0 and increase")));
        }
        let all = exponents.iter().chain(std::iter::once(&alpha_inf));
        if all.clone().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Domain("exponents must lie in (0, 1)".into()));
        }
        let sum: f64 = all.sum();
        if (sum - (n as f64 - 1.0)).abs() > ANGLE_SUM_TOL * 10.0 {
            return Err(Error::Domain(format!("exponent sum {sum} != {}", n - 1)));
        }
        let b = (images[1] - images[0]) / first_side_integral(&prevertices, &exponents)?;
        Ok(Self { a: images[0], b, prevertices, exponents, alpha_inf, images, image_inf })
    }

    /// Map fixed by its first two vertex images; the remaining images are
    /// computed by quadrature.
    pub fn from_first_side(
        prevertices: Vec<f64>,
        exponents: Vec<f64>,
        alpha_inf: f64,
        x0: Complex64,
        x1: Complex64,
    ) -> Result<Self> {
        let n = prevertices.len();
        let mut images = vec![x0, x1];
        images.resize(n, x1);
        let provisional = Self::new(prevertices, exponents, alpha_inf, images, x1)?;
        let o = ScOracle::new(&provisional)?;
        let (im, inf) = o.images();
        Ok(Self { images: im.to_vec(), image_inf: inf, ..provisional })
    }

    pub fn k(&self) -> usize {
        self.prevertices.len() + 1
    }

    /// Π (ζ − z_j)^{α_j − 1}.
    pub fn integrand(&self, zeta: Complex64) -> Complex64 {
        self.integrand_with(zeta, &[])
    }

    /// Integrand with some differences ζ − z_j supplied exactly by the caller,
    /// which keeps endpoint factors consistent with quadrature weights.
    pub fn integrand_with(&self, zeta: Complex64, exact: &[(usize, Complex64)]) -> Complex64 {
        self.prevertices
            .iter()
            .zip(&self.exponents)
            .enumerate()
            .map(|(j, (&p, &e))| {
                let d = exact.iter().find(|(i, _)| *i == j).map_or(zeta - p, |(_, d)| *d);
                pow_uhp(d, e - 1.0)
            })
            .product()
    }

    /// ∫ from prevertex j to z along the straight segment.
    pub(crate) fn integral_from(&self, j: usize, z: Complex64, ctl: &crate::quadrature::QuadControl) -> Result<Complex64> {
        let p = self.prevertices[j];
        let d = z - p;
        let g = |t: f64, _: f64| self.integrand_with(p + d * t, &[(j, d * t)]) * d;
        crate::quadrature::integrate_singular(&g, self.exponents[j] - 1.0, 0.0, ctl)
    }

    /// Rejects quadrilaterals with a pair of parallel sides.
    pub fn check_generic(&self) -> Result<()> {
        let mut e = self.exponents.clone();
        e.push(self.alpha_inf);
        let k = e.len();
        if k == 4 {
            for i in 0..k {
                if (e[i] + e[(i + 1) % k] - 1.0).abs() < PARALLEL_TOL {
                    return Err(Error::ParallelSides);
                }
            }
        }
        Ok(())
    }

    /// Same map precomposed with z ↦ z·z_1, moving the second prevertex to 1.
    pub fn rescaled(&self) -> Result<Self> {
        let s = self.prevertices[1];
        let p = self.prevertices.iter().map(|&x| x / s).collect();
        Self::new(p, self.exponents.clone(), self.alpha_inf, self.images.clone(), self.image_inf)
    }

    /// Intersection of the lines through the sides (z_1, z_2) and (∞, 0).
    pub fn x13(&self) -> Result<Complex64> {
        if self.k() != 4 {
            return Err(Error::Domain("x13 needs a quadrilateral".into()));
        }
        line_intersection(self.images[1], self.images[2], self.image_inf, self.images[0])
    }

    /// Theorem labeling for k = 3: 0 ↦ x_3, 1 ↦ x_1, ∞ ↦ x_2.
    pub fn for_triangle(s: &Scenario) -> Result<Self> {
        if s.k() != 3 {
            return Err(Error::Domain("scenario is not a triangle".into()));
        }
        let x = images_of(s)?;
        let al = interior_angles(s)?;
        Self::new(vec![0.0, 1.0], vec![al[2], al[0]], al[1], vec![x[2], x[0]], x[1])
    }

    /// Theorem labeling for k = 4: 0 ↦ x_3, z4 ↦ x_4, 1 ↦ x_1, ∞ ↦ x_2.
    pub fn for_quad(s: &Scenario, z4: f64) -> Result<Self> {
        if s.k() != 4 {
            return Err(Error::Domain("scenario is not a quadrilateral".into()));
        }
        if !(z4 > 0.0 && z4 < 1.0) {
            return Err(Error::Domain(format!("z4={z4} outside (0, 1)")));
        }
        let x = images_of(s)?;
        let al = interior_angles(s)?;
        let spec = Self::new(vec![0.0, z4, 1.0], vec![al[2], al[3], al[0]], al[1], vec![x[2], x[3], x[0]], x[1])?;
        spec.check_generic()?;
        Ok(spec)
    }
}

fn images_of(s: &Scenario) -> Result<Vec<Complex64>> {
    Ok(intersections(s)?.into_iter().map(|[x, y]| Complex64::new(x, y)).collect())
}

/// Intersection of line(p1, p2) with line(q1, q2).
pub fn line_intersection(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> Result<Complex64> {
    let d = p2 - p1;
    let e = q2 - q1;
    let cross = d.re * e.im - d.im * e.re;
    if cross.abs() < 1e-300 || cross.abs() < PARALLEL_TOL * d.norm() * e.norm() {
        return Err(Error::ParallelSides);
    }
    let w = q1 - p1;
    let t = (w.re * e.im - w.im * e.re) / cross;
    Ok(p1 + d * t)
}

/// ∫ from z_0 to z_1 along the real axis of the integrand, in closed form.
fn first_side_integral(p: &[f64], e: &[f64]) -> Result<Complex64> {
    let h = p[1] - p[0];
    let beta = gamma_ratio(&[e[0], e[1]], &[e[0] + e[1]])?;
    let mut v = cis(PI * (e[1] - 1.0)) * h.powf(e[0] + e[1] - 1.0) * beta;
    if p.len() == 3 {
        let l = p[2] - p[0];
        let f = gauss_2f1_real(1.0 - e[2], e[0], e[0] + e[1], h / l, &SeriesControl::default())?;
        v *= cis(PI * (e[2] - 1.0)) * l.powf(e[2] - 1.0) * f;
    }
    Ok(v)
}
