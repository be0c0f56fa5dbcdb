//! Direct numerical evaluation of the Schwarz-Christoffel integral.

use num_complex::Complex64;

use super::SCSpec;
use crate::error::Result;
use crate::quadrature::{integrate_singular, QuadControl};

/// Quadrature evaluator that fixes its own scale factor and vertex images
/// from A and the first side, independent of the closed forms.
#[derive(Debug, Clone)]
pub struct ScOracle {
    spec: SCSpec,
    b: Complex64,
    images: Vec<Complex64>,
    image_inf: Complex64,
    ctl: QuadControl,
}

impl ScOracle {
    pub fn new(spec: &SCSpec) -> Result<Self> {
        Self::with_control(spec, QuadControl::default())
    }

    pub fn with_control(spec: &SCSpec, ctl: QuadControl) -> Result<Self> {
        let p = &spec.prevertices;
        let e = &spec.exponents;
        let n = p.len();
        let segs = (0..n - 1)
            .map(|j| {
                let h = p[j + 1] - p[j];
                let f = |t: f64, tc: f64| {
                    let zeta = Complex64::new(p[j] + t * h, 0.0);
                    spec.integrand_with(zeta, &[(j, Complex64::new(t * h, 0.0)), (j + 1, Complex64::new(-tc * h, 0.0))]) * h
                };
                integrate_singular(&f, e[j] - 1.0, e[j + 1] - 1.0, &ctl)
            })
            .collect::<Result<Vec<_>>>()?;
        let b = (spec.images[1] - spec.a) / segs[0];
        let mut images = vec![spec.a];
        for s in &segs {
            let last = images[images.len() - 1];
            images.push(last + b * s);
        }
        let pl = p[n - 1];
        let tail = |v: f64, vc: f64| {
            let zeta = Complex64::new(pl / v, 0.0);
            spec.integrand_with(zeta, &[(n - 1, Complex64::new(pl * vc / v, 0.0))]) * (pl / (v * v))
        };
        let tail = integrate_singular(&tail, spec.alpha_inf - 1.0, e[n - 1] - 1.0, &ctl)?;
        let image_inf = images[n - 1] + b * tail;
        Ok(Self { spec: spec.clone(), b, images, image_inf, ctl })
    }

    pub fn scale(&self) -> Complex64 {
        self.b
    }

    pub fn images(&self) -> (&[Complex64], Complex64) {
        (&self.images, self.image_inf)
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let spec = &self.spec;
        let p = &spec.prevertices;
        let far = 2.0 * p[p.len() - 1] + 1.0;
        if z.norm() > far {
            // ∫_z^∞ f = ∫₀¹ f(z/s) z/s² ds
            let g = |s: f64, _: f64| spec.integrand(z / s) * z / (s * s);
            let tail = integrate_singular(&g, spec.alpha_inf - 1.0, 0.0, &self.ctl)?;
            return Ok(self.image_inf - self.b * tail);
        }
        let j = (0..p.len())
            .min_by(|&i, &k| (z - p[i]).norm().total_cmp(&(z - p[k]).norm()))
            .expect("prevertices present");
        if z == Complex64::new(p[j], 0.0) {
            return Ok(self.images[j]);
        }
        Ok(self.images[j] + self.b * spec.integral_from(j, z, &self.ctl)?)
    }
}

/// One-shot quadrature evaluation of w(z).
pub fn sc_quadrature(spec: &SCSpec, z: Complex64) -> Result<Complex64> {
    ScOracle::new(spec)?.eval(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Scenario;
    use std::f64::consts::PI;

    fn equilateral() -> SCSpec {
        let x = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, PI / 3.0)];
        SCSpec::new(vec![0.0, 1.0], vec![1.0 / 3.0; 2], 1.0 / 3.0, vec![x[0], x[1]], x[2]).unwrap()
    }

    #[test]
    fn equilateral_sides_agree() {
        let o = ScOracle::new(&equilateral()).unwrap();
        let (im, inf) = o.images();
        let s1 = (im[1] - im[0]).norm();
        let s2 = (inf - im[1]).norm();
        assert!((s1 - s2).abs() < 1e-9, "{s1} {s2}");
        assert!((inf - Complex64::from_polar(1.0, PI / 3.0)).norm() < 1e-12);
        // B matches the closed form
        assert!((o.scale() - equilateral().b).norm() < 1e-12);
    }

    #[test]
    fn boundary_maps_to_sides() {
        let s = Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], 0.5, 0.25).unwrap();
        let spec = SCSpec::for_triangle(&s).unwrap();
        let o = ScOracle::new(&spec).unwrap();
        let (im, inf) = o.images();
        assert!((im[1] - spec.images[1]).norm() < 1e-12);
        assert!((inf - spec.image_inf).norm() < 1e-12);
        let dist = |w: Complex64, a: Complex64, b: Complex64| {
            let d = b - a;
            ((w - a) * d.conj()).im.abs() / d.norm()
        };
        let cases = [
            (0.5, spec.images[0], spec.images[1]),
            (3.0, spec.images[1], spec.image_inf),
            (-2.0, spec.image_inf, spec.images[0]),
        ];
        for (x, a, b) in cases {
            let w = o.eval(Complex64::new(x, 0.0)).unwrap();
            assert!(dist(w, a, b) < 1e-9, "x={x}");
        }
    }

    #[test]
    fn prevertices_map_to_vertices() {
        let spec = equilateral();
        assert_eq!(sc_quadrature(&spec, Complex64::new(0.0, 0.0)).unwrap(), spec.images[0]);
        let w = sc_quadrature(&spec, Complex64::new(1.0, 0.0)).unwrap();
        assert!((w - spec.images[1]).norm() < 1e-13);
    }
}
