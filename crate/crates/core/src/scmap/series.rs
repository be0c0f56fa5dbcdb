//! Convergent expansions of the map around each prevertex and on the annulus
//! between the two finite nonzero prevertices of a quadrilateral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{cis, pow_uhp, SCSpec};
use crate::error::{Error, Result};
use crate::specfun::{appell_f1, gamma_ratio, gauss_2f1, gauss_2f1_real, horn_g2, SeriesControl};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Prevertex {
    Finite(f64),
    Infinity,
}

/// G(u) = ₂F₁(a, b; c; m·u) or F₁(a; b1, b2; c; m1·u, m2·u).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Series {
    Gauss { a: f64, b: f64, c: f64, m: f64 },
    Appell { a: f64, b1: f64, b2: f64, c: f64, m1: f64, m2: f64 },
}

impl Series {
    pub fn eval(&self, u: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
        match *self {
            Series::Gauss { a, b, c, m } => gauss_2f1(a, b, c, u * m, ctl),
            Series::Appell { a, b1, b2, c, m1, m2 } => appell_f1(a, b1, b2, c, u * m1, u * m2, ctl),
        }
    }

    /// Largest |m|, so the series converges for |u| < 1/max_m.
    pub fn max_m(&self) -> f64 {
        match *self {
            Series::Gauss { m, .. } => m.abs(),
            Series::Appell { m1, m2, .. } => m1.abs().max(m2.abs()),
        }
    }

    /// Termwise majorant Σ |coefficients| r^n, an upper bound for |G(u)| and
    /// for 1 + |G(u) − 1| on |u| ≤ r.
    pub fn majorant(&self, r: f64, ctl: &SeriesControl) -> Result<f64> {
        let z = |m: f64| Complex64::new(m.abs() * r, 0.0);
        Ok(match *self {
            Series::Gauss { a, b, c, m } => gauss_2f1(a.abs(), b.abs(), c, z(m), ctl)?.re,
            Series::Appell { a, b1, b2, c, m1, m2 } => appell_f1(a.abs(), b1.abs(), b2.abs(), c, z(m1), z(m2), ctl)?.re,
        })
    }
}

/// w = X + K'·u^α·G(u) with u = z − s at a finite prevertex and u = −1/z at ∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalExpansion {
    pub prevertex: Prevertex,
    pub vertex: Complex64,
    pub alpha: f64,
    pub coef: Complex64,
    pub series: Series,
}

impl LocalExpansion {
    /// Expansion at finite prevertex `idx`, or at ∞ when `idx` is None.
    pub fn at(spec: &SCSpec, idx: Option<usize>) -> Result<Self> {
        let p = &spec.prevertices;
        let e = &spec.exponents;
        let (prevertex, vertex, alpha, coef, others) = match idx {
            Some(i) => {
                let s = p[i];
                let mut coef = spec.b / e[i];
                let mut others = Vec::new();
                for j in (0..p.len()).filter(|&j| j != i) {
                    let c = p[j] - s;
                    coef *= c.abs().powf(e[j] - 1.0);
                    if c > 0.0 {
                        coef *= cis(PI * (e[j] - 1.0));
                    }
                    others.push((1.0 - e[j], 1.0 / c));
                }
                (Prevertex::Finite(s), spec.images[i], e[i], coef, others)
            }
            None => {
                let a = spec.alpha_inf;
                let coef = -spec.b * cis(-PI * a) / a;
                let others = (0..p.len()).filter(|&j| p[j] != 0.0).map(|j| (1.0 - e[j], -p[j])).collect();
                (Prevertex::Infinity, spec.image_inf, a, coef, others)
            }
        };
        let series = match others.as_slice() {
            [(b, m)] => Series::Gauss { a: alpha, b: *b, c: alpha + 1.0, m: *m },
            [(b1, m1), (b2, m2)] => Series::Appell { a: alpha, b1: *b1, b2: *b2, c: alpha + 1.0, m1: *m1, m2: *m2 },
            _ => return Err(Error::Domain("unsupported prevertex layout".into())),
        };
        Ok(Self { prevertex, vertex, alpha, coef, series })
    }

    pub fn local_coord(&self, z: Complex64) -> Complex64 {
        match self.prevertex {
            Prevertex::Finite(s) => z - s,
            Prevertex::Infinity => -z.inv(),
        }
    }

    /// Convergence radius in u.
    pub fn radius(&self) -> f64 {
        1.0 / self.series.max_m()
    }

    /// |u|/radius at z; the series converges where this is below 1.
    pub fn ratio(&self, z: Complex64) -> f64 {
        self.local_coord(z).norm() * self.series.max_m()
    }

    pub fn eval_u(&self, u: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
        if u.norm() == 0.0 {
            return Ok(self.vertex);
        }
        Ok(self.vertex + self.coef * pow_uhp(u, self.alpha) * self.series.eval(u, ctl)?)
    }

    pub fn eval(&self, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
        self.eval_u(self.local_coord(z), ctl)
    }

    /// Evaluate at u = e^{log_r + iθ}, θ ∈ [0, π]; safe when e^{log_r} underflows.
    pub fn eval_log(&self, log_r: f64, theta: f64, ctl: &SeriesControl) -> Result<Complex64> {
        let ua = Complex64::new(self.alpha * log_r, self.alpha * theta).exp();
        let u = Complex64::new(log_r, theta).exp();
        Ok(self.vertex + self.coef * ua * self.series.eval(u, ctl)?)
    }

    /// Majorant Ĝ(r) of |G| on |u| ≤ r.
    pub fn g_hat(&self, r: f64, ctl: &SeriesControl) -> Result<f64> {
        self.series.majorant(r, ctl)
    }
}

/// w = centre + K·z^g·G₂(1−α_a, 1−α_b, g, −g; −z_a/z, −z/z_b) on z_a < |z| < z_b,
/// where g = α_0 + α_a − 1 and centre is the crossing of the lines through
/// the sides (z_a, z_b) and (∞, 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusExpansion {
    pub centre: Complex64,
    pub coef: Complex64,
    pub g: f64,
    pub params: [f64; 4],
    pub inner: f64,
    pub outer: f64,
}

impl AnnulusExpansion {
    pub fn new(spec: &SCSpec) -> Result<Self> {
        if spec.k() != 4 {
            return Err(Error::Domain("annulus expansion needs a quadrilateral".into()));
        }
        spec.check_generic()?;
        let [_, za, zb] = [spec.prevertices[0], spec.prevertices[1], spec.prevertices[2]];
        let [e0, ea, eb] = [spec.exponents[0], spec.exponents[1], spec.exponents[2]];
        let k0 = LocalExpansion::at(spec, Some(0))?.coef;
        // connection coefficients of F₁(e0; 1−ea, 1−eb; e0+1; z/za, z/zb) at z/za = ∞
        let c1 = gamma_ratio(&[1.0 - ea - e0, e0 + 1.0], &[1.0 - ea])?;
        let c2 = gamma_ratio(&[e0 + ea - 1.0, e0 + 1.0], &[e0, e0 + ea])?;
        let f = gauss_2f1_real(e0, 1.0 - eb, e0 + ea, za / zb, &SeriesControl::default())?;
        let centre = spec.images[0] + k0 * c1 * za.powf(e0) * cis(PI * e0) * f;
        let coef = k0 * c2 * za.powf(1.0 - ea) * cis(PI * (1.0 - ea));
        let g = e0 + ea - 1.0;
        Ok(Self { centre, coef, g, params: [1.0 - ea, 1.0 - eb, g, -g], inner: za, outer: zb })
    }

    pub fn ratio(&self, z: Complex64) -> f64 {
        let r = z.norm();
        (self.inner / r).max(r / self.outer)
    }

    pub fn g2(&self, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
        let [a, b, c, d] = self.params;
        horn_g2(a, b, c, d, -self.inner / z, -z / self.outer, ctl)
    }

    pub fn eval(&self, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
        Ok(self.centre + self.coef * pow_uhp(z, self.g) * self.g2(z, ctl)?)
    }

    /// Evaluate at z = e^{log_r + iθ}.
    pub fn eval_log(&self, log_r: f64, theta: f64, ctl: &SeriesControl) -> Result<Complex64> {
        let zg = Complex64::new(self.g * log_r, self.g * theta).exp();
        let z = Complex64::new(log_r, theta).exp();
        Ok(self.centre + self.coef * zg * self.g2(z, ctl)?)
    }

    /// Termwise majorant of |G₂ − 1| for z_a/|z| ≤ x and |z|/z_b ≤ y.
    pub fn g2_minus_one_bound(&self, x: f64, y: f64, ctl: &SeriesControl) -> Result<f64> {
        let [a, b, c, d] = self.params;
        g2_abs_series(a, b, c, d, x, y, ctl).map(|s| s - 1.0)
    }
}

/// Σ |(α)_m (β)_n (γ)_{n−m} (δ)_{m−n}| x^m/m! y^n/n! for x, y ≥ 0.
fn g2_abs_series(alpha: f64, beta: f64, gamma: f64, delta: f64, x: f64, y: f64, ctl: &SeriesControl) -> Result<f64> {
    if x >= 1.0 || y >= 1.0 {
        return Err(Error::Domain("G2 majorant needs x, y < 1".into()));
    }
    let off = |k: i64| -> f64 {
        // |(γ)_k (δ)_{−k}| through the same recursions as the series
        let mut v: f64 = 1.0;
        if k >= 0 {
            for j in 0..k {
                v *= (gamma + j as f64) / (delta - j as f64 - 1.0);
            }
        } else {
            for j in 0..(-k) {
                v *= (delta + j as f64) / (gamma - j as f64 - 1.0);
            }
        }
        v.abs()
    };
    let mut u = vec![1.0];
    let mut w = vec![1.0];
    let mut sum = 1.0;
    let mut small = 0;
    for s in 1..ctl.max_terms {
        let k = (s - 1) as f64;
        u.push(u[s - 1] * ((alpha + k).abs() / (k + 1.0)) * x);
        w.push(w[s - 1] * ((beta + k).abs() / (k + 1.0)) * y);
        let d: f64 = (0..=s).map(|m| u[m] * w[s - m] * off(s as i64 - 2 * m as i64)).sum();
        sum += d;
        if d <= ctl.rel_tol * sum {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { terms: ctl.max_terms })
}
