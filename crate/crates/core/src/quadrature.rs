//! Gauss-Jacobi rules on [0, 1] and an adaptive integrator for integrands
//! with algebraic endpoint singularities.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::specfun::ln_gamma;

/// Nodes and weights for ∫₀¹ s^{e0} (1−s)^{e1} g(s) ds.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl JacobiRule {
    /// Golub-Welsch on the Jacobi matrix of the weight (1−x)^a (1+x)^b on [−1, 1].
    pub fn new(n: usize, e0: f64, e1: f64) -> Result<Self> {
        if e0 <= -1.0 || e1 <= -1.0 || n == 0 {
            return Err(Error::Domain(format!("jacobi rule n={n} e0={e0} e1={e1}")));
        }
        let (a, b) = (e1, e0);
        let ab = a + b;
        let mut m = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let k = i as f64;
            let diag = if i == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
            };
            m[(i, i)] = diag;
            if i + 1 < n {
                let k = k + 1.0;
                let off2 = if i == 0 {
                    4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
                } else {
                    4.0 * k * (k + a) * (k + b) * (k + ab)
                        / ((2.0 * k + ab).powi(2) * (2.0 * k + ab + 1.0) * (2.0 * k + ab - 1.0))
                };
                let off = off2.sqrt();
                m[(i, i + 1)] = off;
                m[(i + 1, i)] = off;
            }
        }
        let eig = SymmetricEigen::new(m);
        // total mass of the weight on [0,1]: B(e0+1, e1+1)
        let mass = (ln_gamma(e0 + 1.0)?.0 + ln_gamma(e1 + 1.0)?.0 - ln_gamma(e0 + e1 + 2.0)?.0).exp();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (0.5 * (eig.eigenvalues[i] + 1.0), mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn apply<F: FnMut(f64) -> Complex64>(&self, mut g: F) -> Complex64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&s, &w)| g(s) * w)
            .sum()
    }
}

thread_local! {
    static RULES: RefCell<HashMap<(u64, u64, usize), Rc<JacobiRule>>> = RefCell::new(HashMap::new());
}

/// Cached rule lookup; rules are keyed on the exact exponent bits.
pub fn jacobi_rule(n: usize, e0: f64, e1: f64) -> Result<Rc<JacobiRule>> {
    let key = (e0.to_bits(), e1.to_bits(), n);
    if let Some(r) = RULES.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(r);
    }
    let rule = Rc::new(JacobiRule::new(n, e0, e1)?);
    RULES.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() > 512 {
            c.clear();
        }
        c.insert(key, rule.clone());
    });
    Ok(rule)
}

/// Settings for [`integrate_singular`].
#[derive(Debug, Clone, Copy)]
pub struct QuadControl {
    pub tol: f64,
    pub order: usize,
    pub max_depth: usize,
}

impl Default for QuadControl {
    fn default() -> Self {
        Self {
            tol: 1e-13,
            order: 20,
            max_depth: 120,
        }
    }
}

/// ∫₀¹ f(s) ds where f(s) ~ s^{e0} near 0 and ~ (1−s)^{e1} near 1.
///
/// `f` is the full integrand, called as `f(s, 1 − s)` with the complement
/// formed from the panel end so it keeps full relative precision near 1.
/// The algebraic factors are divided out and absorbed into Gauss-Jacobi
/// weights on the end panels; interior panels use Gauss-Legendre. Panels are
/// bisected until two rule orders agree.
pub fn integrate_singular<F: Fn(f64, f64) -> Complex64>(
    f: &F,
    e0: f64,
    e1: f64,
    ctl: &QuadControl,
) -> Result<Complex64> {
    let first = panel(f, 0.0, 1.0, Some(e0), Some(e1), ctl.order)?;
    let scale = first.0.norm().max(first.1.norm());
    if !scale.is_finite() {
        return Err(Error::Quadrature("non-finite integrand".into()));
    }
    let abs = ctl.tol * scale.max(1e-300);
    refine(f, 0.0, 1.0, Some(e0), Some(e1), first, abs, ctl, 0)
}

type PanelPair = (Complex64, Complex64);

fn panel<F: Fn(f64, f64) -> Complex64>(
    f: &F,
    l: f64,
    r: f64,
    el: Option<f64>,
    er: Option<f64>,
    n: usize,
) -> Result<PanelPair> {
    let a = el.unwrap_or(0.0);
    let b = er.unwrap_or(0.0);
    let h = r - l;
    let g = |t: f64| {
        let mut v = f(l + t * h, (1.0 - r) + (1.0 - t) * h) * h;
        if a != 0.0 {
            v /= t.powf(a);
        }
        if b != 0.0 {
            v /= (1.0 - t).powf(b);
        }
        v
    };
    let lo = jacobi_rule(n, a, b)?.apply(g);
    let hi = jacobi_rule(2 * n, a, b)?.apply(g);
    Ok((hi, lo))
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64, f64) -> Complex64>(
    f: &F,
    l: f64,
    r: f64,
    el: Option<f64>,
    er: Option<f64>,
    est: PanelPair,
    abs: f64,
    ctl: &QuadControl,
    depth: usize,
) -> Result<Complex64> {
    let (hi, lo) = est;
    if !hi.re.is_finite() || !hi.im.is_finite() {
        return Err(Error::Quadrature(format!("non-finite panel on [{l}, {r}]")));
    }
    if (hi - lo).norm() <= abs.max(ctl.tol * hi.norm() * 1e-2) {
        return Ok(hi);
    }
    if depth >= ctl.max_depth {
        return Err(Error::Quadrature(format!(
            "depth {depth} reached on [{l:e}, {r:e}]"
        )));
    }
    let m = 0.5 * (l + r);
    let left = panel(f, l, m, el, None, ctl.order)?;
    let right = panel(f, m, r, None, er, ctl.order)?;
    Ok(refine(f, l, m, el, None, left, abs, ctl, depth + 1)?
        + refine(f, m, r, None, er, right, abs, ctl, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weights_sum_to_beta() {
        let r = JacobiRule::new(12, -0.7, 0.3).unwrap();
        let total: f64 = r.weights.iter().sum();
        let beta = (ln_gamma(0.3).unwrap().0 + ln_gamma(1.3).unwrap().0 - ln_gamma(1.6).unwrap().0).exp();
        assert_relative_eq!(total, beta, max_relative = 1e-13);
    }

    #[test]
    fn polynomial_moments_are_exact() {
        // ∫ s^{e0}(1−s)^{e1} s^3 ds = B(e0+4, e1+1)
        let (e0, e1) = (-0.99, -0.5);
        let r = JacobiRule::new(8, e0, e1).unwrap();
        let got = r.apply(|s| Complex64::new(s.powi(3), 0.0)).re;
        let want = (ln_gamma(e0 + 4.0).unwrap().0 + ln_gamma(e1 + 1.0).unwrap().0
            - ln_gamma(e0 + e1 + 5.0).unwrap().0)
            .exp();
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn adaptive_handles_nearby_singularity() {
        // ∫₀¹ s^{-1/2} / (s + 1e-3) ds = 2 atan(1/√1e-3)/√1e-3
        let c = 1e-3f64;
        let f = |s: f64, _: f64| Complex64::new(s.powf(-0.5) / (s + c), 0.0);
        let got = integrate_singular(&f, -0.5, 0.0, &QuadControl::default()).unwrap();
        let want = 2.0 * (1.0 / c.sqrt()).atan() / c.sqrt();
        assert_relative_eq!(got.re, want, max_relative = 1e-11);
    }
}
