use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::gamma_ratio;
use super::{near_integer, SeriesControl};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_singular, QuadControl};

fn c64(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn check_lower(c: f64) -> Result<()> {
    if c <= 0.0 && c == c.round() {
        return Err(Error::Pole(c));
    }
    Ok(())
}

/// Γ-quotient that evaluates to zero when a denominator argument is a pole.
fn gamma_quot(num: &[f64], den: &[f64]) -> Result<f64> {
    if den.iter().any(|&x| x <= 0.0 && x == x.round()) {
        return Ok(0.0);
    }
    gamma_ratio(num, den)
}

fn gauss_sum(a: f64, b: f64, c: f64) -> Result<f64> {
    if c - a - b <= 0.0 {
        return Err(Error::Domain(format!(
            "2F1 at z=1 needs c-a-b>0, got {}",
            c - a - b
        )));
    }
    gamma_quot(&[c, c - a - b], &[c - a, c - b])
}

/// Gauss hypergeometric ₂F₁(a,b;c;z) by its power series for |z| < 1, and by
/// Gauss summation at z = 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64> {
    check_lower(c)?;
    if z == c64(1.0) {
        return gauss_sum(a, b, c).map(c64);
    }
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("2F1 series needs |z|<1, got |z|={}", z.norm())));
    }
    let mut sum = c64(1.0);
    let mut term = c64(1.0);
    let mut small = 0;
    for n in 0..ctl.max_terms {
        let k = n as f64;
        term *= z * ((a + k) * (b + k) / ((c + k) * (k + 1.0)));
        sum += term;
        if term.norm() <= ctl.rel_tol * sum.norm() + ctl.abs_tol {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NoConvergence { terms: ctl.max_terms })
}

/// ₂F₁ through its Euler integral, valid for c > b > 0 and z off [1, ∞).
pub fn gauss_2f1_euler(a: f64, b: f64, c: f64, z: Complex64) -> Result<Complex64> {
    if !(c > b && b > 0.0) {
        return Err(Error::Domain(format!("Euler integral needs c>b>0 (b={b}, c={c})")));
    }
    if z.im == 0.0 && z.re >= 1.0 {
        return Err(Error::Branch(format!("z={z} on [1,inf)")));
    }
    let (e0, e1) = (b - 1.0, c - b - 1.0);
    let f = |t: f64, tc: f64| {
        let base = (1.0 - z * t).powf(-a);
        base * t.powf(e0) * tc.powf(e1)
    };
    let i = integrate_singular(&f, e0, e1, &QuadControl::default())?;
    Ok(i * gamma_ratio(&[c], &[b, c - b])?)
}

/// Real-argument ₂F₁ on (−∞, 1], continued by the Pfaff transformation for
/// negative arguments and by the 1−x connection formula near 1.
pub fn gauss_2f1_real(a: f64, b: f64, c: f64, x: f64, ctl: &SeriesControl) -> Result<f64> {
    check_lower(c)?;
    if x > 1.0 || !x.is_finite() {
        return Err(Error::Domain(format!("real 2F1 at x={x}")));
    }
    if x == 1.0 {
        return gauss_sum(a, b, c);
    }
    if x < -0.5 {
        // ₂F₁(a,b;c;x) = (1−x)^{−b} ₂F₁(c−a,b;c;x/(x−1))
        let y = x / (x - 1.0);
        return Ok((1.0 - x).powf(-b) * gauss_2f1_real(c - a, b, c, y, ctl)?);
    }
    let s = c - a - b;
    if x <= 0.6 || (near_integer(s) && x < 0.95) {
        return Ok(gauss_2f1(a, b, c, c64(x), ctl)?.re);
    }
    if near_integer(s) {
        return Err(Error::Domain(format!("c-a-b={s} is an integer near x=1")));
    }
    let y = 1.0 - x;
    let t1 = gamma_quot(&[c, s], &[c - a, c - b])?;
    let t2 = gamma_quot(&[c, -s], &[a, b])?;
    let mut v = 0.0;
    if t1 != 0.0 {
        v += t1 * gauss_2f1(a, b, 1.0 - s, c64(y), ctl)?.re;
    }
    if t2 != 0.0 {
        v += t2 * y.powf(s) * gauss_2f1(c - a, c - b, 1.0 + s, c64(y), ctl)?.re;
    }
    Ok(v)
}

fn push_coef(v: &mut Vec<Complex64>, p: f64, z: Complex64) {
    let n = v.len() - 1;
    let k = n as f64;
    let next = v[n] * z * ((p + k) / (k + 1.0));
    v.push(next);
}

/// Appell F₁(a;b1,b2;c;x,y) by its double series on the bidisk, summed along
/// anti-diagonals m+n = s.
pub fn appell_f1(
    a: f64,
    b1: f64,
    b2: f64,
    c: f64,
    x: Complex64,
    y: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    check_lower(c)?;
    if x.norm() >= 1.0 || y.norm() >= 1.0 {
        return Err(Error::Domain(format!("F1 series needs |x|,|y|<1 (x={x}, y={y})")));
    }
    let mut u = vec![c64(1.0)];
    let mut v = vec![c64(1.0)];
    let mut ratio = 1.0;
    let mut sum = c64(1.0);
    let mut small = 0;
    for s in 1..ctl.max_terms {
        push_coef(&mut u, b1, x);
        push_coef(&mut v, b2, y);
        let k = (s - 1) as f64;
        ratio *= (a + k) / (c + k);
        let mut d = c64(0.0);
        let mut mag = 0.0;
        for m in 0..=s {
            let t = u[m] * v[s - m];
            d += t;
            mag += t.norm();
        }
        d *= ratio;
        mag *= ratio.abs();
        sum += d;
        if mag <= ctl.rel_tol * sum.norm() + ctl.abs_tol {
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

/// F₁ through its Euler integral, valid for 0 < a < c and x, y off [1, ∞).
pub fn appell_f1_euler(a: f64, b1: f64, b2: f64, c: f64, x: Complex64, y: Complex64) -> Result<Complex64> {
    if !(c > a && a > 0.0) {
        return Err(Error::Domain(format!("F1 Euler integral needs 0<a<c (a={a}, c={c})")));
    }
    for w in [x, y] {
        if w.im == 0.0 && w.re >= 1.0 {
            return Err(Error::Branch(format!("argument {w} on [1,inf)")));
        }
    }
    let (e0, e1) = (a - 1.0, c - a - 1.0);
    let f = |t: f64, tc: f64| {
        (1.0 - x * t).powf(-b1) * (1.0 - y * t).powf(-b2) * t.powf(e0) * tc.powf(e1)
    };
    let i = integrate_singular(&f, e0, e1, &QuadControl::default())?;
    Ok(i * gamma_ratio(&[c], &[a, c - a])?)
}

/// (γ)_k (δ)_{−k} for k = n − m, tabulated outward from k = 0.
struct OffsetTable {
    gamma: f64,
    delta: f64,
    closed: bool,
    pos: Vec<f64>,
    neg: Vec<f64>,
}

impl OffsetTable {
    fn new(gamma: f64, delta: f64) -> Self {
        Self {
            gamma,
            delta,
            closed: (gamma + delta).abs() < 1e-14,
            pos: vec![1.0],
            neg: vec![1.0],
        }
    }

    fn get(&mut self, k: i64) -> Result<f64> {
        if self.closed {
            // (γ)_k (−γ)_{−k} = (−1)^k γ/(γ+k)
            let g = self.gamma;
            if k == 0 {
                return Ok(1.0);
            }
            let den = g + k as f64;
            if den == 0.0 {
                return Err(Error::Pole(g));
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            return Ok(sign * g / den);
        }
        let j = k.unsigned_abs() as usize;
        while self.pos.len() <= j && k >= 0 {
            let i = (self.pos.len() - 1) as f64;
            let den = self.delta - i - 1.0;
            if den == 0.0 {
                return Err(Error::Pole(self.delta));
            }
            let next = self.pos[self.pos.len() - 1] * (self.gamma + i) / den;
            self.pos.push(next);
        }
        while self.neg.len() <= j && k < 0 {
            let i = (self.neg.len() - 1) as f64;
            let den = self.gamma - i - 1.0;
            if den == 0.0 {
                return Err(Error::Pole(self.gamma));
            }
            let next = self.neg[self.neg.len() - 1] * (self.delta + i) / den;
            self.neg.push(next);
        }
        Ok(if k >= 0 { self.pos[j] } else { self.neg[j] })
    }
}

/// Horn G₂(α,β,γ,δ;x,y) = Σ (α)_m (β)_n (γ)_{n−m} (δ)_{m−n} x^m/m! y^n/n!.
#[allow(clippy::too_many_arguments)]
pub fn horn_g2(
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
    x: Complex64,
    y: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    if x.norm() >= 1.0 || y.norm() >= 1.0 {
        return Err(Error::Domain(format!("G2 series needs |x|,|y|<1 (x={x}, y={y})")));
    }
    let mut table = OffsetTable::new(gamma, delta);
    let mut u = vec![c64(1.0)];
    let mut v = vec![c64(1.0)];
    let mut sum = c64(1.0);
    let mut small = 0;
    for s in 1..ctl.max_terms {
        push_coef(&mut u, alpha, x);
        push_coef(&mut v, beta, y);
        let mut d = c64(0.0);
        let mut mag = 0.0;
        for m in 0..=s {
            let n = s - m;
            let t = u[m] * v[n] * table.get(n as i64 - m as i64)?;
            d += t;
            mag += t.norm();
        }
        sum += d;
        if mag <= ctl.rel_tol * sum.norm() + ctl.abs_tol {
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

/// Right-hand side of the F₁ connection formula between the origin and x = ∞:
///
/// F₁(α,β′,β,γ;y,x) = Γ(β−α)Γ(γ)/(Γ(β)Γ(γ−α)) (−x)^{−α} F₁(α,1+α−γ,β′,1+α−β;1/x,y/x)
///                  + Γ(α−β)Γ(γ)/(Γ(α)Γ(γ−β)) (−x)^{−β} G₂(β,β′,α−β,1+β−γ;−1/x,−y).
///
/// x must lie in the closed upper half plane; −x = e^{−iπ}x.
#[allow(clippy::too_many_arguments)]
pub fn f1_connection(
    alpha: f64,
    beta_p: f64,
    beta: f64,
    gamma: f64,
    y: Complex64,
    x: Complex64,
    ctl: &SeriesControl,
) -> Result<Complex64> {
    for (name, v) in [("gamma", gamma), ("beta-alpha", beta - alpha), ("beta-gamma", beta - gamma)] {
        if near_integer(v) {
            return Err(Error::Domain(format!("{name}={v} is an integer")));
        }
    }
    if x.im < 0.0 {
        return Err(Error::Branch(format!("x={x} below the real axis")));
    }
    if x.im == 0.0 && x.re > 0.0 {
        return Err(Error::Branch(format!("x={x} on the positive real axis")));
    }
    let arg = x.im.atan2(x.re).clamp(0.0, PI);
    let log_neg_x = Complex64::new(x.norm().ln(), arg - PI);
    let c1 = gamma_quot(&[beta - alpha, gamma], &[beta, gamma - alpha])?;
    let c2 = gamma_quot(&[alpha - beta, gamma], &[alpha, gamma - beta])?;
    let inv = x.inv();
    let mut out = c64(0.0);
    if c1 != 0.0 {
        let f = appell_f1(alpha, 1.0 + alpha - gamma, beta_p, 1.0 + alpha - beta, inv, y * inv, ctl)?;
        out += (log_neg_x * -alpha).exp() * f * c1;
    }
    if c2 != 0.0 {
        let g = horn_g2(beta, beta_p, alpha - beta, 1.0 + beta - gamma, -inv, -y, ctl)?;
        out += (log_neg_x * -beta).exp() * g * c2;
    }
    Ok(out)
}
