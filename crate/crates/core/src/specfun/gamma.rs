use std::f64::consts::PI;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// sin(πx) with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    if r > 0.5 {
        (PI * (1.0 - r)).sin()
    } else if r < -0.5 {
        -(PI * (1.0 + r)).sin()
    } else {
        (PI * r).sin()
    }
}

fn ln_gamma_pos(x: f64) -> f64 {
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Returns `(ln|Γ(x)|, sign Γ(x))`.
pub fn ln_gamma(x: f64) -> Result<(f64, f64)> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("ln_gamma({x})")));
    }
    if x <= 0.0 && x == x.round() {
        return Err(Error::Pole(x));
    }
    if x == x.round() && (1.0..=25.0).contains(&x) {
        let f: f64 = (2..x as u32).map(f64::from).product();
        return Ok((f.ln(), 1.0));
    }
    if x >= 0.5 {
        return Ok((ln_gamma_pos(x), 1.0));
    }
    // Γ(x)Γ(1−x) = π / sin(πx)
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma_pos(1.0 - x);
    Ok((lg, s.signum()))
}

pub fn gamma(x: f64) -> Result<f64> {
    let (lg, s) = ln_gamma(x)?;
    Ok(s * lg.exp())
}

/// Π Γ(num) / Π Γ(den), accumulated in log space.
pub fn gamma_ratio(num: &[f64], den: &[f64]) -> Result<f64> {
    let mut lg = 0.0;
    let mut sign = 1.0;
    for &x in num {
        let (l, s) = ln_gamma(x)?;
        lg += l;
        sign *= s;
    }
    for &x in den {
        let (l, s) = ln_gamma(x)?;
        lg -= l;
        sign *= s;
    }
    Ok(sign * lg.exp())
}

/// Rising factorial (a)_k = Γ(a+k)/Γ(a) for any integer k.
pub fn pochhammer(a: f64, k: i64) -> Result<f64> {
    if k >= 0 {
        let mut p = 1.0;
        for j in 0..k {
            p *= a + j as f64;
        }
        return Ok(p);
    }
    // (a)_{−m} = (−1)^m / (1−a)_m
    let m = -k;
    let mut d = 1.0;
    for j in 0..m {
        let f = 1.0 - a + j as f64;
        if f == 0.0 {
            return Err(Error::Pole(a - 1.0 - j as f64));
        }
        d *= f;
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trivial_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), (0.0, 1.0));
        let (l, s) = ln_gamma(5.0).unwrap();
        assert_relative_eq!(l, 24f64.ln(), max_relative = 1e-14);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn reflection_negative_half() {
        let (l, s) = ln_gamma(-0.5).unwrap();
        assert_relative_eq!(l, (2.0 * PI.sqrt()).ln(), max_relative = 1e-14);
        assert_eq!(s, -1.0);
    }

    #[test]
    fn positive_factor_matches_euler_integral() {
        // Γ(1.5) = ∫ t^{0.5} e^{−t} dt by composite Simpson on [0, 60] with t = u².
        let n = 20_000;
        let h = (60f64).sqrt() / n as f64;
        let f = |u: f64| 2.0 * u * u * (-u * u).exp();
        let mut acc = f(0.0) + f(n as f64 * h);
        for i in 1..n {
            acc += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = acc * h / 3.0;
        assert_relative_eq!(gamma(1.5).unwrap(), integral, max_relative = 1e-10);
        assert_relative_eq!(gamma(-0.5).unwrap(), -2.0 * PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn poles() {
        assert_eq!(ln_gamma(0.0), Err(Error::Pole(0.0)));
        assert_eq!(ln_gamma(-3.0), Err(Error::Pole(-3.0)));
        assert!(pochhammer(2.0, -2).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(0.7, 0).unwrap(), 1.0);
        assert_eq!(pochhammer(3.0, 2).unwrap(), 12.0);
        assert_relative_eq!(pochhammer(0.5, -1).unwrap(), -2.0);
        // Γ-ratio oracle
        let g = gamma(0.5 - 3.0).unwrap() / gamma(0.5).unwrap();
        assert_relative_eq!(pochhammer(0.5, -3).unwrap(), g, max_relative = 1e-13);
    }

    #[test]
    fn integer_factorials() {
        let mut f = 1.0;
        for n in 1..20 {
            f *= n as f64;
            assert_relative_eq!(gamma(n as f64 + 1.0).unwrap(), f, max_relative = 2e-14);
        }
    }
}
