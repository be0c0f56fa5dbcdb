//! The accessory parameter z4 of the quadrilateral map, its small-ε
//! asymptotics, and Rengel bounds on the conformal modulus.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify, interior_angles, intersections, PolygonKind, Scenario};
use crate::scmap::{SCSpec, ScOracle};
use crate::specfun::{gauss_2f1_real, ln_gamma, SeriesControl};

/// Coordinate used for the root solve: log z4, or log(1 − z4) through the
/// cyclic relabel L'_i = L_{i+1}, under which z4 becomes 1 − z4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Z4Solution {
    pub z4: f64,
    pub log_z4: f64,
    pub log_one_minus_z4: f64,
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
    pub chart: Chart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulusBracket {
    pub lower: f64,
    pub upper: f64,
    pub area: f64,
    pub s_a: f64,
    pub s_b: f64,
}

/// Solver settings.
#[derive(Debug, Clone, Copy)]
pub struct SolveControl {
    pub tol: f64,
    pub max_iter: usize,
    pub min_log: f64,
}

impl Default for SolveControl {
    fn default() -> Self {
        Self { tol: 1e-14, max_iter: 200, min_log: -700.0 }
    }
}

/// log(|x1 − x2| / |x3 − x4|) as a function of log z4, in closed form.
#[derive(Debug, Clone, Copy)]
pub struct SideRatio {
    alpha: [f64; 4],
    log_const: f64,
    log_target: f64,
}

fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)?.0 + ln_gamma(b)?.0 - ln_gamma(a + b)?.0)
}

fn side_target(s: &Scenario) -> Result<f64> {
    let x = intersections(s)?;
    let d = |i: usize, j: usize| (x[i][0] - x[j][0]).hypot(x[i][1] - x[j][1]);
    Ok((d(0, 1) / d(2, 3)).ln())
}

impl SideRatio {
    pub fn new(s: &Scenario) -> Result<Self> {
        if classify(s).kind != PolygonKind::ConvexQuad {
            return Err(Error::Degenerate("z4 needs a convex quadrilateral scenario".into()));
        }
        let al = interior_angles(s)?;
        let alpha = [al[0], al[1], al[2], al[3]];
        if (alpha[2] + alpha[3] - 1.0).abs() < crate::scmap::PARALLEL_TOL {
            return Err(Error::ParallelSides);
        }
        let log_const = ln_beta(alpha[0], alpha[1])? - ln_beta(alpha[2], alpha[3])?;
        Ok(Self { alpha, log_const, log_target: side_target(s)? })
    }

    /// Exponent g = α3 + α4 − 1 of the leading term −g·log z4.
    pub fn slope(&self) -> f64 {
        self.alpha[2] + self.alpha[3] - 1.0
    }

    pub fn residual(&self, log_z4: f64) -> Result<f64> {
        let [a1, a2, a3, a4] = self.alpha;
        let z = log_z4.exp();
        let ctl = SeriesControl::default();
        let num = gauss_2f1_real(a2, 1.0 - a4, a1 + a2, z, &ctl)?;
        let den = gauss_2f1_real(a3, 1.0 - a1, a3 + a4, z, &ctl)?;
        Ok(self.log_const - self.slope() * log_z4 + (num / den).ln() - self.log_target)
    }

    /// Root of the leading-order law, ignoring the 2F1 factors.
    pub fn guess(&self) -> f64 {
        (self.log_const - self.log_target) / self.slope()
    }
}

/// Residual of the closed-form side-ratio identity at z4 ∈ (0, 1).
pub fn side_ratio_residual(s: &Scenario, z4: f64) -> Result<f64> {
    if !(z4 > 0.0 && z4 < 1.0) {
        return Err(Error::Domain(format!("z4={z4} outside (0, 1)")));
    }
    SideRatio::new(s)?.residual(z4.ln())
}

/// Same residual with the side lengths taken from quadrature of the SC integral.
pub fn side_ratio_residual_quadrature(s: &Scenario, z4: f64) -> Result<f64> {
    let spec = SCSpec::for_quad(s, z4)?;
    let o = ScOracle::new(&spec)?;
    let (im, inf) = o.images();
    // canonical images: 0 ↦ x3, z4 ↦ x4, 1 ↦ x1, ∞ ↦ x2
    let ratio = (inf - im[2]).norm() / (im[1] - im[0]).norm();
    Ok(ratio.ln() - side_target(s)?)
}

struct Root {
    x: f64,
    f: f64,
    iterations: usize,
    bracket: (f64, f64),
}

/// Illinois false position on a sign-changing bracket.
fn illinois<F: Fn(f64) -> Result<f64>>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, ctl: &SolveControl) -> Result<Root> {
    let bracket = (a.min(b), a.max(b));
    let mut side = 0i8;
    for it in 1..=ctl.max_iter {
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let fc = f(c)?;
        if fc == 0.0 || (b - a).abs() < ctl.tol * (1.0 + c.abs()) || fc.abs() < ctl.tol {
            return Ok(Root { x: c, f: fc, iterations: it, bracket });
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::NoConvergence { terms: ctl.max_iter })
}

/// Bracket and solve r(L) = 0 on L < `cap` (cap ≤ 0), expanding downward
/// from the asymptotic guess and, when cap = 0, also toward 0.
fn solve_log<F: Fn(f64) -> Result<f64>>(r: &F, guess: f64, cap: f64, ctl: &SolveControl) -> Result<Root> {
    let open_top = cap >= 0.0;
    let mut hi = if open_top { -1.0 } else { cap };
    let mut fhi = r(hi)?;
    let mut lo = if guess.is_finite() { guess.min(hi) - 1.0 } else { hi - 1.0 };
    let mut flo = r(lo)?;
    let mut step = 1.0;
    while flo * fhi > 0.0 {
        let lo_done = lo <= ctl.min_log;
        let hi_done = !open_top || hi.abs() < 1e-15;
        if lo_done && hi_done {
            return Err(Error::NoBracket { lo, hi });
        }
        if !lo_done {
            lo = (lo - step).max(ctl.min_log);
            step *= 2.0;
            flo = r(lo)?;
        }
        if !hi_done && flo * fhi > 0.0 {
            hi *= 0.25;
            fhi = r(hi)?;
        }
    }
    if flo == 0.0 {
        return Ok(Root { x: lo, f: 0.0, iterations: 0, bracket: (lo, hi) });
    }
    if fhi == 0.0 {
        return Ok(Root { x: hi, f: 0.0, iterations: 0, bracket: (lo, hi) });
    }
    illinois(r, lo, hi, flo, fhi, ctl)
}

fn finish(root: Root, chart: Chart) -> Z4Solution {
    let l = root.x;
    let (lo, hi) = root.bracket;
    match chart {
        Chart::Zero => Z4Solution {
            z4: l.exp(),
            log_z4: l,
            log_one_minus_z4: (-l.exp()).ln_1p(),
            residual: root.f,
            iterations: root.iterations,
            bracket: (lo.exp(), hi.exp()),
            chart,
        },
        Chart::One => Z4Solution {
            z4: -l.exp_m1(),
            log_z4: (-l.exp()).ln_1p(),
            log_one_minus_z4: l,
            residual: root.f,
            iterations: root.iterations,
            bracket: (-hi.exp_m1(), -lo.exp_m1()),
            chart,
        },
    }
}

/// Solve in a fixed chart over the whole interval (0, 1).
pub fn solve_z4_in(s: &Scenario, chart: Chart) -> Result<Z4Solution> {
    let t = match chart {
        Chart::Zero => s.clone(),
        Chart::One => s.shifted(1),
    };
    let sr = SideRatio::new(&t)?;
    let root = solve_log(&|l| sr.residual(l), sr.guess(), 0.0, &SolveControl::default())?;
    Ok(finish(root, chart))
}

/// Solve with the unknown kept below 1/2: first in log z4, then, if the
/// residual has no sign change there, in log(1 − z4).
fn solve_auto<R, F>(s: &Scenario, residual: R, ctl: &SolveControl) -> Result<Z4Solution>
where
    R: Fn(&Scenario) -> Result<F>,
    F: Fn(f64) -> Result<f64>,
{
    let half = 0.5f64.ln();
    let guess = SideRatio::new(s)?.guess();
    match solve_log(&residual(s)?, guess, half, ctl) {
        Ok(root) => Ok(finish(root, Chart::Zero)),
        Err(Error::NoBracket { .. }) => {
            let t = s.shifted(1);
            let guess = SideRatio::new(&t)?.guess();
            let root = solve_log(&residual(&t)?, guess, half, ctl)?;
            Ok(finish(root, Chart::One))
        }
        Err(e) => Err(e),
    }
}

/// Root of the side-ratio residual, solved in whichever chart keeps the
/// unknown below 1/2.
pub fn solve_z4(s: &Scenario) -> Result<Z4Solution> {
    solve_auto(
        s,
        |t| {
            let sr = SideRatio::new(t)?;
            Ok(move |l: f64| sr.residual(l))
        },
        &SolveControl::default(),
    )
}

/// Root of the quadrature residual, independent of the closed-form identity.
pub fn solve_z4_quadrature(s: &Scenario) -> Result<Z4Solution> {
    solve_auto(
        s,
        |t| {
            let t = t.clone();
            Ok(move |l: f64| side_ratio_residual_quadrature(&t, l.exp()))
        },
        // below about e^-25 a prevertex sits too close to a segment endpoint
        // for the panel depth limit
        &SolveControl { tol: 1e-12, min_log: -25.0, ..Default::default() },
    )
}

/// (ε, −ε·log z4/π) when (p3 − p1)(p4 − p2) ≥ 0, else (ε, −ε·log(1 − z4)/π).
pub fn z4_asymptotic(s: &Scenario, eps_schedule: &[f64]) -> Result<Vec<(f64, f64)>> {
    let sign = classify(s).sign_p31_p42.unwrap_or(0);
    eps_schedule
        .iter()
        .map(|&e| {
            let sol = solve_z4(&s.with_epsilon(e))?;
            let lg = if sign < 0 { sol.log_one_minus_z4 } else { sol.log_z4 };
            Ok((e, -e * lg / PI))
        })
        .collect()
}

fn seg_point_dist(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let t = (((p - a) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn seg_seg_dist(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> f64 {
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    let (d1, d2) = (cross(b - a, c - a), cross(b - a, d - a));
    let (d3, d4) = (cross(d - c, a - c), cross(d - c, b - c));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return 0.0;
    }
    seg_point_dist(a, c, d)
        .min(seg_point_dist(b, c, d))
        .min(seg_point_dist(c, a, b))
        .min(seg_point_dist(d, a, b))
}

/// Rengel's bounds s_a²/m ≤ M(Q; z1, z2, z3, z4) ≤ m/s_b² for a convex
/// quadrilateral listed counterclockwise.
pub fn rengel_bracket(quad: [[f64; 2]; 4]) -> Result<ModulusBracket> {
    let z: Vec<Complex64> = quad.iter().map(|p| Complex64::new(p[0], p[1])).collect();
    let area = 0.5 * (0..4).map(|i| z[i].re * z[(i + 1) % 4].im - z[(i + 1) % 4].re * z[i].im).sum::<f64>();
    if !(area > 0.0) {
        return Err(Error::Degenerate(format!("quadrilateral area {area} is not positive")));
    }
    let cross = |u: Complex64, v: Complex64| u.re * v.im - u.im * v.re;
    if (0..4).any(|i| cross(z[(i + 1) % 4] - z[i], z[(i + 2) % 4] - z[(i + 1) % 4]) <= 0.0) {
        return Err(Error::Degenerate("quadrilateral is not strictly convex".into()));
    }
    let s_a = seg_seg_dist(z[0], z[1], z[2], z[3]);
    let s_b = seg_seg_dist(z[1], z[2], z[3], z[0]);
    Ok(ModulusBracket { lower: s_a * s_a / area, upper: area / (s_b * s_b), area, s_a, s_b })
}
