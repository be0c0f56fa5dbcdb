//! Closed-form upper bounds for the region sup errors.
//!
//! Each bound splits |w − target| into the distance from a series anchored on
//! a boundary circle plus |B|·∫|integrand| along a radial segment, and, on
//! strips, the gap between the power u^α and the exponential flow line.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{internal_window, DiskFrame, RegionKind, RegionSpec};
use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::gradtree::{CurveKind, EdgeCurve};
use crate::scmap::{AnnulusExpansion, DiskMap, LocalExpansion, Prevertex};

/// A series X + coef·v^α·G(v) restricted to a circle |v| = ρ.
struct Anchor {
    value: Complex64,
    coef: Complex64,
    /// ρ^α, the modulus of the power on the circle.
    modulus: f64,
    /// Largest phase πα of the power on the half circle.
    phase: f64,
    /// Majorant of |G − 1| on the circle.
    g_minus_one: f64,
}

impl Anchor {
    fn local(l: &LocalExpansion, rho: f64, map: &DiskMap) -> Result<Self> {
        Ok(Self {
            value: l.vertex,
            coef: l.coef,
            modulus: rho.powf(l.alpha),
            phase: PI * l.alpha,
            g_minus_one: l.g_hat(rho, &map.series_ctl)? - 1.0,
        })
    }

    fn annulus(a: &AnnulusExpansion, radius: f64, map: &DiskMap) -> Result<Self> {
        Ok(Self {
            value: a.centre,
            coef: a.coef,
            modulus: radius.powf(a.g),
            phase: PI * a.g,
            g_minus_one: a.g2_minus_one_bound(a.inner / radius, radius / a.outer, &map.series_ctl)?,
        })
    }

    /// sup |w − p0| on the circle, through the better of two splittings.
    fn distance(&self, p0: f64) -> f64 {
        let c = self.coef.norm();
        let swing = (self.modulus * Complex64::from_polar(1.0, self.phase) - 1.0).norm();
        let near_one = (self.value + self.coef - p0).norm() + c * (swing + self.modulus * self.g_minus_one);
        let direct = (self.value - p0).norm() + c * self.modulus * (1.0 + self.g_minus_one);
        near_one.min(direct)
    }
}

/// |B|·sup|integrand|·length for radial segments inside the shell
/// r_lo ≤ |z| ≤ r_hi that avoid the δ-disks of prevertices in the shell.
fn radial_term(map: &DiskMap, r_lo: f64, r_hi: f64, delta: f64) -> f64 {
    // a segment may graze a disk at distance δ·sqrt(1 − δ²/4) from its centre
    let graze = delta * (1.0 - delta * delta / 4.0).sqrt();
    let spec = &map.spec;
    let sup: f64 = spec
        .prevertices
        .iter()
        .zip(&spec.exponents)
        .map(|(&p, &e)| {
            let d = if p.abs() < r_lo {
                r_lo - p.abs()
            } else if p.abs() > r_hi {
                p.abs() - r_hi
            } else {
                graze
            };
            d.powf(e - 1.0)
        })
        .product();
    spec.b.norm() * sup * (r_hi - r_lo)
}

/// sup over τ in [lo, hi] of |κe^{aτ} − e^{cτ}|.
fn exp_gap(kappa: f64, a: f64, c: f64, lo: f64, hi: f64) -> f64 {
    let h = |t: f64| (kappa * (a * t).exp() - (c * t).exp()).abs();
    let mut best = h(hi);
    if lo.is_finite() {
        best = best.max(h(lo));
    }
    if a != c {
        let q = c / (kappa * a);
        if q > 0.0 {
            let t = q.ln() / (a - c);
            if t >= lo && t <= hi {
                best = best.max(h(t));
            }
        }
    }
    best
}

fn complement_bound(frame: &DiskFrame, r: &RegionSpec) -> Result<Option<f64>> {
    let d = frame.delta;
    let p0 = frame.junction_target(r);
    match (frame.k(), r.kind) {
        (3, _) => {
            let map = &frame.map;
            let inner = Anchor::local(local(map, Prevertex::Finite(0.0))?, d, map)?.distance(p0) + radial_term(map, d, 1.0, d);
            let outer = Anchor::local(local(map, Prevertex::Infinity)?, d, map)?.distance(p0) + radial_term(map, 1.0, 1.0 / d, d);
            Ok(Some(inner.max(outer)))
        }
        (_, RegionKind::Complement) => {
            let map = &frame.map;
            let ann = map.annulus.as_ref().ok_or_else(|| Error::Domain("no annulus expansion".into()))?;
            let inner = Anchor::annulus(ann, d, map)?.distance(p0) + radial_term(map, d, 1.0, d);
            let outer = Anchor::local(local(map, Prevertex::Infinity)?, d, map)?.distance(p0) + radial_term(map, 1.0, 1.0 / d, d);
            Ok(Some(inner.max(outer)))
        }
        _ => {
            let map = frame.rescaled.as_ref().ok_or_else(|| Error::Domain("no rescaled map".into()))?;
            let ann = map.annulus.as_ref().ok_or_else(|| Error::Domain("no annulus expansion".into()))?;
            let inner = Anchor::local(local(map, Prevertex::Finite(0.0))?, d, map)?.distance(p0) + radial_term(map, d, 1.0, d);
            let outer = Anchor::annulus(ann, 1.0 / d, map)?.distance(p0) + radial_term(map, 1.0, 1.0 / d, d);
            Ok(Some(inner.max(outer)))
        }
    }
}

fn local(map: &DiskMap, p: Prevertex) -> Result<&LocalExpansion> {
    map.locals
        .iter()
        .map(|(_, l)| l)
        .find(|l| l.prevertex == p)
        .ok_or_else(|| Error::Domain(format!("no expansion at {p:?}")))
}

fn external_bound(frame: &DiskFrame, r: &RegionSpec, p: Prevertex) -> Result<Option<f64>> {
    let map = if r.rescaled { frame.rescaled.as_ref().ok_or_else(|| Error::Domain("no rescaled map".into()))? } else { &frame.map };
    let l = local(map, p)?;
    let curve: EdgeCurve = frame.tree.external[r.frame_edge().expect("disk edge")];
    let d = frame.delta;
    let da = d.powf(l.alpha);
    let g_hat = l.g_hat(d, &map.series_ctl)?;
    let tip = (l.vertex - curve.offset).norm();
    match curve.kind {
        CurveKind::Constant => Ok(Some(tip + l.coef.norm() * da * g_hat)),
        CurveKind::Exponential => {
            let c = -curve.rate * frame.epsilon;
            if c <= 0.0 {
                return Ok(None);
            }
            let a = curve.a.abs();
            let power = da * (Complex64::from_polar(1.0, PI * l.alpha) - 1.0).norm()
                + exp_gap(da, PI * l.alpha, c, f64::NEG_INFINITY, 0.0);
            Ok(Some(tip + (l.coef - curve.a).norm() * da * g_hat + a * da * (g_hat - 1.0) + a * power))
        }
        CurveKind::Linear => Ok(None),
    }
}

fn internal_bound(frame: &DiskFrame, r: &RegionSpec) -> Result<Option<f64>> {
    let (Some(z4), Some(curve)) = (r.z4, frame.tree.internal) else {
        return Ok(None);
    };
    if curve.kind != CurveKind::Exponential {
        return Ok(None);
    }
    let map = &frame.map;
    let ann = map.annulus.as_ref().ok_or_else(|| Error::Domain("no annulus expansion".into()))?;
    let d = frame.delta;
    let g = ann.g;
    let zmax = d.powf(g).max((z4 / d).powf(g));
    let g2 = ann.g2_minus_one_bound(z4 / d, d, &map.series_ctl)?;
    let (lo, hi) = internal_window(d, z4);
    let flow = exp_gap(1.0, -PI * g, -curve.rate * frame.epsilon, lo, hi);
    let a = curve.a.abs();
    Ok(Some(
        (ann.centre - curve.offset).norm()
            + ann.coef.norm() * zmax * g2
            + (ann.coef - curve.a).norm() * zmax
            + a * (zmax * (Complex64::from_polar(1.0, PI * g) - 1.0).norm() + flow),
    ))
}

/// Upper bound on the sup error of a region, where one is available.
///
/// Complements and the internal annulus of a quadrilateral are bounded only
/// when z4 < δ², where the annulus anchors on |z| = δ converge.
pub fn analytic_bound(frame: &DiskFrame, r: &RegionSpec) -> Result<Option<f64>> {
    let small_z4 = r.z4.is_none_or(|z| z < frame.delta * frame.delta);
    match r.kind {
        RegionKind::DiskAtPrevertex(p) => external_bound(frame, r, p),
        RegionKind::Complement | RegionKind::RescaledComplement if small_z4 => complement_bound(frame, r),
        RegionKind::InternalAnnulus => internal_bound(frame, r),
        _ => Ok(None),
    }
}

/// Bound for one region, building the frame from the scenario.
pub fn analytic_bounds(s: &Scenario, region: &RegionSpec) -> Result<Option<f64>> {
    analytic_bound(&DiskFrame::new(s)?, region)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_gap_finds_interior_extremum() {
        // e^{2t} − e^{t} peaks in magnitude at t = −ln 2
        let v = exp_gap(1.0, 2.0, 1.0, f64::NEG_INFINITY, 0.0);
        assert!((v - 0.25).abs() < 1e-15);
        assert_eq!(exp_gap(1.0, 1.0, 1.0, -3.0, 0.0), 0.0);
        assert!((exp_gap(0.5, 1.0, 1.0, f64::NEG_INFINITY, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn outer_triangle_term_grows_as_delta_shrinks() {
        let s = |d| Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], 0.1, d).unwrap();
        let term = |d: f64| {
            let f = DiskFrame::new(&s(d)).unwrap();
            radial_term(&f.map, 1.0, 1.0 / d, d)
        };
        assert!(term(0.1) > term(0.25));
    }
}
