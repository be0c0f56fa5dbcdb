//! Domain decomposition of the upper half plane, strip coordinates, and
//! sup-norm comparison of the disk maps w_ε with the gradient tree as ε → 0.

mod bounds;

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{classify, Scenario, TreeType};
use crate::gradtree::{build_gradient_tree, EdgeCurve, GradientTree};
use crate::param::{solve_z4, Chart, Z4Solution};
use crate::scmap::{DiskMap, LocalExpansion, Prevertex, SCSpec};

pub use bounds::{analytic_bound, analytic_bounds};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegionKind {
    /// Half disk of radius δ around a prevertex, or |z| > 1/δ at ∞.
    DiskAtPrevertex(Prevertex),
    /// Points with |z| ≤ 1/δ outside every prevertex disk.
    Complement,
    /// The complement in ζ = z/z4 coordinates, around the junction of e3 and e4.
    RescaledComplement,
    /// z4/δ < |z| < δ, carrying the internal edge.
    InternalAnnulus,
}

/// One piece of the decomposition, in the frame where the prevertices are
/// 0, 1, ∞ (k = 3) or 0, z4, 1, ∞ (k = 4).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSpec {
    pub kind: RegionKind,
    pub k: usize,
    pub delta: f64,
    pub z4: Option<f64>,
    /// Disk given in ζ = z/z4 coordinates (the disks at 0 and z4 when k = 4).
    pub rescaled: bool,
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Range(format!("delta={delta} outside (0, 1/2)")));
    }
    Ok(())
}

impl RegionSpec {
    /// Index of the external edge owning a disk region, in frame labels.
    pub fn frame_edge(&self) -> Option<usize> {
        let RegionKind::DiskAtPrevertex(p) = self.kind else {
            return None;
        };
        match (self.k, p, self.rescaled) {
            (_, Prevertex::Infinity, _) => Some(1),
            (3, Prevertex::Finite(s), _) => Some(if s == 0.0 { 2 } else { 0 }),
            (_, Prevertex::Finite(s), false) if s == 1.0 => Some(0),
            (_, Prevertex::Finite(s), true) => Some(if s == 0.0 { 2 } else { 3 }),
            _ => None,
        }
    }

    fn disks(&self) -> Vec<RegionSpec> {
        let disk = |p, rescaled| RegionSpec { kind: RegionKind::DiskAtPrevertex(p), rescaled, ..*self };
        match self.k {
            3 => vec![disk(Prevertex::Finite(0.0), false), disk(Prevertex::Finite(1.0), false), disk(Prevertex::Infinity, false)],
            _ => vec![
                disk(Prevertex::Finite(1.0), false),
                disk(Prevertex::Infinity, false),
                disk(Prevertex::Finite(0.0), true),
                disk(Prevertex::Finite(1.0), true),
            ],
        }
    }

    /// Membership of z in the closed upper half plane.
    pub fn contains(&self, z: Complex64) -> bool {
        if z.im < 0.0 {
            return false;
        }
        let d = self.delta;
        let scale = if self.rescaled { self.z4.unwrap_or(1.0) } else { 1.0 };
        match self.kind {
            RegionKind::DiskAtPrevertex(Prevertex::Finite(s)) => (z - s * scale).norm() < d * scale,
            RegionKind::DiskAtPrevertex(Prevertex::Infinity) => z.norm() > 1.0 / d,
            RegionKind::Complement => z.norm() <= 1.0 / d && z.norm() >= d && self.outside_disks(z),
            RegionKind::RescaledComplement => {
                let Some(z4) = self.z4 else { return false };
                let zeta = z / z4;
                zeta.norm() >= d && zeta.norm() <= 1.0 / d && self.outside_disks(z)
            }
            RegionKind::InternalAnnulus => {
                let Some(z4) = self.z4 else { return false };
                z.norm() > z4 / d && z.norm() < d
            }
        }
    }

    fn outside_disks(&self, z: Complex64) -> bool {
        self.disks().iter().all(|r| !r.contains(z))
    }

    /// Stable name with original edge labels, given the frame shift.
    pub fn label(&self, shift: usize) -> String {
        match self.kind {
            RegionKind::DiskAtPrevertex(_) => {
                let j = self.frame_edge().expect("disk edge");
                format!("ext_e{}", (j + shift) % self.k + 1)
            }
            RegionKind::Complement => "complement".into(),
            RegionKind::RescaledComplement => "rescaled_complement".into(),
            RegionKind::InternalAnnulus => "internal".into(),
        }
    }
}

/// Regions of the decomposition: four for k = 3; for k = 4 six, plus the
/// internal annulus when z4 < δ².
pub fn regions(k: usize, delta: f64, z4: Option<f64>) -> Result<Vec<RegionSpec>> {
    check_delta(delta)?;
    let base = RegionSpec { kind: RegionKind::Complement, k, delta, z4: None, rescaled: false };
    match (k, z4) {
        (3, _) => {
            let mut v = base.disks();
            v.insert(0, base);
            Ok(v)
        }
        (4, Some(z4)) if z4 > 0.0 && z4 < 1.0 => {
            let base = RegionSpec { z4: Some(z4), ..base };
            let mut v = vec![base];
            v.extend(base.disks());
            v.push(RegionSpec { kind: RegionKind::RescaledComplement, ..base });
            if z4 < delta * delta {
                v.push(RegionSpec { kind: RegionKind::InternalAnnulus, ..base });
            }
            Ok(v)
        }
        (4, _) => Err(Error::Domain("k = 4 regions need z4 in (0, 1)".into())),
        _ => Err(Error::Domain(format!("no decomposition for k={k}"))),
    }
}

/// Strip coordinates (τ, σ), σ ∈ [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub tau: f64,
    pub sigma: f64,
}

impl StripPoint {
    pub fn new(tau: f64, sigma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma) || !tau.is_finite() {
            return Err(Error::Range(format!("strip point ({tau}, {sigma})")));
        }
        Ok(Self { tau, sigma })
    }

    /// Point of the external strip, τ < 0.
    pub fn external(tau: f64, sigma: f64) -> Result<Self> {
        if tau >= 0.0 {
            return Err(Error::Range(format!("external strip needs tau < 0, got {tau}")));
        }
        Self::new(tau, sigma)
    }
}

/// p + δe^{π(τ+iσ)} at a finite prevertex, −δ⁻¹e^{−π(τ+iσ)} at ∞.
pub fn phi_ext(p: Prevertex, delta: f64, pt: StripPoint) -> Complex64 {
    let e = Complex64::new(PI * pt.tau, PI * pt.sigma).exp();
    match p {
        Prevertex::Finite(s) => s + delta * e,
        Prevertex::Infinity => -e.inv() / delta,
    }
}

/// The τ window of the internal strip.
pub fn internal_window(delta: f64, z4: f64) -> (f64, f64) {
    (-delta.ln() / PI, (-z4.ln() + delta.ln()) / PI)
}

/// exp(−πτ + iπ(1 − σ)) for τ inside the internal window.
pub fn phi_int(pt: StripPoint, delta: f64, z4: f64) -> Result<Complex64> {
    let (lo, hi) = internal_window(delta, z4);
    if pt.tau < lo || pt.tau > hi {
        return Err(Error::Range(format!("tau={} outside the internal window [{lo}, {hi}]", pt.tau)));
    }
    Ok(Complex64::new(-PI * pt.tau, PI * (1.0 - pt.sigma)).exp())
}

pub fn psi_eps(z: Complex64, z4: f64) -> Complex64 {
    z / z4
}

/// Sample counts for the measurement grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub tau_samples: usize,
    pub sigma_samples: usize,
    pub polar_samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { tau_samples: 64, sigma_samples: 64, polar_samples: 64 }
    }
}

impl GridSpec {
    pub fn uniform(n: usize) -> Self {
        Self { tau_samples: n, sigma_samples: n, polar_samples: n }
    }
}

/// Deepest external τ sampled, in units of 1/ε.
pub const TAU_DEPTH: f64 = 30.0;
/// Shallowest external |τ| sampled.
const TAU_SHALLOW: f64 = 1e-4;

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

/// A scenario at one ε in the frame used by the decomposition, with its
/// gradient tree, solved prevertices, and maps.
#[derive(Debug, Clone)]
pub struct DiskFrame {
    pub epsilon: f64,
    pub delta: f64,
    /// Cyclic relabel from the input: frame edge j is input edge j + shift.
    pub shift: usize,
    pub scenario: Scenario,
    pub tree: GradientTree,
    pub z4: Option<Z4Solution>,
    pub map: DiskMap,
    pub rescaled: Option<DiskMap>,
}

impl DiskFrame {
    pub fn new(s: &Scenario) -> Result<Self> {
        let (shift, z4) = match s.k() {
            3 => (0, None),
            4 => {
                let sol = solve_z4(s)?;
                (if sol.chart == Chart::One { 1 } else { 0 }, Some(sol))
            }
            k => return Err(Error::Domain(format!("no disk frame for k={k}"))),
        };
        let scenario = s.shifted(shift);
        let c = classify(&scenario);
        let tree = build_gradient_tree(&scenario, &c)?;
        let (spec, rescaled) = match &z4 {
            None => (SCSpec::for_triangle(&scenario)?, None),
            Some(sol) => {
                let z = frame_z4(sol);
                if z < f64::MIN_POSITIVE.sqrt() {
                    return Err(Error::Range(format!("z4 = e^{} is below the representable range", sol.log_z4)));
                }
                let spec = SCSpec::for_quad(&scenario, z)?;
                let r = DiskMap::new(&spec.rescaled()?)?;
                (spec, Some(r))
            }
        };
        Ok(Self { epsilon: s.epsilon, delta: s.delta, shift, scenario, tree, z4, map: DiskMap::new(&spec)?, rescaled })
    }

    pub fn k(&self) -> usize {
        self.scenario.k()
    }

    /// z4 in the frame (below ½ up to rounding).
    pub fn frame_z4(&self) -> Option<f64> {
        self.z4.as_ref().map(frame_z4)
    }

    /// log of the frame z4.
    pub fn frame_log_z4(&self) -> Option<f64> {
        self.z4.as_ref().map(|s| match s.chart {
            Chart::Zero => s.log_z4,
            Chart::One => s.log_one_minus_z4,
        })
    }

    pub fn regions(&self) -> Result<Vec<RegionSpec>> {
        regions(self.k(), self.delta, self.frame_z4())
    }

    fn local(&self, r: &RegionSpec, p: Prevertex) -> Result<&LocalExpansion> {
        let map = if r.rescaled { self.rescaled.as_ref().ok_or_else(|| Error::Domain("no rescaled map".into()))? } else { &self.map };
        map.locals
            .iter()
            .map(|(_, l)| l)
            .find(|l| l.prevertex == p)
            .ok_or_else(|| Error::Domain(format!("no expansion at {p:?}")))
    }

    fn external_curve(&self, r: &RegionSpec) -> Result<EdgeCurve> {
        let j = r.frame_edge().ok_or_else(|| Error::Domain("region has no external edge".into()))?;
        Ok(self.tree.external[j])
    }

    /// Junction constant approached on a complement region.
    pub fn junction_target(&self, r: &RegionSpec) -> f64 {
        match r.kind {
            RegionKind::RescaledComplement => self.tree.junction_of[2],
            _ => self.tree.junction_of[0],
        }
    }

    /// Sampled |w_ε − target| on a region, maximised over the grid.
    pub fn sup_error(&self, r: &RegionSpec, grid: &GridSpec) -> Result<f64> {
        let errs: Vec<f64> = match r.kind {
            RegionKind::DiskAtPrevertex(p) => {
                let local = self.local(r, p)?;
                let curve = self.external_curve(r)?;
                let ctl = &self.map.series_ctl;
                let ln_d = self.delta.ln();
                let eps = self.epsilon;
                let taus: Vec<f64> = linspace(TAU_SHALLOW.ln(), (TAU_DEPTH / eps).ln(), grid.tau_samples).map(|x| -x.exp()).collect();
                strip_grid(&taus, grid.sigma_samples)
                    .par_iter()
                    .map(|&(tau, sigma)| {
                        let w = local.eval_log(ln_d + PI * tau, PI * sigma, ctl)?;
                        Ok((w - curve.eval(eps * tau)).norm())
                    })
                    .collect::<Result<_>>()?
            }
            RegionKind::InternalAnnulus => {
                let z4 = r.z4.ok_or_else(|| Error::Domain("internal annulus needs z4".into()))?;
                let ann = self.map.annulus.as_ref().ok_or_else(|| Error::Domain("no annulus expansion".into()))?;
                let curve = self.tree.internal.ok_or_else(|| Error::Domain("tree has no internal edge".into()))?;
                let (lo, hi) = internal_window(self.delta, z4);
                let taus: Vec<f64> = linspace(lo, hi, grid.tau_samples).collect();
                let ctl = &self.map.series_ctl;
                let eps = self.epsilon;
                strip_grid(&taus, grid.sigma_samples)
                    .par_iter()
                    .map(|&(tau, sigma)| {
                        let w = ann.eval_log(-PI * tau, PI * (1.0 - sigma), ctl)?;
                        Ok((w - curve.eval(eps * tau)).norm())
                    })
                    .collect::<Result<_>>()?
            }
            RegionKind::Complement | RegionKind::RescaledComplement => {
                let rescaled = r.kind == RegionKind::RescaledComplement;
                let (map, scale) = if rescaled {
                    (self.rescaled.as_ref().ok_or_else(|| Error::Domain("no rescaled map".into()))?, r.z4.unwrap_or(1.0))
                } else {
                    (&self.map, 1.0)
                };
                let target = self.junction_target(r);
                let pts: Vec<Complex64> = complement_points(self.delta, grid.polar_samples)
                    .into_iter()
                    .filter(|&zeta| r.contains(zeta * scale))
                    .collect();
                if pts.is_empty() {
                    return Err(Error::Domain("empty complement grid".into()));
                }
                pts.par_iter().map(|&zeta| Ok((map.eval(zeta)?.0 - target).norm())).collect::<Result<_>>()?
            }
        };
        Ok(errs.into_iter().fold(0.0, f64::max))
    }
}

fn frame_z4(sol: &Z4Solution) -> f64 {
    match sol.chart {
        Chart::Zero => sol.log_z4.exp(),
        Chart::One => sol.log_one_minus_z4.exp(),
    }
}

fn strip_grid(taus: &[f64], sigma_samples: usize) -> Vec<(f64, f64)> {
    let sigmas: Vec<f64> = linspace(0.0, 1.0, sigma_samples).collect();
    taus.iter().flat_map(|&t| sigmas.iter().map(move |&s| (t, s))).collect()
}

/// Polar grid on δ ≤ |z| ≤ 1/δ (log-spaced radii) together with the boundary
/// half circles of the disks at 0, 1 and ∞.
fn complement_points(delta: f64, n: usize) -> Vec<Complex64> {
    let angles: Vec<f64> = linspace(0.0, PI, n).collect();
    let mut pts: Vec<Complex64> = linspace(delta.ln(), -delta.ln(), n)
        .flat_map(|lr| angles.iter().map(move |&a| Complex64::from_polar(lr.exp(), a)))
        .collect();
    pts.extend(angles.iter().map(|&a| 1.0 + Complex64::from_polar(delta, a)));
    pts
}

/// Sampled sup-norm error of one region, building the frame from the scenario.
pub fn sup_error(s: &Scenario, region: &RegionSpec, grid: &GridSpec) -> Result<f64> {
    DiskFrame::new(s)?.sup_error(region, grid)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRow {
    pub region: String,
    pub epsilon: f64,
    pub sup_error: f64,
    pub bound: Option<f64>,
    pub z4: Option<f64>,
    /// −ε·log z4/π in the frame, which tends to the internal edge length.
    pub l_estimate: Option<f64>,
    /// The sup runs over a τ window that moves with ε.
    pub windowed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRegion {
    pub region: String,
    pub epsilon: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub k: usize,
    pub delta: f64,
    pub grid: GridSpec,
    pub tree_type: TreeType,
    pub internal_length: f64,
    pub rows: Vec<RegionRow>,
    pub skipped: Vec<SkippedRegion>,
}

impl ConvergenceReport {
    /// Rows of one region in schedule order.
    pub fn region_rows<'a>(&'a self, region: &'a str) -> impl Iterator<Item = &'a RegionRow> + 'a {
        self.rows.iter().filter(move |r| r.region == region)
    }

    /// Region names in first-seen order.
    pub fn region_names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.region) {
                names.push(r.region.clone());
            }
        }
        names
    }
}

/// Sup errors and bounds for every region at every ε of the schedule.
pub fn run_report(s: &Scenario, eps_schedule: &[f64], grid: &GridSpec) -> Result<ConvergenceReport> {
    if eps_schedule.is_empty() {
        return Err(Error::Range("empty epsilon schedule".into()));
    }
    check_delta(s.delta)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    let mut head = None;
    for &eps in eps_schedule {
        let frame = DiskFrame::new(&s.with_epsilon(eps))?;
        let z4 = frame.z4.map(|z| z.z4);
        let l_estimate = frame.frame_log_z4().map(|l| -eps * l / PI);
        let regs = frame.regions()?;
        if frame.k() == 4 && !regs.iter().any(|r| r.kind == RegionKind::InternalAnnulus) {
            skipped.push(SkippedRegion {
                region: "internal".into(),
                epsilon: eps,
                reason: format!("z4 = {:e} is not below delta^2", frame.frame_z4().unwrap_or(f64::NAN)),
            });
        }
        for r in &regs {
            rows.push(RegionRow {
                region: r.label(frame.shift),
                epsilon: eps,
                sup_error: frame.sup_error(r, grid)?,
                bound: analytic_bound(&frame, r)?,
                z4,
                l_estimate,
                windowed: r.kind == RegionKind::InternalAnnulus,
            });
        }
        head.get_or_insert((frame.tree.topology.kind, frame.tree.topology.internal_length));
    }
    let (tree_type, internal_length) = head.expect("schedule is not empty");
    Ok(ConvergenceReport { k: s.k(), delta: s.delta, grid: *grid, tree_type, internal_length, rows, skipped })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(eps: f64) -> Scenario {
        Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], eps, 0.25).unwrap()
    }

    fn quad(eps: f64) -> Scenario {
        Scenario::from_coefficients(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5], eps, 0.25).unwrap()
    }

    #[test]
    fn strip_maps_hit_the_window_ends() {
        let pt = StripPoint::external(-1e-12, 0.0).unwrap();
        assert!((phi_ext(Prevertex::Finite(0.0), 0.25, pt) - 0.25).norm() < 1e-10);
        let deep = StripPoint::external(-20.0, 0.5).unwrap();
        assert!(phi_ext(Prevertex::Finite(1.0), 0.25, deep).norm() - 1.0 < 1e-20);
        assert!((phi_ext(Prevertex::Infinity, 0.25, pt) + 4.0).norm() < 1e-9);
        let z4 = 1e-6;
        let (lo, hi) = internal_window(0.25, z4);
        assert!((phi_int(StripPoint::new(lo, 1.0).unwrap(), 0.25, z4).unwrap() - 0.25).norm() < 1e-14);
        assert!((phi_int(StripPoint::new(hi, 1.0).unwrap(), 0.25, z4).unwrap() - z4 / 0.25).norm() < 1e-18);
        assert!(phi_int(StripPoint::new(hi + 1.0, 0.0).unwrap(), 0.25, z4).is_err());
        assert_eq!(psi_eps(Complex64::new(z4, 0.0), z4), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn external_strip_image_stays_in_disk() {
        for tau in [-5.0, -1.0, -0.01] {
            for sigma in [0.0, 0.3, 1.0] {
                let pt = StripPoint::external(tau, sigma).unwrap();
                let z = phi_ext(Prevertex::Finite(1.0), 0.25, pt);
                assert!(((z - 1.0).norm() - 0.25 * (PI * tau).exp()).abs() < 1e-15);
                assert!(z.im >= -1e-17);
            }
        }
        assert!(StripPoint::external(0.0, 0.5).is_err());
    }

    #[test]
    fn region_counts_follow_z4() {
        assert_eq!(regions(3, 0.25, None).unwrap().len(), 4);
        assert_eq!(regions(4, 0.25, Some(1e-3)).unwrap().len(), 7);
        assert_eq!(regions(4, 0.25, Some(0.1)).unwrap().len(), 6);
        assert!(regions(3, 0.5, None).is_err());
        assert!(regions(4, 0.25, None).is_err());
    }

    #[test]
    fn triangle_disks_are_disjoint_and_labelled() {
        let r = regions(3, 0.25, None).unwrap();
        let labels: Vec<String> = r.iter().map(|x| x.label(0)).collect();
        assert_eq!(labels, ["complement", "ext_e3", "ext_e1", "ext_e2"]);
        let z = Complex64::new(0.5, 0.1);
        assert_eq!(r.iter().filter(|x| x.contains(z)).count(), 1);
    }

    #[test]
    fn triangle_errors_shrink_below_bounds() {
        let grid = GridSpec::uniform(24);
        let rep = run_report(&triangle(0.2), &[0.2, 0.1, 0.05], &grid).unwrap();
        assert_eq!(rep.rows.len(), 12);
        for name in rep.region_names() {
            let rows: Vec<&RegionRow> = rep.region_rows(&name).collect();
            assert!(rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error), "{name}: {rows:?}");
            for r in rows {
                let b = r.bound.expect("triangle bounds are defined");
                assert!(r.sup_error <= b, "{name} eps {}: {} > {b}", r.epsilon, r.sup_error);
            }
        }
    }

    #[test]
    fn quad_frame_has_internal_annulus_for_small_epsilon() {
        let f = DiskFrame::new(&quad(0.1)).unwrap();
        assert_eq!(f.shift, 0);
        let regs = f.regions().unwrap();
        assert_eq!(regs.len(), 7);
        let int = regs.iter().find(|r| r.kind == RegionKind::InternalAnnulus).unwrap();
        let e = f.sup_error(int, &GridSpec::uniform(16)).unwrap();
        assert!(e < 0.5, "{e}");
    }
}
