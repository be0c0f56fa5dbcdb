//! Region dispatch over the local expansions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::series::{AnnulusExpansion, LocalExpansion, Prevertex};
use super::SCSpec;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_singular, QuadControl};
use crate::specfun::SeriesControl;

/// Which representation evaluates a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    NearZero,
    NearXi,
    NearOne,
    NearInfinity,
    AnnulusG2,
    QuadratureOnly,
}

/// Ratio above which a series is considered too slow and quadrature takes over.
pub const DEFAULT_MAX_RATIO: f64 = 0.8;

#[derive(Debug, Clone)]
pub struct DiskMap {
    pub spec: SCSpec,
    pub locals: Vec<(RegionTag, LocalExpansion)>,
    pub annulus: Option<AnnulusExpansion>,
    pub series_ctl: SeriesControl,
    pub quad_ctl: QuadControl,
    pub max_ratio: f64,
}

fn finite_tag(p: f64, idx: usize) -> RegionTag {
    if idx == 0 {
        RegionTag::NearZero
    } else if p == 1.0 {
        RegionTag::NearOne
    } else {
        RegionTag::NearXi
    }
}

impl DiskMap {
    pub fn new(spec: &SCSpec) -> Result<Self> {
        let mut locals = Vec::new();
        for (i, &p) in spec.prevertices.iter().enumerate() {
            locals.push((finite_tag(p, i), LocalExpansion::at(spec, Some(i))?));
        }
        locals.push((RegionTag::NearInfinity, LocalExpansion::at(spec, None)?));
        let annulus = if spec.k() == 4 { Some(AnnulusExpansion::new(spec)?) } else { None };
        Ok(Self {
            spec: spec.clone(),
            locals,
            annulus,
            series_ctl: SeriesControl::default(),
            quad_ctl: QuadControl::default(),
            max_ratio: DEFAULT_MAX_RATIO,
        })
    }

    pub fn local(&self, tag: RegionTag) -> Option<&LocalExpansion> {
        self.locals.iter().find(|(t, _)| *t == tag).map(|(_, l)| l)
    }

    /// Convergence ratio of the representation `tag` at z (∞ if not available).
    pub fn ratio(&self, tag: RegionTag, z: Complex64) -> f64 {
        match tag {
            RegionTag::AnnulusG2 => self.annulus.as_ref().map_or(f64::INFINITY, |a| a.ratio(z)),
            RegionTag::QuadratureOnly => f64::INFINITY,
            t => self.local(t).map_or(f64::INFINITY, |l| l.ratio(z)),
        }
    }

    /// The series with the smallest convergence ratio at z.
    pub fn best_series(&self, z: Complex64) -> (RegionTag, f64) {
        let mut best = (RegionTag::QuadratureOnly, f64::INFINITY);
        let mut tags: Vec<RegionTag> = self.locals.iter().map(|(t, _)| *t).collect();
        if self.annulus.is_some() {
            tags.push(RegionTag::AnnulusG2);
        }
        for t in tags {
            let r = self.ratio(t, z);
            if r < best.1 {
                best = (t, r);
            }
        }
        best
    }

    pub fn region(&self, z: Complex64) -> RegionTag {
        let (t, r) = self.best_series(z);
        if r <= self.max_ratio {
            t
        } else {
            RegionTag::QuadratureOnly
        }
    }

    /// Evaluate with a specific representation; DomainError outside its disk.
    pub fn eval_with(&self, tag: RegionTag, z: Complex64) -> Result<Complex64> {
        if z.im < 0.0 {
            return Err(Error::Domain(format!("z={z} below the real axis")));
        }
        match tag {
            RegionTag::QuadratureOnly => self.eval_quadrature(z),
            RegionTag::AnnulusG2 => {
                let a = self.annulus.as_ref().ok_or_else(|| Error::Domain("no annulus clause".into()))?;
                if a.ratio(z) >= 1.0 {
                    return Err(Error::Domain(format!("z={z} outside the annulus")));
                }
                a.eval(z, &self.series_ctl)
            }
            t => {
                let l = self.local(t).ok_or_else(|| Error::Domain(format!("no {t:?} clause")))?;
                if l.ratio(z) >= 1.0 {
                    return Err(Error::Domain(format!("z={z} outside the {t:?} disk")));
                }
                l.eval(z, &self.series_ctl)
            }
        }
    }

    /// w(z) from the nearest prevertex by weighted quadrature.
    pub fn eval_quadrature(&self, z: Complex64) -> Result<Complex64> {
        let spec = &self.spec;
        let p = &spec.prevertices;
        let j = (0..p.len())
            .min_by(|&i, &k| (z - p[i]).norm().total_cmp(&(z - p[k]).norm()))
            .expect("prevertices present");
        if z == Complex64::new(p[j], 0.0) {
            return Ok(spec.images[j]);
        }
        Ok(spec.images[j] + spec.b * spec.integral_from(j, z, &self.quad_ctl)?)
    }

    /// w(z) from the best series at the point where its ratio is 1/2 on the
    /// way from the series centre to z, continued by quadrature along the
    /// straight segment. Falls back to [`Self::eval_quadrature`] when that
    /// segment runs along the real axis.
    pub fn eval_continued(&self, z: Complex64) -> Result<Complex64> {
        let (tag, r) = self.best_series(z);
        if r <= 0.5 {
            return self.eval_with(tag, z);
        }
        if !r.is_finite() {
            return self.eval_quadrature(z);
        }
        let start = match tag {
            RegionTag::AnnulusG2 => {
                let a = self.annulus.as_ref().expect("annulus tag");
                let target = (a.inner / a.outer).sqrt().max(0.5);
                let m = z.norm();
                let radius = if a.inner / m > m / a.outer { a.inner / target } else { a.outer * target };
                z * (radius / m)
            }
            t => {
                let l = self.local(t).expect("local tag");
                match l.prevertex {
                    Prevertex::Finite(s) => s + (z - s) * (0.5 / r),
                    Prevertex::Infinity => z * (r / 0.5),
                }
            }
        };
        if z.im <= 0.0 && start.im <= 0.0 {
            return self.eval_quadrature(z);
        }
        let base = self.eval_with(tag, start)?;
        let d = z - start;
        let f = |t: f64, _: f64| self.spec.integrand(start + d * t) * d;
        Ok(base + self.spec.b * integrate_singular(&f, 0.0, 0.0, &self.quad_ctl)?)
    }

    pub fn eval(&self, z: Complex64) -> Result<(Complex64, RegionTag)> {
        let tag = self.region(z);
        let w = match tag {
            RegionTag::QuadratureOnly => self.eval_continued(z)?,
            t => self.eval_with(t, z)?,
        };
        Ok((w, tag))
    }
}

fn series_only(spec: &SCSpec, z: Complex64) -> Result<Complex64> {
    let m = DiskMap::new(spec)?;
    let (tag, r) = m.best_series(z);
    if r >= 1.0 {
        return Err(Error::Domain(format!("z={z} lies in no series domain")));
    }
    m.eval_with(tag, z)
}

/// Triangle map through the clause whose disk contains z most deeply.
pub fn triangle_map(spec: &SCSpec, z: Complex64) -> Result<Complex64> {
    if spec.k() != 3 {
        return Err(Error::Domain("triangle_map needs three vertices".into()));
    }
    series_only(spec, z)
}

/// Quadrilateral map with prevertices 0 < ξ < 1.
pub fn quad_map(spec: &SCSpec, z: Complex64) -> Result<Complex64> {
    if spec.k() != 4 || spec.prevertices[2] != 1.0 {
        return Err(Error::Domain("quad_map needs prevertices 0, xi, 1".into()));
    }
    series_only(spec, z)
}

/// Quadrilateral map with prevertices 0 < 1 < ξ.
pub fn quad_map_rescaled(spec: &SCSpec, z: Complex64) -> Result<Complex64> {
    if spec.k() != 4 || spec.prevertices[1] != 1.0 {
        return Err(Error::Domain("quad_map_rescaled needs prevertices 0, 1, xi".into()));
    }
    series_only(spec, z)
}
