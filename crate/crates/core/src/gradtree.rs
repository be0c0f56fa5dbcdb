//! Gradient trees of the potentials f_i = ½a_i x² + b_i x, as closed-form
//! flow lines of −grad(f_rig − f_lef).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{criticals, Classification, PolygonKind, Scenario, TreeType};

const CONTINUITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeTopology {
    pub kind: TreeType,
    pub internal_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveKind {
    Exponential,
    Constant,
    Linear,
}

/// I(t) = A·e^{−rate·t} + offset (exponential, constant) or A·t + offset (linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCurve {
    pub kind: CurveKind,
    pub a: f64,
    pub rate: f64,
    pub offset: f64,
}

impl EdgeCurve {
    pub fn constant(c: f64) -> Self {
        Self { kind: CurveKind::Constant, a: 0.0, rate: 0.0, offset: c }
    }

    pub fn exponential(a: f64, rate: f64, offset: f64) -> Self {
        Self { kind: CurveKind::Exponential, a, rate, offset }
    }

    pub fn linear(a: f64, offset: f64) -> Self {
        Self { kind: CurveKind::Linear, a, rate: 0.0, offset }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.kind {
            CurveKind::Constant => self.offset,
            CurveKind::Exponential => self.a * (-self.rate * t).exp() + self.offset,
            CurveKind::Linear => self.a * t + self.offset,
        }
    }
}

/// Edge identifier: external edges e_1..e_k (0-based) or the internal edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    External(usize),
    Internal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientTree {
    pub topology: TreeTopology,
    pub external: Vec<EdgeCurve>,
    pub internal: Option<EdgeCurve>,
    /// Junction value reached by each external edge at t = 0.
    pub junction_of: Vec<f64>,
}

/// Edges meeting at each trivalent vertex, and the internal edge's
/// driving pair (lef, rig), for tree types B and C.
fn layout(kind: TreeType) -> Option<([[usize; 2]; 2], (usize, usize))> {
    match kind {
        // J12 ∋ e1,e2 ; J34 ∋ e3,e4 ; internal −grad(f3 − f1)
        TreeType::B => Some(([[0, 1], [2, 3]], (0, 2))),
        // J23 ∋ e2,e3 ; J41 ∋ e4,e1 ; internal −grad(f4 − f2)
        TreeType::C => Some(([[1, 2], [3, 0]], (1, 3))),
        _ => None,
    }
}

/// Flow rate a_{i+1} − a_i of external edge e_i; positive rates pin the edge to p_i.
fn ext_rate(s: &Scenario, i: usize) -> f64 {
    s.a(i + 1) - s.a(i)
}

/// The value forced at a junction by its constant leaf.
fn junction_value(s: &Scenario, p: &[f64], leaves: [usize; 2]) -> Result<f64> {
    let pinned: Vec<usize> = leaves.into_iter().filter(|&i| ext_rate(s, i) > 0.0).collect();
    match pinned.as_slice() {
        [i] => Ok(p[*i]),
        _ => Err(Error::Degenerate(format!(
            "junction of e{} and e{} has {} pinned leaves",
            leaves[0] + 1,
            leaves[1] + 1,
            pinned.len()
        ))),
    }
}

struct Internal {
    start: f64,
    end: f64,
    curve: EdgeCurve,
    length: f64,
}

fn internal_edge(s: &Scenario, kind: TreeType, p: &[f64]) -> Result<Internal> {
    let (junctions, (lef, rig)) =
        layout(kind).ok_or_else(|| Error::Domain(format!("tree {kind} has no internal edge")))?;
    // the edge runs from the junction containing e2
    let (j_start, j_end) = if junctions[0].contains(&1) { (junctions[0], junctions[1]) } else { (junctions[1], junctions[0]) };
    let start = junction_value(s, p, j_start)?;
    let end = junction_value(s, p, j_end)?;
    let rate = s.a(rig) - s.a(lef);
    let db = s.b(rig) - s.b(lef);
    let (curve, length) = if rate == 0.0 {
        if db == 0.0 {
            return Err(Error::ParallelSides);
        }
        (EdgeCurve::linear(-db, start), (start - end) / db)
    } else {
        let centre = -db / rate;
        let ratio = (end - centre) / (start - centre);
        if !(ratio > 0.0) {
            return Err(Error::Degenerate(format!("internal edge ratio {ratio} is not positive")));
        }
        (EdgeCurve::exponential(start - centre, rate, centre), -ratio.ln() / rate)
    };
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Degenerate(format!("internal edge length {length} is not positive")));
    }
    Ok(Internal { start, end, curve, length })
}

/// Length of the internal edge: 0 for type A, positive for B and C.
pub fn internal_edge_length(s: &Scenario, c: &Classification) -> Result<f64> {
    match c.tree_type {
        Some(TreeType::A) => Ok(0.0),
        Some(t @ (TreeType::B | TreeType::C)) => Ok(internal_edge(s, t, &criticals(s)?.p)?.length),
        _ => Err(Error::Domain("internal edge length needs a quadrilateral tree".into())),
    }
}

fn external_curve(s: &Scenario, p: &[f64], i: usize, junction: f64) -> EdgeCurve {
    let rate = ext_rate(s, i);
    if rate > 0.0 {
        EdgeCurve::constant(p[i])
    } else {
        EdgeCurve::exponential(junction - p[i], rate, p[i])
    }
}

pub fn build_gradient_tree(s: &Scenario, c: &Classification) -> Result<GradientTree> {
    if c.kind == PolygonKind::Degenerate {
        return Err(Error::Degenerate("degenerate configuration has no gradient tree".into()));
    }
    let kind = c.tree_type.ok_or_else(|| Error::Degenerate("missing tree type".into()))?;
    let k = s.k();
    let p = criticals(s)?.p;
    let mut junction_of = vec![0.0; k];
    let (internal, length) = match kind {
        TreeType::Tripod | TreeType::A => {
            let pinned: Vec<usize> = (0..k).filter(|&i| ext_rate(s, i) > 0.0).collect();
            let j = pinned.first().map(|&i| p[i]).ok_or_else(|| Error::Degenerate("no pinned leaf".into()))?;
            for &i in &pinned {
                if (p[i] - j).abs() > CONTINUITY_TOL * (1.0 + j.abs()) {
                    return Err(Error::Degenerate("pinned leaves disagree on the junction".into()));
                }
            }
            junction_of.iter_mut().for_each(|v| *v = j);
            (None, 0.0)
        }
        TreeType::B | TreeType::C => {
            let (junctions, _) = layout(kind).expect("internal layout");
            let int = internal_edge(s, kind, &p)?;
            for leaves in junctions {
                let v = if leaves.contains(&1) { int.start } else { int.end };
                for i in leaves {
                    junction_of[i] = v;
                }
            }
            (Some(int.curve), int.length)
        }
    };
    let external: Vec<EdgeCurve> = (0..k).map(|i| external_curve(s, &p, i, junction_of[i])).collect();
    let tree = GradientTree { topology: TreeTopology { kind, internal_length: length }, external, internal, junction_of };
    let r = tree.continuity_residual();
    if r > CONTINUITY_TOL * (1.0 + p.iter().map(|x| x.abs()).fold(0.0, f64::max)) {
        return Err(Error::Degenerate(format!("continuity residual {r:e}")));
    }
    Ok(tree)
}

impl GradientTree {
    /// Largest mismatch between edge endpoints and junction values.
    pub fn continuity_residual(&self) -> f64 {
        let mut r: f64 = 0.0;
        for (c, &j) in self.external.iter().zip(&self.junction_of) {
            r = r.max((c.eval(0.0) - j).abs());
        }
        if let Some(int) = &self.internal {
            let starts: Vec<f64> = self.junction_of.clone();
            let s0 = int.eval(0.0);
            let s1 = int.eval(self.topology.internal_length);
            let near = |x: f64| starts.iter().map(|&j| (x - j).abs()).fold(f64::INFINITY, f64::min);
            r = r.max(near(s0)).max(near(s1));
        }
        r
    }

    pub fn eval(&self, edge: Edge, t: f64) -> Result<f64> {
        match edge {
            Edge::External(i) => {
                let c = self.external.get(i).ok_or_else(|| Error::Range(format!("no external edge {}", i + 1)))?;
                if !(t <= 0.0) {
                    return Err(Error::Range(format!("t={t} outside (-inf, 0]")));
                }
                Ok(c.eval(t))
            }
            Edge::Internal => {
                let c = self.internal.as_ref().ok_or_else(|| Error::Range("tree has no internal edge".into()))?;
                let l = self.topology.internal_length;
                if !(0.0..=l).contains(&t) {
                    return Err(Error::Range(format!("t={t} outside [0, {l}]")));
                }
                Ok(c.eval(t))
            }
        }
    }
}

pub fn eval_tree(g: &GradientTree, edge: Edge, t: f64) -> Result<f64> {
    g.eval(edge, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::classify;
    use approx::assert_relative_eq;

    fn build(a: &[f64], b: &[f64]) -> (Scenario, GradientTree) {
        let s = Scenario::from_coefficients(a, b, 0.1, 0.25).unwrap();
        let t = build_gradient_tree(&s, &classify(&s)).unwrap();
        (s, t)
    }

    /// RK4 integration of dI/dt = −slope·(I − centre) from t0 to t1.
    fn ode(slope: f64, centre: f64, y0: f64, t0: f64, t1: f64) -> f64 {
        let n = 20_000;
        let h = (t1 - t0) / n as f64;
        let f = |y: f64| -slope * (y - centre);
        let mut y = y0;
        for _ in 0..n {
            let k1 = f(y);
            let k2 = f(y + 0.5 * h * k1);
            let k3 = f(y + 0.5 * h * k2);
            let k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        y
    }

    #[test]
    fn tripod_example() {
        let (_, g) = build(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0]);
        for t in [-3.0, -1.0, 0.0] {
            assert_relative_eq!(g.eval(Edge::External(0), t).unwrap(), -0.5 * f64::exp(t) + 1.0, epsilon = 1e-15);
            assert_eq!(g.eval(Edge::External(1), t).unwrap(), 0.5);
            assert_relative_eq!(g.eval(Edge::External(2), t).unwrap(), 0.5 * f64::exp(t), epsilon = 1e-15);
        }
        // ODE oracle; the flow is unstable forward in t, so start where rounding is harmless
        let y = ode(-1.0, 1.0, g.eval(Edge::External(0), -10.0).unwrap(), -10.0, 0.0);
        assert_relative_eq!(y, 0.5, epsilon = 1e-9);
        assert!(g.eval(Edge::External(0), 0.5).is_err());
    }

    #[test]
    fn type_b_example() {
        let (s, g) = build(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5]);
        assert_eq!(g.topology.kind, TreeType::B);
        let l = g.topology.internal_length;
        assert_relative_eq!(l, 2.0 * std::f64::consts::LN_2, epsilon = 1e-14);
        assert_relative_eq!(internal_edge_length(&s, &classify(&s)).unwrap(), l);
        assert_relative_eq!(g.eval(Edge::Internal, 0.0).unwrap(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(g.eval(Edge::Internal, l).unwrap(), 2.0, epsilon = 1e-12);
        // time of flight under −grad(f3 − f1) from p2 = 1 to J34 = 2
        let y = ode(0.5, 3.0, 1.0, 0.0, l);
        assert_relative_eq!(y, 2.0, epsilon = 1e-10);
    }

    fn from_points(a: [f64; 4], p: [f64; 3]) -> Scenario {
        let mut b = vec![0.0];
        for i in 0..3 {
            b.push(b[i] - p[i] * (a[i + 1] - a[i]));
        }
        Scenario::from_coefficients(&a, &b, 0.1, 0.25).unwrap()
    }

    #[test]
    fn linear_internal_edge() {
        // a2 = a4 inside (a1, a3), order p4 < p1 < p2 < p3: e1 and e2 are pinned
        let s = from_points([-1.0, 0.0, 1.0, 0.0], [0.0, 2.0, 3.0]);
        let c = classify(&s);
        assert_eq!(c.tree_type, Some(TreeType::C));
        let pp = criticals(&s).unwrap().p;
        let l = internal_edge_length(&s, &c).unwrap();
        assert_relative_eq!(l, (pp[1] - pp[0]) / (s.b(3) - s.b(1)), epsilon = 1e-14);
        let g = build_gradient_tree(&s, &c).unwrap();
        assert_eq!(g.internal.unwrap().kind, CurveKind::Linear);

        // a2 = a4 inside (a3, a1): e3 and e4 are pinned instead
        let s = from_points([1.0, 0.0, -1.0, 0.0], [0.0, 3.0, 2.0]);
        let c = classify(&s);
        assert_eq!(c.tree_type, Some(TreeType::C));
        let g = build_gradient_tree(&s, &c).unwrap();
        let l = g.topology.internal_length;
        // constant flow −(b4 − b2) carries J23 to J41 in time l
        let (j23, j41) = (g.junction_of[1], g.junction_of[0]);
        assert_relative_eq!(j23 - (s.b(3) - s.b(1)) * l, j41, epsilon = 1e-14);
        assert!(l > 0.0);
    }

    #[test]
    fn type_a_has_single_junction() {
        let a = [0.0, 2.0, 1.0, 3.0];
        let p = [0.0, 1.0, 0.0];
        let mut b = vec![0.0];
        for i in 0..3 {
            b.push(b[i] - p[i] * (a[i + 1] - a[i]));
        }
        let (_, g) = build(&a, &b);
        assert_eq!(g.topology.kind, TreeType::A);
        assert_eq!(g.topology.internal_length, 0.0);
        assert!(g.junction_of.iter().all(|&j| j == g.junction_of[0]));
    }
}
