//! Affine Lagrangian configurations: scaling, intersections, critical points,
//! interior angles and the triangle/quadrilateral classification tables.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the equality rows of the quadrilateral table.
pub const TAU_EQ: f64 = 1e-9;

/// The line y = a·x + b, graph of df for f = ½ax² + bx.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineLagrangian {
    pub a: f64,
    pub b: f64,
}

impl AffineLagrangian {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    /// Derivative of the potential, i.e. the unscaled line.
    pub fn df(&self, x: f64) -> f64 {
        self.a * x + self.b
    }
}

/// Ordered Lagrangians with the scale ε and decomposition radius δ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub lagrangians: Vec<AffineLagrangian>,
    pub epsilon: f64,
    pub delta: f64,
}

impl Scenario {
    pub fn new(lagrangians: Vec<AffineLagrangian>, epsilon: f64, delta: f64) -> Result<Self> {
        let k = lagrangians.len();
        if !(3..=4).contains(&k) {
            return Err(Error::Domain(format!("k={k}, expected 3 or 4")));
        }
        if lagrangians.iter().any(|l| !l.a.is_finite() || !l.b.is_finite()) {
            return Err(Error::Domain("non-finite Lagrangian coefficients".into()));
        }
        for i in 0..k {
            if lagrangians[i].a == lagrangians[(i + 1) % k].a {
                return Err(Error::Degenerate(format!(
                    "consecutive slopes a{} and a{} coincide",
                    i + 1,
                    (i + 1) % k + 1
                )));
            }
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain(format!("epsilon={epsilon} must be positive")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::Domain(format!("delta={delta} must lie in (0, 1/2)")));
        }
        Ok(Self { lagrangians, epsilon, delta })
    }

    pub fn from_coefficients(a: &[f64], b: &[f64], epsilon: f64, delta: f64) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Domain("slope and intercept lists differ in length".into()));
        }
        let l = a.iter().zip(b).map(|(&a, &b)| AffineLagrangian::new(a, b)).collect();
        Self::new(l, epsilon, delta)
    }

    pub fn k(&self) -> usize {
        self.lagrangians.len()
    }

    pub fn a(&self, i: usize) -> f64 {
        self.lagrangians[i % self.k()].a
    }

    pub fn b(&self, i: usize) -> f64 {
        self.lagrangians[i % self.k()].b
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        Self { epsilon, ..self.clone() }
    }

    /// Cyclic relabel L'_i = L_{i+r}.
    pub fn shifted(&self, r: usize) -> Self {
        let k = self.k();
        let lagrangians = (0..k).map(|i| self.lagrangians[(i + r) % k]).collect();
        Self { lagrangians, ..self.clone() }
    }
}

/// Critical points p_i of f_{i+1} − f_i and, for k = 4, p13 of f_3 − f_1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criticals {
    pub p: Vec<f64>,
    pub p13: Option<f64>,
}

fn critical_of(li: AffineLagrangian, lj: AffineLagrangian) -> Result<f64> {
    let da = lj.a - li.a;
    if da == 0.0 {
        return Err(Error::Degenerate("parallel Lagrangians".into()));
    }
    Ok(-(lj.b - li.b) / da)
}

pub fn criticals(s: &Scenario) -> Result<Criticals> {
    let k = s.k();
    let l = &s.lagrangians;
    let p = (0..k)
        .map(|i| critical_of(l[i], l[(i + 1) % k]))
        .collect::<Result<Vec<_>>>()?;
    let p13 = if k == 4 { critical_of(l[0], l[2]).ok() } else { None };
    Ok(Criticals { p, p13 })
}

/// x_i^ε = (p_i, ε(a_i p_i + b_i)) for any ε ≥ 0.
pub fn intersections_at(lagrangians: &[AffineLagrangian], epsilon: f64) -> Result<Vec<[f64; 2]>> {
    let k = lagrangians.len();
    (0..k)
        .map(|i| {
            let p = critical_of(lagrangians[i], lagrangians[(i + 1) % k])?;
            Ok([p, epsilon * lagrangians[i].df(p)])
        })
        .collect()
}

pub fn intersections(s: &Scenario) -> Result<Vec<[f64; 2]>> {
    intersections_at(&s.lagrangians, s.epsilon)
}

/// Intersection of the scaled lines L_1 and L_3.
pub fn x13(s: &Scenario) -> Result<[f64; 2]> {
    let l = &s.lagrangians;
    if l.len() != 4 {
        return Err(Error::Domain("x13 needs four Lagrangians".into()));
    }
    let p = critical_of(l[0], l[2])?;
    Ok([p, s.epsilon * l[0].df(p)])
}

fn tol(x: f64, y: f64) -> f64 {
    TAU_EQ * (1.0 + x.abs() + y.abs())
}

/// α_i^ε: interior angle at x_i^ε divided by π.
pub fn interior_angles(s: &Scenario) -> Result<Vec<f64>> {
    let k = s.k();
    let p = criticals(s)?.p;
    (0..k)
        .map(|i| {
            let prev = p[(i + k - 1) % k];
            let next = p[(i + 1) % k];
            let (dn, dp) = (next - p[i], prev - p[i]);
            if dn.abs() < tol(next, p[i]) || dp.abs() < tol(prev, p[i]) {
                return Err(Error::Degenerate(format!("vertex {} coincides with a neighbour", i + 1)));
            }
            let turn = ((s.a(i + 1) * s.epsilon).atan() - (s.a(i) * s.epsilon).atan()).abs() / PI;
            Ok(if dn * dp > 0.0 { turn } else { 1.0 - turn })
        })
        .collect()
}

/// Per-vertex data bundle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexData {
    pub x_eps: [f64; 2],
    pub p: f64,
    pub alpha_eps: f64,
}

pub fn vertices(s: &Scenario) -> Result<Vec<VertexData>> {
    let x = intersections(s)?;
    let alpha = interior_angles(s)?;
    Ok(x.into_iter()
        .zip(alpha)
        .map(|(x_eps, alpha_eps)| VertexData { x_eps, p: x_eps[0], alpha_eps })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolygonKind {
    Triangle,
    ConvexQuad,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TreeType {
    Tripod,
    A,
    B,
    C,
}

impl fmt::Display for TreeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TreeType::Tripod => "tripod",
            TreeType::A => "A",
            TreeType::B => "B",
            TreeType::C => "C",
        };
        f.write_str(s)
    }
}

/// Slope condition of the quadrilateral table (column A).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SlopeGroup {
    /// a2, a4 ∈ (a1, a3)
    EvenInsideOddUp,
    /// a2, a4 ∈ (a3, a1)
    EvenInsideOddDown,
    /// a1, a3 ∈ (a2, a4)
    OddInsideEvenUp,
    /// a1, a3 ∈ (a4, a2)
    OddInsideEvenDown,
    /// max{a1, a3} < min{a2, a4}
    OddBelowEven,
    /// max{a2, a4} < min{a1, a3}
    EvenBelowOdd,
}

impl SlopeGroup {
    pub const ALL: [SlopeGroup; 6] = [
        SlopeGroup::EvenInsideOddUp,
        SlopeGroup::EvenInsideOddDown,
        SlopeGroup::OddInsideEvenUp,
        SlopeGroup::OddInsideEvenDown,
        SlopeGroup::OddBelowEven,
        SlopeGroup::EvenBelowOdd,
    ];

    pub fn holds(&self, a: [f64; 4]) -> bool {
        let inside = |x: f64, lo: f64, hi: f64| lo < x && x < hi;
        let [a1, a2, a3, a4] = a;
        match self {
            SlopeGroup::EvenInsideOddUp => inside(a2, a1, a3) && inside(a4, a1, a3),
            SlopeGroup::EvenInsideOddDown => inside(a2, a3, a1) && inside(a4, a3, a1),
            SlopeGroup::OddInsideEvenUp => inside(a1, a2, a4) && inside(a3, a2, a4),
            SlopeGroup::OddInsideEvenDown => inside(a1, a4, a2) && inside(a3, a4, a2),
            SlopeGroup::OddBelowEven => a1.max(a3) < a2.min(a4),
            SlopeGroup::EvenBelowOdd => a2.max(a4) < a1.min(a3),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SlopeGroup::EvenInsideOddUp => "a2,a4 in (a1,a3)",
            SlopeGroup::EvenInsideOddDown => "a2,a4 in (a3,a1)",
            SlopeGroup::OddInsideEvenUp => "a1,a3 in (a2,a4)",
            SlopeGroup::OddInsideEvenDown => "a1,a3 in (a4,a2)",
            SlopeGroup::OddBelowEven => "max{a1,a3}<min{a2,a4}",
            SlopeGroup::EvenBelowOdd => "max{a2,a4}<min{a1,a3}",
        }
    }
}

/// One row of the quadrilateral table: slope group, critical-point order
/// (0-based indices listed by increasing p, `eq` marks a tied adjacent pair)
/// and the resulting tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadRow {
    pub id: usize,
    pub slopes: SlopeGroup,
    pub order: [usize; 4],
    pub tie: Option<usize>,
    pub tree: TreeType,
}

pub const QUAD_ROWS: [QuadRow; 10] = [
    QuadRow { id: 1, slopes: SlopeGroup::EvenInsideOddUp, order: [3, 0, 1, 2], tie: None, tree: TreeType::C },
    QuadRow { id: 2, slopes: SlopeGroup::EvenInsideOddDown, order: [0, 3, 2, 1], tie: None, tree: TreeType::C },
    QuadRow { id: 3, slopes: SlopeGroup::OddInsideEvenUp, order: [0, 1, 2, 3], tie: None, tree: TreeType::B },
    QuadRow { id: 4, slopes: SlopeGroup::OddInsideEvenDown, order: [2, 3, 0, 1], tie: None, tree: TreeType::B },
    QuadRow { id: 5, slopes: SlopeGroup::OddBelowEven, order: [3, 0, 2, 1], tie: None, tree: TreeType::C },
    QuadRow { id: 6, slopes: SlopeGroup::OddBelowEven, order: [3, 2, 0, 1], tie: None, tree: TreeType::B },
    QuadRow { id: 7, slopes: SlopeGroup::OddBelowEven, order: [3, 0, 2, 1], tie: Some(1), tree: TreeType::A },
    QuadRow { id: 8, slopes: SlopeGroup::EvenBelowOdd, order: [0, 3, 1, 2], tie: None, tree: TreeType::C },
    QuadRow { id: 9, slopes: SlopeGroup::EvenBelowOdd, order: [2, 3, 1, 0], tie: None, tree: TreeType::B },
    QuadRow { id: 10, slopes: SlopeGroup::EvenBelowOdd, order: [0, 3, 1, 2], tie: Some(1), tree: TreeType::A },
];

impl QuadRow {
    /// Whether p follows this row's order or its reversal.
    pub fn order_holds(&self, p: [f64; 4]) -> bool {
        let check = |ord: [usize; 4], tie: Option<usize>| {
            (0..3).all(|j| {
                let (x, y) = (p[ord[j]], p[ord[j + 1]]);
                if tie == Some(j) {
                    (x - y).abs() < tol(x, y)
                } else {
                    y - x > tol(x, y)
                }
            })
        };
        let o = self.order;
        let rev = [o[3], o[2], o[1], o[0]];
        check(o, self.tie) || check(rev, self.tie.map(|t| 2 - t))
    }

    pub fn label(&self) -> String {
        let mut s = String::new();
        for (j, &i) in self.order.iter().enumerate() {
            s.push_str(&format!("p{}", i + 1));
            if j < 3 {
                s.push(if self.tie == Some(j) { '=' } else { '<' });
            }
        }
        format!("{}; {}", self.slopes.label(), s)
    }
}

/// Counterclockwise slope patterns for triangles.
pub const TRIANGLE_ROWS: [[usize; 3]; 3] = [[0, 2, 1], [1, 0, 2], [2, 1, 0]];

fn triangle_label(order: [usize; 3]) -> String {
    format!("a{}<a{}<a{}", order[0] + 1, order[1] + 1, order[2] + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub kind: PolygonKind,
    pub table_row: Option<String>,
    pub quad_row: Option<QuadRow>,
    pub tree_type: Option<TreeType>,
    pub sign_p31_p42: Option<i8>,
}

impl Classification {
    fn degenerate(sign: Option<i8>) -> Self {
        Self { kind: PolygonKind::Degenerate, table_row: None, quad_row: None, tree_type: None, sign_p31_p42: sign }
    }
}

fn sign_with_tol(x: f64, scale: f64) -> i8 {
    if x.abs() < TAU_EQ * (1.0 + scale) {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Match slopes and critical-point order against the triangle condition or
/// the quadrilateral table. Non-matching inputs classify as `Degenerate`.
pub fn classify(s: &Scenario) -> Classification {
    let Ok(c) = criticals(s) else {
        return Classification::degenerate(None);
    };
    let p = &c.p;
    match s.k() {
        3 => {
            let a = [s.a(0), s.a(1), s.a(2)];
            let distinct = (0..3).all(|i| (p[i] - p[(i + 1) % 3]).abs() >= tol(p[i], p[(i + 1) % 3]));
            let row = TRIANGLE_ROWS
                .iter()
                .find(|o| a[o[0]] < a[o[1]] && a[o[1]] < a[o[2]]);
            match (row, distinct) {
                (Some(&o), true) => Classification {
                    kind: PolygonKind::Triangle,
                    table_row: Some(triangle_label(o)),
                    quad_row: None,
                    tree_type: Some(TreeType::Tripod),
                    sign_p31_p42: None,
                },
                _ => Classification::degenerate(None),
            }
        }
        4 => {
            let a = [s.a(0), s.a(1), s.a(2), s.a(3)];
            let pp = [p[0], p[1], p[2], p[3]];
            let prod = (pp[2] - pp[0]) * (pp[3] - pp[1]);
            let scale = pp.iter().map(|x| x.abs()).fold(0.0, f64::max).powi(2);
            let sign = Some(sign_with_tol(prod, scale));
            match QUAD_ROWS.iter().find(|r| r.slopes.holds(a) && r.order_holds(pp)) {
                Some(r) => Classification {
                    kind: PolygonKind::ConvexQuad,
                    table_row: Some(r.label()),
                    quad_row: Some(*r),
                    tree_type: Some(r.tree),
                    sign_p31_p42: sign,
                },
                None => Classification::degenerate(sign),
            }
        }
        _ => Classification::degenerate(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tri() -> Scenario {
        Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], 1.0, 0.25).unwrap()
    }

    fn quad() -> Scenario {
        Scenario::from_coefficients(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5], 0.1, 0.25).unwrap()
    }

    #[test]
    fn critical_points() {
        assert_eq!(criticals(&tri()).unwrap().p, vec![1.0, 0.5, 0.0]);
        let c = criticals(&quad()).unwrap();
        assert_eq!(c.p, vec![0.0, 1.0, 2.0, 2.5]);
        assert_eq!(c.p13, Some(3.0));
    }

    #[test]
    fn criticals_minimize_differences() {
        // f_{i+1} − f_i is a quadratic with a unique stationary point
        let s = quad();
        let c = criticals(&s).unwrap();
        for i in 0..4 {
            let g = |x: f64| {
                let (l, m) = (s.lagrangians[i], s.lagrangians[(i + 1) % 4]);
                0.5 * (m.a - l.a) * x * x + (m.b - l.b) * x
            };
            let h = 1e-4;
            let d = (g(c.p[i] + h) - g(c.p[i] - h)) / (2.0 * h);
            assert!(d.abs() < 1e-9);
        }
    }

    #[test]
    fn intersections_on_both_lines() {
        let s = tri().with_epsilon(0.1);
        let x = intersections(&s).unwrap();
        for i in 0..3 {
            for l in [s.lagrangians[i], s.lagrangians[(i + 1) % 3]] {
                assert!((x[i][1] - s.epsilon * l.df(x[i][0])).abs() < 1e-14);
            }
        }
        assert_eq!(x[0], [1.0, 0.0]);
        assert_eq!(x[1][0], 0.5);
        let flat = intersections_at(&s.lagrangians, 0.0).unwrap();
        assert!(flat.iter().all(|v| v[1] == 0.0));
    }

    #[test]
    fn obtuse_vertex_of_example_triangle() {
        let al = interior_angles(&tri()).unwrap();
        assert_relative_eq!(al[1], 0.5, epsilon = 1e-15);
        assert_relative_eq!(al.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // oracle: angle between the edge vectors at x_2
        let x = intersections(&tri()).unwrap();
        let u = [x[0][0] - x[1][0], x[0][1] - x[1][1]];
        let v = [x[2][0] - x[1][0], x[2][1] - x[1][1]];
        let cos = (u[0] * v[0] + u[1] * v[1]) / ((u[0] * u[0] + u[1] * u[1]).sqrt() * (v[0] * v[0] + v[1] * v[1]).sqrt());
        assert_relative_eq!(cos.acos() / PI, al[1], epsilon = 1e-12);
    }

    #[test]
    fn classification_examples() {
        let c = classify(&tri());
        assert_eq!(c.kind, PolygonKind::Triangle);
        assert_eq!(c.table_row.as_deref(), Some("a2<a1<a3"));
        let c = classify(&quad());
        assert_eq!(c.kind, PolygonKind::ConvexQuad);
        assert_eq!(c.tree_type, Some(TreeType::B));
        assert_eq!(c.quad_row.unwrap().id, 3);
        assert_eq!(c.sign_p31_p42, Some(1));
    }

    #[test]
    fn equality_row_gives_type_a() {
        // a = (0, 2, 1, 3): max{a1,a3} < min{a2,a4}; choose p1 = p3 = 0, p2 = 1
        let a = [0.0, 2.0, 1.0, 3.0];
        let p = [0.0, 1.0, 0.0];
        let mut b = [0.0; 4];
        for i in 0..3 {
            b[i + 1] = b[i] - p[i] * (a[i + 1] - a[i]);
        }
        let s = Scenario::from_coefficients(&a, &b, 0.1, 0.25).unwrap();
        let c = classify(&s);
        let pp = criticals(&s).unwrap().p;
        assert!(pp[3] < pp[0], "{pp:?}");
        assert_eq!(c.tree_type, Some(TreeType::A), "{c:?} {pp:?}");
        assert_eq!(c.sign_p31_p42, Some(0));
    }

    #[test]
    fn rejects_bad_scenarios() {
        assert!(Scenario::from_coefficients(&[0.0, 0.0, 1.0], &[0.0, 1.0, 2.0], 0.1, 0.25).is_err());
        assert!(Scenario::from_coefficients(&[0.0, 1.0, 2.0], &[0.0, 1.0, 2.0], 0.1, 0.6).is_err());
        // clockwise triangle
        let s = Scenario::from_coefficients(&[0.0, 1.0, -1.0], &[0.0, 1.0, 0.0], 0.1, 0.25).unwrap();
        assert_eq!(classify(&s).kind, PolygonKind::Degenerate);
    }
}
