use disktree::geometry::{classify, criticals, Scenario, QUAD_ROWS};
use disktree::gradtree::{build_gradient_tree, Edge, GradientTree};
use disktree::sampling::{sample_quad, sample_triangle, SampleOptions};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// −(f_rig − f_lef)'(x)
fn flow(s: &Scenario, lef: usize, rig: usize, x: f64) -> f64 {
    -((s.a(rig) - s.a(lef)) * x + (s.b(rig) - s.b(lef)))
}

fn check_ode(s: &Scenario, g: &GradientTree) {
    let k = s.k();
    let h = 1e-6;
    for i in 0..k {
        for t in [-5.0, -1.0, -0.25] {
            let d = (g.eval(Edge::External(i), t + h).unwrap() - g.eval(Edge::External(i), t - h).unwrap()) / (2.0 * h);
            let x = g.eval(Edge::External(i), t).unwrap();
            let (lef, rig) = (i, (i + 1) % k);
            assert!((d - flow(s, lef, rig, x)).abs() < 1e-5, "edge {i} t={t}");
        }
    }
    if g.internal.is_some() {
        let l = g.topology.internal_length;
        let (lef, rig) = if g.topology.kind == disktree::geometry::TreeType::B { (0, 2) } else { (1, 3) };
        for f in [0.2, 0.5, 0.8] {
            let t = f * l;
            let d = (g.eval(Edge::Internal, t + h).unwrap() - g.eval(Edge::Internal, t - h).unwrap()) / (2.0 * h);
            let x = g.eval(Edge::Internal, t).unwrap();
            assert!((d - flow(s, lef, rig, x)).abs() < 1e-5);
        }
    }
}

#[test]
fn every_table_row_has_a_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let o = SampleOptions::default();
    for row in &QUAD_ROWS {
        for _ in 0..500 {
            let s = sample_quad(row, &mut rng, &o).unwrap();
            let c = classify(&s);
            let g = build_gradient_tree(&s, &c).unwrap_or_else(|e| panic!("row {}: {e}: {s:?}", row.id));
            assert_eq!(g.topology.kind, row.tree);
            let scale = 1.0 + criticals(&s).unwrap().p.iter().map(|x| x.abs()).fold(0.0, f64::max);
            assert!(g.continuity_residual() < 1e-10 * scale);
            check_ode(&s, &g);
        }
    }
}

#[test]
fn random_triangles_have_tripods() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let o = SampleOptions::default();
    for _ in 0..500 {
        let s = sample_triangle(&mut rng, &o).unwrap();
        let g = build_gradient_tree(&s, &classify(&s)).unwrap();
        assert!(g.continuity_residual() < 1e-10);
        check_ode(&s, &g);
        // exactly one constant leaf, at the junction
        let p = criticals(&s).unwrap().p;
        let j = g.junction_of[0];
        assert_eq!(p.iter().filter(|&&x| x == j).count(), 1);
    }
}
