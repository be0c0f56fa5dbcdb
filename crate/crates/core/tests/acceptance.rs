//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use disktree::converge::{run_report, ConvergenceReport, GridSpec};
use disktree::geometry::{classify, criticals, interior_angles, intersections, Scenario, TreeType, QUAD_ROWS};
use disktree::gradtree::{build_gradient_tree, Edge, GradientTree};
use disktree::param::{rengel_bracket, solve_z4, solve_z4_quadrature, z4_asymptotic, Chart};
use disktree::sampling::{sample_quad, sample_triangle, SampleOptions};
use disktree::scmap::{DiskMap, Prevertex, RegionTag, SCSpec, ScOracle};
use disktree::specfun::{appell_f1, gamma, gamma_ratio, gauss_2f1, SeriesControl};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

const SCHEDULE: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn triangle_demo(eps: f64) -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], eps, 0.25).unwrap()
}

fn quad_demo(eps: f64) -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5], eps, 0.25).unwrap()
}

fn specfun_identities() -> Outcome {
    let ctl = SeriesControl::default();
    let v = gauss_2f1(1.0, 1.0, 2.0, c(0.5, 0.0), &ctl).map_err(|e| e.to_string())?;
    let worst_log = (v.re - 2.0 * 2f64.ln()).abs();
    ensure(worst_log < 1e-10, || format!("2F1(1,1;2;1/2) off by {worst_log:e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst_sum: f64 = 0.0;
    for _ in 0..20 {
        let a = rng.gen_range(-1.5..1.5);
        let b = rng.gen_range(-1.5..1.5);
        let cc = (a + b + rng.gen_range(0.3..2.0f64)).max(0.2);
        let s = gauss_2f1(a, b, cc, c(1.0, 0.0), &ctl).map_err(|e| e.to_string())?;
        let g = gamma_ratio(&[cc, cc - a - b], &[cc - a, cc - b]).map_err(|e| e.to_string())?;
        worst_sum = worst_sum.max((s.re - g).abs() / (1.0 + g.abs()));
    }
    ensure(worst_sum < 1e-10, || format!("Gauss summation off by {worst_sum:e}"))?;
    let mut worst_diag: f64 = 0.0;
    for _ in 0..20 {
        let (a, b1, b2) = (rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        let cc = rng.gen_range(0.2..2.5);
        let x = Complex64::from_polar(rng.gen_range(0.0..0.5), rng.gen_range(-PI..PI));
        let f1 = appell_f1(a, b1, b2, cc, x, x, &ctl).map_err(|e| e.to_string())?;
        let f = gauss_2f1(a, b1 + b2, cc, x, &ctl).map_err(|e| e.to_string())?;
        worst_diag = worst_diag.max((f1 - f).norm());
    }
    ensure(worst_diag < 1e-10, || format!("F1 diagonal off by {worst_diag:e}"))?;
    Ok(format!("max errors {worst_log:.1e}, {worst_sum:.1e}, {worst_diag:.1e}"))
}

fn diameter(spec: &SCSpec) -> f64 {
    let mut pts = spec.images.clone();
    pts.push(spec.image_inf);
    let mut d: f64 = 0.0;
    for p in &pts {
        for q in &pts {
            d = d.max((p - q).norm());
        }
    }
    d
}

/// Quadrilaterals whose z4 is moderate enough for the quadrature oracle.
fn oracle_quads() -> Vec<SCSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::new();
    let demo = quad_demo(0.7);
    out.push(SCSpec::for_quad(&demo, solve_z4(&demo).unwrap().z4).unwrap());
    for row in QUAD_ROWS.iter().filter(|r| r.tie.is_none()) {
        if out.len() == 3 {
            break;
        }
        let s = sample_quad(row, &mut rng, &SampleOptions::default()).unwrap().with_epsilon(0.7);
        let sol = solve_z4(&s).unwrap();
        if sol.z4 > 1e-5 && sol.z4 < 0.5 {
            out.push(SCSpec::for_quad(&s, sol.z4).unwrap());
        }
    }
    out
}

fn annulus_point<R: Rng>(rng: &mut R, inner: f64, outer: f64) -> Complex64 {
    let lr = rng.gen_range((inner / 0.85).ln()..(outer * 0.85).ln());
    Complex64::from_polar(lr.exp(), rng.gen_range(0.0..PI))
}

fn connection_formula() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let specs = oracle_quads();
    ensure(specs.len() == 3, || format!("only {} oracle scenarios", specs.len()))?;
    for spec in &specs {
        let map = DiskMap::new(spec).map_err(|e| e.to_string())?;
        let oracle = ScOracle::new(spec).map_err(|e| e.to_string())?;
        let ann = map.annulus.clone().expect("quad annulus");
        for _ in 0..10 {
            let z = annulus_point(&mut rng, ann.inner, ann.outer);
            let w = map.eval_with(RegionTag::AnnulusG2, z).map_err(|e| e.to_string())?;
            let o = oracle.eval(z).map_err(|e| e.to_string())?;
            worst = worst.max((w - o).norm() / diameter(spec));
        }
    }
    ensure(worst < 1e-8, || format!("max scaled residual {worst:e}"))?;
    Ok(format!("3 scenarios x 10 points, max scaled residual {worst:.1e}"))
}

fn clause_points<R: Rng>(rng: &mut R, map: &DiskMap, tag: RegionTag) -> Vec<Complex64> {
    (0..25)
        .map(|_| match tag {
            RegionTag::AnnulusG2 => {
                let a = map.annulus.as_ref().expect("annulus");
                annulus_point(rng, a.inner, a.outer)
            }
            t => {
                let l = map.local(t).expect("clause");
                let u = Complex64::from_polar(l.radius() * rng.gen_range(0.02..0.85), rng.gen_range(0.0..PI));
                match l.prevertex {
                    Prevertex::Finite(s) => s + u,
                    Prevertex::Infinity => -u.inv(),
                }
            }
        })
        .collect()
}

fn clauses_match(spec: &SCSpec, rng: &mut ChaCha8Rng, worst: &mut f64, clauses: &mut usize) -> Result<(), String> {
    let map = DiskMap::new(spec).map_err(|e| e.to_string())?;
    let oracle = ScOracle::new(spec).map_err(|e| e.to_string())?;
    let mut tags: Vec<RegionTag> = map.locals.iter().map(|(t, _)| *t).collect();
    if map.annulus.is_some() {
        tags.push(RegionTag::AnnulusG2);
    }
    let d = diameter(spec);
    for tag in tags {
        for z in clause_points(rng, &map, tag) {
            let w = map.eval_with(tag, z).map_err(|e| format!("{tag:?} at {z}: {e}"))?;
            let o = oracle.eval(z).map_err(|e| format!("oracle at {z}: {e}"))?;
            *worst = worst.max((w - o).norm() / d);
        }
        *clauses += 1;
    }
    Ok(())
}

fn series_vs_quadrature() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut clauses = 0;
    let mut triangles = vec![triangle_demo(0.5)];
    for _ in 0..2 {
        triangles.push(sample_triangle(&mut rng, &SampleOptions::default()).unwrap().with_epsilon(0.5));
    }
    for s in &triangles {
        clauses_match(&SCSpec::for_triangle(s).map_err(|e| e.to_string())?, &mut rng, &mut worst, &mut clauses)?;
    }
    for spec in oracle_quads() {
        clauses_match(&spec, &mut rng, &mut worst, &mut clauses)?;
        clauses_match(&spec.rescaled().map_err(|e| e.to_string())?, &mut rng, &mut worst, &mut clauses)?;
    }
    ensure(worst < 1e-8, || format!("max scaled error {worst:e}"))?;
    Ok(format!("{clauses} clauses x 25 points, max scaled error {worst:.1e}"))
}

fn angle_asymptotics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let o = SampleOptions::default();
    let eps = 1e-4;
    let mut worst: f64 = 0.0;
    let mut corners = 0;
    for n in 0..100 {
        let s = if n % 2 == 0 {
            sample_triangle(&mut rng, &o).unwrap()
        } else {
            sample_quad(&QUAD_ROWS[n % QUAD_ROWS.len()], &mut rng, &o).unwrap()
        };
        let s = s.with_epsilon(eps);
        let alpha = interior_angles(&s).map_err(|e| e.to_string())?;
        for (i, &a) in alpha.iter().enumerate() {
            // corners that close up as ε → 0
            if a > 0.5 {
                continue;
            }
            let target = PI / (s.a(i + 1) - s.a(i)).abs();
            let got = eps * gamma(a).map_err(|e| e.to_string())?;
            worst = worst.max((got - target).abs() / target);
            corners += 1;
        }
    }
    ensure(worst < 1e-3, || format!("max relative error {worst:e}"))?;
    Ok(format!("{corners} corners, max relative error {worst:.1e}"))
}

/// Strictly decreasing errors per region, and measured ≤ bound where defined.
fn check_report(r: &ConvergenceReport, strict: bool) -> Result<(usize, f64), String> {
    let mut worst_ratio: f64 = 0.0;
    let names = r.region_names();
    for name in &names {
        let rows: Vec<_> = r.region_rows(name).collect();
        for w in rows.windows(2) {
            let ok = if strict { w[1].sup_error < w[0].sup_error } else { w[1].sup_error <= w[0].sup_error };
            ensure(ok, || format!("{name}: error {} at eps {} after {} at eps {}", w[1].sup_error, w[1].epsilon, w[0].sup_error, w[0].epsilon))?;
        }
        for row in rows {
            if let Some(b) = row.bound {
                ensure(row.sup_error <= b, || format!("{name} eps {}: measured {} > bound {b}", row.epsilon, row.sup_error))?;
                worst_ratio = worst_ratio.max(row.sup_error / b);
            }
        }
    }
    Ok((names.len(), worst_ratio))
}

fn k3_convergence() -> Outcome {
    let r = run_report(&triangle_demo(0.2), &SCHEDULE, &GridSpec::default()).map_err(|e| e.to_string())?;
    ensure(r.rows.iter().all(|x| x.bound.is_some()), || "a triangle region has no bound".into())?;
    let (n, ratio) = check_report(&r, true)?;
    ensure(n == 4, || format!("{n} regions"))?;
    let last: Vec<String> = r.rows.iter().filter(|x| x.epsilon == 0.025).map(|x| format!("{}={:.2e}", x.region, x.sup_error)).collect();
    Ok(format!("4 regions, max measured/bound {ratio:.2}; at eps 0.025: {}", last.join(" ")))
}

fn k4_parameter() -> Outcome {
    let mut worst: f64 = 0.0;
    for eps in [0.5, 0.3, 0.2] {
        let s = quad_demo(eps);
        let a = solve_z4(&s).map_err(|e| e.to_string())?;
        let b = solve_z4_quadrature(&s).map_err(|e| e.to_string())?;
        ensure(a.chart == Chart::Zero && b.chart == Chart::Zero, || "unexpected chart".into())?;
        worst = worst.max((a.log_z4 - b.log_z4).abs());
    }
    ensure(worst < 1e-8, || format!("series and quadrature roots differ by {worst:e} in log z4"))?;
    let l = 2.0 * 2f64.ln();
    let est = z4_asymptotic(&quad_demo(0.01), &[0.01]).map_err(|e| e.to_string())?[0].1;
    let rel = (est - l).abs() / l;
    ensure(rel < 0.05, || format!("-eps log z4/pi = {est} vs l = {l}"))?;
    let mut logs = Vec::new();
    for eps in [0.2, 0.1, 0.05, 0.025, 0.01] {
        logs.push(solve_z4(&quad_demo(eps)).map_err(|e| e.to_string())?.log_z4);
    }
    ensure(logs.windows(2).all(|w| w[1] < w[0]), || format!("log z4 not decreasing: {logs:?}"))?;
    Ok(format!("root agreement {worst:.1e} in log z4, l estimate {est:.5} ({:.2}% off), z4(0.01) = e^{:.1}", 100.0 * rel, logs[4]))
}

fn k4_convergence() -> Outcome {
    let s = quad_demo(0.2);
    let r = run_report(&s, &SCHEDULE, &GridSpec::default()).map_err(|e| e.to_string())?;
    for eps in SCHEDULE {
        let z4 = r.rows.iter().find(|x| x.epsilon == eps).and_then(|x| x.z4).unwrap_or(f64::NAN);
        let has_internal = r.rows.iter().any(|x| x.epsilon == eps && x.region == "internal");
        ensure(has_internal == (z4 < 0.0625), || format!("eps {eps}: internal row presence disagrees with z4 = {z4:e}"))?;
    }
    let (n, ratio) = check_report(&r, true)?;
    ensure(n == 7, || format!("{n} regions"))?;
    let bounded = r.rows.iter().filter(|x| x.bound.is_some()).count();
    Ok(format!("7 regions, {bounded}/{} rows bounded, max measured/bound {ratio:.2}", r.rows.len()))
}

fn rengel() -> Outcome {
    let sq = rengel_bracket([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).map_err(|e| e.to_string())?;
    ensure((sq.lower - 1.0).abs() < 1e-12 && (sq.upper - 1.0).abs() < 1e-12, || format!("square bracket {sq:?}"))?;
    let flat = quad_demo(0.1).shifted(1);
    let mut upper = Vec::new();
    for eps in [0.1, 0.05, 0.02, 0.01, 0.005] {
        let x = intersections(&flat.with_epsilon(eps)).map_err(|e| e.to_string())?;
        upper.push(rengel_bracket([x[0], x[1], x[2], x[3]]).map_err(|e| e.to_string())?.upper);
    }
    ensure(upper.windows(2).all(|w| w[1] < w[0]), || format!("upper bounds {upper:?}"))?;
    Ok(format!("square (1, 1); flattening upper bound {:.3e} -> {:.3e}", upper[0], upper[upper.len() - 1]))
}

fn flow(s: &Scenario, lef: usize, rig: usize, x: f64) -> f64 {
    -((s.a(rig) - s.a(lef)) * x + (s.b(rig) - s.b(lef)))
}

fn flow_residual(s: &Scenario, g: &GradientTree) -> f64 {
    let k = s.k();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let deriv = |e: Edge, t: f64| (g.eval(e, t + h).unwrap() - g.eval(e, t - h).unwrap()) / (2.0 * h);
    for i in 0..k {
        for t in [-5.0, -1.0, -0.25] {
            let x = g.eval(Edge::External(i), t).unwrap();
            worst = worst.max((deriv(Edge::External(i), t) - flow(s, i, (i + 1) % k, x)).abs());
        }
    }
    if g.internal.is_some() {
        let (lef, rig) = if g.topology.kind == TreeType::B { (0, 2) } else { (1, 3) };
        for f in [0.2, 0.5, 0.8] {
            let t = f * g.topology.internal_length;
            let x = g.eval(Edge::Internal, t).unwrap();
            worst = worst.max((deriv(Edge::Internal, t) - flow(s, lef, rig, x)).abs());
        }
    }
    worst
}

fn gradient_trees() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let o = SampleOptions::default();
    let (mut cont, mut ode): (f64, f64) = (0.0, 0.0);
    let mut limits = 0;
    for row in &QUAD_ROWS {
        for n in 0..500 {
            let s = sample_quad(row, &mut rng, &o).map_err(|e| e.to_string())?;
            let c = classify(&s);
            let g = build_gradient_tree(&s, &c).map_err(|e| format!("row {}: {e}", row.id))?;
            ensure(g.topology.kind == row.tree, || format!("row {}: tree {}", row.id, g.topology.kind))?;
            let scale = 1.0 + criticals(&s).unwrap().p.iter().map(|x| x.abs()).fold(0.0, f64::max);
            cont = cont.max(g.continuity_residual() / scale);
            ode = ode.max(flow_residual(&s, &g));
            if n < 5 {
                let sol = solve_z4(&s.with_epsilon(0.01)).map_err(|e| format!("row {}: {e}", row.id))?;
                let predicted = match (sol.log_z4 < -20.0, sol.log_one_minus_z4 < -20.0) {
                    (true, false) => TreeType::B,
                    (false, true) => TreeType::C,
                    (false, false) => TreeType::A,
                    _ => unreachable!("both logs cannot be small"),
                };
                ensure(predicted == g.topology.kind, || format!("row {}: z4 limit predicts {predicted}, tree is {}", row.id, g.topology.kind))?;
                limits += 1;
            }
        }
    }
    ensure(cont < 1e-10, || format!("continuity residual {cont:e}"))?;
    ensure(ode < 1e-5, || format!("flow residual {ode:e}"))?;
    Ok(format!("{} trees, continuity {cont:.1e}, flow {ode:.1e}, {limits} z4 limits match", 500 * QUAD_ROWS.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("special-function identities", specfun_identities, Duration::from_secs(1)),
        ("annulus connection formula vs quadrature", connection_formula, Duration::from_secs(30)),
        ("series clauses vs quadrature", series_vs_quadrature, Duration::from_secs(60)),
        ("angle asymptotics at eps = 1e-4", angle_asymptotics, Duration::MAX),
        ("k=3 convergence and bounds", k3_convergence, Duration::from_secs(20)),
        ("k=4 accessory parameter", k4_parameter, Duration::from_secs(60)),
        ("k=4 convergence and bounds", k4_convergence, Duration::from_secs(120)),
        ("Rengel bracket", rengel, Duration::MAX),
        ("gradient-tree suite", gradient_trees, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > *limit => Err(format!("{msg}; took {took:.2?}, limit {limit:?}")),
            o => o,
        };
        match outcome {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} ({took:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} ({took:.2?})", i + 1);
            }
        }
    }
    println!("{} criteria, {failed} failed", criteria.len());
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
