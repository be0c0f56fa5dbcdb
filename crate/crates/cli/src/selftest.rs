use disktree::geometry::Scenario;
use disktree::param::{solve_z4, solve_z4_in, Chart};
use disktree::scmap::{sc_quadrature, DiskMap, SCSpec};
use disktree::specfun::{appell_f1, gamma_ratio, gauss_2f1, SeriesControl};
use num_complex::Complex64;

use crate::commands::{summary, CliError};

type Check = fn() -> Result<(), String>;

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    if (got - want).abs() <= tol * (1.0 + want.abs()) {
        Ok(())
    } else {
        Err(format!("{name}: {got} vs {want}"))
    }
}

fn err(e: disktree::Error) -> String {
    e.to_string()
}

fn log_two() -> Result<(), String> {
    let v = gauss_2f1(1.0, 1.0, 2.0, Complex64::new(0.5, 0.0), &SeriesControl::default()).map_err(err)?;
    close("2F1(1,1;2;1/2)", v.re, 2.0 * 2f64.ln(), 1e-10)
}

fn gauss_sum() -> Result<(), String> {
    let ctl = SeriesControl::default();
    for (a, b, c) in [(0.3, 0.4, 1.5), (-0.7, 0.2, 1.1), (0.5, 0.5, 2.0)] {
        let v = gauss_2f1(a, b, c, Complex64::new(1.0, 0.0), &ctl).map_err(err)?;
        let g = gamma_ratio(&[c, c - a - b], &[c - a, c - b]).map_err(err)?;
        close("Gauss sum", v.re, g, 1e-10)?;
    }
    Ok(())
}

fn appell_diagonal() -> Result<(), String> {
    let ctl = SeriesControl::default();
    let x = Complex64::new(0.3, 0.2);
    let f1 = appell_f1(0.4, 0.3, 0.5, 1.7, x, x, &ctl).map_err(err)?;
    let f = gauss_2f1(0.4, 0.8, 1.7, x, &ctl).map_err(err)?;
    close("F1 diagonal", (f1 - f).norm(), 0.0, 1e-10)
}

fn triangle() -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 1.0], &[0.0, 1.0, 0.0], 0.1, 0.25).expect("demo triangle")
}

fn quad() -> Scenario {
    Scenario::from_coefficients(&[0.0, -1.0, 0.5, 1.0], &[0.0, 0.0, -1.5, -2.5], 0.1, 0.25).expect("demo quad")
}

fn series_vs_quadrature(spec: &SCSpec) -> Result<(), String> {
    let map = DiskMap::new(spec).map_err(err)?;
    for z in [Complex64::new(0.1, 0.05), Complex64::new(0.9, 0.2), Complex64::new(-3.0, 2.0), Complex64::new(0.4, 0.3)] {
        let (w, _) = map.eval(z).map_err(err)?;
        let o = sc_quadrature(spec, z).map_err(err)?;
        close(&format!("w({z})"), (w - o).norm(), 0.0, 1e-8)?;
    }
    Ok(())
}

fn triangle_oracle() -> Result<(), String> {
    series_vs_quadrature(&SCSpec::for_triangle(&triangle()).map_err(err)?)
}

fn quad_oracle() -> Result<(), String> {
    let s = quad().with_epsilon(0.5);
    let z4 = solve_z4(&s).map_err(err)?.z4;
    series_vs_quadrature(&SCSpec::for_quad(&s, z4).map_err(err)?)
}

fn classification() -> Result<(), String> {
    let t = summary(&triangle()).map_err(|e| e.to_string())?;
    let q = summary(&quad()).map_err(|e| e.to_string())?;
    if t != "Triangle, row a2<a1<a3, p=(1,0.5,0)" || q != "ConvexQuad, tree B, l=1.386294" {
        return Err(format!("got {t:?} and {q:?}"));
    }
    Ok(())
}

fn charts() -> Result<(), String> {
    let s = quad().with_epsilon(0.5);
    let a = solve_z4_in(&s, Chart::Zero).map_err(err)?;
    let b = solve_z4_in(&s, Chart::One).map_err(err)?;
    close("z4 charts", a.z4, b.z4, 1e-9)
}

const CHECKS: [(&str, Check); 8] = [
    ("specfun/log-two", log_two),
    ("specfun/gauss-summation", gauss_sum),
    ("specfun/appell-diagonal", appell_diagonal),
    ("scmap/triangle-oracle", triangle_oracle),
    ("scmap/quad-oracle", quad_oracle),
    ("geometry/demo-classification", classification),
    ("param/z4-charts", charts),
    ("param/z4-limit", z4_limit),
];

fn z4_limit() -> Result<(), String> {
    let a = solve_z4(&quad().with_epsilon(0.2)).map_err(err)?.z4;
    let b = solve_z4(&quad().with_epsilon(0.1)).map_err(err)?.z4;
    if b < a && b < 1e-10 {
        Ok(())
    } else {
        Err(format!("z4 {a} then {b}"))
    }
}

pub fn run(only: Option<&str>) -> Result<(), CliError> {
    let selected: Vec<&(&str, Check)> = CHECKS.iter().filter(|(n, _)| only.is_none_or(|o| n.contains(o))).collect();
    let mut failed = 0;
    for (name, check) in &selected {
        match check() {
            Ok(()) => println!("PASS {name}"),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("{} tests, {failed} failed", selected.len());
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} selftest checks failed")));
    }
    Ok(())
}
