use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use disktree::converge::{analytic_bound, run_report, DiskFrame, GridSpec};
use disktree::geometry::{classify as classify_scenario, criticals, Classification, PolygonKind, Scenario};
use disktree::gradtree::{build_gradient_tree, internal_edge_length};
use disktree::param::{solve_z4 as solve, Chart};
use disktree::report::{ReportFile, ScenarioFile};
use log::info;
use num_complex::Complex64;
use thiserror::Error;

use crate::output::{self, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] disktree::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Core(disktree::Error::Degenerate(_) | disktree::Error::ParallelSides) => 3,
            CliError::Core(_) => 4,
            CliError::Io(_) | CliError::Failed(_) => 1,
        }
    }
}

#[derive(Debug, Default)]
pub struct Overrides {
    pub eps: Option<Vec<f64>>,
    pub delta: Option<f64>,
    pub grid: Option<usize>,
    pub regions: Option<Vec<String>>,
}

pub fn load(path: &Path, ov: &Overrides) -> Result<ScenarioFile, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut file: ScenarioFile =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    if let Some(eps) = &ov.eps {
        file.epsilon_schedule = eps.clone();
    }
    if let Some(d) = ov.delta {
        file.delta = d;
    }
    if let Some(n) = ov.grid {
        file.grid = GridSpec::uniform(n);
    }
    file.validate().map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok(file)
}

fn scenario(file: &ScenarioFile) -> Result<Scenario, CliError> {
    file.scenario().map_err(|e| CliError::Parse(e.to_string()))
}

fn classified(s: &Scenario) -> Result<Classification, CliError> {
    let c = classify_scenario(s);
    if c.kind == PolygonKind::Degenerate {
        return Err(disktree::Error::Degenerate("no table row matches the scenario".into()).into());
    }
    Ok(c)
}

fn tuple(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// One-line summary: the matched table row for triangles, the tree type and
/// internal edge length for quadrilaterals.
pub fn summary(s: &Scenario) -> Result<String, CliError> {
    let c = classified(s)?;
    let p = criticals(s)?.p;
    let tree = c.tree_type.expect("classified");
    let row = c.table_row.clone().unwrap_or_default();
    Ok(match c.kind {
        PolygonKind::Triangle => format!("Triangle, row {row}, p={}", tuple(&p)),
        _ => format!("ConvexQuad, tree {tree}, l={:.6}", internal_edge_length(s, &c)?),
    })
}

pub fn classify(file: &ScenarioFile, out: Option<&Path>) -> Result<(), CliError> {
    let s = scenario(file)?;
    let c = classified(&s)?;
    let p = criticals(&s)?.p;
    let mut text = summary(&s)?;
    text.push('\n');
    if c.kind == PolygonKind::ConvexQuad {
        text.push_str(&format!("row {}, p={}", c.table_row.unwrap_or_default(), tuple(&p)));
        if let Some(sign) = c.sign_p31_p42 {
            text.push_str(&format!(", sign (p3-p1)(p4-p2) = {sign:+}"));
        }
        text.push('\n');
    } else {
        text.push_str("tree tripod\n");
    }
    output::write_text(out, &text)
}

pub fn tree(file: &ScenarioFile, out: Option<&Path>) -> Result<(), CliError> {
    let s = scenario(file)?;
    let g = build_gradient_tree(&s, &classified(&s)?)?;
    let json = serde_json::to_string_pretty(&g).map_err(|e| CliError::Failed(e.to_string()))?;
    output::write_text(out, &(json + "\n"))
}

fn parse_point(z: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Parse(format!("--z expects RE,IM, got {z:?}"));
    let (re, im) = z.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.trim().parse().map_err(|_| bad())?;
    let im: f64 = im.trim().parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

pub fn map_eval(file: &ScenarioFile, z: &str, out: Option<&Path>) -> Result<(), CliError> {
    let z = parse_point(z)?;
    let frame = DiskFrame::new(&scenario(file)?)?;
    let (w, tag) = frame.map.eval(z)?;
    let sign = if w.im.is_sign_negative() { '-' } else { '+' };
    let mut text = format!("w = {} {sign} {}i\nregion {tag:?}\n", output::num(w.re), output::num(w.im.abs()));
    if let Some(z4) = frame.frame_z4() {
        text.push_str(&format!("frame z4 = {}, shift {}\n", output::num(z4), frame.shift));
    }
    output::write_text(out, &text)
}

pub fn solve_z4(file: &ScenarioFile, out: Option<&Path>) -> Result<(), CliError> {
    let s = scenario(file)?;
    if s.k() != 4 {
        return Err(CliError::Parse("solve-z4 needs a quadrilateral scenario".into()));
    }
    classified(&s)?;
    let mut t = Table::new(&["epsilon", "z4", "log_z4", "log_one_minus_z4", "chart", "residual", "iterations", "l_estimate"]);
    for &eps in &file.epsilon_schedule {
        let sol = solve(&s.with_epsilon(eps))?;
        let log_near = match sol.chart {
            Chart::Zero => sol.log_z4,
            Chart::One => sol.log_one_minus_z4,
        };
        t.push(vec![
            output::num(eps),
            output::num(sol.z4),
            output::num(sol.log_z4),
            output::num(sol.log_one_minus_z4),
            format!("{:?}", sol.chart),
            output::num(sol.residual),
            sol.iterations.to_string(),
            output::num(-eps * log_near / PI),
        ]);
    }
    t.write(out)
}

fn check_regions(names: &[String], known: &[String]) -> Result<(), CliError> {
    if let Some(bad) = names.iter().find(|n| !known.contains(n)) {
        return Err(CliError::Parse(format!("unknown region {bad:?}; available: {}", known.join(","))));
    }
    Ok(())
}

pub fn converge(file: &ScenarioFile, ov: &Overrides, out: Option<&Path>) -> Result<(), CliError> {
    let s = scenario(file)?;
    let line = summary(&s)?;
    info!("{line}; schedule {:?}", file.epsilon_schedule);
    let report = run_report(&s, &file.epsilon_schedule, &file.grid)?;
    let mut rf = ReportFile::new(report, line);
    if let Some(names) = &ov.regions {
        let known: Vec<String> = rf.rows.iter().map(|r| r.region.clone()).collect();
        check_regions(names, &known)?;
        rf.retain_regions(names);
    }
    output::write_report(out, &rf)
}

pub fn bounds(file: &ScenarioFile, ov: &Overrides, out: Option<&Path>) -> Result<(), CliError> {
    let s = scenario(file)?;
    classified(&s)?;
    let mut t = Table::new(&["region", "epsilon", "bound"]);
    let mut known = Vec::new();
    for &eps in &file.epsilon_schedule {
        let frame = DiskFrame::new(&s.with_epsilon(eps))?;
        for r in frame.regions()? {
            let name = r.label(frame.shift);
            known.push(name.clone());
            if ov.regions.as_ref().is_some_and(|names| !names.contains(&name)) {
                continue;
            }
            t.push(vec![name, output::num(eps), output::opt(analytic_bound(&frame, &r)?)]);
        }
    }
    if let Some(names) = &ov.regions {
        check_regions(names, &known)?;
    }
    t.write(out)
}
