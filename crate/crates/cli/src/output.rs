use std::fs;
use std::io::{self, Write};
use std::path::Path;

use disktree::report::ReportFile;

use crate::commands::CliError;

pub const REPORT_COLUMNS: [&str; 7] = ["region", "epsilon", "sup_error", "bound", "z4", "l_estimate", "windowed"];

/// 17 significant digits, enough to round-trip an f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Rows of pre-rendered cells under a fixed header.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Failed(e.to_string());
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), CliError> {
        write_text(out, &self.to_csv()?)
    }
}

pub fn report_table(rf: &ReportFile) -> Table {
    let mut t = Table::new(&REPORT_COLUMNS);
    for r in &rf.rows {
        t.push(vec![
            r.region.clone(),
            num(r.epsilon),
            num(r.sup_error),
            opt(r.bound),
            opt(r.z4),
            opt(r.l_estimate),
            r.windowed.to_string(),
        ]);
    }
    t
}

/// gnuplot script drawing sup error (solid) and bound (dashed) against ε per region.
pub fn plot_script(rf: &ReportFile, csv_name: &str) -> String {
    let mut names: Vec<&str> = Vec::new();
    for r in &rf.rows {
        if !names.contains(&r.region.as_str()) {
            names.push(&r.region);
        }
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set logscale xy\n");
    s.push_str("set xlabel 'epsilon'\n");
    s.push_str("set ylabel 'sup |w - target|'\n");
    s.push_str("set key outside right\n");
    s.push_str(&format!("set title '{}'\n", rf.metadata.classification.replace('\'', "")));
    let mut parts = Vec::new();
    for (i, n) in names.iter().enumerate() {
        let sel = |col: usize| format!("(strcol(1) eq '{n}' ? ${col} : NaN)");
        parts.push(format!("'{csv_name}' skip 1 using 2:{} with linespoints lc {} title '{n}'", sel(3), i + 1));
        parts.push(format!("'{csv_name}' skip 1 using 2:{} with lines dt 2 lc {} title '{n} bound'", sel(4), i + 1));
    }
    s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
    s
}

/// JSON when the output name ends in .json; otherwise CSV plus a gnuplot
/// script next to it.
pub fn write_report(out: Option<&Path>, rf: &ReportFile) -> Result<(), CliError> {
    match out {
        Some(p) if p.extension().is_some_and(|e| e == "json") => {
            let json = serde_json::to_string_pretty(rf).map_err(|e| CliError::Failed(e.to_string()))?;
            write_text(out, &(json + "\n"))
        }
        Some(p) => {
            report_table(rf).write(out)?;
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            fs::write(p.with_extension("gp"), plot_script(rf, &name))?;
            Ok(())
        }
        None => report_table(rf).write(None),
    }
}
