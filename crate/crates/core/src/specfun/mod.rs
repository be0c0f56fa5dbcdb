//! Real-parameter special functions with complex arguments.

mod gamma;
mod hyper;

pub use gamma::{gamma, gamma_ratio, ln_gamma, pochhammer, sin_pi};
pub use hyper::{
    appell_f1, appell_f1_euler, f1_connection, gauss_2f1, gauss_2f1_euler, gauss_2f1_real,
    horn_g2,
};

use serde::{Deserialize, Serialize};

/// Truncation policy shared by every series in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-13,
            abs_tol: 1e-300,
            max_terms: 20_000,
        }
    }
}

/// Distance-to-integer guard used before connection formulas.
pub const NEAR_INTEGER: f64 = 1e-9;

pub(crate) fn near_integer(x: f64) -> bool {
    (x - x.round()).abs() < NEAR_INTEGER
}
