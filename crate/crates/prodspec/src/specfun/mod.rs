//! Special functions underlying the kernel formulas: complex log-gamma,
//! Hermite polynomials, the parabolic cylinder function U, the Meijer-G
//! functions attached to Ginibre chains, and the two ensemble weights
//! f_M (polynomial side) and g_M (source side).

pub mod fg;
pub mod gamma;
pub mod hermite;
pub mod meijer;
pub mod pcf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use fg::{f_m, g_m};
pub use gamma::{log_gamma, ln_gamma_real};
pub use hermite::hermite;
pub use meijer::{meijer_g10, meijer_gm0, meijer_gm10};
pub use pcf::pcf_u;

/// Numerical value plus an a-posteriori accuracy estimate.
///
/// `abs_error_estimate` combines the difference between the last two
/// quadrature refinement levels (or the first neglected series term) with
/// a rounding floor proportional to the largest intermediate magnitude,
/// so catastrophic cancellation is visible to the caller rather than
/// silent. `terms_or_nodes_used` counts series terms or quadrature nodes.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub terms_or_nodes_used: usize,
}

/// Ordered list of the non-negative integer shape offsets ν_1, …, ν_M of
/// the rectangular Ginibre factors. An empty list means M = 0 (no
/// product factors: plain GUE with source).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuVector {
    values: Vec<u32>,
}

impl NuVector {
    pub fn new(values: Vec<u32>) -> Self {
        NuVector { values }
    }

    /// Number of Ginibre factors M.
    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

impl std::fmt::Display for NuVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let strs: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", strs.join(","))
    }
}
