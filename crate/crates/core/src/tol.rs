use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerances behind every numerical decision in the crate.
///
/// A matrix `M` (r×c) has numerical rank equal to the number of singular
/// values above `rank_rtol · max(r, c) · σ_max(M)`. The same policy decides
/// nonsingularity everywhere, so different rules never disagree about it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ToleranceConfig {
    pub rank_rtol: f64,
    pub sym_rtol: f64,
    pub psd_rtol: f64,
    pub residual_rtol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_rtol: 1e-10,
            sym_rtol: 1e-10,
            psd_rtol: 1e-10,
            residual_rtol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rank_rtol", self.rank_rtol),
            ("sym_rtol", self.sym_rtol),
            ("psd_rtol", self.psd_rtol),
            ("residual_rtol", self.residual_rtol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }

    /// Singular values at or below this are treated as zero.
    pub fn rank_threshold(&self, rows: usize, cols: usize, sigma_max: f64) -> f64 {
        self.rank_rtol * rows.max(cols).max(1) as f64 * sigma_max
    }
}
