//! Nullity bounds for the middle block `Z₂₂` of `K⁻¹`:
//!
//! ```text
//! min{max{null(A), null(E)}, m} ≤ null(Z₂₂) ≤ null(A) + null(E)
//! ```
//!
//! and, when `ran(B) ∩ ran(Cᵀ) = {0}`, the sharper lower bound
//! `min{null(A) + null(E), m}`.

use serde::{Deserialize, Serialize};

use super::InverseBlocks;
use crate::dense;
use crate::error::{Error, Precondition, Result};
use crate::subspaces;
use crate::system::{assemble, BlockSystem};
use crate::tol::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullityBounds {
    pub m: usize,
    pub null_a: usize,
    pub null_e: usize,
    pub null_z22: usize,
    /// `min{max{null(A), null(E)}, m}`.
    pub lower: usize,
    /// `null(A) + null(E)`.
    pub upper: usize,
    /// `ran(B) ∩ ran(Cᵀ) = {0}`.
    pub ranges_disjoint: bool,
    /// `min{null(A) + null(E), m}`, reported when the ranges are disjoint.
    pub lower_disjoint: Option<usize>,
    /// `‖Z₂₂‖₂ / ‖K⁻¹‖₂`.
    pub z22_relative_norm: f64,
    /// `null(A) = m` and `null(E) = 0`, where `Z₂₂` must vanish.
    pub z22_vanishes_expected: bool,
}

impl NullityBounds {
    pub fn general_holds(&self) -> bool {
        self.lower <= self.null_z22 && self.null_z22 <= self.upper
    }

    pub fn disjoint_holds(&self) -> Option<bool> {
        self.lower_disjoint.map(|lo| lo <= self.null_z22)
    }

    /// `Z₂₂ = 0` up to `threshold` relative to `‖K⁻¹‖₂`, checked only in the
    /// corner where the bounds force it.
    pub fn vanishing_holds(&self, threshold: f64) -> Option<bool> {
        self.z22_vanishes_expected
            .then_some(self.z22_relative_norm <= threshold)
    }

    pub fn all_hold(&self, tol: &ToleranceConfig) -> bool {
        self.general_holds()
            && self.disjoint_holds().unwrap_or(true)
            && self.vanishing_holds(tol.rank_rtol).unwrap_or(true)
    }
}

/// Evaluates the bounds for a computed inverse of an invertible `sys`.
///
/// `null(Z₂₂)` counts singular values at or below
/// `rank_rtol·m·‖K⁻¹‖₂`, so a block that is zero up to rounding in an
/// otherwise well-scaled inverse has nullity `m`.
pub fn z22_nullity_bounds(
    sys: &BlockSystem,
    inv: &InverseBlocks,
    tol: &ToleranceConfig,
) -> Result<NullityBounds> {
    let (n, m, p) = sys.dims();
    if inv.dims() != (n, m, p) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "inverse blocks are {:?}, system is {:?}",
            inv.dims(),
            (n, m, p)
        )));
    }
    let k = assemble(sys).into_inner();
    if !subspaces::is_nonsingular(&k, tol) {
        return Err(Precondition::SystemNonsingular.into());
    }
    let null_a = subspaces::nullity(sys.a(), tol);
    let null_e = subspaces::nullity(sys.e(), tol);
    let inv_norm = dense::spectral_norm(&inv.to_dense());
    let sigma = dense::svd(&inv.z22).sigma;
    let z22_norm = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = tol.rank_rtol * m as f64 * inv_norm;
    let null_z22 = sigma.iter().filter(|&&s| s <= threshold).count();

    let ranges_disjoint =
        subspaces::range_intersection_trivial(sys.b(), &sys.c().transpose(), tol)?.trivial;
    Ok(NullityBounds {
        m,
        null_a,
        null_e,
        null_z22,
        lower: null_a.max(null_e).min(m),
        upper: null_a + null_e,
        ranges_disjoint,
        lower_disjoint: ranges_disjoint.then(|| (null_a + null_e).min(m)),
        z22_relative_norm: if inv_norm == 0.0 {
            0.0
        } else {
            z22_norm / inv_norm
        },
        z22_vanishes_expected: null_a == m && null_e == 0,
    })
}
