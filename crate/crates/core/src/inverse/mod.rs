//! Structured inverses of `K` and the identities behind them.
//!
//! - [`projector`]: the reduced-Hessian projector `V = Z(ZᵀAZ)⁻¹Zᵀ`, the
//!   identity `A = AVA` and the EG identity `B(A + BᵀW⁻¹B)⁻¹Bᵀ = W`.
//! - [`tilde`]: the Schur object `S̃`, the factorization of `K̃` and the
//!   inverse built from it.
//! - [`explicit`]: closed-form two- and three-block inverses for maximally
//!   rank-deficient `A`.
//! - [`bounds`]: the nullity bounds for the middle block `Z₂₂` of `K⁻¹`.

pub mod bounds;
pub mod explicit;
pub mod projector;
pub mod tilde;

use alloc::format;
use nalgebra::DMatrix;

pub use bounds::{z22_nullity_bounds, NullityBounds};
pub use explicit::{three_block_inverse, two_block_inverse, TwoBlockInverse};
pub use projector::{
    a_equals_ava_residual, eg_identity, reduced_hessian_projector, ReducedHessianProjector,
};
pub use tilde::{factorize_tilde, inverse_via_factorization, schur_tilde_s, TildeFactorization};

use crate::dense::{self, block_matrix, fro, symmetrize};
use crate::error::{Error, Precondition, Result};
use crate::subspaces;
use crate::system::{assemble, BlockSystem};
use crate::tol::ToleranceConfig;

/// Upper block triangle of the symmetric `K⁻¹`:
///
/// ```text
///        [ Z₁₁   Z₁₂   Z₁₃ ]
/// K⁻¹ = [ Z₁₂ᵀ  Z₂₂   Z₂₃ ]
///        [ Z₁₃ᵀ  Z₂₃ᵀ  Z₃₃ ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct InverseBlocks {
    pub z11: DMatrix<f64>,
    pub z12: DMatrix<f64>,
    pub z13: DMatrix<f64>,
    pub z22: DMatrix<f64>,
    pub z23: DMatrix<f64>,
    pub z33: DMatrix<f64>,
}

impl InverseBlocks {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.z11.nrows(), self.z22.nrows(), self.z33.nrows())
    }

    /// Splits a dense `ℓ×ℓ` matrix, reading the upper block triangle.
    pub fn from_dense(x: &DMatrix<f64>, n: usize, m: usize, p: usize) -> Result<Self> {
        let l = n + m + p;
        if x.shape() != (l, l) {
            return Err(Error::DimensionMismatch(format!(
                "expected {l}×{l} inverse, found {}×{}",
                x.nrows(),
                x.ncols()
            )));
        }
        let blk = |r: usize, c: usize, h: usize, w: usize| x.view((r, c), (h, w)).into_owned();
        Ok(InverseBlocks {
            z11: blk(0, 0, n, n),
            z12: blk(0, n, n, m),
            z13: blk(0, n + m, n, p),
            z22: blk(n, n, m, m),
            z23: blk(n, n + m, m, p),
            z33: blk(n + m, n + m, p, p),
        })
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let (n, m, p) = self.dims();
        let (z12t, z13t, z23t) = (
            self.z12.transpose(),
            self.z13.transpose(),
            self.z23.transpose(),
        );
        block_matrix(
            &[n, m, p],
            &[
                &[Some(&self.z11), Some(&self.z12), Some(&self.z13)],
                &[Some(&z12t), Some(&self.z22), Some(&self.z23)],
                &[Some(&z13t), Some(&z23t), Some(&self.z33)],
            ],
        )
    }

    /// `‖K·X − I‖₂`.
    pub fn residual(&self, sys: &BlockSystem) -> f64 {
        let k = assemble(sys).into_inner();
        let l = k.nrows();
        dense::spectral_norm(&(k * self.to_dense() - DMatrix::identity(l, l)))
    }

    /// Largest entrywise difference to another partition of the same shape.
    pub fn max_abs_diff(&self, other: &InverseBlocks) -> f64 {
        (self.to_dense() - other.to_dense()).amax()
    }
}

/// `K⁻¹` by dense LU, for systems the structured constructors do not cover.
pub fn dense_inverse(sys: &BlockSystem, tol: &ToleranceConfig) -> Result<InverseBlocks> {
    let k = assemble(sys).into_inner();
    if !subspaces::is_nonsingular(&k, tol) {
        return Err(Precondition::SystemNonsingular.into());
    }
    let x = k.try_inverse().ok_or(Error::Singular("K"))?;
    let (n, m, p) = sys.dims();
    InverseBlocks::from_dense(&symmetrize(&x), n, m, p)
}

pub(crate) fn require(holds: bool, p: Precondition) -> Result<()> {
    if holds {
        Ok(())
    } else {
        Err(p.into())
    }
}

/// `‖lhs − rhs‖_F / ‖rhs‖_F`, or the absolute difference when `rhs = 0`.
pub(crate) fn relative_residual(lhs: &DMatrix<f64>, rhs: &DMatrix<f64>) -> f64 {
    let diff = fro(&(lhs - rhs));
    let scale = fro(rhs);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

pub(crate) fn check_finite(name: &'static str, m: &DMatrix<f64>) -> Result<()> {
    if dense::is_finite(m) {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

/// Checks that `A` is `n×n` and `B` is `m×n` with finite entries.
pub(crate) fn check_a_b(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() || b.ncols() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "A is {}×{}, B is {}×{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    check_finite("A", a)?;
    check_finite("B", b)
}
