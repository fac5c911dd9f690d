//! Closed-form inverses for `A ⪰ 0` with `null(A) = m` and
//! `ker(A) ⊕ ker(B) = ℝⁿ`.

use nalgebra::DMatrix;

use super::projector::{maximal_deficiency_projector, ReducedHessianProjector};
use super::{check_finite, require, InverseBlocks};
use crate::dense::{self, block_matrix, symmetrize};
use crate::error::{Error, Precondition, Result};
use crate::subspaces;
use crate::system::BlockSystem;
use crate::tol::ToleranceConfig;

/// Inverse of the leading two-by-two block `[[A, Bᵀ], [B, −D]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoBlockInverse {
    /// `RᵀDR + V`.
    pub z11: DMatrix<f64>,
    /// `Rᵀ = (I − VA)Bᵀ(BBᵀ)⁻¹`.
    pub z12: DMatrix<f64>,
    /// Zero.
    pub z22: DMatrix<f64>,
}

impl TwoBlockInverse {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let (n, m) = (self.z11.nrows(), self.z22.nrows());
        let z21 = self.z12.transpose();
        block_matrix(
            &[n, m],
            &[
                &[Some(&self.z11), Some(&self.z12)],
                &[Some(&z21), Some(&self.z22)],
            ],
        )
    }

    /// `‖K̂·X − I‖₂` with `K̂ = [[A, Bᵀ], [B, −D]]`.
    pub fn residual(&self, a: &DMatrix<f64>, b: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
        let bt = b.transpose();
        let neg_d = -d;
        let (n, m) = (a.nrows(), b.nrows());
        let k = block_matrix(&[n, m], &[&[Some(a), Some(&bt)], &[Some(b), Some(&neg_d)]]);
        dense::spectral_norm(&(k * self.to_dense() - DMatrix::identity(n + m, n + m)))
    }
}

/// `R = (BBᵀ)⁻¹B(I − AV)`, applying `(BBᵀ)⁻¹` through a Cholesky solve.
fn r_factor(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    proj: &ReducedHessianProjector,
) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let gram = symmetrize(&(b * b.transpose()));
    let chol = gram.cholesky().ok_or(Error::Singular("BBᵀ"))?;
    let i_minus_av = DMatrix::identity(n, n) - a * proj.v();
    Ok(chol.solve(&(b * i_minus_av)))
}

/// `[[RᵀDR + V, Rᵀ], [R, 0]]`; the `(2,2)` block is exactly zero.
pub fn two_block_inverse(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    d: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<TwoBlockInverse> {
    let m = b.nrows();
    if d.shape() != (m, m) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "D must be {m}×{m}, found {}×{}",
            d.nrows(),
            d.ncols()
        )));
    }
    check_finite("D", d)?;
    let proj = maximal_deficiency_projector(a, b, tol)?;
    let r = r_factor(a, b, &proj)?;
    let rt = r.transpose();
    Ok(TwoBlockInverse {
        z11: symmetrize(&(&rt * d * &r + proj.v())),
        z12: rt,
        z22: DMatrix::zeros(m, m),
    })
}

/// ```text
///        [ T  Rᵀ  Sᵀ  ]
/// K⁻¹ = [ R  0   0   ]      T = Rᵀ(D + CᵀE⁻¹C)R + V,  S = −E⁻¹CR
///        [ S  0   E⁻¹ ]
/// ```
///
/// `D` is unrestricted; `E` must be nonsingular.
pub fn three_block_inverse(sys: &BlockSystem, tol: &ToleranceConfig) -> Result<InverseBlocks> {
    let (_, m, p) = sys.dims();
    let proj = maximal_deficiency_projector(sys.a(), sys.b(), tol)?;
    require(
        subspaces::is_nonsingular(sys.e(), tol),
        Precondition::ENonsingular,
    )?;
    let e_inv = symmetrize(&sys.e().clone().try_inverse().ok_or(Error::Singular("E"))?);
    let r = r_factor(sys.a(), sys.b(), &proj)?;
    let rt = r.transpose();
    let c = sys.c();
    let middle = sys.d() + c.transpose() * &e_inv * c;
    let t = symmetrize(&(&rt * middle * &r + proj.v()));
    let s = -(&e_inv * c * &r);
    Ok(InverseBlocks {
        z11: t,
        z12: rt,
        z13: s.transpose(),
        z22: DMatrix::zeros(m, m),
        z23: DMatrix::zeros(m, p),
        z33: e_inv,
    })
}
