//! The reduced-Hessian projector and the identities it satisfies.

use nalgebra::DMatrix;

use super::{check_a_b, check_finite, relative_residual, require};
use crate::dense::{solve_lu, symmetrize};
use crate::error::{Error, Precondition, Result};
use crate::subspaces::{self, SubspaceBasis};
use crate::tol::ToleranceConfig;

/// `V = Z(ZᵀAZ)⁻¹Zᵀ` for an orthonormal basis `Z` of `ker(B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHessianProjector {
    v: DMatrix<f64>,
    z: SubspaceBasis,
}

impl ReducedHessianProjector {
    /// Builds `V` from a given orthonormal basis of `ker(B)`. The reduced
    /// Hessian `ZᵀAZ` must be positive definite.
    pub fn from_basis(a: &DMatrix<f64>, z: SubspaceBasis) -> Result<Self> {
        let n = a.nrows();
        if z.ambient_dim() != n {
            return Err(Error::DimensionMismatch(alloc::format!(
                "basis lives in ℝ^{}, A is {n}×{n}",
                z.ambient_dim()
            )));
        }
        if z.is_trivial() {
            return Ok(ReducedHessianProjector {
                v: DMatrix::zeros(n, n),
                z,
            });
        }
        let zb = z.basis();
        let hessian = symmetrize(&(zb.transpose() * a * zb));
        let chol = hessian
            .cholesky()
            .ok_or(Error::Singular("reduced Hessian ZᵀAZ"))?;
        let v = symmetrize(&(zb * chol.solve(&zb.transpose())));
        Ok(ReducedHessianProjector { v, z })
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn z(&self) -> &SubspaceBasis {
        &self.z
    }

    /// `‖ZZᵀAV − ZZᵀ‖ / ‖ZZᵀ‖`.
    pub fn zzt_av_residual(&self, a: &DMatrix<f64>) -> f64 {
        let zzt = self.z.projector();
        relative_residual(&(&zzt * a * &self.v), &zzt)
    }

    /// `‖Bᵀ(BBᵀ)⁻¹B + ZZᵀ − I‖ / ‖I‖`; needs full row rank `B`.
    pub fn complement_residual(&self, b: &DMatrix<f64>, tol: &ToleranceConfig) -> Result<f64> {
        require(
            subspaces::rank(b, tol) == b.nrows(),
            Precondition::FullRowRankB,
        )?;
        let n = b.ncols();
        let gram = symmetrize(&(b * b.transpose()));
        let chol = gram.cholesky().ok_or(Error::Singular("BBᵀ"))?;
        let row_proj = b.transpose() * chol.solve(b);
        let identity = DMatrix::identity(n, n);
        Ok(relative_residual(
            &(row_proj + self.z.projector()),
            &identity,
        ))
    }

    /// `‖VBᵀ‖ / (‖V‖·‖B‖)`, zero by construction.
    pub fn annihilates_bt(&self, b: &DMatrix<f64>) -> f64 {
        let r = (&self.v * b.transpose()).norm();
        let scale = self.v.norm() * b.norm();
        if scale == 0.0 {
            r
        } else {
            r / scale
        }
    }
}

/// Builds `V` with `Z = kernel_basis(B)`.
///
/// Requires `A ⪰ 0` and `ker(A) ∩ ker(B) = {0}`, which make `ZᵀAZ` positive
/// definite.
pub fn reduced_hessian_projector(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<ReducedHessianProjector> {
    check_a_b(a, b)?;
    require(
        subspaces::classify_definiteness(a, tol).is_psd(),
        Precondition::APositiveSemidefinite,
    )?;
    let common = subspaces::intersection_kernels(&[a, b], tol)?;
    require(common.is_trivial(), Precondition::KerAKerB)?;
    ReducedHessianProjector::from_basis(a, subspaces::kernel_basis(b, tol))
}

/// Checks the hypotheses `A ⪰ 0`, `null(A) = m` and `ker(A) ⊕ ker(B) = ℝⁿ`
/// and returns the projector.
pub(crate) fn maximal_deficiency_projector(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<ReducedHessianProjector> {
    check_a_b(a, b)?;
    require(
        subspaces::classify_definiteness(a, tol).is_psd(),
        Precondition::APositiveSemidefinite,
    )?;
    let ker_a = subspaces::kernel_basis(a, tol);
    require(ker_a.dim() == b.nrows(), Precondition::NullityAEqualsM)?;
    let ker_b = subspaces::kernel_basis(b, tol);
    require(
        subspaces::is_direct_sum(&ker_a, &ker_b, tol)?,
        Precondition::DirectSumKerAKerB,
    )?;
    ReducedHessianProjector::from_basis(a, ker_b)
}

/// `‖A − AVA‖ / ‖A‖` (absolute when `A = 0`).
///
/// Requires `A ⪰ 0`, `null(A) = m` and `ker(A) ⊕ ker(B) = ℝⁿ`.
pub fn a_equals_ava_residual(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<f64> {
    let proj = maximal_deficiency_projector(a, b, tol)?;
    Ok(relative_residual(&(a * proj.v() * a), a))
}

/// `‖B(A + BᵀW⁻¹B)⁻¹Bᵀ − W‖ / ‖W‖`.
///
/// Requires `null(A) = m`, `ker(A) ∩ ker(B) = {0}` and `W` nonsingular.
pub fn eg_identity(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    w: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<f64> {
    check_a_b(a, b)?;
    let m = b.nrows();
    if w.shape() != (m, m) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "W must be {m}×{m}, found {}×{}",
            w.nrows(),
            w.ncols()
        )));
    }
    check_finite("W", w)?;
    require(
        subspaces::nullity(a, tol) == m,
        Precondition::NullityAEqualsM,
    )?;
    require(
        subspaces::intersection_kernels(&[a, b], tol)?.is_trivial(),
        Precondition::KerAKerB,
    )?;
    require(
        subspaces::is_nonsingular(w, tol),
        Precondition::WNonsingular,
    )?;
    let w_inv_b = solve_lu(w, b).ok_or(Error::Singular("W"))?;
    let inner = a + b.transpose() * w_inv_b;
    if !subspaces::is_nonsingular(&inner, tol) {
        return Err(Error::Singular("A + BᵀW⁻¹B"));
    }
    let x = solve_lu(&inner, &b.transpose()).ok_or(Error::Singular("A + BᵀW⁻¹B"))?;
    Ok(relative_residual(&(b * x), w))
}
