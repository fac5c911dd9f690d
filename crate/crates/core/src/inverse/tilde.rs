//! The congruent matrix `K̃ = WᵀKW`, its Schur object `S̃` and its block
//! factorization at `α = 1`.

use nalgebra::DMatrix;

use super::{require, InverseBlocks};
use crate::dense::{self, block_matrix, fro, symmetrize};
use crate::error::{Error, Precondition, Result};
use crate::invertibility::{ConditionId, ConditionReport};
use crate::subspaces;
use crate::system::{alpha_upper_bound, congruence_transform, BlockSystem};
use crate::tol::ToleranceConfig;

/// `A, D ⪰ 0`, N1–N3 and `null(A) = m`.
fn require_maximal_deficiency(report: &ConditionReport, m: usize) -> Result<()> {
    require(
        report.definiteness_a.is_psd(),
        Precondition::APositiveSemidefinite,
    )?;
    require(
        report.definiteness_d.is_psd(),
        Precondition::DPositiveSemidefinite,
    )?;
    require(report.null_a == m, Precondition::NullityAEqualsM)?;
    require(report.holds(ConditionId::N1), Precondition::KerAKerB)?;
    require(report.holds(ConditionId::N2), Precondition::KerBtKerDKerC)?;
    require(report.holds(ConditionId::N3), Precondition::KerCtKerE)
}

/// ```text
/// S̃ = [ −(1/α)M⁻¹   M⁻¹Cᵀ         ]      M = 2I − αD
///      [ CM⁻¹        E − αCM⁻¹Cᵀ   ]
/// ```
///
/// Under the hypotheses checked here, `S̃` is nonsingular iff `K` is.
/// `α` must lie strictly inside `(0, 2/λ_max(D))`.
pub fn schur_tilde_s(sys: &BlockSystem, alpha: f64, tol: &ToleranceConfig) -> Result<DMatrix<f64>> {
    let upper = alpha_upper_bound(sys.d());
    if !(alpha.is_finite() && alpha > 0.0 && upper.map_or(true, |u| alpha < u)) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            upper: upper.unwrap_or(f64::INFINITY),
        });
    }
    let (_, m, p) = sys.dims();
    let report = crate::invertibility::necessary_conditions(sys, tol);
    require_maximal_deficiency(&report, m)?;
    let mm = DMatrix::identity(m, m) * 2.0 - sys.d() * alpha;
    let chol = symmetrize(&mm)
        .cholesky()
        .ok_or(Error::Singular("2I − αD"))?;
    let m_inv = symmetrize(&chol.inverse());
    let c = sys.c();
    let m_inv_ct = &m_inv * c.transpose();
    let s11 = &m_inv * (-1.0 / alpha);
    let s21 = m_inv_ct.transpose();
    let s22 = symmetrize(&(sys.e() - c * &m_inv_ct * alpha));
    Ok(block_matrix(
        &[m, p],
        &[&[Some(&s11), Some(&m_inv_ct)], &[Some(&s21), Some(&s22)]],
    ))
}

/// `K̃ = L·mid·Lᵀ` at `α = 1`:
///
/// ```text
///     [ I        0   0 ]
/// L = [ B₁Ã₁⁻¹   I   0 ]     mid = diag(Ã₁, −(2I − D)⁻¹, E)
///     [ CBÃ₁⁻¹  −C   I ]
/// ```
///
/// with `Ã₁ = A + Bᵀ(2I − D)B` and `B₁ = B − DB`.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeFactorization {
    pub a_tilde: DMatrix<f64>,
    pub b1: DMatrix<f64>,
    pub lower: DMatrix<f64>,
    pub middle: DMatrix<f64>,
    sizes: [usize; 3],
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl TildeFactorization {
    pub fn sizes(&self) -> [usize; 3] {
        self.sizes
    }

    /// `L·mid·Lᵀ`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        &self.lower * &self.middle * self.lower.transpose()
    }

    /// `‖L·mid·Lᵀ − K̃‖_F / ‖K̃‖_F`.
    pub fn residual(&self, k_tilde: &DMatrix<f64>) -> f64 {
        fro(&(self.reconstruct() - k_tilde)) / fro(k_tilde).max(f64::MIN_POSITIVE)
    }

    /// `L⁻¹` in closed form:
    ///
    /// ```text
    /// [ I                 0   0 ]
    /// [ −B₁Ã₁⁻¹           I   0 ]
    /// [ −C(B + B₁)Ã₁⁻¹    C   I ]
    /// ```
    pub fn lower_inverse(&self) -> Result<DMatrix<f64>> {
        let [n, m, p] = self.sizes;
        let chol = symmetrize(&self.a_tilde)
            .cholesky()
            .ok_or(Error::Singular("Ã₁"))?;
        // X·Ã₁⁻¹ = (Ã₁⁻¹·Xᵀ)ᵀ for symmetric Ã₁.
        let right_solve = |x: &DMatrix<f64>| chol.solve(&x.transpose()).transpose();
        let l21 = -right_solve(&self.b1);
        let l31 = -right_solve(&(&self.c * (&self.b + &self.b1)));
        Ok(block_matrix(
            &[n, m, p],
            &[
                &[Some(&DMatrix::identity(n, n)), None, None],
                &[Some(&l21), Some(&DMatrix::identity(m, m)), None],
                &[Some(&l31), Some(&self.c), Some(&DMatrix::identity(p, p))],
            ],
        ))
    }
}

/// Factors `K̃` at `α = 1`.
///
/// Requires `λ_max(D) < 2`, `A, D ⪰ 0`, `null(A) = m` and N1–N3. `E` may be
/// singular; the factorization still exists and `mid` inherits its rank
/// deficiency.
pub fn factorize_tilde(sys: &BlockSystem, tol: &ToleranceConfig) -> Result<TildeFactorization> {
    let (n, m, p) = sys.dims();
    let report = crate::invertibility::necessary_conditions(sys, tol);
    require(report.lambda_max_d < 2.0, Precondition::LambdaMaxDBelowTwo)?;
    require_maximal_deficiency(&report, m)?;

    let (b, c, d) = (sys.b(), sys.c(), sys.d());
    let two_minus_d = DMatrix::identity(m, m) * 2.0 - d;
    let a_tilde = symmetrize(&(sys.a() + b.transpose() * &two_minus_d * b));
    let b1 = b - d * b;
    let chol = a_tilde.clone().cholesky().ok_or(Error::Singular("Ã₁"))?;
    let m_chol = symmetrize(&two_minus_d)
        .cholesky()
        .ok_or(Error::Singular("2I − D"))?;
    let right_solve = |x: &DMatrix<f64>| chol.solve(&x.transpose()).transpose();
    let l21 = right_solve(&b1);
    let l31 = right_solve(&(c * b));
    let neg_c = -c;
    let lower = block_matrix(
        &[n, m, p],
        &[
            &[Some(&DMatrix::identity(n, n)), None, None],
            &[Some(&l21), Some(&DMatrix::identity(m, m)), None],
            &[Some(&l31), Some(&neg_c), Some(&DMatrix::identity(p, p))],
        ],
    );
    let neg_m_inv = -symmetrize(&m_chol.inverse());
    let middle = block_matrix(
        &[n, m, p],
        &[
            &[Some(&a_tilde), None, None],
            &[None, Some(&neg_m_inv), None],
            &[None, None, Some(sys.e())],
        ],
    );
    Ok(TildeFactorization {
        a_tilde,
        b1,
        lower,
        middle,
        sizes: [n, m, p],
        b: b.clone(),
        c: c.clone(),
    })
}

/// `K⁻¹ = W·K̃⁻¹·Wᵀ` with `K̃⁻¹ = L⁻ᵀ·diag(Ã₁⁻¹, −(2I − D), E⁻¹)·L⁻¹` and
/// `W` the congruence at `α = 1`. Requires [`factorize_tilde`]'s hypotheses
/// and nonsingular `E`.
pub fn inverse_via_factorization(
    sys: &BlockSystem,
    tol: &ToleranceConfig,
) -> Result<InverseBlocks> {
    let f = factorize_tilde(sys, tol)?;
    require(
        subspaces::is_nonsingular(sys.e(), tol),
        Precondition::ENonsingular,
    )?;
    let (n, m, p) = sys.dims();
    let a_inv = symmetrize(
        &symmetrize(&f.a_tilde)
            .cholesky()
            .ok_or(Error::Singular("Ã₁"))?
            .inverse(),
    );
    let e_inv = symmetrize(&sys.e().clone().try_inverse().ok_or(Error::Singular("E"))?);
    let neg_m = sys.d() - DMatrix::identity(m, m) * 2.0;
    let mid_inv = block_matrix(
        &[n, m, p],
        &[
            &[Some(&a_inv), None, None],
            &[None, Some(&neg_m), None],
            &[None, None, Some(&e_inv)],
        ],
    );
    let l_inv = f.lower_inverse()?;
    let kt_inv = l_inv.transpose() * mid_inv * &l_inv;
    let w = congruence_transform(sys, 1.0)?.w;
    let x = dense::symmetrize(&(&w * kt_inv * w.transpose()));
    InverseBlocks::from_dense(&x, n, m, p)
}
