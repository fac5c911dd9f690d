//! Rank-revealing subspace computations.
//!
//! Every decision goes through the singular value decomposition and the
//! single rank policy of [`ToleranceConfig::rank_threshold`]. Kernel and
//! range bases are orthonormal. The trivial subspace is an explicit `d×0`
//! basis.

use alloc::format;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dense::{self, fro, hstack, vstack};
use crate::error::{Error, Result};
use crate::tol::ToleranceConfig;

/// A subspace of ℝᵈ stored as a `d×k` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    basis: DMatrix<f64>,
}

impl SubspaceBasis {
    /// The subspace `{0}` of ℝᵈ.
    pub fn trivial(ambient_dim: usize) -> Self {
        SubspaceBasis {
            basis: DMatrix::zeros(ambient_dim, 0),
        }
    }

    /// All of ℝᵈ, spanned by the canonical basis.
    pub fn full(ambient_dim: usize) -> Self {
        SubspaceBasis {
            basis: DMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    /// Wraps a matrix whose columns are already orthonormal.
    ///
    /// Returns `None` when `basisᵀ·basis` is not the identity within
    /// `sym_rtol`.
    pub fn from_orthonormal(basis: DMatrix<f64>, tol: &ToleranceConfig) -> Option<Self> {
        let k = basis.ncols();
        let gram = basis.transpose() * &basis;
        let err = fro(&(gram - DMatrix::identity(k, k)));
        (err <= tol.sym_rtol * (k.max(1) as f64)).then_some(SubspaceBasis { basis })
    }

    /// Orthonormal basis of the column space of `m`.
    pub fn span_of(m: &DMatrix<f64>, tol: &ToleranceConfig) -> Self {
        range_basis(m, tol)
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.basis
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.dim() == 0
    }

    /// First basis vector, if any.
    pub fn first(&self) -> Option<DVector<f64>> {
        (!self.is_trivial()).then(|| self.basis.column(0).into_owned())
    }

    /// Orthogonal projector `Z·Zᵀ` onto the subspace.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

/// Tags for the hypotheses `M ≻ 0`, `M ⪰ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definiteness {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
    NotSymmetric,
}

impl Definiteness {
    /// `M ⪰ 0` (which includes `M ≻ 0`).
    pub fn is_psd(self) -> bool {
        matches!(
            self,
            Definiteness::PositiveDefinite | Definiteness::PositiveSemidefinite
        )
    }

    pub fn is_pd(self) -> bool {
        self == Definiteness::PositiveDefinite
    }
}

struct Decomposition {
    /// Left singular vectors (thin), present when requested.
    u: Option<DMatrix<f64>>,
    /// Full set of right singular vectors as columns, `cols × cols`.
    v: Option<DMatrix<f64>>,
    sigma: DVector<f64>,
    threshold: f64,
}

impl Decomposition {
    fn new(m: &DMatrix<f64>, tol: &ToleranceConfig, want_u: bool, want_v: bool) -> Self {
        let (rows, cols) = m.shape();
        // Zero rows do not change the right singular structure but make the
        // SVD return a full cols×cols set of right singular vectors.
        let work = if want_v && rows < cols {
            let mut padded = DMatrix::zeros(cols, cols);
            padded.view_mut((0, 0), (rows, cols)).copy_from(m);
            padded
        } else {
            m.clone()
        };
        let svd = dense::svd(&work);
        let sigma_max = svd.sigma.iter().copied().fold(0.0, f64::max);
        let threshold = tol.rank_threshold(rows, cols, sigma_max);
        let u = want_u.then(|| {
            let keep = svd.u.ncols().min(rows);
            svd.u.view((0, 0), (rows, keep)).into_owned()
        });
        Decomposition {
            u,
            v: want_v.then_some(svd.v),
            sigma: svd.sigma,
            threshold,
        }
    }

    fn rank(&self) -> usize {
        self.sigma.iter().filter(|&&s| s > self.threshold).count()
    }
}

/// Numerical rank under the global rank policy. The zero matrix has rank 0.
pub fn rank(m: &DMatrix<f64>, tol: &ToleranceConfig) -> usize {
    if m.is_empty() {
        return 0;
    }
    Decomposition::new(m, tol, false, false).rank()
}

/// `true` when `m` is square and has full numerical rank.
pub fn is_nonsingular(m: &DMatrix<f64>, tol: &ToleranceConfig) -> bool {
    m.is_square() && rank(m, tol) == m.nrows()
}

/// Orthonormal basis of `ker(M)`; `dim = cols − rank(M)`.
pub fn kernel_basis(m: &DMatrix<f64>, tol: &ToleranceConfig) -> SubspaceBasis {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return SubspaceBasis::trivial(0);
    }
    if rows == 0 {
        return SubspaceBasis::full(cols);
    }
    let dec = Decomposition::new(m, tol, false, true);
    let v = dec.v.as_ref().expect("right singular vectors requested");
    let mut picked = alloc::vec::Vec::new();
    for j in 0..cols {
        let s = dec.sigma.get(j).copied().unwrap_or(0.0);
        if s <= dec.threshold {
            picked.push(dense::normalized(&v.column(j).into_owned()));
        }
    }
    let basis = if picked.is_empty() {
        DMatrix::zeros(cols, 0)
    } else {
        DMatrix::from_columns(&picked)
    };
    SubspaceBasis { basis }
}

/// Orthonormal basis of `ran(M)`.
pub fn range_basis(m: &DMatrix<f64>, tol: &ToleranceConfig) -> SubspaceBasis {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return SubspaceBasis::trivial(rows);
    }
    let dec = Decomposition::new(m, tol, true, false);
    let u = dec.u.as_ref().expect("left singular vectors requested");
    let r = dec.rank();
    SubspaceBasis {
        basis: u.columns(0, r).into_owned(),
    }
}

/// `dim ker(M)`.
pub fn nullity(m: &DMatrix<f64>, tol: &ToleranceConfig) -> usize {
    m.ncols() - rank(m, tol)
}

/// Basis of `⋂ᵢ ker(Mᵢ)`, computed as the kernel of the stacked matrix.
pub fn intersection_kernels(ms: &[&DMatrix<f64>], tol: &ToleranceConfig) -> Result<SubspaceBasis> {
    let first = ms
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty list of matrices".into()))?;
    let cols = first.ncols();
    if let Some(bad) = ms.iter().find(|m| m.ncols() != cols) {
        return Err(Error::DimensionMismatch(format!(
            "expected {cols} columns, found {}",
            bad.ncols()
        )));
    }
    Ok(kernel_basis(&vstack(ms), tol))
}

/// Outcome of testing `ran(B) ∩ ran(Cᵀ) = {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeIntersection {
    pub trivial: bool,
    /// Unit vector in both ranges when the intersection is not trivial.
    pub witness: Option<DVector<f64>>,
}

/// Decides whether the column spaces of `b` and `ct` (same row count) meet
/// only at zero, i.e. `rank([B | Cᵀ]) = rank(B) + rank(Cᵀ)`.
///
/// The test runs on orthonormal range bases, so it does not depend on the
/// relative scaling of the two inputs.
pub fn range_intersection_trivial(
    b: &DMatrix<f64>,
    ct: &DMatrix<f64>,
    tol: &ToleranceConfig,
) -> Result<RangeIntersection> {
    if b.nrows() != ct.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "row counts differ: {} vs {}",
            b.nrows(),
            ct.nrows()
        )));
    }
    let ub = range_basis(b, tol);
    let uc = range_basis(ct, tol);
    if ub.is_trivial() || uc.is_trivial() {
        return Ok(RangeIntersection {
            trivial: true,
            witness: None,
        });
    }
    let neg_uc = -uc.basis();
    let pair = hstack(&[ub.basis(), &neg_uc]);
    let ker = kernel_basis(&pair, tol);
    match ker.first() {
        None => Ok(RangeIntersection {
            trivial: true,
            witness: None,
        }),
        Some(coeffs) => {
            let a = coeffs.rows(0, ub.dim()).into_owned();
            let w = ub.basis() * a;
            Ok(RangeIntersection {
                trivial: false,
                witness: Some(dense::normalized(&w)),
            })
        }
    }
}

/// `true` iff `span(U) ⊕ span(W) = ℝᵈ`.
pub fn is_direct_sum(u: &SubspaceBasis, w: &SubspaceBasis, tol: &ToleranceConfig) -> Result<bool> {
    let d = u.ambient_dim();
    if w.ambient_dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "ambient dimensions differ: {d} vs {}",
            w.ambient_dim()
        )));
    }
    if u.dim() + w.dim() != d {
        return Ok(false);
    }
    if d == 0 {
        return Ok(true);
    }
    Ok(rank(&hstack(&[u.basis(), w.basis()]), tol) == d)
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    let mut ev: alloc::vec::Vec<f64> = dense::symmetrize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    DVector::from_vec(ev)
}

/// `λ_max` of the symmetric part; 0 for an empty matrix.
pub fn lambda_max(m: &DMatrix<f64>) -> f64 {
    let ev = symmetric_eigenvalues(m);
    if ev.is_empty() {
        0.0
    } else {
        ev[ev.len() - 1]
    }
}

/// Strongest true tag among PD, PSD, indefinite; `NotSymmetric` when
/// `‖M − Mᵀ‖ > sym_rtol·‖M‖` or `M` is not square.
pub fn classify_definiteness(m: &DMatrix<f64>, tol: &ToleranceConfig) -> Definiteness {
    if !m.is_square() {
        return Definiteness::NotSymmetric;
    }
    if m.is_empty() {
        return Definiteness::PositiveDefinite;
    }
    if fro(&(m - m.transpose())) > tol.sym_rtol * fro(m) {
        return Definiteness::NotSymmetric;
    }
    let ev = symmetric_eigenvalues(m);
    let lmin = ev[0];
    let scale = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    if lmin > tol.psd_rtol * scale {
        Definiteness::PositiveDefinite
    } else if lmin >= -tol.psd_rtol * scale {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::Indefinite
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use nalgebra::dmatrix;
    use proptest::prelude::*;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let k = kernel_basis(&DMatrix::identity(3, 3), &tol());
        assert_eq!((k.ambient_dim(), k.dim()), (3, 0));
    }

    #[test]
    fn kernel_of_zero_is_everything() {
        let k = kernel_basis(&DMatrix::zeros(2, 2), &tol());
        assert_eq!(k.dim(), 2);
        let gram = k.basis().transpose() * k.basis();
        assert!((gram - DMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn kernel_of_row_vector() {
        // [1 0] = 1 · e₁ᵀ, so the kernel is span{e₂}.
        let k = kernel_basis(&dmatrix![1.0, 0.0], &tol());
        assert_eq!(k.dim(), 1);
        let z = k.first().unwrap();
        assert!((z[0]).abs() < 1e-15);
        assert!((z[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kernel_of_wide_and_tall() {
        let wide = dmatrix![1.0, 1.0, 0.0; 0.0, 0.0, 1.0];
        let k = kernel_basis(&wide, &tol());
        assert_eq!(k.dim(), 1);
        assert!((&wide * k.basis()).norm() < 1e-14);
        let tall = wide.transpose();
        assert_eq!(kernel_basis(&tall, &tol()).dim(), 0);
    }

    #[test]
    fn kernel_with_no_rows_or_columns() {
        assert_eq!(kernel_basis(&DMatrix::zeros(0, 3), &tol()).dim(), 3);
        assert_eq!(kernel_basis(&DMatrix::zeros(3, 0), &tol()).ambient_dim(), 0);
    }

    #[test]
    fn intersections() {
        let i2 = DMatrix::identity(2, 2);
        let z2 = DMatrix::zeros(2, 2);
        assert_eq!(intersection_kernels(&[&i2, &z2], &tol()).unwrap().dim(), 0);
        let r1 = dmatrix![1.0, 0.0];
        let r2 = dmatrix![0.0, 1.0];
        assert_eq!(intersection_kernels(&[&r1, &r2], &tol()).unwrap().dim(), 0);
        let z3 = DMatrix::zeros(3, 3);
        assert_eq!(intersection_kernels(&[&z3, &z3], &tol()).unwrap().dim(), 3);
        assert!(matches!(
            intersection_kernels(&[&i2, &z3], &tol()),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(intersection_kernels(&[], &tol()).is_err());
    }

    #[test]
    fn range_intersections() {
        let b = dmatrix![1.0; 0.0];
        let ct = dmatrix![0.0; 1.0];
        assert!(range_intersection_trivial(&b, &ct, &tol()).unwrap().trivial);

        let ct = dmatrix![2.0; 0.0];
        let r = range_intersection_trivial(&b, &ct, &tol()).unwrap();
        assert!(!r.trivial);
        let w = r.witness.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14 && w[1].abs() < 1e-14);

        // rank(B) = 2, rank(Cᵀ) = 1, rank([B | Cᵀ]) = 2 < 3.
        let b = DMatrix::identity(2, 2);
        let ct = dmatrix![1.0; 1.0];
        assert!(!range_intersection_trivial(&b, &ct, &tol()).unwrap().trivial);

        assert!(range_intersection_trivial(&b, &DMatrix::zeros(3, 1), &tol()).is_err());
    }

    #[test]
    fn direct_sums() {
        let e1 = SubspaceBasis::span_of(&dmatrix![1.0; 0.0], &tol());
        let e2 = SubspaceBasis::span_of(&dmatrix![0.0; 1.0], &tol());
        let diag = SubspaceBasis::span_of(&dmatrix![1.0; 1.0], &tol());
        assert!(is_direct_sum(&e1, &e2, &tol()).unwrap());
        assert!(!is_direct_sum(&e1, &e1, &tol()).unwrap());
        // [e₁+e₂ | e₂] has rank 2.
        assert!(is_direct_sum(&diag, &e2, &tol()).unwrap());
        assert!(is_direct_sum(&e1, &SubspaceBasis::trivial(3), &tol()).is_err());
    }

    #[test]
    fn definiteness_tags() {
        let t = tol();
        assert_eq!(
            classify_definiteness(&DMatrix::identity(3, 3), &t),
            Definiteness::PositiveDefinite
        );
        assert_eq!(
            classify_definiteness(&dmatrix![1.0, 0.0; 0.0, 0.0], &t),
            Definiteness::PositiveSemidefinite
        );
        assert_eq!(
            classify_definiteness(&dmatrix![1.0, 0.0; 0.0, -1.0], &t),
            Definiteness::Indefinite
        );
        assert_eq!(
            classify_definiteness(&DMatrix::zeros(2, 2), &t),
            Definiteness::PositiveSemidefinite
        );
        assert_eq!(
            classify_definiteness(&dmatrix![1.0, 2.0; 0.0, 1.0], &t),
            Definiteness::NotSymmetric
        );
    }

    #[test]
    fn nullities() {
        let t = tol();
        assert_eq!(nullity(&DMatrix::identity(4, 4), &t), 0);
        assert_eq!(nullity(&DMatrix::zeros(3, 3), &t), 3);
        assert_eq!(
            nullity(
                &DMatrix::from_diagonal(&DVector::from_vec(alloc::vec![1.0, 0.0, 2.0])),
                &t
            ),
            1
        );
    }

    fn matrix_strategy() -> impl Strategy<Value = DMatrix<f64>> {
        (1usize..6, 1usize..6, 0usize..4).prop_flat_map(|(r, c, k)| {
            let k = k.min(r).min(c);
            (
                proptest::collection::vec(-1.0f64..1.0, r * k),
                proptest::collection::vec(-1.0f64..1.0, k * c),
            )
                .prop_map(move |(x, y)| DMatrix::from_vec(r, k, x) * DMatrix::from_vec(k, c, y))
        })
    }

    proptest! {
        #[test]
        fn rank_plus_nullity(m in matrix_strategy()) {
            let t = tol();
            let k = kernel_basis(&m, &t);
            prop_assert_eq!(rank(&m, &t) + k.dim(), m.ncols());
            let resid = &m * k.basis();
            for j in 0..k.dim() {
                prop_assert!(resid.column(j).norm() <= t.residual_rtol * m.norm().max(1e-300));
            }
            let gram = k.basis().transpose() * k.basis();
            prop_assert!((gram - DMatrix::identity(k.dim(), k.dim())).norm() <= t.sym_rtol);
            prop_assert_eq!(intersection_kernels(&[&m], &t).unwrap().dim(), k.dim());
        }

        #[test]
        fn range_intersection_is_symmetric(b in matrix_strategy(), seed in 0usize..4) {
            let t = tol();
            let rows = b.nrows();
            let ct = DMatrix::from_fn(rows, seed + 1, |i, j| ((i * 7 + j * 3 + seed) % 5) as f64 - 2.0);
            let ab = range_intersection_trivial(&b, &ct, &t).unwrap();
            let ba = range_intersection_trivial(&ct, &b, &t).unwrap();
            prop_assert_eq!(ab.trivial, ba.trivial);
            if let Some(w) = ab.witness {
                // w lies in both ranges: least-squares residuals vanish.
                for m in [&b, &ct] {
                    let x = dense::lstsq(m, &w);
                    prop_assert!((m * x - &w).norm() <= t.residual_rtol);
                }
            }
        }

        #[test]
        fn direct_sum_is_symmetric(x in matrix_strategy(), y in matrix_strategy()) {
            let t = tol();
            let d = x.nrows();
            let y = if y.nrows() == d { y } else { DMatrix::from_fn(d, 1, |i, _| i as f64 + 1.0) };
            let u = SubspaceBasis::span_of(&x, &t);
            let w = SubspaceBasis::span_of(&y, &t);
            prop_assert_eq!(is_direct_sum(&u, &w, &t).unwrap(), is_direct_sum(&w, &u, &t).unwrap());
        }
    }
}
