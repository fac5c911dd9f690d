//! One function per invertibility rule. Each returns `None` when its
//! hypotheses do not hold, otherwise a definitive decision.

use nalgebra::{ComplexField, DMatrix, DVector};

use super::report::{Analysis, ConditionId::*};
use super::{Rule, Verdict};
use crate::dense::{self, concat, lstsq, solve_lu, symmetrize};
use crate::subspaces::{self, SubspaceBasis};
use crate::system::{self, permute_similar, rescale_middle};

pub(crate) struct Decision {
    pub verdict: Verdict,
    pub rule: Rule,
    pub witness: Option<DVector<f64>>,
}

fn invertible(rule: Rule) -> Option<Decision> {
    Some(Decision {
        verdict: Verdict::Invertible,
        rule,
        witness: None,
    })
}

/// Unit witness, kept only if `‖K·u‖ ≤ residual_rtol·‖K‖`.
fn singular(an: &Analysis, rule: Rule, u: DVector<f64>) -> Option<Decision> {
    let u = dense::normalized(&u);
    if u.norm() == 0.0 {
        return None;
    }
    let resid = (&an.k * &u).norm();
    if resid > an.tol.residual_rtol * dense::fro(&an.k) {
        return None;
    }
    Some(Decision {
        verdict: Verdict::Singular,
        rule,
        witness: Some(u),
    })
}

fn embed(
    an: &Analysis,
    x: Option<DVector<f64>>,
    y: Option<DVector<f64>>,
    z: Option<DVector<f64>>,
) -> DVector<f64> {
    let (n, m, p) = an.sys.dims();
    let x = x.unwrap_or_else(|| DVector::zeros(n));
    let y = y.unwrap_or_else(|| DVector::zeros(m));
    let z = z.unwrap_or_else(|| DVector::zeros(p));
    concat(&[&x, &y, &z])
}

/// Vector of `span(basis)` mapped onto `target` by `op`.
fn preimage_in(basis: &SubspaceBasis, op: &DMatrix<f64>, target: &DVector<f64>) -> DVector<f64> {
    let coeffs = lstsq(&(op * basis.basis()), target);
    basis.basis() * coeffs
}

pub(crate) fn necessary(an: &Analysis) -> Option<Decision> {
    if let Some(x) = an.n1.first() {
        return singular(an, Rule::NecessaryKerAKerB, embed(an, Some(x), None, None));
    }
    if let Some(y) = an.n2.first() {
        return singular(
            an,
            Rule::NecessaryKerBtKerDKerC,
            embed(an, None, Some(y), None),
        );
    }
    if let Some(z) = an.n3.first() {
        return singular(an, Rule::NecessaryKerCtKerE, embed(an, None, None, Some(z)));
    }
    None
}

/// `A` nonsingular, `S₁ = D + BA⁻¹Bᵀ` and `S₂ = E + CS₁⁻¹Cᵀ` nonsingular.
pub(crate) fn schur(an: &Analysis) -> Option<Decision> {
    let sys = an.sys;
    if an.report.null_a != 0 {
        return None;
    }
    let a_inv_bt = solve_lu(sys.a(), &sys.b().transpose())?;
    let s1 = symmetrize(&(sys.d() + sys.b() * a_inv_bt));
    if !subspaces::is_nonsingular(&s1, &an.tol) {
        return None;
    }
    let s1_inv_ct = solve_lu(&s1, &sys.c().transpose())?;
    let s2 = symmetrize(&(sys.e() + sys.c() * s1_inv_ct));
    if !subspaces::is_nonsingular(&s2, &an.tol) {
        return None;
    }
    invertible(Rule::Schur)
}

fn e_iff_hypotheses_except_lambda(an: &Analysis) -> bool {
    let r = &an.report;
    r.definiteness_a.is_psd()
        && r.definiteness_d.is_psd()
        && an.all_hold(&[N1, N2, N3])
        && r.null_a == an.sys.m()
}

/// Under `A, D ⪰ 0`, N1–N3, `null(A) = m` and `λ_max(D) < 2`:
/// `K` is nonsingular iff `E` is.
pub(crate) fn e_iff(an: &Analysis) -> Option<Decision> {
    if !e_iff_hypotheses_except_lambda(an) || an.report.lambda_max_d >= 2.0 {
        return None;
    }
    let Some(z) = an.ker_e.first() else {
        return invertible(Rule::EIff);
    };
    // K̃ = L·diag(Ã₁, −(2I−D)⁻¹, E)·Lᵀ, so L⁻ᵀ[0; 0; z] spans part of ker(K̃)
    // and W maps it into ker(K).
    let sys = an.sys;
    let m = sys.m();
    let b = sys.b();
    let two_minus_d = DMatrix::identity(m, m) * 2.0 - sys.d();
    let a1 = sys.a() + b.transpose() * &two_minus_d * b;
    let b_plus_b1 = b * 2.0 - sys.d() * b;
    let ctz = sys.c().transpose() * &z;
    let rhs = b_plus_b1.transpose() * &ctz;
    let x = -symmetrize(&a1).cholesky()?.solve(&rhs);
    let y = b * &x + &ctz;
    singular(an, Rule::EIff, concat(&[&x, &y, &z]))
}

/// [`e_iff`], first rescaling the middle block when `λ_max(D) ≥ 2` is the
/// only hypothesis that fails.
pub(crate) fn e_iff_with_rescale(an: &Analysis) -> Option<Decision> {
    if let Some(d) = e_iff(an) {
        return Some(d);
    }
    let lmax = an.report.lambda_max_d;
    if lmax < 2.0 || !e_iff_hypotheses_except_lambda(an) {
        return None;
    }
    let beta = 1.0 / ComplexField::sqrt(lmax);
    let scaled = rescale_middle(an.sys, beta).ok()?;
    let scaled_an = Analysis::new(&scaled, &an.tol);
    let d = e_iff(&scaled_an)?;
    match d.verdict {
        Verdict::Singular => {
            let (x, y, z) = scaled.split(d.witness.as_ref()?);
            singular(an, Rule::EIff, concat(&[&x, &(y * beta), &z]))
        }
        _ => invertible(Rule::EIff),
    }
}

/// The three iff corollaries for definite diagonal blocks.
pub(crate) fn corollaries(an: &Analysis) -> Option<Decision> {
    let r = &an.report;
    let sys = an.sys;
    let (n, m, p) = sys.dims();
    if r.definiteness_d.is_pd() && r.definiteness_e.is_pd() && r.zero_a && m >= n {
        return match an.ker_b.first() {
            None => invertible(Rule::CorollaryRankB),
            Some(x) => singular(an, Rule::CorollaryRankB, embed(an, Some(x), None, None)),
        };
    }
    if r.definiteness_a.is_pd() && r.definiteness_d.is_pd() && r.zero_e && m >= p {
        return match an.ker_ct.first() {
            None => invertible(Rule::CorollaryRankC),
            Some(z) => singular(an, Rule::CorollaryRankC, embed(an, None, None, Some(z))),
        };
    }
    if r.definiteness_a.is_pd() && r.definiteness_e.is_pd() && r.zero_d {
        let bt = sys.b().transpose();
        let common = subspaces::intersection_kernels(&[&bt, sys.c()], &an.tol).ok()?;
        return match common.first() {
            None => invertible(Rule::CorollaryKernel),
            Some(y) => singular(an, Rule::CorollaryKernel, embed(an, None, Some(y), None)),
        };
    }
    None
}

/// Under N3, `n ≥ m`, `rank(B) = m`, `ker(A) ⊕ ker(B) = ℝⁿ` and `A ⪰ 0`:
/// R implies invertibility, and R is necessary when `E = 0`.
pub(crate) fn rank_b(an: &Analysis, rule: Rule) -> Option<Decision> {
    let r = &an.report;
    let (n, m, _) = an.sys.dims();
    let applies =
        an.holds(N3) && n >= m && r.rank_b == m && an.holds(DS1) && r.definiteness_a.is_psd();
    if !applies {
        return None;
    }
    if an.holds(R) {
        return invertible(rule);
    }
    if !r.zero_e {
        return None;
    }
    let w = an.range_witness.as_ref()?;
    let x1 = preimage_in(&an.ker_a, an.sys.b(), w);
    let z = lstsq(&an.sys.c().transpose(), w);
    singular(an, rule, embed(an, Some(-x1), None, Some(z)))
}

/// [`rank_b`] applied to the block-reversed similar system.
pub(crate) fn rank_c(an: &Analysis) -> Option<Decision> {
    let permuted = permute_similar(an.sys);
    let pan = Analysis::new(&permuted, &an.tol);
    let d = rank_b(&pan, Rule::RankC)?;
    match d.verdict {
        Verdict::Singular => {
            let u = system::unpermute_vector(&permuted, d.witness.as_ref()?);
            singular(an, Rule::RankC, u)
        }
        _ => invertible(Rule::RankC),
    }
}

/// Under `A, D, E ⪰ 0` and N1–N3: R implies invertibility, and R is
/// necessary when both direct sums DS1, DS2 hold.
pub(crate) fn direct_sum(an: &Analysis) -> Option<Decision> {
    let r = &an.report;
    let applies = r.definiteness_a.is_psd()
        && r.definiteness_d.is_psd()
        && r.definiteness_e.is_psd()
        && an.all_hold(&[N1, N2, N3]);
    if !applies {
        return None;
    }
    if an.holds(R) {
        return invertible(Rule::DirectSum);
    }
    if !an.all_hold(&[DS1, DS2]) {
        return None;
    }
    // w = Bx₁ = Cᵀz₁ with x₁ ∈ ker(A), z₁ ∈ ker(E); then K[x₁; 0; −z₁] = 0.
    let w = an.range_witness.as_ref()?;
    let x1 = preimage_in(&an.ker_a, an.sys.b(), w);
    let z1 = preimage_in(&an.ker_e, &an.sys.c().transpose(), w);
    singular(an, Rule::DirectSum, embed(an, Some(x1), None, Some(-z1)))
}

/// Sufficient conditions under `A, D, E ⪰ 0` and N2.
pub(crate) fn psd_ladder(an: &Analysis) -> Option<Decision> {
    let r = &an.report;
    let applies = r.definiteness_a.is_psd()
        && r.definiteness_d.is_psd()
        && r.definiteness_e.is_psd()
        && an.holds(N2);
    if !applies {
        return None;
    }
    if r.definiteness_a.is_pd() && an.holds(N3) {
        return invertible(Rule::PsdLadderCase1);
    }
    if r.definiteness_e.is_pd() && an.holds(N1) {
        return invertible(Rule::PsdLadderCase2);
    }
    if an.all_hold(&[R, N3, N1]) {
        return invertible(Rule::PsdLadderCase3);
    }
    None
}
