use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dense::fro;
use crate::subspaces::{self, Definiteness, SubspaceBasis};
use crate::system::{assemble, BlockSystem};
use crate::tol::ToleranceConfig;

/// Subspace conditions on the blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    /// `ker(A) ∩ ker(B) = {0}`
    N1,
    /// `ker(Bᵀ) ∩ ker(D) ∩ ker(C) = {0}`
    N2,
    /// `ker(Cᵀ) ∩ ker(E) = {0}`
    N3,
    /// `ran(B) ∩ ran(Cᵀ) = {0}`
    R,
    /// `ker(A) ⊕ ker(B) = ℝⁿ`
    DS1,
    /// `ker(E) ⊕ ker(Cᵀ) = ℝᵖ`
    DS2,
}

impl ConditionId {
    pub const ALL: [ConditionId; 6] = [
        ConditionId::N1,
        ConditionId::N2,
        ConditionId::N3,
        ConditionId::R,
        ConditionId::DS1,
        ConditionId::DS2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ConditionId::N1 => "N1",
            ConditionId::N2 => "N2",
            ConditionId::N3 => "N3",
            ConditionId::R => "R",
            ConditionId::DS1 => "DS1",
            ConditionId::DS2 => "DS2",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            ConditionId::N1 => "ker(A) ∩ ker(B) = {0}",
            ConditionId::N2 => "ker(Bᵀ) ∩ ker(D) ∩ ker(C) = {0}",
            ConditionId::N3 => "ker(Cᵀ) ∩ ker(E) = {0}",
            ConditionId::R => "ran(B) ∩ ran(Cᵀ) = {0}",
            ConditionId::DS1 => "ker(A) ⊕ ker(B) = ℝⁿ",
            ConditionId::DS2 => "ker(E) ⊕ ker(Cᵀ) = ℝᵖ",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub id: ConditionId,
    pub status: Status,
    /// Unit vector in the offending intersection when the condition fails
    /// because two subspaces meet.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
}

/// Every subspace condition and block property the rules consult.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub dims: [usize; 3],
    pub conditions: Vec<Condition>,
    pub definiteness_a: Definiteness,
    pub definiteness_d: Definiteness,
    pub definiteness_e: Definiteness,
    pub rank_b: usize,
    pub rank_c: usize,
    pub null_a: usize,
    pub null_d: usize,
    pub null_e: usize,
    pub lambda_max_d: f64,
    pub zero_a: bool,
    pub zero_d: bool,
    pub zero_e: bool,
}

impl ConditionReport {
    pub fn condition(&self, id: ConditionId) -> &Condition {
        self.conditions
            .iter()
            .find(|c| c.id == id)
            .expect("report lists every condition")
    }

    pub fn holds(&self, id: ConditionId) -> bool {
        self.condition(id).status == Status::Holds
    }
}

/// The report together with the subspaces the rules reuse.
pub(crate) struct Analysis<'a> {
    pub sys: &'a BlockSystem,
    pub tol: ToleranceConfig,
    pub k: DMatrix<f64>,
    pub report: ConditionReport,
    pub ker_a: SubspaceBasis,
    pub ker_b: SubspaceBasis,
    pub ker_e: SubspaceBasis,
    pub ker_ct: SubspaceBasis,
    pub n1: SubspaceBasis,
    pub n2: SubspaceBasis,
    pub n3: SubspaceBasis,
    pub range_witness: Option<DVector<f64>>,
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Holds
    } else {
        Status::Fails
    }
}

fn witness_of(basis: &SubspaceBasis) -> Option<Vec<f64>> {
    basis.first().map(|v| v.iter().copied().collect())
}

impl<'a> Analysis<'a> {
    pub fn new(sys: &'a BlockSystem, tol: &ToleranceConfig) -> Self {
        let tol = *tol;
        let (n, m, p) = sys.dims();
        let k = assemble(sys).into_inner();
        let k_norm = fro(&k);
        let is_zero = |blk: &DMatrix<f64>| fro(blk) <= tol.rank_rtol * k_norm;

        let bt = sys.b().transpose();
        let ct = sys.c().transpose();
        let ker_a = subspaces::kernel_basis(sys.a(), &tol);
        let ker_b = subspaces::kernel_basis(sys.b(), &tol);
        let ker_e = subspaces::kernel_basis(sys.e(), &tol);
        let ker_ct = subspaces::kernel_basis(&ct, &tol);

        let n1 = subspaces::intersection_kernels(&[sys.a(), sys.b()], &tol)
            .expect("A and B share n columns");
        let n2 = subspaces::intersection_kernels(&[&bt, sys.d(), sys.c()], &tol)
            .expect("Bᵀ, D and C share m columns");
        let n3 = subspaces::intersection_kernels(&[&ct, sys.e()], &tol)
            .expect("Cᵀ and E share p columns");
        let range = subspaces::range_intersection_trivial(sys.b(), &ct, &tol)
            .expect("B and Cᵀ share m rows");
        let ds1 = subspaces::is_direct_sum(&ker_a, &ker_b, &tol).expect("both in ℝⁿ");
        let ds2 = subspaces::is_direct_sum(&ker_e, &ker_ct, &tol).expect("both in ℝᵖ");

        let conditions = alloc::vec![
            Condition {
                id: ConditionId::N1,
                status: status(n1.is_trivial()),
                witness: witness_of(&n1),
            },
            Condition {
                id: ConditionId::N2,
                status: status(n2.is_trivial()),
                witness: witness_of(&n2),
            },
            Condition {
                id: ConditionId::N3,
                status: status(n3.is_trivial()),
                witness: witness_of(&n3),
            },
            Condition {
                id: ConditionId::R,
                status: status(range.trivial),
                witness: range.witness.as_ref().map(|w| w.iter().copied().collect()),
            },
            Condition {
                id: ConditionId::DS1,
                status: status(ds1),
                witness: if ds1 { None } else { witness_of(&n1) },
            },
            Condition {
                id: ConditionId::DS2,
                status: status(ds2),
                witness: if ds2 { None } else { witness_of(&n3) },
            },
        ];

        let report = ConditionReport {
            dims: [n, m, p],
            conditions,
            definiteness_a: subspaces::classify_definiteness(sys.a(), &tol),
            definiteness_d: subspaces::classify_definiteness(sys.d(), &tol),
            definiteness_e: subspaces::classify_definiteness(sys.e(), &tol),
            rank_b: subspaces::rank(sys.b(), &tol),
            rank_c: subspaces::rank(sys.c(), &tol),
            null_a: ker_a.dim(),
            null_d: subspaces::nullity(sys.d(), &tol),
            null_e: ker_e.dim(),
            lambda_max_d: subspaces::lambda_max(sys.d()),
            zero_a: is_zero(sys.a()),
            zero_d: is_zero(sys.d()),
            zero_e: is_zero(sys.e()),
        };

        Analysis {
            sys,
            tol,
            k,
            report,
            ker_a,
            ker_b,
            ker_e,
            ker_ct,
            n1,
            n2,
            n3,
            range_witness: range.witness,
        }
    }

    pub fn holds(&self, id: ConditionId) -> bool {
        self.report.holds(id)
    }

    pub fn all_hold(&self, ids: &[ConditionId]) -> bool {
        ids.iter().all(|&id| self.holds(id))
    }
}

/// Evaluates every subspace condition and block property of `sys`.
///
/// N1–N3 are necessary for invertibility; a failing one carries a unit
/// witness in the offending intersection.
pub fn necessary_conditions(sys: &BlockSystem, tol: &ToleranceConfig) -> ConditionReport {
    Analysis::new(sys, tol).report
}
