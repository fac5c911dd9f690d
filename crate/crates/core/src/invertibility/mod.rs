//! The decision ladder for invertibility of `K`.
//!
//! [`diagnose`] evaluates the necessary conditions first and then the
//! sufficient and iff rules in a fixed order:
//!
//! 1. necessary conditions N1–N3 (any failure is a singular verdict)
//! 2. [`schur_sufficient`]
//! 3. [`e_iff_rule`] (retried after [`rescale_middle`](crate::system::rescale_middle)
//!    when only `λ_max(D) < 2` fails)
//! 4. [`corollary_rules`]
//! 5. [`rank_b_iff`]
//! 6. [`rank_c_iff`]
//! 7. [`direct_sum_iff`]
//! 8. [`psd_ladder`]
//!
//! The first definitive verdict wins. Singular verdicts always carry a unit
//! witness `u` with `‖K·u‖ ≤ residual_rtol·‖K‖`; a rule whose constructed
//! witness misses that bound reports nothing.

mod report;
mod rules;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

pub use report::{necessary_conditions, Condition, ConditionId, ConditionReport, Status};

use crate::subspaces;
use crate::system::{assemble, BlockSystem};
use crate::tol::ToleranceConfig;
use report::Analysis;
use rules::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invertible,
    Singular,
    Undetermined,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Invertible => "invertible",
            Verdict::Singular => "singular",
            Verdict::Undetermined => "undetermined",
        }
    }
}

/// The result that produced a definitive verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NecessaryKerAKerB,
    NecessaryKerBtKerDKerC,
    NecessaryKerCtKerE,
    Schur,
    EIff,
    CorollaryRankB,
    CorollaryRankC,
    CorollaryKernel,
    RankB,
    RankC,
    DirectSum,
    #[serde(rename = "psd_ladder_case_1")]
    PsdLadderCase1,
    #[serde(rename = "psd_ladder_case_2")]
    PsdLadderCase2,
    #[serde(rename = "psd_ladder_case_3")]
    PsdLadderCase3,
}

impl Rule {
    pub const ALL: [Rule; 14] = [
        Rule::NecessaryKerAKerB,
        Rule::NecessaryKerBtKerDKerC,
        Rule::NecessaryKerCtKerE,
        Rule::Schur,
        Rule::EIff,
        Rule::CorollaryRankB,
        Rule::CorollaryRankC,
        Rule::CorollaryKernel,
        Rule::RankB,
        Rule::RankC,
        Rule::DirectSum,
        Rule::PsdLadderCase1,
        Rule::PsdLadderCase2,
        Rule::PsdLadderCase3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Rule::NecessaryKerAKerB => "necessary_ker_a_ker_b",
            Rule::NecessaryKerBtKerDKerC => "necessary_ker_bt_ker_d_ker_c",
            Rule::NecessaryKerCtKerE => "necessary_ker_ct_ker_e",
            Rule::Schur => "schur",
            Rule::EIff => "e_iff",
            Rule::CorollaryRankB => "corollary_rank_b",
            Rule::CorollaryRankC => "corollary_rank_c",
            Rule::CorollaryKernel => "corollary_kernel",
            Rule::RankB => "rank_b",
            Rule::RankC => "rank_c",
            Rule::DirectSum => "direct_sum",
            Rule::PsdLadderCase1 => "psd_ladder_case_1",
            Rule::PsdLadderCase2 => "psd_ladder_case_2",
            Rule::PsdLadderCase3 => "psd_ladder_case_3",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Rule::NecessaryKerAKerB => "ker(A) ∩ ker(B) ≠ {0}",
            Rule::NecessaryKerBtKerDKerC => "ker(Bᵀ) ∩ ker(D) ∩ ker(C) ≠ {0}",
            Rule::NecessaryKerCtKerE => "ker(Cᵀ) ∩ ker(E) ≠ {0}",
            Rule::Schur => "A, S₁ = D + BA⁻¹Bᵀ and S₂ = E + CS₁⁻¹Cᵀ nonsingular",
            Rule::EIff => "A, D ⪰ 0, null(A) = m, λ_max(D) < 2: K nonsingular iff E is nonsingular",
            Rule::CorollaryRankB => "D, E ≻ 0, A = 0, m ≥ n: K nonsingular iff rank(B) = n",
            Rule::CorollaryRankC => "A, D ≻ 0, E = 0, m ≥ p: K nonsingular iff rank(C) = p",
            Rule::CorollaryKernel => "A, E ≻ 0, D = 0: K nonsingular iff ker(Bᵀ) ∩ ker(C) = {0}",
            Rule::RankB => "rank(B) = m, ker(A) ⊕ ker(B) = ℝⁿ: ranges disjoint (iff when E = 0)",
            Rule::RankC => "rank(C) = m, ker(E) ⊕ ker(Cᵀ) = ℝᵖ: ranges disjoint (iff when A = 0)",
            Rule::DirectSum => "A, D, E ⪰ 0: ranges disjoint (iff under both direct sums)",
            Rule::PsdLadderCase1 => "A, D, E ⪰ 0 with A ≻ 0 and ker(Cᵀ) ∩ ker(E) = {0}",
            Rule::PsdLadderCase2 => "A, D, E ⪰ 0 with E ≻ 0 and ker(A) ∩ ker(B) = {0}",
            Rule::PsdLadderCase3 => "A, D, E ⪰ 0 with disjoint ranges and N1, N3",
        }
    }
}

/// Verdict, the rule behind it, certificates and the full report.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnosis {
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    /// Unit kernel vector of `K` for singular verdicts.
    pub witness: Option<DVector<f64>>,
    pub report: ConditionReport,
    /// Brute-force check, when requested.
    pub oracle_check: Option<bool>,
}

impl Diagnosis {
    fn from_decision(decision: Option<Decision>, report: ConditionReport) -> Self {
        match decision {
            Some(d) => Diagnosis {
                verdict: d.verdict,
                rule: Some(d.rule),
                witness: d.witness,
                report,
                oracle_check: None,
            },
            None => Diagnosis {
                verdict: Verdict::Undetermined,
                rule: None,
                witness: None,
                report,
                oracle_check: None,
            },
        }
    }

    pub fn is_definitive(&self) -> bool {
        self.verdict != Verdict::Undetermined
    }
}

fn run(
    sys: &BlockSystem,
    tol: &ToleranceConfig,
    rule: fn(&Analysis) -> Option<Decision>,
) -> Diagnosis {
    let an = Analysis::new(sys, tol);
    let decision = rule(&an);
    Diagnosis::from_decision(decision, an.report)
}

/// Sufficient test: `A`, `S₁ = D + BA⁻¹Bᵀ`, `S₂ = E + CS₁⁻¹Cᵀ` nonsingular.
/// Never returns a singular verdict.
pub fn schur_sufficient(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::schur)
}

/// Sufficient ladder under `A, D, E ⪰ 0` and N2; cases 1 to 3 in order.
pub fn psd_ladder(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::psd_ladder)
}

/// The three iff corollaries (`A = 0`; `E = 0`; `D = 0`, with the other two
/// diagonal blocks positive definite).
pub fn corollary_rules(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::corollaries)
}

/// Disjoint ranges of `B` and `Cᵀ`, necessary under both direct sums.
pub fn direct_sum_iff(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::direct_sum)
}

/// Full row rank `B` with `ker(A) ⊕ ker(B) = ℝⁿ`.
pub fn rank_b_iff(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, |an| rules::rank_b(an, Rule::RankB))
}

/// Full column rank `C` with `ker(E) ⊕ ker(Cᵀ) = ℝᵖ`, via the similar
/// block-reversed system.
pub fn rank_c_iff(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::rank_c)
}

/// `K` nonsingular iff `E` nonsingular, for maximally rank-deficient `A`
/// and `λ_max(D) < 2`.
pub fn e_iff_rule(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    run(sys, tol, rules::e_iff)
}

/// Runs the full ladder; see the module docs for the order.
pub fn diagnose(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    let an = Analysis::new(sys, tol);
    let ladder: [fn(&Analysis) -> Option<Decision>; 8] = [
        rules::necessary,
        rules::schur,
        rules::e_iff_with_rescale,
        rules::corollaries,
        |an| rules::rank_b(an, Rule::RankB),
        rules::rank_c,
        rules::direct_sum,
        rules::psd_ladder,
    ];
    let decision = ladder.iter().find_map(|rule| rule(&an));
    Diagnosis::from_decision(decision, an.report)
}

/// [`diagnose`] with the brute-force check attached.
pub fn diagnose_with_oracle(sys: &BlockSystem, tol: &ToleranceConfig) -> Diagnosis {
    let mut d = diagnose(sys, tol);
    d.oracle_check = Some(oracle_invertible(sys, tol));
    d
}

/// Ground truth: the assembled matrix has full numerical rank.
pub fn oracle_invertible(sys: &BlockSystem, tol: &ToleranceConfig) -> bool {
    subspaces::is_nonsingular(assemble(sys).matrix(), tol)
}
