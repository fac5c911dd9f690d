use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// A hypothesis that an operation requires and found violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Precondition {
    /// `A ⪰ 0`.
    APositiveSemidefinite,
    /// `D ⪰ 0`.
    DPositiveSemidefinite,
    /// `null(A) = m`.
    NullityAEqualsM,
    /// `ker(A) ∩ ker(B) = {0}`.
    KerAKerB,
    /// `ker(Bᵀ) ∩ ker(D) ∩ ker(C) = {0}`.
    KerBtKerDKerC,
    /// `ker(Cᵀ) ∩ ker(E) = {0}`.
    KerCtKerE,
    /// `ker(A) ⊕ ker(B) = ℝⁿ`.
    DirectSumKerAKerB,
    /// `rank(B) = m`.
    FullRowRankB,
    /// `λ_max(D) < 2`.
    LambdaMaxDBelowTwo,
    /// `E` nonsingular.
    ENonsingular,
    /// `W` nonsingular.
    WNonsingular,
    /// The assembled matrix is nonsingular.
    SystemNonsingular,
}

impl fmt::Display for Precondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Precondition::APositiveSemidefinite => "A must be positive semidefinite",
            Precondition::DPositiveSemidefinite => "D must be positive semidefinite",
            Precondition::NullityAEqualsM => "null(A) must equal m",
            Precondition::KerAKerB => "ker(A) ∩ ker(B) must be trivial",
            Precondition::KerBtKerDKerC => "ker(Bᵀ) ∩ ker(D) ∩ ker(C) must be trivial",
            Precondition::KerCtKerE => "ker(Cᵀ) ∩ ker(E) must be trivial",
            Precondition::DirectSumKerAKerB => "ker(A) ⊕ ker(B) must equal ℝⁿ",
            Precondition::FullRowRankB => "B must have full row rank",
            Precondition::LambdaMaxDBelowTwo => "λ_max(D) must be below 2",
            Precondition::ENonsingular => "E must be nonsingular",
            Precondition::WNonsingular => "W must be nonsingular",
            Precondition::SystemNonsingular => "the assembled matrix must be nonsingular",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("block {0} contains non-finite entries")]
    NonFinite(&'static str),
    #[error("block {0} is not symmetric")]
    NotSymmetric(&'static str),
    #[error("tolerance {name} = {value} must lie in (0, 1)")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("alpha = {alpha} outside the admissible interval (0, {upper})")]
    AlphaOutOfRange { alpha: f64, upper: f64 },
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("precondition violated: {0}")]
    Precondition(Precondition),
    #[error("{0} is numerically singular")]
    Singular(&'static str),
    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),
    #[error("generator missed its targets after {0} attempts")]
    RetriesExhausted(usize),
}

impl From<Precondition> for Error {
    fn from(p: Precondition) -> Self {
        Error::Precondition(p)
    }
}
