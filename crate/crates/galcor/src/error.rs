//! Error types shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field too large: q = {q} exceeds the enumeration bound {bound}")]
    FieldTooLarge { q: u64, bound: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus of degree {degree} is reducible over F_{p}")]
    ReducibleModulus { p: u64, degree: usize },
    #[error("invalid base field description: {0}")]
    BadBaseField(String),
    #[error("polynomial degree {degree} exceeds the cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },
    #[error("constant polynomial where a nonconstant one is required")]
    ConstantPolynomial,
    #[error("derivative vanished but exponent {exponent} is not divisible by {p}; corrupted input")]
    NotReducible { exponent: usize, p: u64 },
    #[error("terminal polynomial of the presentation loop is inseparable; input was reducible")]
    PresentationFailure,
    #[error("no p^{e}-th root: coefficient {index} has no root in the field")]
    NoRoot { index: usize, e: u32 },
    #[error("generator `{generator}`: t^m - c is reducible (c is a {prime}-th power)")]
    ReducibleBinomial { generator: String, prime: u64 },
    #[error("generator `{generator}`: t^m - c is reducible (4 | m and -4c is a 4th power)")]
    ReducibleBinomialFour { generator: String },
    #[error("tower degree {degree} exceeds the cap {cap}")]
    TowerDegreeOverflow { degree: usize, cap: usize },
    #[error("invalid tower spec: {0}")]
    BadTowerSpec(String),
    #[error("unknown name `{0}` in expression")]
    UnknownName(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    NoSolution,
    #[error("subspace is not closed under products: {0}")]
    NotAnAlgebra(String),
    #[error("kernel intersection is not a subfield: {0}")]
    NotASubfield(String),
    #[error("element set is not a subgroup of the automorphism group")]
    NotASubgroup,
    #[error("coefficient subspace is not stable under conjugation by the subgroup")]
    NotStable,
    #[error("automorphism group of order {order} exceeds the subgroup enumeration cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },
    #[error("strategy precondition failed: {0}")]
    StrategyPreconditionFailed(String),
    #[error("direct sum split of the operator algebra failed: {0}")]
    SplitFailure(String),
    #[error("cross-check failed: {0}")]
    CrossCheckFailure(String),
    #[error("the two routes of the inverse map disagree: {0}")]
    FormulaMismatch(String),
    #[error("equivalence violated: {0}")]
    EquivalenceViolation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;
