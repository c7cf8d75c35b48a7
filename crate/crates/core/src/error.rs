use thiserror::Error;

/// Errors raised across the analysis pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inner series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("series must have constant term 1 (got {0})")]
    BadConstantTerm(String),
    #[error("reversion needs f(0) = 0 and f'(0) = 1")]
    NotNormalized,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
    #[error("p(0, w) vanishes identically; apply a linear change of variables first")]
    NotWGeneral,
    #[error("polynomial does not vanish at the origin")]
    NotAtOrigin,
    #[error("branch is not in the non-basic regime (need a0 = 2M and psi0 = i)")]
    NotNonBasic,
    #[error("truncation order {have} is insufficient; re-expand with order >= {needs}")]
    InsufficientOrder { have: usize, needs: usize },
    #[error("inconclusive up to order {0}")]
    Inconclusive(usize),
    #[error("gradient at the origin vanishes")]
    ZeroGradient,
    #[error("unsettled case: {0}")]
    UnsettledCase(String),
    #[error("polynomial is not stable near the origin: {0}")]
    NotStable(String),
    #[error("witness search failed: {0}")]
    WitnessSearchFailed(String),
    #[error("|g_{k}| = {value} exceeds the bound c_{k} = {bound}")]
    BoundViolated { k: usize, value: f64, bound: f64 },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("tuple is not a row contraction (min eigenvalue of I - sum A A* = {0})")]
    NotRowContraction(f64),
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("no branch of P(s, y) passes through (0, 1)")]
    NoBranchThroughOne,
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
