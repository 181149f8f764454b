use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (relative residual {residual:.3e})")]
    NonHermitianInput { residual: f64 },
    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("operator exceeds the identity (max eigenvalue {max_eigenvalue:.3e})")]
    NotSubIdentity { max_eigenvalue: f64 },
    #[error("expected dimension {expected}, got {found}")]
    WrongDimension { expected: usize, found: usize },
    #[error("dimension {0} is outside the supported range 1..=16")]
    UnsupportedDimension(usize),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("invalid nested POVM: {0}")]
    InvalidNestedPovm(String),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("branch probability {0:.3e} is too small to condition on")]
    DeadBranch(f64),
    #[error("closed-form conditions do not hold")]
    ConditionsNotMet,
    #[error("Q violates 0 <= Q <= 1: {0}")]
    ConstraintViolation(String),
    #[error("operator does not have a definite sign")]
    NotDefiniteSign,
    #[error("ensemble is not equiprobable")]
    NotEquiprobable,
    #[error("state {0} is not pure")]
    NotPure(usize),
    #[error("unsupported number of states: {0}")]
    UnsupportedN(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
}
