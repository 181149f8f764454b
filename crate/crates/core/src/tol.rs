//! Numerical tolerances shared across the crate.

/// Relative Frobenius tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY: f64 = 1e-10;

/// Eigenvalues below `RANK * max|λ|` are treated as zero.
pub const RANK: f64 = 1e-9;

/// Eigenvalues in `[-PSD, 0)` are clamped to zero.
pub const PSD: f64 = 1e-9;

/// Residual allowed in `Σ E_j = 1` and in weak completeness.
pub const COMPLETENESS: f64 = 1e-9;

/// Per-element Frobenius error allowed after decompose → recompose.
pub const ROUNDTRIP: f64 = 1e-9;

/// Branches with a smaller probability contribute nothing.
pub const BRANCH: f64 = 1e-12;

/// Relative tolerance for the definite-sign test.
pub const SIGN: f64 = 1e-9;

/// Frobenius residual allowed outside a support in condition family (i).
pub const SUPPORT: f64 = 1e-9;

/// Relative tolerance for commutation, `‖[X,Y]‖ < COMMUTE·‖X‖·‖Y‖`.
pub const COMMUTE: f64 = 1e-9;

/// Tolerance on ensemble weights and state traces.
pub const ENSEMBLE: f64 = 1e-10;

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;
