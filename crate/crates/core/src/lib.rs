//! Minimum-error discrimination of quantum states through nested binary
//! measurements.
//!
//! Any `N`-outcome POVM can be rewritten as a binary tree of two-outcome
//! measurements, each one conditioned on the outcomes observed so far. For
//! state discrimination this turns the optimal success probability of
//! three or four states into the maximum of a function `F_Q(A, B, C)` of a
//! single operator `Q`, the first binary measurement. The crate provides:
//!
//! * [`operator`]: dense Hermitian operators and their spectral utilities,
//!   plus the qubit Bloch form `c·1 + r·σ`.
//! * [`povm`]: POVM validation, decomposition into nested binary trees and
//!   recomposition.
//! * [`discrimination`]: ensembles, success probabilities, the Helstrom
//!   optimum, the `F_Q` objective and its closed-form maxima.
//! * [`qubit`]: closed-form Bloch evaluation of `F_Q` for qubits.
//! * [`optimizer`]: multi-start simplex search over qubit `Q`.
//! * [`oracle`]: brute-force and geometric reference values.
//! * [`io`]: the JSON formats for ensembles, POVMs and nested trees.
//! * [`random`]: random operators, POVMs and ensembles.

pub mod discrimination;
pub mod error;
pub mod io;
pub mod operator;
pub mod optimizer;
pub mod oracle;
pub mod povm;
pub mod qubit;
pub mod random;
pub mod tol;

pub use discrimination::{
    ConditionFamily, Method, OptimalDiscrimination, PermutationSearch, WeightedEnsemble,
};
pub use error::{Error, Result};
pub use operator::{BlochOperator, HermitianOperator};
pub use optimizer::{OptimizationResult, OptimizerConfig};
pub use povm::{BitPath, NestedPovm, Povm};
pub use qubit::QubitQ;
