//! Max-plus scalar and matrix algebra.
//!
//! `⊕` is `max` and `⊗` is `+` over the reals extended with the bottom
//! element ε. Matrices follow the usual row-by-column rule with these two
//! operations. A square matrix doubles as the adjacency matrix of its
//! associated graph, which decides nilpotency and the solvability of the
//! implicit equation `x = U ⊗ x ⊕ v`.

mod graph;
mod implicit;
mod matrix;
mod scalar;

use thiserror::Error;

pub use graph::{analyze_acyclicity, associated_graph, Acyclicity, AssociatedGraph};
pub use implicit::{solve_implicit, solve_with_depth};
pub use matrix::{mat_add, mat_mul, mat_power, vec_oplus, Matrix};
pub use scalar::{scalar_add, scalar_mul, Carrier, Eps, Fin, TimeValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxPlusError {
    #[error("cannot {op} matrices of shape {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("expected a square matrix, got shape {shape:?}")]
    NotSquare { shape: (usize, usize) },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    /// Associated graph of the coefficient matrix has a circuit (0-based nodes).
    #[error("associated graph has a circuit through nodes {cycle:?}")]
    CyclicSystem { cycle: Vec<usize> },
    #[error("coefficient ({row}, {col}) is neither positive nor eps")]
    NonPositiveCoefficient { row: usize, col: usize },
}
