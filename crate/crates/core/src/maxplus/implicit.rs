use super::graph::{Acyclicity, AssociatedGraph};
use super::matrix::Matrix;
use super::scalar::{Carrier, TimeValue};
use super::MaxPlusError;

/// Solves `x = U ⊗ x ⊕ v` as `x = (E ⊕ U)^p ⊗ v`.
///
/// `U` must be square with every entry positive or ε, and its associated
/// graph must be acyclic; `p` is that graph's longest path. A circuit yields
/// [`MaxPlusError::CyclicSystem`] carrying the witness.
pub fn solve_implicit<T: Carrier>(
    u: &Matrix<T>,
    v: &[TimeValue<T>],
) -> Result<Vec<TimeValue<T>>, MaxPlusError> {
    check_coefficients(u, v)?;
    match AssociatedGraph::of_matrix(u)?.analyze() {
        Acyclicity::Acyclic { longest_path } => solve_with_depth(u, v, longest_path),
        Acyclicity::Cyclic { cycle } => Err(MaxPlusError::CyclicSystem { cycle }),
    }
}

/// Same as [`solve_implicit`] with the longest-path length already known.
///
/// Callers that evaluate many right-hand sides against matrices sharing one
/// sparsity pattern compute `p` once and reuse it here. Acyclicity is the
/// caller's responsibility; the coefficient check still runs.
pub fn solve_with_depth<T: Carrier>(
    u: &Matrix<T>,
    v: &[TimeValue<T>],
    p: usize,
) -> Result<Vec<TimeValue<T>>, MaxPlusError> {
    check_coefficients(u, v)?;
    let n = u.rows();
    let closure = Matrix::identity(n).oplus(u)?.pow(p as u32)?;
    closure.apply(v)
}

fn check_coefficients<T: Carrier>(u: &Matrix<T>, v: &[TimeValue<T>]) -> Result<(), MaxPlusError> {
    if !u.is_square() {
        return Err(MaxPlusError::NotSquare { shape: u.shape() });
    }
    if u.cols() != v.len() {
        return Err(MaxPlusError::ShapeMismatch {
            op: "solve",
            left: u.shape(),
            right: (v.len(), 1),
        });
    }
    for i in 0..u.rows() {
        for j in 0..u.cols() {
            let x = u.get(i, j);
            if !x.is_eps() && !x.is_positive() {
                return Err(MaxPlusError::NonPositiveCoefficient { row: i, col: j });
            }
        }
    }
    Ok(())
}
