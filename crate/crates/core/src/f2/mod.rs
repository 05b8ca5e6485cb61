//! Linear algebra over GF(2): packed vectors, affine forms, reduced
//! row-echelon systems and affine subspaces.

mod bitvec;
mod subspace;
mod system;

pub use bitvec::BitVec;
pub use subspace::{
    enumerate_points, solve_affine, AffineSubspace, Constrained, ImpliedValue, Parameterization, Points,
    DEFAULT_ENUMERATION_CAP,
};
pub use system::{eliminate_variable, rref, AffineForm, Echelon, LinearSystem, Rref};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F2Error {
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable x{} has zero coefficient in row {row}", var + 1)]
    ZeroCoefficient { var: usize, row: usize },
    #[error("subspace dimension {dim} exceeds the enumeration cap {cap}")]
    EnumerationCapExceeded { dim: usize, cap: usize },
}
