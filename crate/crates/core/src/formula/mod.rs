//! CNF formulas, Sub-SAT instances and their equivalent encodings.

mod cnf;
mod convert;
mod critical;
mod instance;
mod twosat;

pub use cnf::{Clause, CnfFormula, Literal};
pub use convert::{
    paf_to_subsat, paf_to_subsat_instance, subsat_to_paf, subsat_to_usa, to_affine_clause_form, usa_to_subsat,
    AffineClauseFormula, AffineView, PafInstance, UsaInstance,
};
pub use critical::{i_out, is_critical, isoperimetric_sum};
pub use instance::{pluck_and_eliminate, EliminationTrace, Plucked, SubSatInstance};
pub use twosat::{
    canonical_assignment, contract_equivalences, implication_graph, CanonicalAssignment, Contracted, ImplicationGraph,
};

use thiserror::Error;

use crate::f2::F2Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable x{} out of range for {n} variables", var + 1)]
    VarOutOfRange { var: usize, n: usize },
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("plucking produced an empty clause")]
    EmptyClauseProduced,
    #[error("clause of width {width} exceeds the allowed width {max}")]
    WidthExceeded { width: usize, max: usize },
    #[error("x{} occurs in no remaining defining equation", var + 1)]
    NotInEquations { var: usize },
    #[error("the affine subspace is empty")]
    EmptySpace,
    #[error("equation {index} has no factors")]
    EmptyEquation { index: usize },
    #[error("formula is unsatisfiable")]
    Unsatisfiable,
    #[error(transparent)]
    Algebra(#[from] F2Error),
}
