//! Satisfiability of k-CNF formulas restricted to an affine subspace of
//! GF(2)^n, together with the equivalent union-of-subspaces and
//! product-of-affine-forms formulations.
//!
//! The crate provides exact and randomized solvers ([`solvers`]),
//! approximation algorithms for the maximization variant ([`maxsat`]),
//! instance generators for the standard hardness reductions
//! ([`reductions`]), text formats ([`io`]) and an experiment harness
//! ([`bench`]).

pub mod bench;
pub mod dyadic;
pub mod f2;
pub mod formula;
pub mod io;
pub mod maxsat;
pub mod reductions;
pub mod rng;
pub mod solvers;

pub use f2::{AffineForm, AffineSubspace, BitVec, LinearSystem};
pub use formula::{Clause, CnfFormula, Literal, SubSatInstance};
pub use solvers::{SolveResult, SolverBudget, Verdict};

/// A point of GF(2)^n, used as a candidate witness.
pub type Assignment = BitVec;
