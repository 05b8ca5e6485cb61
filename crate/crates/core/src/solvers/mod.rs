//! Exact, randomized and deterministic solvers for satisfiability inside an
//! affine subspace.
//!
//! Randomized solvers are one-sided: they report `Sat` with a verified
//! witness or `Unknown` once their iteration budget runs out, never `Unsat`.

mod branch;
mod brute;
mod codim;
mod degree;
mod det2;
mod oblivious;
pub(crate) mod ppz;

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::f2::{BitVec, F2Error};
use crate::formula::{FormulaError, SubSatInstance};

pub use branch::{branch_iteration, branch_system, combine, solve_branch};
pub use brute::{brute_force, brute_force_capped};
pub use codim::solve_codim_pluck;
pub use degree::{reduce_degree, reduce_equation, solve_paf_degree_reduction, BruteForcePaf, PafSolver};
pub use det2::{solve_2subsat_det, solve_2subsat_det_with, DEFAULT_BACKSTOP_CODIM, DEFAULT_BACKSTOP_N};
pub use oblivious::{
    affine_extender, horn_extender, solve_oblivious_pluck, vv_isolate, AffineExtender, EasyConstraint, HornExtender,
};
pub use ppz::{ppz_iteration, ppz_solve, ppz_solve_in};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("clause width {width} exceeds the supported maximum {max}")]
    WidthExceeded { width: usize, max: usize },
    #[error("{m} equations exceed density {c} times {n} variables")]
    DensityExceeded { m: usize, n: usize, c: f64 },
    #[error("constraint has {found} variables, formula has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("clause {index} has more than one positive literal")]
    NotHorn { index: usize },
    #[error("internal error: witness failed verification")]
    WitnessRejected,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Algebra(#[from] F2Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Sat(BitVec),
    Unsat,
    Unknown,
}

impl Verdict {
    pub fn is_sat(&self) -> bool {
        matches!(self, Verdict::Sat(_))
    }

    pub fn witness(&self) -> Option<&BitVec> {
        match self {
            Verdict::Sat(x) => Some(x),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "SATISFIABLE",
            Verdict::Unsat => "UNSATISFIABLE",
            Verdict::Unknown => "UNKNOWN",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: u64,
    pub elapsed: Duration,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.verdict.is_sat()
    }

    pub fn witness(&self) -> Option<&BitVec> {
        self.verdict.witness()
    }
}

/// Budget and tuning parameters shared by all solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverBudget {
    /// Target failure probability of randomized solvers.
    pub delta: f64,
    /// Hard cap on the total number of iterations of one invocation.
    pub max_iterations: Option<u64>,
    pub seed: u64,
    /// Plucking threshold of the oblivious plucking solver.
    pub nu: f64,
    /// Exponent of the degree reduction.
    pub beta: f64,
    /// Equation density `c` of the degree reduction (`m ≤ c·n`).
    pub density: f64,
}

impl Default for SolverBudget {
    fn default() -> Self {
        Self {
            delta: 0.01,
            max_iterations: None,
            seed: 0,
            nu: 0.5,
            beta: 1.0,
            density: 2.0,
        }
    }
}

impl SolverBudget {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn max_iterations(mut self, cap: Option<u64>) -> Self {
        self.max_iterations = cap;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(SolveError::InvalidBudget(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if !(self.nu > 0.0 && self.nu < 1.0) {
            return Err(SolveError::InvalidBudget(format!(
                "nu must lie in (0, 1), got {}",
                self.nu
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(SolveError::InvalidBudget(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !(self.density >= 1.0 && self.density.is_finite()) {
            return Err(SolveError::InvalidBudget(format!(
                "density must be at least 1, got {}",
                self.density
            )));
        }
        Ok(())
    }

    /// `⌈ln(1/δ) · 2^log2_inverse_p⌉`, at least one.
    pub fn repetitions(&self, log2_inverse_p: f64) -> u64 {
        let reps = (1.0 / self.delta).ln() * log2_inverse_p.exp2();
        if reps.is_finite() && reps < u64::MAX as f64 {
            (reps.ceil() as u64).max(1)
        } else {
            u64::MAX
        }
    }
}

/// Counts iterations against the global cap of one invocation.
#[derive(Debug)]
pub(crate) struct Meter {
    used: u64,
    cap: Option<u64>,
}

impl Meter {
    pub(crate) fn new(cap: Option<u64>) -> Self {
        Self { used: 0, cap }
    }

    /// Consumes one iteration; false once the cap is reached.
    #[inline]
    pub(crate) fn take(&mut self) -> bool {
        if self.cap.is_some_and(|c| self.used >= c) {
            return false;
        }
        self.used += 1;
        true
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.cap.is_some_and(|c| self.used >= c)
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }
}

/// Builds the result of a solver run, rechecking any witness against the
/// original instance.
pub(crate) fn finish(
    inst: &SubSatInstance,
    witness: Option<BitVec>,
    unsat: bool,
    iterations: u64,
    start: Instant,
    seed: u64,
) -> Result<SolveResult, SolveError> {
    let verdict = match witness {
        Some(x) if inst.is_solution(&x) => Verdict::Sat(x),
        Some(_) => return Err(SolveError::WitnessRejected),
        None if unsat => Verdict::Unsat,
        None => Verdict::Unknown,
    };
    Ok(SolveResult {
        verdict,
        stats: SolveStats {
            iterations,
            elapsed: start.elapsed(),
            seed,
        },
    })
}

/// Subsets of `items` of size at most `max_size`, by increasing size and
/// lexicographically within a size.
pub(crate) fn subsets_up_to(items: &[usize], max_size: usize) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..=max_size.min(items.len())).flat_map(move |size| Combinations::new(items, size))
}

struct Combinations<'a> {
    items: &'a [usize],
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Combinations<'a> {
    fn new(items: &'a [usize], size: usize) -> Self {
        Self {
            items,
            idx: (0..size).collect(),
            done: size > items.len(),
        }
    }
}

impl Iterator for Combinations<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.iter().map(|&i| self.items[i]).collect();
        let (k, n) = (self.idx.len(), self.items.len());
        match (0..k).rev().find(|&i| self.idx[i] < n - k + i) {
            Some(i) => {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_in_size_then_lex_order() {
        let got: Vec<Vec<usize>> = subsets_up_to(&[1, 4, 6], 2).collect();
        let want: Vec<Vec<usize>> = vec![vec![], vec![1], vec![4], vec![6], vec![1, 4], vec![1, 6], vec![4, 6]];
        assert_eq!(got, want);
        assert_eq!(subsets_up_to(&[0, 1, 2, 3, 4], 5).count(), 32);
        assert_eq!(subsets_up_to(&[], 3).count(), 1);
    }

    #[test]
    fn budget_validation() {
        assert!(SolverBudget::default().validate().is_ok());
        assert!(SolverBudget::default().delta(1.0).validate().is_err());
        assert!(SolverBudget {
            nu: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
    }

    #[test]
    fn repetitions_formula() {
        let b = SolverBudget::default().delta(0.5);
        // ln 2 * 8 = 5.545
        assert_eq!(b.repetitions(3.0), 6);
        assert_eq!(b.repetitions(-100.0), 1);
        assert_eq!(b.repetitions(2000.0), u64::MAX);
    }

    #[test]
    fn meter_cap() {
        let mut m = Meter::new(Some(2));
        assert!(m.take() && m.take());
        assert!(!m.take());
        assert!(m.exhausted());
        assert_eq!(m.used(), 2);
    }
}
