use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{finish, Meter, SolveError, SolveResult, SolverBudget};
use crate::f2::BitVec;
use crate::formula::{CnfFormula, Literal, SubSatInstance};
use crate::rng::{seeded, SolverRng};

/// A formula prepared for repeated PPZ passes.
pub(crate) struct Ppz<'a> {
    phi: &'a CnfFormula,
    occurrences: Vec<Vec<usize>>,
    order: Vec<usize>,
    value: Vec<Option<bool>>,
}

impl<'a> Ppz<'a> {
    pub(crate) fn new(phi: &'a CnfFormula) -> Self {
        let mut occurrences = vec![Vec::new(); phi.n()];
        for (i, c) in phi.clauses().iter().enumerate() {
            for l in c.literals() {
                occurrences[l.var].push(i);
            }
        }
        Self {
            phi,
            occurrences,
            order: (0..phi.n()).collect(),
            value: vec![None; phi.n()],
        }
    }

    /// The value of `var` forced by clauses whose other literals are all
    /// false, `Some(None)` if unforced, `None` on contradictory forcings.
    fn forced(&self, var: usize) -> Option<Option<bool>> {
        let mut forced = None;
        for &ci in &self.occurrences[var] {
            let c = &self.phi.clauses()[ci];
            let mut own: Option<Literal> = None;
            let mut open = false;
            for l in c.literals() {
                if l.var == var {
                    own = Some(*l);
                } else if self.value[l.var] != Some(l.negated) {
                    // unset, or set and true
                    open = true;
                    break;
                }
            }
            if open {
                continue;
            }
            let want = own
                .expect("clause occurs in the list of its variable")
                .satisfying_value();
            match forced {
                Some(v) if v != want => return None,
                _ => forced = Some(want),
            }
        }
        Some(forced)
    }

    /// One pass: random order, forced or random value per variable.
    pub(crate) fn iterate(&mut self, rng: &mut SolverRng) -> Option<BitVec> {
        self.order.shuffle(rng);
        self.value.fill(None);
        for i in 0..self.order.len() {
            let var = self.order[i];
            let v = match self.forced(var)? {
                Some(v) => v,
                None => rng.gen(),
            };
            self.value[var] = Some(v);
        }
        let x = BitVec::from_bools(self.value.iter().map(|v| v.expect("all variables set")));
        self.phi.eval(&x).then_some(x)
    }

    /// Runs up to `iterations` passes and returns the first satisfying
    /// output accepted by `accept`.
    pub(crate) fn search(
        &mut self,
        iterations: u64,
        rng: &mut SolverRng,
        meter: &mut Meter,
        mut accept: impl FnMut(&BitVec) -> bool,
    ) -> Option<BitVec> {
        for _ in 0..iterations {
            if !meter.take() {
                return None;
            }
            if let Some(x) = self.iterate(rng) {
                if accept(&x) {
                    return Some(x);
                }
            }
        }
        None
    }
}

/// `log2` of the inverse PPZ success bound `n^2 · 2^{n - n/k}`.
pub(crate) fn ppz_log2_inverse(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k.max(1) as f64);
    2.0 * n.max(1.0).log2() + n - n / k
}

/// A single PPZ pass over `phi`.
pub fn ppz_iteration(phi: &CnfFormula, rng: &mut SolverRng) -> Option<BitVec> {
    Ppz::new(phi).iterate(rng)
}

/// Repeated PPZ passes on the formula alone.
pub fn ppz_solve(phi: &CnfFormula, budget: &SolverBudget) -> Result<SolveResult, SolveError> {
    ppz_solve_in(&SubSatInstance::unconstrained(phi.clone()), budget)
}

/// Repeated PPZ passes on `Φ`, keeping only outputs that lie in `A`.
pub fn ppz_solve_in(inst: &SubSatInstance, budget: &SolverBudget) -> Result<SolveResult, SolveError> {
    budget.validate()?;
    let start = Instant::now();
    let mut meter = Meter::new(budget.max_iterations);
    let witness = match inst.space() {
        None => None,
        Some(space) => {
            let iterations = budget.repetitions(ppz_log2_inverse(inst.n(), inst.k()));
            let mut rng = seeded(budget.seed);
            Ppz::new(inst.phi()).search(iterations, &mut rng, &mut meter, |x| space.contains(x))
        }
    };
    finish(inst, witness, false, meter.used(), start, budget.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::Verdict;

    #[test]
    fn unit_clause_is_always_forced() {
        let phi = CnfFormula::from_dimacs(1, &[&[1]]).unwrap();
        let mut rng = seeded(3);
        for _ in 0..50 {
            assert_eq!(ppz_iteration(&phi, &mut rng).unwrap().to_string(), "1");
        }
    }

    #[test]
    fn contradictory_units_fail() {
        let phi = CnfFormula::from_dimacs(1, &[&[1], &[-1]]).unwrap();
        let mut rng = seeded(3);
        assert!(ppz_iteration(&phi, &mut rng).is_none());
    }

    #[test]
    fn empty_formula_succeeds_immediately() {
        let r = ppz_solve(&CnfFormula::empty(4), &SolverBudget::default()).unwrap();
        assert!(r.is_sat());
        assert_eq!(r.stats.iterations, 1);
    }

    #[test]
    fn unsat_formula_is_unknown() {
        let phi = CnfFormula::from_dimacs(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let r = ppz_solve(&phi, &SolverBudget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        let budget = SolverBudget::default();
        assert_eq!(r.stats.iterations, budget.repetitions(ppz_log2_inverse(2, 2)));
    }

    #[test]
    fn max_iterations_caps_the_run() {
        let phi = CnfFormula::from_dimacs(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        let r = ppz_solve(&phi, &SolverBudget::default().max_iterations(Some(7))).unwrap();
        assert_eq!(r.stats.iterations, 7);
    }

    #[test]
    fn same_seed_same_result() {
        let phi = CnfFormula::from_dimacs(4, &[&[1, 2, -3], &[-1, 4], &[2, 3, 4], &[-2, -4]]).unwrap();
        let a = ppz_solve(&phi, &SolverBudget::with_seed(11)).unwrap();
        let b = ppz_solve(&phi, &SolverBudget::with_seed(11)).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.stats.iterations, b.stats.iterations);
    }
}
