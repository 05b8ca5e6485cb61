use std::time::Instant;

use super::ppz::{ppz_log2_inverse, Ppz};
use super::{finish, subsets_up_to, Meter, SolveError, SolveResult, SolverBudget};
use crate::formula::{pluck_and_eliminate, SubSatInstance};
use crate::rng::trial_rng;

/// Tries every subset `U ⊆ V_in` with `|U| ≤ codim(A)`: plucks and
/// eliminates `U`, runs PPZ on the reduced formula keeping outputs inside
/// the reduced subspace, and lifts a hit back through the elimination trace.
///
/// Subset `i` in enumeration order draws from stream `i` of the seed.
pub fn solve_codim_pluck(inst: &SubSatInstance, budget: &SolverBudget) -> Result<SolveResult, SolveError> {
    budget.validate()?;
    let start = Instant::now();
    let mut meter = Meter::new(budget.max_iterations);
    let Some(t) = inst.t() else {
        return finish(inst, None, false, 0, start, budget.seed);
    };
    let v_in = inst.v_in();
    let k = inst.k();
    let mut witness = None;
    for (index, u) in subsets_up_to(&v_in, t).enumerate() {
        if meter.exhausted() {
            break;
        }
        let Ok(plucked) = pluck_and_eliminate(inst, &u) else {
            continue;
        };
        let reduced = &plucked.instance;
        let space = reduced.space().expect("elimination keeps the subspace nonempty");
        let iterations = budget.repetitions(ppz_log2_inverse(reduced.n(), k));
        let mut rng = trial_rng(budget.seed, index as u64);
        let hit = Ppz::new(reduced.phi()).search(iterations, &mut rng, &mut meter, |y| space.contains(y));
        if let Some(y) = hit {
            witness = Some(plucked.trace.extend(&y));
            break;
        }
    }
    finish(inst, witness, false, meter.used(), start, budget.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::{AffineForm, AffineSubspace};
    use crate::formula::CnfFormula;
    use crate::solvers::Verdict;

    #[test]
    fn codimension_zero_is_plain_ppz() {
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2], &[-1, 3]]).unwrap();
        let r = solve_codim_pluck(&SubSatInstance::unconstrained(phi), &SolverBudget::default()).unwrap();
        assert!(r.is_sat());
    }

    #[test]
    fn solution_needing_a_pluck() {
        // Φ = (x1 ∨ x2)(¬x1 ∨ ¬x2), A = {x1 + x2 + x3 = 0, x3 = 1}
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2], &[-1, -2]]).unwrap();
        let a = AffineSubspace::from_equations(
            3,
            vec![
                AffineForm::from_vars(3, [0, 1, 2], false),
                AffineForm::from_vars(3, [2], true),
            ],
        )
        .unwrap()
        .unwrap();
        let inst = SubSatInstance::with_space(phi, a).unwrap();
        let r = solve_codim_pluck(&inst, &SolverBudget::with_seed(5)).unwrap();
        assert!(inst.is_solution(r.witness().unwrap()));
    }

    #[test]
    fn satisfiable_formula_outside_space_is_unknown() {
        // Φ = (x1)(x2), A = {x1 + x2 = 1}
        let phi = CnfFormula::from_dimacs(2, &[&[1], &[2]]).unwrap();
        let a = AffineSubspace::from_equations(2, vec![AffineForm::from_vars(2, [0, 1], true)])
            .unwrap()
            .unwrap();
        let inst = SubSatInstance::with_space(phi, a).unwrap();
        let r = solve_codim_pluck(&inst, &SolverBudget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
    }
}
