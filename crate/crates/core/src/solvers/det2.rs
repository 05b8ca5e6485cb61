use std::time::Instant;

use super::{brute_force, finish, subsets_up_to, SolveError, SolveResult, Verdict};
use crate::f2::BitVec;
use crate::formula::{canonical_assignment, contract_equivalences, pluck_and_eliminate, SubSatInstance};

/// Largest codimension at which an exhausted search is confirmed by enumeration.
pub const DEFAULT_BACKSTOP_CODIM: usize = 3;
/// Largest variable count at which an exhausted search is confirmed by enumeration.
pub const DEFAULT_BACKSTOP_N: usize = 20;

/// Deterministic 2-CNF satisfiability inside `A` by subset plucking and
/// canonical assignments, with the default enumeration backstop.
pub fn solve_2subsat_det(inst: &SubSatInstance) -> Result<SolveResult, SolveError> {
    solve_2subsat_det_with(inst, DEFAULT_BACKSTOP_CODIM, DEFAULT_BACKSTOP_N)
}

/// Contracts the components of the implication graph, then for each
/// `U ⊆ V_in` with `|U| ≤ codim(A)`, by size then lexicographically, plucks
/// and eliminates `U` and checks whether the canonical assignment of the
/// reduced (and again contracted) formula lies in the reduced subspace.
///
/// When no subset succeeds and `codim(A) ≤ backstop_codim`, `n ≤ backstop_n`,
/// the answer is confirmed by enumerating `A`.
pub fn solve_2subsat_det_with(
    inst: &SubSatInstance,
    backstop_codim: usize,
    backstop_n: usize,
) -> Result<SolveResult, SolveError> {
    inst.phi().check_width(2).map_err(|_| SolveError::WidthExceeded {
        width: inst.k(),
        max: 2,
    })?;
    let start = Instant::now();
    if inst.space().is_none() {
        return finish(inst, None, true, 0, start, 0);
    }
    let mut iterations = 0;
    let found = match contract_equivalences(inst) {
        Err(_) => None,
        Ok(top) => subset_search(&top.instance, &mut iterations).map(|y| top.extend(&y)),
    };
    if found.is_some() {
        return finish(inst, found, true, iterations, start, 0);
    }
    let t = inst.t().expect("nonempty subspace");
    if t <= backstop_codim && inst.n() <= backstop_n {
        let check = brute_force(inst)?;
        iterations += check.stats.iterations;
        if let Verdict::Sat(x) = check.verdict {
            log::warn!(
                "subset search missed a witness; enumeration found one (n={}, t={t})",
                inst.n()
            );
            return finish(inst, Some(x), true, iterations, start, 0);
        }
    } else {
        log::info!(
            "no witness after exhaustive subset search (n={}, t={t}); reporting unsatisfiable",
            inst.n()
        );
    }
    finish(inst, None, true, iterations, start, 0)
}

fn subset_search(inst: &SubSatInstance, iterations: &mut u64) -> Option<BitVec> {
    let t = inst.t()?;
    for u in subsets_up_to(&inst.v_in(), t) {
        let Ok(plucked) = pluck_and_eliminate(inst, &u) else {
            continue;
        };
        *iterations += 1;
        if let Some(y) = canonical_in_space(&plucked.instance) {
            return Some(plucked.trace.extend(&y));
        }
    }
    None
}

fn canonical_in_space(inst: &SubSatInstance) -> Option<BitVec> {
    let c = contract_equivalences(inst).ok()?;
    let space = c.instance.space()?;
    let canonical = canonical_assignment(c.instance.phi()).ok()?;
    space
        .contains(&canonical.assignment)
        .then(|| c.extend(&canonical.assignment))
}
