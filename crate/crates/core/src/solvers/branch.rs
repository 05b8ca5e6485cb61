use std::time::Instant;

use rand::Rng;

use super::{finish, Meter, SolveError, SolveResult, SolverBudget};
use crate::f2::{AffineForm, AffineSubspace, BitVec, Constrained, ImpliedValue};
use crate::formula::{to_affine_clause_form, AffineClauseFormula, SubSatInstance};
use crate::rng::{seeded, SolverRng};

/// `Σ_{i ∈ mask} forms[i]`, constants included.
pub fn combine(forms: &[AffineForm], mask: u64) -> AffineForm {
    assert!(!forms.is_empty(), "cannot combine an empty list of forms");
    let mut out = AffineForm::zero(forms[0].n());
    for (i, f) in forms.iter().enumerate() {
        if mask >> i & 1 == 1 {
            out.add_assign(f);
        }
    }
    out
}

fn check_width(psi: &AffineClauseFormula, k: usize) -> Result<(), SolveError> {
    match psi.max_width() {
        w if w > k => Err(SolveError::WidthExceeded { width: w, max: k }),
        _ => Ok(()),
    }
}

/// One randomized pass over the clauses of `psi`, returning the system of
/// chosen equations `ℓ = 1` as a subspace of GF(2)^r, or `None` on failure.
///
/// A clause with a form already equal to 1 is skipped, as is a clause that
/// cannot be falsified inside the current system. Otherwise the forms not
/// yet fixed to 0 are thinned to a basis over the current system; a single
/// form is set to 1 directly, and for several a uniformly random nonzero
/// combination of them is set to 1.
pub fn branch_system(
    psi: &AffineClauseFormula,
    k: usize,
    rng: &mut SolverRng,
) -> Result<Option<AffineSubspace>, SolveError> {
    check_width(psi, k)?;
    Ok(run(psi, rng))
}

/// [`branch_system`] followed by the particular solution of the system.
pub fn branch_iteration(
    psi: &AffineClauseFormula,
    k: usize,
    rng: &mut SolverRng,
) -> Result<Option<BitVec>, SolveError> {
    check_width(psi, k)?;
    Ok(run(psi, rng).map(|s| s.parameterize().particular))
}

fn run(psi: &AffineClauseFormula, rng: &mut SolverRng) -> Option<AffineSubspace> {
    let mut system = AffineSubspace::full(psi.r());
    let mut open: Vec<AffineForm> = Vec::new();
    'clauses: for clause in psi.clauses() {
        open.clear();
        for f in clause {
            match system.implied_value(f).expect("forms live over r variables") {
                ImpliedValue::One => continue 'clauses,
                ImpliedValue::Zero => {}
                ImpliedValue::Free => open.push(system.reduce(f)),
            }
        }
        if open.is_empty() {
            return None;
        }
        let mut probe = system.clone();
        let mut basis: Vec<AffineForm> = Vec::with_capacity(open.len());
        for f in &open {
            match probe.constrain(f).expect("forms live over r variables") {
                Constrained::Added => basis.push(f.clone()),
                Constrained::Redundant => {}
                // All forms 0 is impossible inside the system: clause always true.
                Constrained::Inconsistent => continue 'clauses,
            }
        }
        let chosen = if basis.len() == 1 {
            basis.pop().expect("one form")
        } else {
            let mask = rng.gen_range(1..1u64 << basis.len());
            combine(&basis, mask)
        };
        let added = system
            .constrain(&chosen.complement())
            .expect("forms live over r variables");
        debug_assert_eq!(added, Constrained::Added);
    }
    Some(system)
}

/// Repeats [`branch_iteration`] on the affine-clause view of the instance,
/// `⌈ln(1/δ) · ((2^k − 1)/2^{k−1})^r⌉` times.
pub fn solve_branch(inst: &SubSatInstance, budget: &SolverBudget) -> Result<SolveResult, SolveError> {
    budget.validate()?;
    let start = Instant::now();
    let mut meter = Meter::new(budget.max_iterations);
    if inst.space().is_none() {
        return finish(inst, None, false, 0, start, budget.seed);
    }
    let view = to_affine_clause_form(inst)?;
    if view.trivially_unsat {
        return finish(inst, None, false, 0, start, budget.seed);
    }
    let k = inst.k().max(1);
    let ratio = ((1u64 << k) - 1) as f64 / (1u64 << (k - 1)) as f64;
    let iterations = budget.repetitions(view.psi.r() as f64 * ratio.log2());
    let mut rng = seeded(budget.seed);
    let mut witness = None;
    for _ in 0..iterations {
        if !meter.take() {
            break;
        }
        if let Some(system) = run(&view.psi, &mut rng) {
            witness = Some(view.lift(&system.parameterize().particular));
            break;
        }
    }
    finish(inst, witness, false, meter.used(), start, budget.seed)
}
