use std::collections::HashSet;

use super::{CnfFormula, FormulaError};
use crate::dyadic::Dyadic;
use crate::f2::BitVec;

/// Whether flipping `var` in a satisfying assignment falsifies `phi`.
pub fn is_critical(phi: &CnfFormula, assignment: &BitVec, var: usize) -> Result<bool, FormulaError> {
    if assignment.len() != phi.n() {
        return Err(FormulaError::DimensionMismatch {
            expected: phi.n(),
            found: assignment.len(),
        });
    }
    if var >= phi.n() {
        return Err(FormulaError::VarOutOfRange { var, n: phi.n() });
    }
    if !phi.eval(assignment) {
        return Err(FormulaError::NotSatisfying);
    }
    // Only clauses mentioning var can change value.
    Ok(phi
        .clauses()
        .iter()
        .filter(|c| c.contains_var(var))
        .any(|c| c.literals().iter().all(|l| (l.var == var) == l.eval(assignment))))
}

/// `I_out(a) = { i in v_out : a + e_i not in set }`.
pub fn i_out(set: &HashSet<BitVec>, point: &BitVec, v_out: &[usize]) -> Vec<usize> {
    v_out
        .iter()
        .copied()
        .filter(|&i| !set.contains(&point.flipped(i)))
        .collect()
}

/// `Σ_{a in set} 2^{|I_out(a)| - |v_out|}`, exactly.
///
/// For every nonempty `set` this is at least one; the PPZ success bound for
/// instances whose `V_in` variables are all critical rests on it.
pub fn isoperimetric_sum(set: &HashSet<BitVec>, v_out: &[usize]) -> Dyadic {
    let exp = v_out.len() as u32;
    set.iter()
        .map(|a| Dyadic::new(1u128 << i_out(set, a, v_out).len(), exp))
        .sum()
}
