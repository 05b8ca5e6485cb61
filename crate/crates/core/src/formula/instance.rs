use super::{CnfFormula, FormulaError};
use crate::f2::{AffineForm, AffineSubspace, BitVec, LinearSystem};

/// A formula together with the affine subspace its solutions must lie in.
///
/// `space` is `None` when the defining equations are inconsistent; such an
/// instance has no solutions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubSatInstance {
    phi: CnfFormula,
    space: Option<AffineSubspace>,
}

impl SubSatInstance {
    pub fn new(phi: CnfFormula, space: Option<AffineSubspace>) -> Result<Self, FormulaError> {
        if let Some(a) = &space {
            if a.n() != phi.n() {
                return Err(FormulaError::DimensionMismatch {
                    expected: phi.n(),
                    found: a.n(),
                });
            }
        }
        Ok(Self { phi, space })
    }

    pub fn with_space(phi: CnfFormula, space: AffineSubspace) -> Result<Self, FormulaError> {
        Self::new(phi, Some(space))
    }

    pub fn from_system(phi: CnfFormula, system: &LinearSystem) -> Result<Self, FormulaError> {
        if system.n() != phi.n() {
            return Err(FormulaError::DimensionMismatch {
                expected: phi.n(),
                found: system.n(),
            });
        }
        Ok(Self {
            space: AffineSubspace::from_system(system),
            phi,
        })
    }

    /// Plain k-SAT: the subspace is all of GF(2)^n.
    pub fn unconstrained(phi: CnfFormula) -> Self {
        let space = Some(AffineSubspace::full(phi.n()));
        Self { phi, space }
    }

    pub fn phi(&self) -> &CnfFormula {
        &self.phi
    }

    pub fn space(&self) -> Option<&AffineSubspace> {
        self.space.as_ref()
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn k(&self) -> usize {
        self.phi.k()
    }

    pub fn is_trivially_unsat(&self) -> bool {
        self.space.is_none()
    }

    /// `dim(A)`, or `None` for an empty subspace.
    pub fn r(&self) -> Option<usize> {
        self.space.as_ref().map(AffineSubspace::dim)
    }

    /// `codim(A)`, or `None` for an empty subspace.
    pub fn t(&self) -> Option<usize> {
        self.space.as_ref().map(AffineSubspace::codim)
    }

    /// Variables with a nonzero coefficient in some defining equation.
    pub fn v_in(&self) -> Vec<usize> {
        match &self.space {
            Some(a) => a.support().iter_ones().collect(),
            None => Vec::new(),
        }
    }

    pub fn v_out(&self) -> Vec<usize> {
        let vin = self.v_in();
        (0..self.n()).filter(|i| vin.binary_search(i).is_err()).collect()
    }

    pub fn is_solution(&self, x: &BitVec) -> bool {
        x.len() == self.n() && self.space.as_ref().is_some_and(|a| a.contains(x)) && self.phi.eval(x)
    }
}

/// Records how plucked variables are recovered from the values of the
/// variables that remain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationTrace {
    original_n: usize,
    /// `kept[j]` is the original index of reduced variable `j`.
    kept: Vec<usize>,
    /// `(var, row)` in elimination order; `row` is over the original variables
    /// and `var` is determined by `row = 0`.
    steps: Vec<(usize, AffineForm)>,
}

impl EliminationTrace {
    pub fn identity(n: usize) -> Self {
        Self {
            original_n: n,
            kept: (0..n).collect(),
            steps: Vec::new(),
        }
    }

    pub fn original_n(&self) -> usize {
        self.original_n
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn plucked(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|(v, _)| *v)
    }

    /// Each plucked variable as an explicit equation `x_var = form`.
    pub fn definitions(&self) -> impl Iterator<Item = (usize, AffineForm)> + '_ {
        self.steps.iter().map(|(v, row)| {
            let mut f = row.clone();
            f.set_coeff(*v, false);
            (*v, f)
        })
    }

    /// Lifts an assignment of the reduced instance to the original variables.
    pub fn extend(&self, reduced: &BitVec) -> BitVec {
        assert_eq!(reduced.len(), self.kept.len(), "reduced assignment has wrong length");
        let mut x = BitVec::zeros(self.original_n);
        for (j, &orig) in self.kept.iter().enumerate() {
            x.set(orig, reduced.get(j));
        }
        // A later step's row never mentions an earlier plucked variable, so
        // replaying in reverse sees every dependency already set.
        for (v, row) in self.steps.iter().rev() {
            // x_v is still 0 here, so row(x) equals the rest of the row.
            let value = row.eval(&x);
            x.set(*v, value);
        }
        x
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plucked {
    pub instance: SubSatInstance,
    pub trace: EliminationTrace,
}

/// Plucks each listed variable from the formula and eliminates it from the
/// defining equations, in ascending variable order.
///
/// For each variable the first remaining equation that mentions it is used
/// as the pivot and then dropped, so the codimension falls by `vars.len()`.
pub fn pluck_and_eliminate(inst: &SubSatInstance, vars: &[usize]) -> Result<Plucked, FormulaError> {
    let n = inst.n();
    let space = inst.space().ok_or(FormulaError::EmptySpace)?;
    let mut order = vars.to_vec();
    order.sort_unstable();
    order.dedup();
    if let Some(&v) = order.iter().find(|&&v| v >= n) {
        return Err(FormulaError::VarOutOfRange { var: v, n });
    }

    let mut rows: Vec<AffineForm> = space.rows().to_vec();
    let mut steps = Vec::with_capacity(order.len());
    for &v in &order {
        let pos = rows
            .iter()
            .position(|r| r.coeff(v))
            .ok_or(FormulaError::NotInEquations { var: v })?;
        let pivot = rows.remove(pos);
        for r in rows.iter_mut().filter(|r| r.coeff(v)) {
            r.add_assign(&pivot);
        }
        steps.push((v, pivot));
    }

    let phi = inst.phi().pluck_set(&order)?;
    let kept: Vec<usize> = (0..n).filter(|i| order.binary_search(i).is_err()).collect();
    let reduced_rows = rows.iter().map(|r| r.restrict(&kept)).collect();
    let reduced_space = AffineSubspace::from_equations(kept.len(), reduced_rows)?
        .expect("eliminating from a consistent system stays consistent");
    debug_assert_eq!(reduced_space.codim(), space.codim() - order.len());
    Ok(Plucked {
        instance: SubSatInstance::with_space(phi, reduced_space)?,
        trace: EliminationTrace {
            original_n: n,
            kept,
            steps,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pluck_with_trace_example() {
        // A = {x1 + x2 = 1}, pluck x1 -> full space over x2.., trace x1 = x2 + 1
        let phi = CnfFormula::from_dimacs(3, &[&[1, 3], &[2, -3]]).unwrap();
        let a = AffineSubspace::from_equations(3, vec![AffineForm::from_vars(3, [0, 1], true)])
            .unwrap()
            .unwrap();
        let inst = SubSatInstance::with_space(phi, a).unwrap();
        let p = pluck_and_eliminate(&inst, &[0]).unwrap();
        assert_eq!(p.instance.n(), 2);
        assert_eq!(p.instance.t(), Some(0));
        let defs: Vec<_> = p.trace.definitions().collect();
        assert_eq!(defs, vec![(0, AffineForm::from_vars(3, [1], true))]);
        let lifted = p.trace.extend(&BitVec::from_bools([false, true]));
        assert_eq!(lifted.to_string(), "101");
    }

    #[test]
    fn variables_outside_equations_fail() {
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2, 3]]).unwrap();
        let a = AffineSubspace::from_equations(3, vec![AffineForm::from_vars(3, [0, 1], true)])
            .unwrap()
            .unwrap();
        let inst = SubSatInstance::with_space(phi, a).unwrap();
        assert_eq!(
            pluck_and_eliminate(&inst, &[2]),
            Err(FormulaError::NotInEquations { var: 2 })
        );
        // after x1 is eliminated, x2 is in no remaining equation
        assert_eq!(
            pluck_and_eliminate(&inst, &[0, 1]),
            Err(FormulaError::NotInEquations { var: 1 })
        );
    }

    #[test]
    fn v_in_and_v_out() {
        let phi = CnfFormula::empty(4);
        let a = AffineSubspace::from_equations(4, vec![AffineForm::from_vars(4, [1, 3], false)])
            .unwrap()
            .unwrap();
        let inst = SubSatInstance::with_space(phi, a).unwrap();
        assert_eq!(inst.v_in(), vec![1, 3]);
        assert_eq!(inst.v_out(), vec![0, 2]);
        assert_eq!((inst.r(), inst.t()), (Some(3), Some(1)));
    }
}
