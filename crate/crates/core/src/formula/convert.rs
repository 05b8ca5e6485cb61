//! Conversions between the three equivalent problem encodings.
//!
//! * Sub-SAT: a CNF formula plus an affine subspace `A`.
//! * USA: avoid a union of affine subspaces.
//! * PAF: a system `∏_j F_ij = 0` of products of affine forms.
//!
//! A clause is an OR of literals; a literal is the affine form that is 1
//! when the literal is true. The complement of a clause is therefore the
//! affine subspace where all of its forms vanish, and the clause holds
//! exactly where `∏ (form + 1) = 0`.

use std::collections::HashMap;

use super::{Clause, CnfFormula, FormulaError, Literal, SubSatInstance};
use crate::f2::{AffineForm, AffineSubspace, BitVec, LinearSystem, Parameterization};

/// A conjunction of disjunctions of affine forms over `r` variables. A
/// disjunction holds when at least one of its forms evaluates to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineClauseFormula {
    r: usize,
    clauses: Vec<Vec<AffineForm>>,
}

impl AffineClauseFormula {
    pub fn new(r: usize, clauses: Vec<Vec<AffineForm>>) -> Result<Self, FormulaError> {
        if let Some(f) = clauses.iter().flatten().find(|f| f.n() != r) {
            return Err(FormulaError::DimensionMismatch {
                expected: r,
                found: f.n(),
            });
        }
        Ok(Self { r, clauses })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn clauses(&self) -> &[Vec<AffineForm>] {
        &self.clauses
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Vec::is_empty)
    }

    pub fn eval(&self, y: &BitVec) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|f| f.eval(y)))
    }
}

/// Union-of-subspace avoidance: find `x` outside every listed subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UsaInstance {
    pub n: usize,
    pub spaces: Vec<AffineSubspace>,
}

impl UsaInstance {
    pub fn new(n: usize, spaces: Vec<AffineSubspace>) -> Result<Self, FormulaError> {
        if let Some(s) = spaces.iter().find(|s| s.n() != n) {
            return Err(FormulaError::DimensionMismatch {
                expected: n,
                found: s.n(),
            });
        }
        Ok(Self { n, spaces })
    }

    pub fn is_solution(&self, x: &BitVec) -> bool {
        !self.spaces.iter().any(|s| s.contains(x))
    }
}

/// A system of equations, each stating that a product of affine forms is 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PafInstance {
    n: usize,
    equations: Vec<Vec<AffineForm>>,
}

impl PafInstance {
    pub fn new(n: usize, equations: Vec<Vec<AffineForm>>) -> Result<Self, FormulaError> {
        for (index, eq) in equations.iter().enumerate() {
            if eq.is_empty() {
                return Err(FormulaError::EmptyEquation { index });
            }
            if let Some(f) = eq.iter().find(|f| f.n() != n) {
                return Err(FormulaError::DimensionMismatch {
                    expected: n,
                    found: f.n(),
                });
            }
        }
        Ok(Self { n, equations })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn equations(&self) -> &[Vec<AffineForm>] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// Largest number of factors in any equation.
    pub fn degree(&self) -> usize {
        self.equations.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Whether equation `i` holds at `x`, i.e. some factor vanishes.
    pub fn equation_holds(&self, i: usize, x: &BitVec) -> bool {
        self.equations[i].iter().any(|f| !f.eval(x))
    }

    pub fn violated(&self, x: &BitVec) -> usize {
        (0..self.equations.len())
            .filter(|&i| !self.equation_holds(i, x))
            .count()
    }

    pub fn is_solution(&self, x: &BitVec) -> bool {
        (0..self.equations.len()).all(|i| self.equation_holds(i, x))
    }
}

/// `(Φ, A)` rewritten over the free coordinates of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineView {
    pub psi: AffineClauseFormula,
    pub param: Parameterization,
    /// Some clause became constantly false under the substitution.
    pub trivially_unsat: bool,
}

impl AffineView {
    pub fn lift(&self, y: &BitVec) -> BitVec {
        self.param.point(y)
    }
}

/// Substitutes the dependent variables of `A` by affine forms in its free
/// variables. Clauses that become constantly true are dropped; constantly
/// false forms are removed from their clause.
pub fn to_affine_clause_form(inst: &SubSatInstance) -> Result<AffineView, FormulaError> {
    let space = inst.space().ok_or(FormulaError::EmptySpace)?;
    let n = inst.n();
    let param = space.parameterize();
    let r = param.dim();
    let mut clauses = Vec::with_capacity(inst.phi().len());
    let mut trivially_unsat = false;
    'clauses: for c in inst.phi().clauses() {
        let mut forms: Vec<AffineForm> = Vec::with_capacity(c.width());
        for l in c.literals() {
            let f = param.substitute(&l.as_form(n));
            if f.is_constant() {
                if f.constant_term() {
                    continue 'clauses;
                }
                continue;
            }
            if forms.contains(&f.complement()) {
                continue 'clauses;
            }
            if !forms.contains(&f) {
                forms.push(f);
            }
        }
        trivially_unsat |= forms.is_empty();
        clauses.push(forms);
    }
    Ok(AffineView {
        psi: AffineClauseFormula::new(r, clauses)?,
        param,
        trivially_unsat,
    })
}

pub fn subsat_to_usa(inst: &SubSatInstance) -> UsaInstance {
    let n = inst.n();
    let mut spaces = Vec::new();
    for c in inst.phi().clauses() {
        // All literals false: each literal's form is 0.
        let falsifying = AffineSubspace::from_equations(n, c.as_forms(n))
            .expect("forms share n")
            .expect("literals on distinct variables are jointly falsifiable");
        spaces.push(falsifying);
    }
    match inst.space() {
        Some(a) => {
            for row in a.rows() {
                // Points violating this defining equation.
                let off = AffineSubspace::from_equations(n, vec![row.complement()])
                    .expect("forms share n")
                    .expect("a nonzero row is violated somewhere");
                spaces.push(off);
            }
        }
        None => spaces.push(AffineSubspace::full(n)),
    }
    UsaInstance { n, spaces }
}

pub fn usa_to_subsat(u: &UsaInstance) -> AffineClauseFormula {
    let clauses = u.spaces.iter().map(|s| s.rows().to_vec()).collect();
    AffineClauseFormula { r: u.n, clauses }
}

pub fn subsat_to_paf(inst: &SubSatInstance) -> PafInstance {
    let n = inst.n();
    let mut equations: Vec<Vec<AffineForm>> = inst
        .phi()
        .clauses()
        .iter()
        .map(|c| {
            if c.is_empty() {
                vec![AffineForm::constant(n, true)]
            } else {
                c.literals().iter().map(|l| l.as_form(n).complement()).collect()
            }
        })
        .collect();
    match inst.space() {
        Some(a) => equations.extend(a.rows().iter().map(|r| vec![r.clone()])),
        None => equations.push(vec![AffineForm::constant(n, true)]),
    }
    PafInstance { n, equations }
}

pub fn paf_to_subsat(p: &PafInstance) -> AffineClauseFormula {
    let clauses = p
        .equations
        .iter()
        .map(|eq| eq.iter().map(AffineForm::complement).collect())
        .collect();
    AffineClauseFormula { r: p.n, clauses }
}

/// Encodes a PAF system as CNF plus XOR constraints over the original
/// variables followed by auxiliary ones.
///
/// A factor `F` on a single variable becomes a literal directly; any other
/// non-constant factor gets an auxiliary variable `z` with `z = F + 1`, and
/// the equation becomes the clause of those literals. Solutions project
/// bijectively onto solutions of the system.
pub fn paf_to_subsat_instance(p: &PafInstance) -> SubSatInstance {
    let n = p.n;
    let mut aux: HashMap<AffineForm, usize> = HashMap::new();
    let mut aux_order: Vec<AffineForm> = Vec::new();
    let mut clause_lits: Vec<Vec<Literal>> = Vec::new();
    'equations: for eq in &p.equations {
        let mut lits = Vec::new();
        for f in eq {
            let support: Vec<usize> = f.support().collect();
            match support.as_slice() {
                [] if f.constant_term() => {}
                [] => continue 'equations,
                // x_i + c = 0  <=>  x_i = c
                [i] => lits.push(Literal::new(*i, !f.constant_term())),
                _ => {
                    let next = n + aux_order.len();
                    let z = *aux.entry(f.clone()).or_insert_with(|| {
                        aux_order.push(f.clone());
                        next
                    });
                    lits.push(Literal::pos(z));
                }
            }
        }
        clause_lits.push(lits);
    }
    let total = n + aux_order.len();
    let clauses: Vec<Clause> = clause_lits.into_iter().filter_map(Clause::new).collect();
    let phi = CnfFormula::from_clauses(total, clauses).expect("literals are in range");
    let mut system = LinearSystem::new(total);
    for (j, f) in aux_order.iter().enumerate() {
        // z + F + 1 = 0
        let mut coeffs = BitVec::from_indices(total, f.support());
        coeffs.set(n + j, true);
        system
            .push(AffineForm::new(coeffs, !f.constant_term()))
            .expect("row width matches");
    }
    SubSatInstance::from_system(phi, &system).expect("dimensions agree")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq(n: usize, vars: &[usize], c: bool) -> AffineForm {
        AffineForm::from_vars(n, vars.iter().copied(), c)
    }

    #[test]
    fn clause_to_paf_equation() {
        let inst = SubSatInstance::unconstrained(CnfFormula::from_dimacs(2, &[&[1, 2]]).unwrap());
        let p = subsat_to_paf(&inst);
        assert_eq!(p.equations(), &[vec![eq(2, &[0], true), eq(2, &[1], true)]]);
    }

    #[test]
    fn empty_formula_gives_empty_system() {
        let inst = SubSatInstance::unconstrained(CnfFormula::empty(3));
        assert!(subsat_to_paf(&inst).is_empty());
        assert!(subsat_to_usa(&inst).spaces.is_empty());
    }

    #[test]
    fn substitution_example() {
        // Φ = (x1 ∨ x3), A = {x3 = x1 + x2}  ->  Ψ = (y1 ∨ y1 + y2)
        let phi = CnfFormula::from_dimacs(3, &[&[1, 3]]).unwrap();
        let a = AffineSubspace::from_equations(3, vec![eq(3, &[0, 1, 2], false)])
            .unwrap()
            .unwrap();
        let view = to_affine_clause_form(&SubSatInstance::with_space(phi, a).unwrap()).unwrap();
        assert_eq!(view.psi.r(), 2);
        assert_eq!(view.psi.clauses(), &[vec![eq(2, &[0], false), eq(2, &[0, 1], false)]]);
        assert!(!view.trivially_unsat);
    }

    #[test]
    fn single_point_space() {
        let phi = CnfFormula::from_dimacs(2, &[&[1, 2], &[-1]]).unwrap();
        let x = BitVec::from_bools([true, false]);
        let view = to_affine_clause_form(&SubSatInstance::with_space(phi, AffineSubspace::point(&x)).unwrap()).unwrap();
        assert_eq!(view.psi.r(), 0);
        assert!(view.trivially_unsat);
        assert_eq!(view.lift(&BitVec::zeros(0)), x);
    }

    #[test]
    fn empty_space_is_rejected() {
        let inst = SubSatInstance::new(CnfFormula::empty(1), None).unwrap();
        assert_eq!(to_affine_clause_form(&inst), Err(FormulaError::EmptySpace));
    }

    #[test]
    fn paf_rejects_empty_equation() {
        assert_eq!(
            PafInstance::new(1, vec![vec![]]),
            Err(FormulaError::EmptyEquation { index: 0 })
        );
    }
}
