use std::fmt;

use super::FormulaError;
use crate::f2::{AffineForm, BitVec};

/// A variable or its complement. Variables are 0-indexed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Self { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Self { var, negated: true }
    }

    pub fn new(var: usize, negated: bool) -> Self {
        Self { var, negated }
    }

    /// From a DIMACS literal (1-indexed, negative for complement).
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        Some(Self::new(lit.unsigned_abs() as usize - 1, lit < 0))
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }

    pub fn complement(self) -> Self {
        Self::new(self.var, !self.negated)
    }

    #[inline]
    pub fn eval(self, x: &BitVec) -> bool {
        x.get(self.var) != self.negated
    }

    /// The value this literal needs for it to be true.
    pub fn satisfying_value(self) -> bool {
        !self.negated
    }

    /// The affine form that evaluates to 1 exactly where the literal is true.
    pub fn as_form(self, n: usize) -> AffineForm {
        AffineForm::from_vars(n, [self.var], self.negated)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals over distinct variables, sorted by variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Normalizes the literal list: duplicates are merged, and `None` is
    /// returned when the clause contains a complementary pair.
    pub fn new(mut lits: Vec<Literal>) -> Option<Self> {
        lits.sort();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var == w[1].var) {
            return None;
        }
        Some(Self { lits })
    }

    pub fn empty() -> Self {
        Self { lits: Vec::new() }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    #[inline]
    pub fn eval(&self, x: &BitVec) -> bool {
        self.lits.iter().any(|l| l.eval(x))
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.lits.iter().any(|l| l.var == var)
    }

    pub fn literal_on(&self, var: usize) -> Option<Literal> {
        self.lits.iter().copied().find(|l| l.var == var)
    }

    /// The clause as a disjunction of affine forms (`form = 1` means true).
    pub fn as_forms(&self, n: usize) -> Vec<AffineForm> {
        self.lits.iter().map(|l| l.as_form(n)).collect()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            if l.negated {
                write!(f, "¬x{}", l.var + 1)?;
            } else {
                write!(f, "x{}", l.var + 1)?;
            }
        }
        f.write_str(")")
    }
}

/// A CNF formula over `n` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    /// Builds a formula, dropping tautological clauses.
    pub fn new(n: usize, clauses: Vec<Vec<Literal>>) -> Result<Self, FormulaError> {
        Self::from_clauses(n, clauses.into_iter().filter_map(Clause::new).collect())
    }

    pub fn from_clauses(n: usize, clauses: Vec<Clause>) -> Result<Self, FormulaError> {
        for c in &clauses {
            if let Some(l) = c.lits.iter().find(|l| l.var >= n) {
                return Err(FormulaError::VarOutOfRange { var: l.var, n });
            }
        }
        Ok(Self { n, clauses })
    }

    /// Convenience constructor from DIMACS-style signed literals.
    pub fn from_dimacs(n: usize, clauses: &[&[i64]]) -> Result<Self, FormulaError> {
        Self::new(
            n,
            clauses
                .iter()
                .map(|c| {
                    c.iter()
                        .map(|&l| Literal::from_dimacs(l).expect("nonzero literal"))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn empty(n: usize) -> Self {
        Self { n, clauses: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Maximum clause width.
    pub fn k(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &BitVec) -> bool {
        debug_assert_eq!(x.len(), self.n);
        self.clauses.iter().all(|c| c.eval(x))
    }

    pub fn count_satisfied(&self, x: &BitVec) -> usize {
        self.clauses.iter().filter(|c| c.eval(x)).count()
    }

    pub fn check_width(&self, max: usize) -> Result<(), FormulaError> {
        match self.clauses.iter().map(Clause::width).find(|&w| w > max) {
            Some(width) => Err(FormulaError::WidthExceeded { width, max }),
            None => Ok(()),
        }
    }

    /// Removes every occurrence of `var` and shifts higher variables down.
    pub fn pluck(&self, var: usize) -> Result<CnfFormula, FormulaError> {
        self.pluck_set(&[var])
    }

    /// Plucks several variables at once; the survivors keep their relative order.
    pub fn pluck_set(&self, vars: &[usize]) -> Result<CnfFormula, FormulaError> {
        let mut new_index = vec![Some(0usize); self.n];
        for &v in vars {
            if v >= self.n {
                return Err(FormulaError::VarOutOfRange { var: v, n: self.n });
            }
            new_index[v] = None;
        }
        let mut next = 0;
        for slot in new_index.iter_mut().flatten() {
            *slot = next;
            next += 1;
        }
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            let lits: Vec<Literal> = c
                .lits
                .iter()
                .filter_map(|l| new_index[l.var].map(|v| Literal::new(v, l.negated)))
                .collect();
            if lits.is_empty() && !c.is_empty() {
                return Err(FormulaError::EmptyClauseProduced);
            }
            clauses.push(Clause { lits });
        }
        Ok(CnfFormula { n: next, clauses })
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("⊤");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clause_normalization() {
        let c = Clause::new(vec![Literal::pos(2), Literal::neg(0), Literal::pos(2)]).unwrap();
        assert_eq!(c.literals(), &[Literal::neg(0), Literal::pos(2)]);
        assert!(Clause::new(vec![Literal::pos(1), Literal::neg(1)]).is_none());
        let phi = CnfFormula::from_dimacs(2, &[&[1, -1], &[1, 2]]).unwrap();
        assert_eq!(phi.len(), 1);
        assert_eq!(phi.k(), 2);
    }

    #[test]
    fn out_of_range_variable() {
        assert_eq!(
            CnfFormula::from_dimacs(2, &[&[3]]),
            Err(FormulaError::VarOutOfRange { var: 2, n: 2 })
        );
    }

    #[test]
    fn pluck_example() {
        // pluck x2 from (x1 ∨ x2)(¬x2 ∨ x3) -> (x1)(x3) on 2 variables
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2], &[-2, 3]]).unwrap();
        let out = phi.pluck(1).unwrap();
        assert_eq!(out, CnfFormula::from_dimacs(2, &[&[1], &[2]]).unwrap());
    }

    #[test]
    fn pluck_unit_produces_empty_clause() {
        let phi = CnfFormula::from_dimacs(1, &[&[1]]).unwrap();
        assert_eq!(phi.pluck(0), Err(FormulaError::EmptyClauseProduced));
    }

    #[test]
    fn literal_forms() {
        let x = BitVec::from_bools([true, false]);
        for l in [Literal::pos(0), Literal::neg(0), Literal::pos(1), Literal::neg(1)] {
            assert_eq!(l.as_form(2).eval(&x), l.eval(&x));
            assert_eq!(Literal::from_dimacs(l.to_dimacs()), Some(l));
        }
    }
}
