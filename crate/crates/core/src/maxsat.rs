//! Maximizing the number of satisfied clauses over the points of `A`.

use rand::Rng;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::f2::{AffineForm, AffineSubspace, BitVec, Constrained, F2Error, ImpliedValue, DEFAULT_ENUMERATION_CAP};
use crate::formula::{Clause, CnfFormula, FormulaError, Literal, SubSatInstance};
use crate::rng::SolverRng;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MaxSatError {
    #[error("the affine subspace is empty")]
    EmptySpace,
    #[error("instance is not satisfiable: absorbing unary clauses emptied the subspace")]
    PremiseViolated,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Algebra(#[from] F2Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxResult {
    pub assignment: BitVec,
    pub satisfied: usize,
    /// The guarantee that applies to the instance: `⌈m/2⌉` in general,
    /// `⌈3m/4⌉` when every clause is a pair of independent forms, both
    /// counted over clauses that can be satisfied at all and plus the
    /// clauses true on all of `A`. The derandomized algorithms always meet
    /// it; the random one meets it in expectation.
    pub bound: usize,
}

/// A formula with every variable that is constant on `A` substituted away.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Preprocessed {
    pub instance: SubSatInstance,
    /// Value of each original variable that is constant on `A`.
    pub fixed: Vec<Option<bool>>,
    /// Original index of each variable of the reduced instance.
    pub kept: Vec<usize>,
    /// Clauses true on every point of `A`; dropped from the reduced formula.
    pub always_true: usize,
    /// Clauses false on every point of `A`; dropped from the reduced formula.
    pub always_false: usize,
}

impl Preprocessed {
    pub fn extend(&self, reduced: &BitVec) -> BitVec {
        let mut x = BitVec::from_bools(self.fixed.iter().map(|v| v.unwrap_or(false)));
        for (j, &orig) in self.kept.iter().enumerate() {
            x.set(orig, reduced.get(j));
        }
        x
    }

    /// Clauses of the original formula that are not false on all of `A`.
    pub fn satisfiable_clauses(&self) -> usize {
        self.always_true + self.instance.phi().len()
    }
}

/// Substitutes every variable that takes a single value on `A`.
pub fn preprocess_forced(inst: &SubSatInstance) -> Result<Preprocessed, MaxSatError> {
    let space = inst.space().ok_or(MaxSatError::EmptySpace)?;
    let n = inst.n();
    let mut fixed = vec![None; n];
    for (i, slot) in fixed.iter_mut().enumerate() {
        *slot = match space.implied_value(&AffineForm::var(n, i))? {
            ImpliedValue::Zero => Some(false),
            ImpliedValue::One => Some(true),
            ImpliedValue::Free => None,
        };
    }
    let kept: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let mut index = vec![usize::MAX; n];
    for (j, &orig) in kept.iter().enumerate() {
        index[orig] = j;
    }

    let rows = space
        .rows()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            for (i, v) in fixed.iter().enumerate() {
                if let (Some(v), true) = (v, r.coeff(i)) {
                    r.set_coeff(i, false);
                    let c = r.constant_term() ^ v;
                    r.set_constant(c);
                }
            }
            r.restrict(&kept)
        })
        .collect();
    let reduced_space =
        AffineSubspace::from_equations(kept.len(), rows)?.expect("substituting values of A keeps it nonempty");

    let (mut always_true, mut always_false) = (0, 0);
    let mut clauses = Vec::new();
    'clauses: for c in inst.phi().clauses() {
        let mut lits = Vec::with_capacity(c.width());
        for l in c.literals() {
            match fixed[l.var] {
                Some(v) if v != l.negated => {
                    always_true += 1;
                    continue 'clauses;
                }
                Some(_) => {}
                None => lits.push(Literal::new(index[l.var], l.negated)),
            }
        }
        if lits.is_empty() {
            always_false += 1;
        } else {
            clauses.push(Clause::new(lits).expect("literals of a normalized clause"));
        }
    }
    let phi = CnfFormula::from_clauses(kept.len(), clauses)?;
    Ok(Preprocessed {
        instance: SubSatInstance::with_space(phi, reduced_space)?,
        fixed,
        kept,
        always_true,
        always_false,
    })
}

/// Exact probability that a uniform point of `space` makes some form equal 1.
pub fn forms_sat_probability(forms: &[AffineForm], space: &AffineSubspace) -> Result<Dyadic, MaxSatError> {
    let mut falsified = space.clone();
    for f in forms {
        if falsified.constrain(f)? == Constrained::Inconsistent {
            return Ok(Dyadic::ONE);
        }
    }
    let drop = (falsified.codim() - space.codim()) as u32;
    Ok(Dyadic::one_minus_pow2_neg(drop))
}

/// Exact probability that a uniform point of `space` satisfies `clause`.
pub fn clause_sat_probability(clause: &Clause, space: &AffineSubspace) -> Result<Dyadic, MaxSatError> {
    forms_sat_probability(&clause.as_forms(space.n()), space)
}

fn expected_satisfied(phi: &CnfFormula, space: &AffineSubspace) -> Result<Dyadic, MaxSatError> {
    let mut total = Dyadic::ZERO;
    for c in phi.clauses() {
        total = total + clause_sat_probability(c, space)?;
    }
    Ok(total)
}

/// Whether the clause consists of two forms that are linearly independent
/// on `space`, so that it holds with probability exactly 3/4.
pub fn is_independent_pair(clause: &Clause, space: &AffineSubspace) -> Result<bool, MaxSatError> {
    let [a, b] = clause.literals() else {
        return Ok(false);
    };
    let n = space.n();
    let (fa, fb) = (a.as_form(n), b.as_form(n));
    Ok(space.implied_value(&fa)? == ImpliedValue::Free
        && space.implied_value(&fb)? == ImpliedValue::Free
        && space.implied_value(&fa.add(&fb))? == ImpliedValue::Free)
}

fn general_bound(pre: &Preprocessed) -> Result<usize, MaxSatError> {
    let reduced = &pre.instance;
    let space = reduced.space().expect("preprocessing keeps A nonempty");
    let mut all_pairs = true;
    for c in reduced.phi().clauses() {
        all_pairs &= is_independent_pair(c, space)?;
    }
    let m = reduced.phi().len();
    let guaranteed = if all_pairs { (3 * m).div_ceil(4) } else { m.div_ceil(2) };
    Ok(pre.always_true + guaranteed)
}

/// A uniformly random point of `A`.
pub fn approx_max_random(inst: &SubSatInstance, rng: &mut SolverRng) -> Result<MaxResult, MaxSatError> {
    let pre = preprocess_forced(inst)?;
    let space = inst.space().ok_or(MaxSatError::EmptySpace)?;
    let param = space.parameterize();
    let coeffs = BitVec::from_bools((0..param.dim()).map(|_| rng.gen::<bool>()));
    let assignment = param.point(&coeffs);
    Ok(MaxResult {
        satisfied: inst.phi().count_satisfied(&assignment),
        assignment,
        bound: general_bound(&pre)?,
    })
}

/// Fixes the free coordinates of `space` one at a time, each to the value
/// with the larger conditional expectation (0 on ties).
fn derandomize(phi: &CnfFormula, space: &AffineSubspace) -> Result<BitVec, MaxSatError> {
    let n = space.n();
    let mut current = space.clone();
    for v in space.free_vars() {
        let mut best: Option<(Dyadic, AffineSubspace)> = None;
        for value in [false, true] {
            let mut s = current.clone();
            s.constrain(&AffineForm::from_vars(n, [v], value))?;
            let e = expected_satisfied(phi, &s)?;
            if best.as_ref().is_none_or(|(b, _)| e > *b) {
                best = Some((e, s));
            }
        }
        current = best.expect("two candidates").1;
    }
    Ok(current.parameterize().particular)
}

/// Method of conditional expectations over the free coordinates of `A`.
/// The result satisfies at least `⌈Σ_C Pr[C]⌉` clauses.
pub fn approx_max_derand(inst: &SubSatInstance) -> Result<MaxResult, MaxSatError> {
    let pre = preprocess_forced(inst)?;
    let space = inst.space().ok_or(MaxSatError::EmptySpace)?;
    let assignment = derandomize(inst.phi(), space)?;
    Ok(MaxResult {
        satisfied: inst.phi().count_satisfied(&assignment),
        assignment,
        bound: general_bound(&pre)?,
    })
}

/// The maximum number of simultaneously satisfied clauses, by enumeration.
pub fn exact_max(inst: &SubSatInstance) -> Result<(usize, BitVec), MaxSatError> {
    let space = inst.space().ok_or(MaxSatError::EmptySpace)?;
    let mut best: Option<(usize, BitVec)> = None;
    for x in space.enumerate(DEFAULT_ENUMERATION_CAP)? {
        let s = inst.phi().count_satisfied(&x);
        if best.as_ref().is_none_or(|(b, _)| s > *b) {
            best = Some((s, x));
        }
    }
    Ok(best.expect("a nonempty subspace has a point"))
}

/// For a satisfiable instance: moves every clause that reduces to a single
/// form on the current subspace into the subspace, repeating until none is
/// left, then derandomizes over the strengthened subspace.
///
/// Satisfies at least `m₁ + ⌈3·m₂/4⌉` clauses, where `m₁` clauses were
/// absorbed and `m₂` remain.
pub fn satisfiable_threequarters(inst: &SubSatInstance) -> Result<MaxResult, MaxSatError> {
    let mut space = inst.space().ok_or(MaxSatError::EmptySpace)?.clone();
    let n = inst.n();
    let clauses = inst.phi().clauses();
    let mut absorbed = vec![false; clauses.len()];
    loop {
        let mut changed = false;
        for (i, c) in clauses.iter().enumerate() {
            if absorbed[i] {
                continue;
            }
            let mut open: Vec<AffineForm> = Vec::new();
            let mut true_everywhere = false;
            for f in c.as_forms(n) {
                match space.implied_value(&f)? {
                    ImpliedValue::One => true_everywhere = true,
                    ImpliedValue::Zero => {}
                    ImpliedValue::Free => {
                        let r = space.reduce(&f);
                        if open.contains(&r.complement()) {
                            true_everywhere = true;
                        } else if !open.contains(&r) {
                            open.push(r);
                        }
                    }
                }
            }
            if true_everywhere {
                continue;
            }
            match open.as_slice() {
                [] => return Err(MaxSatError::PremiseViolated),
                [f] => {
                    if space.constrain(&f.complement())? == Constrained::Inconsistent {
                        return Err(MaxSatError::PremiseViolated);
                    }
                    absorbed[i] = true;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }
    let m1 = absorbed.iter().filter(|&&a| a).count();
    let m2 = clauses.len() - m1;
    let assignment = derandomize(inst.phi(), &space)?;
    Ok(MaxResult {
        satisfied: inst.phi().count_satisfied(&assignment),
        assignment,
        bound: m1 + (3 * m2).div_ceil(4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn space(n: usize, rows: Vec<AffineForm>) -> AffineSubspace {
        AffineSubspace::from_equations(n, rows).unwrap().unwrap()
    }

    #[test]
    fn probability_of_a_two_clause() {
        let c = Clause::new(vec![Literal::pos(0), Literal::pos(1)]).unwrap();
        assert_eq!(
            clause_sat_probability(&c, &AffineSubspace::full(2)).unwrap(),
            Dyadic::new(3, 2)
        );
        let unit = Clause::new(vec![Literal::pos(0)]).unwrap();
        let a = space(1, vec![AffineForm::from_vars(1, [0], true)]);
        assert_eq!(clause_sat_probability(&unit, &a).unwrap(), Dyadic::ONE);
    }

    #[test]
    fn forced_variable_is_substituted() {
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2], &[-1, 3], &[-1]]).unwrap();
        let inst = SubSatInstance::with_space(phi, space(3, vec![AffineForm::from_vars(3, [0], true)])).unwrap();
        let pre = preprocess_forced(&inst).unwrap();
        assert_eq!(pre.fixed, vec![Some(true), None, None]);
        assert_eq!((pre.always_true, pre.always_false), (1, 1));
        assert_eq!(pre.instance.phi(), &CnfFormula::from_dimacs(2, &[&[2]]).unwrap());
        assert_eq!(pre.extend(&BitVec::from_bools([false, true])).to_string(), "101");
    }

    #[test]
    fn nothing_forced_is_identity() {
        let phi = CnfFormula::from_dimacs(2, &[&[1, 2]]).unwrap();
        let inst = SubSatInstance::unconstrained(phi.clone());
        let pre = preprocess_forced(&inst).unwrap();
        assert_eq!(pre.instance.phi(), &phi);
        assert_eq!(pre.kept, vec![0, 1]);
    }

    #[test]
    fn contradictory_units_have_optimum_one() {
        let phi = CnfFormula::from_dimacs(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(exact_max(&SubSatInstance::unconstrained(phi)).unwrap().0, 1);
    }

    #[test]
    fn derandomized_meets_three_quarters_on_pairs() {
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2], &[-1, 3], &[-2, -3], &[1, -3]]).unwrap();
        let inst = SubSatInstance::unconstrained(phi);
        let r = approx_max_derand(&inst).unwrap();
        assert_eq!(r.bound, 3);
        assert!(r.satisfied >= 3);
        assert!(r.satisfied <= exact_max(&inst).unwrap().0);
    }

    #[test]
    fn dependent_pair_is_not_counted_as_independent() {
        // A = {x1 = x2}: (x1 ∨ x2) holds with probability 1/2 only.
        let a = space(2, vec![AffineForm::from_vars(2, [0, 1], false)]);
        let c = Clause::new(vec![Literal::pos(0), Literal::pos(1)]).unwrap();
        assert!(!is_independent_pair(&c, &a).unwrap());
        assert_eq!(clause_sat_probability(&c, &a).unwrap(), Dyadic::new(1, 1));
    }

    #[test]
    fn unary_clauses_absorbed() {
        let phi = CnfFormula::from_dimacs(3, &[&[1], &[-2], &[-1, 2, 3], &[2, 3]]).unwrap();
        let inst = SubSatInstance::unconstrained(phi);
        let r = satisfiable_threequarters(&inst).unwrap();
        // (x1), (¬x2) absorbed; then (x3) from either remaining clause.
        assert_eq!(r.bound, 4);
        assert_eq!(r.satisfied, 4);
    }

    #[test]
    fn contradictory_units_violate_the_premise() {
        let phi = CnfFormula::from_dimacs(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(
            satisfiable_threequarters(&SubSatInstance::unconstrained(phi)),
            Err(MaxSatError::PremiseViolated)
        );
    }

    #[test]
    fn random_point_lies_in_space() {
        let phi = CnfFormula::from_dimacs(3, &[&[1, 2]]).unwrap();
        let a = space(3, vec![AffineForm::from_vars(3, [0, 2], true)]);
        let inst = SubSatInstance::with_space(phi, a.clone()).unwrap();
        let mut rng = seeded(1);
        for _ in 0..20 {
            let r = approx_max_random(&inst, &mut rng).unwrap();
            assert!(a.contains(&r.assignment));
            assert_eq!(r.satisfied, inst.phi().count_satisfied(&r.assignment));
        }
    }
}
