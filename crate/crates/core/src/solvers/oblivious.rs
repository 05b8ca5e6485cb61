use std::time::Instant;

use rand::Rng;

use super::ppz::Ppz;
use super::{finish, Meter, SolveError, SolveResult, SolverBudget};
use crate::f2::{AffineForm, AffineSubspace, BitVec, DEFAULT_ENUMERATION_CAP};
use crate::formula::{CnfFormula, SubSatInstance};
use crate::rng::{trial_rng, SolverRng};

/// A global constraint with a fast partial-assignment extension procedure.
pub trait EasyConstraint {
    fn n(&self) -> usize;

    /// A full assignment satisfying the constraint that agrees with every
    /// set position of `partial`, if one exists.
    fn extend(&self, partial: &[Option<bool>]) -> Option<BitVec>;

    /// The constraint as an affine subspace, when it is one.
    fn as_affine(&self) -> Option<&AffineSubspace> {
        None
    }

    fn contains(&self, x: &BitVec) -> bool {
        let partial: Vec<Option<bool>> = x.iter().map(Some).collect();
        self.extend(&partial).as_ref() == Some(x)
    }
}

/// Membership in an affine subspace, extended by linear solving.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineExtender {
    space: AffineSubspace,
}

pub fn affine_extender(space: AffineSubspace) -> AffineExtender {
    AffineExtender { space }
}

impl EasyConstraint for AffineExtender {
    fn n(&self) -> usize {
        self.space.n()
    }

    fn extend(&self, partial: &[Option<bool>]) -> Option<BitVec> {
        let n = self.space.n();
        let fixed: Vec<AffineForm> = partial
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| AffineForm::from_vars(n, [i], v)))
            .collect();
        let restricted = self.space.intersect(&fixed).expect("forms built over n variables")?;
        Some(restricted.parameterize().particular)
    }

    fn as_affine(&self) -> Option<&AffineSubspace> {
        Some(&self.space)
    }

    fn contains(&self, x: &BitVec) -> bool {
        self.space.contains(x)
    }
}

/// A Horn formula, extended to its least model above the fixed values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornExtender {
    phi: CnfFormula,
}

pub fn horn_extender(phi: CnfFormula) -> Result<HornExtender, SolveError> {
    if let Some(index) = phi
        .clauses()
        .iter()
        .position(|c| c.literals().iter().filter(|l| !l.negated).count() > 1)
    {
        return Err(SolveError::NotHorn { index });
    }
    Ok(HornExtender { phi })
}

impl EasyConstraint for HornExtender {
    fn n(&self) -> usize {
        self.phi.n()
    }

    fn extend(&self, partial: &[Option<bool>]) -> Option<BitVec> {
        let mut x = BitVec::from_bools(partial.iter().map(|v| v.unwrap_or(false)));
        // A violated Horn clause has every negative literal's variable true;
        // its positive literal, if free, is forced true in every extension.
        loop {
            let mut changed = false;
            for c in self.phi.clauses() {
                if c.eval(&x) {
                    continue;
                }
                match c.literals().iter().find(|l| !l.negated) {
                    Some(l) if partial[l.var].is_none() => {
                        x.set(l.var, true);
                        changed = true;
                    }
                    _ => return None,
                }
            }
            if !changed {
                return Some(x);
            }
        }
    }

    fn contains(&self, x: &BitVec) -> bool {
        self.phi.eval(x)
    }
}

/// Intersects `A` with `s` uniformly random affine equations, `s` uniform
/// in `0..=n`. The result may have an empty subspace.
pub fn vv_isolate(inst: &SubSatInstance, rng: &mut SolverRng) -> SubSatInstance {
    let n = inst.n();
    let s = rng.gen_range(0..=n);
    let forms: Vec<AffineForm> = (0..s)
        .map(|_| AffineForm::new(BitVec::from_bools((0..n).map(|_| rng.gen::<bool>())), rng.gen()))
        .collect();
    let space = inst
        .space()
        .and_then(|a| a.intersect(&forms).expect("forms built over n variables"));
    SubSatInstance::new(inst.phi().clone(), space).expect("dimensions unchanged")
}

/// Interleaves PPZ phases with uniformly random plucks, then finishes with
/// exhaustive search over the surviving variables. Each candidate is
/// completed on the plucked variables by `constraint.extend`.
///
/// An affine constraint is first isolated with [`vv_isolate`] in every
/// trial; other constraints are used as given.
pub fn solve_oblivious_pluck(
    phi: &CnfFormula,
    constraint: &dyn EasyConstraint,
    budget: &SolverBudget,
) -> Result<SolveResult, SolveError> {
    budget.validate()?;
    if constraint.n() != phi.n() {
        return Err(SolveError::DimensionMismatch {
            expected: phi.n(),
            found: constraint.n(),
        });
    }
    let start = Instant::now();
    let mut meter = Meter::new(budget.max_iterations);
    let n = phi.n();
    let inst = match constraint.as_affine() {
        Some(a) => SubSatInstance::with_space(phi.clone(), a.clone())?,
        None => SubSatInstance::unconstrained(phi.clone()),
    };

    let mut witness = None;
    if phi.is_empty() {
        meter.take();
        witness = constraint.extend(&vec![None; n]);
    } else {
        let k = phi.k().max(1) as f64;
        let shrink = (1.0 - budget.nu) / k;
        let plucks = ((shrink * n as f64).ceil() as usize).min(n);
        let isolation = if constraint.as_affine().is_some() {
            (8.0 * (n as f64 + 1.0)).log2()
        } else {
            0.0
        };
        let trials = budget.repetitions(isolation + plucks as f64 * (1.0 / budget.nu).log2());
        for trial in 0..trials {
            if meter.exhausted() {
                break;
            }
            let mut rng = trial_rng(budget.seed, trial);
            let isolated;
            let local: &dyn EasyConstraint = match constraint.as_affine() {
                Some(_) => {
                    let iso = vv_isolate(&inst, &mut rng);
                    let Some(space) = iso.space() else { continue };
                    isolated = affine_extender(space.clone());
                    &isolated
                }
                None => constraint,
            };
            witness = run_trial(phi, local, plucks, shrink, &mut rng, &mut meter);
            if witness.is_some() {
                break;
            }
        }
    }
    if let Some(x) = &witness {
        if !constraint.contains(x) {
            return Err(SolveError::WitnessRejected);
        }
    }
    finish(&inst, witness, false, meter.used(), start, budget.seed)
}

fn run_trial(
    phi: &CnfFormula,
    constraint: &dyn EasyConstraint,
    plucks: usize,
    shrink: f64,
    rng: &mut SolverRng,
    meter: &mut Meter,
) -> Option<BitVec> {
    let n = phi.n();
    let mut kept: Vec<usize> = (0..n).collect();
    let mut current = phi.clone();
    let complete = |kept: &[usize], y: &BitVec| {
        let mut partial = vec![None; n];
        for (j, &orig) in kept.iter().enumerate() {
            partial[orig] = Some(y.get(j));
        }
        constraint.extend(&partial)
    };
    for phase in 0..=plucks {
        let nj = kept.len() as f64;
        let iterations = (nj - shrink * nj).exp2().ceil() as u64;
        let mut found = None;
        Ppz::new(&current).search(iterations.max(1), rng, meter, |y| {
            found = complete(&kept, y);
            found.is_some()
        });
        if found.is_some() {
            return found;
        }
        if phase == plucks || kept.is_empty() {
            break;
        }
        let j = rng.gen_range(0..kept.len());
        current = current.pluck(j).ok()?;
        kept.remove(j);
    }
    let remaining = AffineSubspace::full(kept.len());
    for y in remaining.enumerate(DEFAULT_ENUMERATION_CAP).ok()? {
        if !meter.take() {
            return None;
        }
        if current.eval(&y) {
            if let Some(x) = complete(&kept, &y) {
                return Some(x);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use crate::solvers::Verdict;

    #[test]
    fn horn_extension_forces_implied_variable() {
        let h = horn_extender(CnfFormula::from_dimacs(2, &[&[-1, 2]]).unwrap()).unwrap();
        assert_eq!(h.extend(&[Some(true), None]).unwrap().to_string(), "11");
        assert_eq!(h.extend(&[Some(true), Some(false)]), None);
        assert_eq!(h.extend(&[None, None]).unwrap().to_string(), "00");
    }

    #[test]
    fn non_horn_rejected() {
        let phi = CnfFormula::from_dimacs(2, &[&[-1], &[1, 2]]).unwrap();
        assert_eq!(horn_extender(phi), Err(SolveError::NotHorn { index: 1 }));
    }

    #[test]
    fn affine_extension_solves_for_free_variables() {
        let a = AffineSubspace::from_equations(2, vec![AffineForm::from_vars(2, [0, 1], true)])
            .unwrap()
            .unwrap();
        let e = affine_extender(a);
        assert_eq!(e.extend(&[Some(false), None]).unwrap().to_string(), "01");
        assert_eq!(e.extend(&[Some(true), Some(true)]), None);
    }

    #[test]
    fn isolation_only_shrinks_the_solution_set() {
        let inst = SubSatInstance::unconstrained(CnfFormula::from_dimacs(3, &[&[1, 2]]).unwrap());
        let mut rng = seeded(1);
        for _ in 0..100 {
            let iso = vv_isolate(&inst, &mut rng);
            for x in AffineSubspace::full(3).enumerate(10).unwrap() {
                assert!(!iso.is_solution(&x) || inst.is_solution(&x));
            }
        }
    }

    #[test]
    fn horn_constraint_with_empty_formula() {
        let h = horn_extender(CnfFormula::from_dimacs(3, &[&[1], &[-1, 2]]).unwrap()).unwrap();
        let r = solve_oblivious_pluck(&CnfFormula::empty(3), &h, &SolverBudget::default()).unwrap();
        assert_eq!(r.witness().unwrap().to_string(), "110");
    }

    #[test]
    fn affine_constraint_finds_solution() {
        let phi = CnfFormula::from_dimacs(4, &[&[1, 2, 3], &[-1, 4], &[-2, -4]]).unwrap();
        let a = AffineSubspace::from_equations(4, vec![AffineForm::from_vars(4, [0, 2, 3], true)])
            .unwrap()
            .unwrap();
        let e = affine_extender(a.clone());
        let r = solve_oblivious_pluck(&phi, &e, &SolverBudget::with_seed(2)).unwrap();
        let x = r.witness().unwrap();
        assert!(phi.eval(x) && a.contains(x));
    }

    #[test]
    fn unsatisfiable_combination_is_unknown() {
        let phi = CnfFormula::from_dimacs(2, &[&[1], &[2]]).unwrap();
        let a = AffineSubspace::from_equations(2, vec![AffineForm::from_vars(2, [0, 1], true)])
            .unwrap()
            .unwrap();
        let r = solve_oblivious_pluck(&phi, &affine_extender(a), &SolverBudget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
    }
}
