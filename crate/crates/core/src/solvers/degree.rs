use std::time::Instant;

use rand::Rng;

use super::{SolveError, SolveResult, SolveStats, SolverBudget, Verdict};
use crate::f2::{AffineForm, AffineSubspace, BitVec, DEFAULT_ENUMERATION_CAP};
use crate::formula::PafInstance;
use crate::rng::{trial_rng, SolverRng};

/// A solver for systems of product-of-affine-form equations of bounded degree.
pub trait PafSolver {
    fn solve(&mut self, paf: &PafInstance) -> Result<Option<BitVec>, SolveError>;
}

/// Enumerates all of GF(2)^n.
#[derive(Clone, Copy, Debug)]
pub struct BruteForcePaf {
    pub cap: usize,
}

impl Default for BruteForcePaf {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl PafSolver for BruteForcePaf {
    fn solve(&mut self, paf: &PafInstance) -> Result<Option<BitVec>, SolveError> {
        Ok(AffineSubspace::full(paf.n())
            .enumerate(self.cap)?
            .find(|x| paf.is_solution(x)))
    }
}

/// The factors `1 + Σ_{j ∈ mask_s} (1 + Q_j)` replacing `Π_j Q_j = 0`, one per mask.
pub fn reduce_equation(factors: &[AffineForm], masks: &[BitVec]) -> Vec<AffineForm> {
    let n = factors.first().map_or(0, AffineForm::n);
    masks
        .iter()
        .map(|mask| {
            assert_eq!(mask.len(), factors.len(), "mask length differs from factor count");
            let mut r = AffineForm::zero(n);
            for j in mask.iter_ones() {
                r.add_assign(&factors[j].complement());
            }
            r.complement()
        })
        .collect()
}

/// Replaces every equation by a product of `l` random combinations.
///
/// A violated equation stays violated for every draw; a satisfied one stays
/// satisfied with probability `1 − 2^{−l}`.
pub fn reduce_degree(paf: &PafInstance, l: usize, rng: &mut SolverRng) -> PafInstance {
    let equations = paf
        .equations()
        .iter()
        .map(|factors| {
            let masks: Vec<BitVec> = (0..l)
                .map(|_| BitVec::from_bools((0..factors.len()).map(|_| rng.gen::<bool>())))
                .collect();
            reduce_equation(factors, &masks)
        })
        .collect();
    PafInstance::new(paf.n(), equations).expect("every reduced equation has l ≥ 1 factors")
}

/// `max(1, ⌈(β + 1) · log2 c⌉)`.
pub(crate) fn combinations_per_equation(budget: &SolverBudget) -> usize {
    (((budget.beta + 1.0) * budget.density.log2()).ceil() as usize).max(1)
}

/// Repeats degree reduction followed by `inner` on the reduced system for
/// `⌈ln(1/δ) · e^{n/c^β}⌉` trials; trial `i` draws from stream `i`.
pub fn solve_paf_degree_reduction(
    paf: &PafInstance,
    budget: &SolverBudget,
    inner: &mut dyn PafSolver,
) -> Result<SolveResult, SolveError> {
    budget.validate()?;
    let (n, m) = (paf.n(), paf.len());
    if m as f64 > budget.density * n as f64 {
        return Err(SolveError::DensityExceeded {
            m,
            n,
            c: budget.density,
        });
    }
    let start = Instant::now();
    let l = combinations_per_equation(budget);
    let exponent = n as f64 / budget.density.powf(budget.beta);
    let trials = budget.repetitions(exponent * std::f64::consts::LOG2_E);
    let trials = budget.max_iterations.map_or(trials, |c| trials.min(c));
    let mut witness = None;
    let mut used = 0;
    for trial in 0..trials {
        used += 1;
        let mut rng = trial_rng(budget.seed, trial);
        let reduced = reduce_degree(paf, l, &mut rng);
        if let Some(x) = inner.solve(&reduced)? {
            witness = Some(x);
            break;
        }
    }
    let verdict = match witness {
        Some(x) if paf.is_solution(&x) => Verdict::Sat(x),
        Some(_) => return Err(SolveError::WitnessRejected),
        None => Verdict::Unknown,
    };
    Ok(SolveResult {
        verdict,
        stats: SolveStats {
            iterations: used,
            elapsed: start.elapsed(),
            seed: budget.seed,
        },
    })
}
