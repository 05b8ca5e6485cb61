use std::time::Instant;

use super::{finish, SolveError, SolveResult};
use crate::f2::DEFAULT_ENUMERATION_CAP;
use crate::formula::SubSatInstance;

/// Exhaustive search over the points of `A`.
pub fn brute_force(inst: &SubSatInstance) -> Result<SolveResult, SolveError> {
    brute_force_capped(inst, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_capped(inst: &SubSatInstance, cap: usize) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let Some(space) = inst.space() else {
        return finish(inst, None, true, 0, start, 0);
    };
    let mut iterations = 0;
    let mut witness = None;
    for x in space.enumerate(cap)? {
        iterations += 1;
        if inst.phi().eval(&x) {
            witness = Some(x);
            break;
        }
    }
    finish(inst, witness, true, iterations, start, 0)
}
