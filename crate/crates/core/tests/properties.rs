use std::collections::HashSet;

use proptest::prelude::*;

use subsat::f2::{eliminate_variable, rref, solve_affine, AffineForm, AffineSubspace, BitVec, LinearSystem, Rref};
use subsat::formula::{
    canonical_assignment, contract_equivalences, implication_graph, is_critical, isoperimetric_sum,
    pluck_and_eliminate, subsat_to_paf, subsat_to_usa, to_affine_clause_form, CnfFormula, Literal, PafInstance,
    SubSatInstance,
};
use subsat::io::{parse_dimacs_xor, serialize_dimacs_xor};
use subsat::maxsat::{approx_max_derand, clause_sat_probability, exact_max};
use subsat::reductions::{maxlin2_to_e2paf, oxr_holds, oxr_to_2paf};
use subsat::rng::seeded;
use subsat::solvers::{
    brute_force, reduce_degree, solve_2subsat_det_with, solve_branch, solve_codim_pluck, vv_isolate, SolverBudget,
};
use subsat::Verdict;

fn points(n: usize) -> impl Iterator<Item = BitVec> {
    (0..1u64 << n).map(move |b| BitVec::from_u64(n, b))
}

fn form(n: usize, mask: u64, c: bool) -> AffineForm {
    AffineForm::new(BitVec::from_u64(n, mask & ((1u64 << n) - 1)), c)
}

fn arb_rows(n: usize, max: usize) -> impl Strategy<Value = Vec<AffineForm>> {
    prop::collection::vec((any::<u64>(), any::<bool>()), 0..=max)
        .prop_map(move |rows| rows.into_iter().map(|(m, c)| form(n, m, c)).collect())
}

fn arb_clauses(n: usize, k: usize, max: usize) -> impl Strategy<Value = Vec<Vec<Literal>>> {
    prop::collection::vec(
        prop::collection::vec((0..n, any::<bool>()).prop_map(|(v, s)| Literal::new(v, s)), 1..=k),
        0..=max,
    )
}

/// Instances with `n ≤ max_n`, width `≤ k` and at most 4 defining rows.
fn arb_instance(max_n: usize, k: usize) -> impl Strategy<Value = SubSatInstance> {
    (2..=max_n).prop_flat_map(move |n| {
        (arb_clauses(n, k, 2 * n), arb_rows(n, 4)).prop_map(move |(clauses, rows)| {
            let phi = CnfFormula::new(n, clauses).unwrap();
            SubSatInstance::from_system(phi, &LinearSystem::from_rows(n, rows).unwrap()).unwrap()
        })
    })
}

fn solutions(inst: &SubSatInstance) -> Vec<BitVec> {
    points(inst.n()).filter(|x| inst.is_solution(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rref_idempotent_and_preserves_solutions(n in 1usize..=10, rows in (1usize..=10).prop_flat_map(|n| arb_rows(n, 8))) {
        let n = rows.first().map_or(n, AffineForm::n);
        let sys = LinearSystem::from_rows(n, rows).unwrap();
        match rref(&sys) {
            Rref::Inconsistent => prop_assert!(points(n).all(|x| !sys.is_satisfied_by(&x))),
            Rref::Reduced(e) => {
                prop_assert_eq!(rref(&e.system), Rref::Reduced(e.clone()));
                prop_assert!(points(n).all(|x| sys.is_satisfied_by(&x) == e.system.is_satisfied_by(&x)));
            }
        }
    }

    #[test]
    fn parameterization_is_a_bijection(rows in (1usize..=10).prop_flat_map(|n| arb_rows(n, 6))) {
        prop_assume!(!rows.is_empty());
        let n = rows[0].n();
        if let Some(a) = AffineSubspace::from_equations(n, rows).unwrap() {
            let p = solve_affine(&a);
            let pts: HashSet<BitVec> = points(p.dim()).map(|c| p.point(&c)).collect();
            prop_assert_eq!(pts.len(), 1usize << p.dim());
            prop_assert!(pts.iter().all(|x| a.contains(x)));
            prop_assert_eq!(pts.len(), points(n).filter(|x| a.contains(x)).count());
        }
    }

    #[test]
    fn eliminated_solutions_extend_uniquely(rows in (2usize..=9).prop_flat_map(|n| arb_rows(n, 5)), pick in any::<prop::sample::Index>()) {
        prop_assume!(!rows.is_empty());
        let n = rows[0].n();
        let sys = LinearSystem::from_rows(n, rows).unwrap();
        let row = pick.index(sys.len());
        let Some(var) = sys.rows()[row].support().next() else { return Ok(()) };
        let reduced = eliminate_variable(&sys, var, row).unwrap();
        for x in points(n).filter(|x| reduced.is_satisfied_by(x)) {
            // Exactly one value of `var` satisfies the whole system.
            let ok = [x.clone(), x.flipped(var)].iter().filter(|y| sys.is_satisfied_by(y)).count();
            prop_assert_eq!(ok, 1);
        }
    }

    #[test]
    fn pluck_of_non_critical_variable_extends(inst in arb_instance(9, 3)) {
        let sols = solutions(&inst);
        let v_in = inst.v_in();
        for x in sols.iter().take(3) {
            for &v in &v_in {
                if is_critical(inst.phi(), x, v).unwrap() {
                    continue;
                }
                let p = pluck_and_eliminate(&inst, &[v]).unwrap();
                let reduced = solutions(&p.instance);
                prop_assert!(!reduced.is_empty());
                for y in reduced {
                    prop_assert!(inst.is_solution(&p.trace.extend(&y)));
                }
            }
        }
    }

    #[test]
    fn conversions_preserve_solutions(inst in arb_instance(9, 3)) {
        let n = inst.n();
        let paf = subsat_to_paf(&inst);
        let usa = subsat_to_usa(&inst);
        for x in points(n) {
            let s = inst.is_solution(&x);
            prop_assert_eq!(paf.is_solution(&x), s);
            prop_assert_eq!(usa.is_solution(&x), s);
        }
        if inst.space().is_some() {
            let view = to_affine_clause_form(&inst).unwrap();
            let lifted: HashSet<BitVec> = points(view.psi.r())
                .filter(|y| view.psi.eval(y))
                .map(|y| view.lift(&y))
                .collect();
            prop_assert_eq!(lifted, solutions(&inst).into_iter().collect::<HashSet<_>>());
        }
    }

    #[test]
    fn two_cnf_structure(inst in arb_instance(10, 2)) {
        let g = implication_graph(inst.phi()).unwrap();
        prop_assert!(g.is_skew_symmetric());
        let sat = points(inst.n()).any(|x| inst.phi().eval(&x));
        match canonical_assignment(inst.phi()) {
            Ok(c) => {
                prop_assert!(inst.phi().eval(&c.assignment));
                prop_assert_eq!(canonical_assignment(&inst.phi().clone()).unwrap(), c);
            }
            Err(_) => prop_assert!(!sat),
        }
        if let Ok(c) = contract_equivalences(&inst) {
            let reduced = solutions(&c.instance);
            let lifted: HashSet<BitVec> = reduced.iter().map(|y| c.extend(y)).collect();
            prop_assert_eq!(lifted.len(), reduced.len());
            prop_assert_eq!(lifted, solutions(&inst).into_iter().collect::<HashSet<_>>());
        }
    }

    #[test]
    fn isoperimetry(n in 1usize..=8, bits in prop::collection::vec(any::<bool>(), 256), out_mask in any::<u8>()) {
        let set: HashSet<BitVec> = points(n).zip(&bits).filter(|(_, b)| **b).map(|(x, _)| x).collect();
        prop_assume!(!set.is_empty());
        let v_out: Vec<usize> = (0..n).filter(|i| out_mask >> i & 1 == 1).collect();
        prop_assert!(isoperimetric_sum(&set, &v_out).to_f64() >= 1.0);
    }

    #[test]
    fn deterministic_solvers_agree(inst in arb_instance(10, 2)) {
        let b = brute_force(&inst).unwrap();
        // No enumeration backstop: the subset search alone must be exact.
        let d = solve_2subsat_det_with(&inst, 0, 0).unwrap();
        prop_assert_eq!(b.is_sat(), d.is_sat());
        if let Some(x) = d.witness() {
            prop_assert!(inst.is_solution(x));
        }
    }

    #[test]
    fn randomized_solvers_are_one_sided(inst in arb_instance(8, 3), seed in any::<u64>()) {
        let sat = brute_force(&inst).unwrap().is_sat();
        let budget = SolverBudget::with_seed(seed).max_iterations(Some(2_000));
        for r in [solve_codim_pluck(&inst, &budget).unwrap(), solve_branch(&inst, &budget).unwrap()] {
            match r.verdict {
                Verdict::Sat(x) => prop_assert!(sat && inst.is_solution(&x)),
                Verdict::Unsat => prop_assert!(!sat),
                Verdict::Unknown => {}
            }
        }
    }

    #[test]
    fn isolation_shrinks(inst in arb_instance(8, 3), seed in any::<u64>()) {
        prop_assume!(inst.space().is_some());
        let iso = vv_isolate(&inst, &mut seeded(seed));
        prop_assert!(points(inst.n()).all(|x| !iso.is_solution(&x) || inst.is_solution(&x)));
    }

    #[test]
    fn degree_reduction_keeps_unsat(n in 2usize..=7, eqs in prop::collection::vec(prop::collection::vec((any::<u64>(), any::<bool>()), 1..=4), 1..=10), seed in any::<u64>()) {
        let paf = PafInstance::new(n, eqs.into_iter().map(|e| e.into_iter().map(|(m, c)| form(n, m, c)).collect()).collect()).unwrap();
        let mut rng = seeded(seed);
        for l in 1..=3 {
            let reduced = reduce_degree(&paf, l, &mut rng);
            for x in points(n) {
                // A violated equation stays violated.
                prop_assert!(paf.is_solution(&x) || !reduced.is_solution(&x));
            }
        }
    }

    #[test]
    fn maxsat_guarantees(inst in arb_instance(9, 3)) {
        let Some(a) = inst.space() else { return Ok(()) };
        let r = approx_max_derand(&inst).unwrap();
        let (opt, w) = exact_max(&inst).unwrap();
        prop_assert_eq!(inst.phi().count_satisfied(&w), opt);
        prop_assert!(r.satisfied <= opt);
        prop_assert!(r.satisfied >= r.bound);
        prop_assert!(2 * r.satisfied >= opt);
        let expectation: f64 = inst
            .phi()
            .clauses()
            .iter()
            .map(|c| clause_sat_probability(c, a).unwrap().to_f64())
            .sum();
        prop_assert!(r.satisfied as f64 >= expectation.ceil() - 1e-9);
        for c in inst.phi().clauses() {
            let inside: Vec<BitVec> = points(inst.n()).filter(|x| a.contains(x)).collect();
            let frac = inside.iter().filter(|x| c.eval(x)).count() as f64 / inside.len() as f64;
            prop_assert_eq!(clause_sat_probability(c, a).unwrap().to_f64(), frac);
        }
    }

    #[test]
    fn dimacs_xor_round_trip(inst in arb_instance(12, 3)) {
        let text = serialize_dimacs_xor(&inst);
        let back = parse_dimacs_xor(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_dimacs_xor(&back), text);
    }

    #[test]
    fn oxr_gadget_matches(triples in prop::collection::vec(prop::array::uniform3((0usize..6, any::<bool>())), 1..=10)) {
        let lits: Vec<[Literal; 3]> = triples.iter().map(|t| t.map(|(v, s)| Literal::new(v, s))).collect();
        let paf = oxr_to_2paf(6, &lits).unwrap();
        for x in points(6) {
            prop_assert_eq!(paf.is_solution(&x), lits.iter().all(|t| oxr_holds(t, &x)));
        }
    }

    #[test]
    fn maxlin_violation_identity(n in 2usize..=8, raw in prop::collection::vec((any::<u64>(), any::<bool>()), 1..=6)) {
        let mut forms: Vec<AffineForm> = raw.into_iter().map(|(m, c)| form(n, m, c)).collect();
        forms.sort_by_key(|f| (f.coeffs().to_u64(), f.constant_term()));
        forms.dedup();
        let paf = maxlin2_to_e2paf(n, &forms).unwrap();
        for x in points(n) {
            let r = forms.iter().filter(|f| f.eval(&x)).count();
            prop_assert_eq!(paf.violated(&x), r * r.saturating_sub(1) / 2);
        }
    }
}
