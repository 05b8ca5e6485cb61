//! Implication graphs of 2-CNF formulas and the canonical satisfying
//! assignment obtained by peeling sink components.

use super::{CnfFormula, FormulaError, Literal, SubSatInstance};
use crate::f2::{AffineForm, AffineSubspace, BitVec};

/// Node `2v` is `¬x_v`, node `2v + 1` is `x_v`; complement is `node ^ 1`.
#[inline]
fn node(l: Literal) -> usize {
    2 * l.var + usize::from(!l.negated)
}

#[inline]
fn literal(node: usize) -> Literal {
    Literal::new(node / 2, node.is_multiple_of(2))
}

/// The implication graph on the `2n` literals of a 2-CNF formula with its
/// strongly connected components.
///
/// A clause `u ∨ u'` contributes `¬u → u'` and `¬u' → u`; a unit clause
/// `(u)` contributes `¬u → u`.
#[derive(Clone, Debug)]
pub struct ImplicationGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    /// Component of each node. Components are numbered in reverse
    /// topological order: every edge goes from a higher id to a lower or
    /// equal one.
    comp: Vec<usize>,
    num_comps: usize,
    has_empty_clause: bool,
}

impl ImplicationGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn successors(&self, l: Literal) -> impl Iterator<Item = Literal> + '_ {
        self.adj[node(l)].iter().map(|&v| literal(v))
    }

    pub fn has_edge(&self, from: Literal, to: Literal) -> bool {
        self.adj[node(from)].binary_search(&node(to)).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Literal, Literal)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, vs)| vs.iter().map(move |&v| (literal(u), literal(v))))
    }

    pub fn component(&self, l: Literal) -> usize {
        self.comp[node(l)]
    }

    pub fn num_components(&self) -> usize {
        self.num_comps
    }

    /// Edge `u → v` present iff `¬v → ¬u` present.
    pub fn is_skew_symmetric(&self) -> bool {
        self.edges().all(|(u, v)| self.has_edge(v.complement(), u.complement()))
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.has_empty_clause && (0..self.n).all(|v| self.comp[2 * v] != self.comp[2 * v + 1])
    }
}

pub fn implication_graph(phi: &CnfFormula) -> Result<ImplicationGraph, FormulaError> {
    phi.check_width(2)?;
    let n = phi.n();
    let mut adj = vec![Vec::new(); 2 * n];
    let mut has_empty_clause = false;
    for c in phi.clauses() {
        match c.literals() {
            [] => has_empty_clause = true,
            [u] => adj[node(u.complement())].push(node(*u)),
            [u, v] => {
                adj[node(u.complement())].push(node(*v));
                adj[node(v.complement())].push(node(*u));
            }
            _ => unreachable!("width checked"),
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let (comp, num_comps) = tarjan(&adj);
    Ok(ImplicationGraph {
        n,
        adj,
        comp,
        num_comps,
        has_empty_clause,
    })
}

/// Iterative Tarjan SCC. Component ids are assigned in completion order,
/// so sink components come first.
fn tarjan(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    const UNSEEN: usize = usize::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut num_comps = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = num_comps;
                    if w == v {
                        break;
                    }
                }
                num_comps += 1;
            }
        }
    }
    (comp, num_comps)
}

/// A satisfying assignment built by repeatedly setting every sink literal
/// of the condensed implication graph to true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalAssignment {
    pub assignment: BitVec,
    /// `layers[j]` holds the literals whose component has height `j` in the
    /// condensation, i.e. lies in the set of sinks after removing layers
    /// `0..j`.
    pub layers: Vec<Vec<Literal>>,
    /// Least layer containing the variable or its complement.
    pub depth: Vec<usize>,
}

/// Computes the canonical assignment of a 2-CNF formula.
///
/// Each round collects the current sink components, visits them by their
/// smallest literal (so `¬x_v` before `x_v`), sets their literals true and
/// removes both the component and its complement. A variable that occurs
/// in no clause therefore ends up 0.
pub fn canonical_assignment(phi: &CnfFormula) -> Result<CanonicalAssignment, FormulaError> {
    let g = implication_graph(phi)?;
    if !g.is_satisfiable() {
        return Err(FormulaError::Unsatisfiable);
    }
    let n = g.n;
    let nc = g.num_comps;
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (v, &c) in g.comp.iter().enumerate() {
        members[c].push(v);
    }
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); nc];
    let mut pred: Vec<Vec<usize>> = vec![Vec::new(); nc];
    for (u, vs) in g.adj.iter().enumerate() {
        for &v in vs {
            let (cu, cv) = (g.comp[u], g.comp[v]);
            if cu != cv {
                succ[cu].push(cv);
                pred[cv].push(cu);
            }
        }
    }
    for list in succ.iter_mut().chain(pred.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    let complement: Vec<usize> = (0..nc).map(|c| g.comp[members[c][0] ^ 1]).collect();

    // Height from the sinks; successors always carry smaller ids.
    let mut height = vec![0usize; nc];
    for c in 0..nc {
        height[c] = succ[c].iter().map(|&s| height[s] + 1).max().unwrap_or(0);
    }
    let max_height = height.iter().copied().max().unwrap_or(0);
    let mut layers: Vec<Vec<Literal>> = vec![Vec::new(); if nc == 0 { 0 } else { max_height + 1 }];
    for v in 0..2 * n {
        layers[height[g.comp[v]]].push(literal(v));
    }
    let depth = (0..n)
        .map(|v| height[g.comp[2 * v]].min(height[g.comp[2 * v + 1]]))
        .collect();

    let mut out_left: Vec<usize> = succ.iter().map(Vec::len).collect();
    let mut removed = vec![false; nc];
    let mut value: Vec<Option<bool>> = vec![None; n];
    let mut remaining = nc;
    while remaining > 0 {
        let mut sinks: Vec<usize> = (0..nc).filter(|&c| !removed[c] && out_left[c] == 0).collect();
        sinks.sort_by_key(|&c| members[c][0]);
        for c in sinks {
            if removed[c] {
                continue;
            }
            for &v in &members[c] {
                let l = literal(v);
                value[l.var] = Some(!l.negated);
            }
            for cc in [c, complement[c]] {
                removed[cc] = true;
                remaining -= 1;
                for &p in &pred[cc] {
                    out_left[p] -= 1;
                }
            }
        }
    }
    let assignment = BitVec::from_bools(value.into_iter().map(|v| v.expect("every variable assigned")));
    if !phi.eval(&assignment) {
        return Err(FormulaError::Unsatisfiable);
    }
    Ok(CanonicalAssignment {
        assignment,
        layers,
        depth,
    })
}

/// A 2-CNF instance with every strongly connected component of its
/// implication graph merged into one variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contracted {
    pub instance: SubSatInstance,
    /// `(j, flip)` per original variable: `x_v = y_j + flip`.
    pub representative: Vec<(usize, bool)>,
}

impl Contracted {
    pub fn extend(&self, y: &BitVec) -> BitVec {
        BitVec::from_bools(self.representative.iter().map(|&(j, flip)| y.get(j) != flip))
    }
}

/// Substitutes, in both the formula and the defining equations, each
/// variable by the least-indexed variable of its component (possibly
/// negated). Solutions correspond one to one.
pub fn contract_equivalences(inst: &SubSatInstance) -> Result<Contracted, FormulaError> {
    let g = implication_graph(inst.phi())?;
    if !g.is_satisfiable() {
        return Err(FormulaError::Unsatisfiable);
    }
    let n = g.n;
    // Smallest node of each component; nodes are visited in increasing order.
    let mut leader = vec![usize::MAX; g.num_comps];
    for v in 0..2 * n {
        let c = g.comp[v];
        if leader[c] == usize::MAX {
            leader[c] = v;
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut next = 0;
    let mut representative = Vec::with_capacity(n);
    for v in 0..n {
        // The positive literal's component or its mirror holds the leader.
        let (a, b) = (leader[g.comp[2 * v + 1]], leader[g.comp[2 * v]]);
        let lead = a.min(b);
        let var = lead / 2;
        if index[var] == usize::MAX {
            index[var] = next;
            next += 1;
        }
        // x_v equals the leader literal when x_v shares its component.
        let same = a == lead;
        let leader_negated = lead % 2 == 0;
        representative.push((index[var], same == leader_negated));
    }
    let map = |l: &Literal| {
        let (j, flip) = representative[l.var];
        Literal::new(j, l.negated != flip)
    };
    let clauses = inst
        .phi()
        .clauses()
        .iter()
        .map(|c| c.literals().iter().map(map).collect())
        .collect();
    let phi = CnfFormula::new(next, clauses)?;
    let space = match inst.space() {
        None => None,
        Some(a) => {
            let rows = a
                .rows()
                .iter()
                .map(|row| {
                    let mut f = AffineForm::constant(next, row.constant_term());
                    for v in row.support() {
                        let (j, flip) = representative[v];
                        f.add_assign(&AffineForm::from_vars(next, [j], flip));
                    }
                    f
                })
                .collect();
            AffineSubspace::from_equations(next, rows)?
        }
    };
    Ok(Contracted {
        instance: SubSatInstance::new(phi, space)?,
        representative,
    })
}
