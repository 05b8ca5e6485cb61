//! Instance generators for the hardness reductions and for planted benchmarks.

use rand::seq::index::sample;
use rand::Rng;
use thiserror::Error;

use crate::f2::{AffineForm, AffineSubspace, BitVec, Constrained, LinearSystem};
use crate::formula::{Clause, CnfFormula, FormulaError, Literal, PafInstance, SubSatInstance};
use crate::rng::SolverRng;

/// Largest dimension of `A` for which a planted instance can be required to
/// have a unique solution.
pub const UNIQUE_CAP: usize = 22;
/// Attempts before unique-solution rejection sampling gives up.
pub const UNIQUE_ATTEMPTS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("parts do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error("forms {0} and {1} are equal")]
    DuplicateForm(usize, usize),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("unique solution requested for dimension {dim} above the cap {cap}")]
    UniqueAboveCap { dim: usize, cap: usize },
    #[error("no instance with a unique solution after {0} attempts")]
    UniqueNotFound(usize),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

/// A simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    /// Sorted, each edge stored once as `(u, v)` with `u < v`.
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Repeated edges in either orientation are merged.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ReductionError> {
        let mut out = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(ReductionError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(ReductionError::SelfLoop(u));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self { n, edges }
    }

    pub fn cycle(n: usize) -> Self {
        Self::new(n, (0..n).map(|u| (u, (u + 1) % n))).expect("cycle on at least three vertices")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    /// Number of proper colorings with `q` colors, by enumeration.
    pub fn count_colorings(&self, q: usize) -> u64 {
        let mut color = vec![0usize; self.n];
        let mut count = 0;
        loop {
            if self.edges.iter().all(|&(u, v)| color[u] != color[v]) {
                count += 1;
            }
            let mut i = 0;
            loop {
                if i == self.n {
                    return count;
                }
                color[i] += 1;
                if color[i] < q {
                    break;
                }
                color[i] = 0;
                i += 1;
            }
        }
    }
}

/// A graph with its vertex set split into parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionedGraph {
    graph: Graph,
    parts: Vec<Vec<usize>>,
}

impl PartitionedGraph {
    pub fn new(graph: Graph, mut parts: Vec<Vec<usize>>) -> Result<Self, ReductionError> {
        let mut seen = vec![false; graph.n()];
        for p in &mut parts {
            if p.is_empty() {
                return Err(ReductionError::NotAPartition("empty part".into()));
            }
            p.sort_unstable();
            for &v in p.iter() {
                if v >= graph.n() {
                    return Err(ReductionError::VertexOutOfRange {
                        vertex: v,
                        n: graph.n(),
                    });
                }
                if std::mem::replace(&mut seen[v], true) {
                    return Err(ReductionError::NotAPartition(format!("vertex {v} appears twice")));
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(ReductionError::NotAPartition(format!("vertex {v} is in no part")));
        }
        Ok(Self { graph, parts })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn parts(&self) -> &[Vec<usize>] {
        &self.parts
    }

    /// Cliques with exactly one vertex per part, by enumeration.
    pub fn multicolored_cliques(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut pick = Vec::with_capacity(self.parts.len());
        self.extend_clique(&mut pick, &mut out);
        out
    }

    fn extend_clique(&self, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(part) = self.parts.get(pick.len()) else {
            out.push(pick.clone());
            return;
        };
        for &v in part {
            if pick.iter().all(|&u| self.graph.has_edge(u, v)) {
                pick.push(v);
                self.extend_clique(pick, out);
                pick.pop();
            }
        }
    }
}

/// Two variables `(2v, 2v + 1)` per vertex holding a color in binary; one
/// equation `(x_{u,1} + x_{v,1} + 1)(x_{u,2} + x_{v,2} + 1) = 0` per edge.
pub fn four_coloring_to_2paf(g: &Graph) -> PafInstance {
    let n = 2 * g.n();
    let equations = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            (0..2)
                .map(|b| AffineForm::from_vars(n, [2 * u + b, 2 * v + b], true))
                .collect()
        })
        .collect();
    PafInstance::new(n, equations).expect("two factors per equation")
}

/// One variable per vertex. Clauses forbid two chosen vertices in one part
/// and two chosen non-adjacent vertices; each part contributes the
/// equation `Σ_{u ∈ part} x_u = 1`.
pub fn multicolored_clique_to_2subsat(pg: &PartitionedGraph) -> SubSatInstance {
    let g = pg.graph();
    let n = g.n();
    let mut part_of = vec![0; n];
    for (i, p) in pg.parts().iter().enumerate() {
        for &v in p {
            part_of[v] = i;
        }
    }
    let mut clauses = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if part_of[u] == part_of[v] || !g.has_edge(u, v) {
                clauses.push(vec![Literal::neg(u), Literal::neg(v)]);
            }
        }
    }
    let phi = CnfFormula::new(n, clauses).expect("vertices are in range");
    let rows = pg
        .parts()
        .iter()
        .map(|p| AffineForm::from_vars(n, p.iter().copied(), true))
        .collect();
    let system = LinearSystem::from_rows(n, rows).expect("rows built over n variables");
    SubSatInstance::from_system(phi, &system).expect("dimensions agree")
}

/// `OXR(l1, l2, l3) = l1 ∨ (l2 ⊕ l3)` as `(l1 + 1)(l2 + l3 + 1) = 0`, with
/// literals read as affine forms.
pub fn oxr_to_2paf(n: usize, triples: &[[Literal; 3]]) -> Result<PafInstance, ReductionError> {
    let mut equations = Vec::with_capacity(triples.len());
    for t in triples {
        if let Some(l) = t.iter().find(|l| l.var >= n) {
            return Err(FormulaError::VarOutOfRange { var: l.var, n }.into());
        }
        let first = t[0].complement().as_form(n);
        let second = t[1].as_form(n).add(&t[2].as_form(n)).complement();
        equations.push(vec![first, second]);
    }
    Ok(PafInstance::new(n, equations)?)
}

/// `OXR` evaluated directly.
pub fn oxr_holds(t: &[Literal; 3], x: &BitVec) -> bool {
    t[0].eval(x) || (t[1].eval(x) != t[2].eval(x))
}

/// All pairwise products `A_i · A_j = 0`, `i < j`, of the linear equations
/// `A_i = 0`. A point violating `r` input equations violates exactly
/// `r(r−1)/2` output equations.
pub fn maxlin2_to_e2paf(n: usize, forms: &[AffineForm]) -> Result<PafInstance, ReductionError> {
    for (i, f) in forms.iter().enumerate() {
        if f.n() != n {
            return Err(FormulaError::DimensionMismatch {
                expected: n,
                found: f.n(),
            }
            .into());
        }
        if let Some(j) = forms[..i].iter().position(|g| g == f) {
            return Err(ReductionError::DuplicateForm(j, i));
        }
    }
    let mut equations = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            equations.push(vec![forms[i].clone(), forms[j].clone()]);
        }
    }
    Ok(PafInstance::new(n, equations)?)
}

/// An instance generated around a hidden solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    pub instance: SubSatInstance,
    pub planted: BitVec,
}

/// Draws a point `ā`, `t` independent random equations holding at `ā`, and
/// `m` random clauses over `k` distinct variables; a clause falsified by
/// `ā` has one uniformly chosen literal flipped.
///
/// With `unique`, whole instances are redrawn until `ā` is the only
/// solution (requires `n − t ≤ UNIQUE_CAP`).
pub fn planted_instance(
    n: usize,
    k: usize,
    m: usize,
    t: usize,
    rng: &mut SolverRng,
    unique: bool,
) -> Result<Planted, ReductionError> {
    if t > n || k > n || (k == 0 && m > 0) {
        return Err(ReductionError::InvalidParameters(format!("n={n} k={k} m={m} t={t}")));
    }
    if unique && n - t > UNIQUE_CAP {
        return Err(ReductionError::UniqueAboveCap {
            dim: n - t,
            cap: UNIQUE_CAP,
        });
    }
    for _ in 0..UNIQUE_ATTEMPTS {
        let p = draw_planted(n, k, m, t, rng);
        if !unique || count_solutions_up_to(&p.instance, 2) == 1 {
            return Ok(p);
        }
    }
    Err(ReductionError::UniqueNotFound(UNIQUE_ATTEMPTS))
}

fn draw_planted(n: usize, k: usize, m: usize, t: usize, rng: &mut SolverRng) -> Planted {
    let planted = BitVec::from_bools((0..n).map(|_| rng.gen::<bool>()));
    let mut space = AffineSubspace::full(n);
    while space.codim() < t {
        let coeffs = BitVec::from_bools((0..n).map(|_| rng.gen::<bool>()));
        let constant = coeffs.dot(&planted);
        if space
            .constrain(&AffineForm::new(coeffs, constant))
            .expect("row over n variables")
            == Constrained::Inconsistent
        {
            unreachable!("every row holds at the planted point");
        }
    }
    let clauses = (0..m)
        .map(|_| {
            let mut lits: Vec<Literal> = sample(rng, n, k)
                .into_iter()
                .map(|v| Literal::new(v, rng.gen()))
                .collect();
            if !lits.iter().any(|l| l.eval(&planted)) {
                let i = rng.gen_range(0..k);
                lits[i] = lits[i].complement();
            }
            Clause::new(lits).expect("distinct variables")
        })
        .collect();
    let phi = CnfFormula::from_clauses(n, clauses).expect("variables in range");
    Planted {
        instance: SubSatInstance::with_space(phi, space).expect("dimensions agree"),
        planted,
    }
}

/// A planted system of product equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedPaf {
    pub paf: PafInstance,
    pub planted: BitVec,
}

/// `m` equations, each a product of `degree` uniformly random affine forms;
/// when no factor vanishes at the planted point, the constant of one
/// uniformly chosen factor is flipped.
pub fn planted_paf(n: usize, m: usize, degree: usize, rng: &mut SolverRng) -> Result<PlantedPaf, ReductionError> {
    if degree == 0 {
        return Err(ReductionError::InvalidParameters("degree 0".into()));
    }
    let planted = BitVec::from_bools((0..n).map(|_| rng.gen::<bool>()));
    let equations = (0..m)
        .map(|_| {
            let mut factors: Vec<AffineForm> = (0..degree)
                .map(|_| AffineForm::new(BitVec::from_bools((0..n).map(|_| rng.gen::<bool>())), rng.gen()))
                .collect();
            if factors.iter().all(|f| f.eval(&planted)) {
                let i = rng.gen_range(0..degree);
                factors[i] = factors[i].complement();
            }
            factors
        })
        .collect();
    Ok(PlantedPaf {
        paf: PafInstance::new(n, equations)?,
        planted,
    })
}

/// Number of solutions, counting stops at `limit`.
pub fn count_solutions_up_to(inst: &SubSatInstance, limit: usize) -> usize {
    let Some(space) = inst.space() else { return 0 };
    space
        .enumerate(UNIQUE_CAP.max(space.dim()))
        .expect("cap covers the dimension")
        .filter(|x| inst.phi().eval(x))
        .take(limit)
        .count()
}
