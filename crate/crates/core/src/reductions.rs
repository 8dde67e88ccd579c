//! Hardness-reduction instance builders.
//!
//! Four constructions map a source problem to Anchored k-Core:
//!
//! * [`reduce_clique_subdivision`]: Clique, every edge subdivided,
//!   `k = ℓ-1`, `b = C(ℓ,2)`, `p = ℓ + C(ℓ,2)`.
//! * [`reduce_clique_copies`]: Clique, `ℓ(ℓ-1)` copies of the vertex set
//!   joined by degree-2 "green" vertices and threaded by cycles, `k = 3`,
//!   `b = C(ℓ,2)`, `p = 3b`.
//! * [`reduce_sat_k3`]: restricted planar 3-SAT, `k = 3`, gadgets T and W.
//! * [`reduce_sat_k4plus`]: restricted planar 3-SAT, `k >= 4`, stars of
//!   leaves hung off variable and clause vertices.
//!
//! Each reduced instance keeps a [`Layout`] with the ids of its named parts
//! so witnesses can be carried across in both directions, and every vertex
//! carries a label (`r:i`, `y:i`, `green:i:j:r:s`, ...; indices 1-based).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::cnf::{CnfError, CnfFormula, Literal};
use crate::engagement::{verify_solution, AkcInstance, Solution, VertexSet, Violation};
use crate::graph::{Graph, GraphBuilder, GraphError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("clique size {ell} unsupported (need 4 <= ell <= |V| = {vertices})")]
    UnsupportedEll { ell: usize, vertices: usize },
    #[error("threshold k = {k} unsupported (need k >= 4)")]
    UnsupportedK { k: usize },
    #[error("gadget size n = {n} unsupported (need n >= 1)")]
    UnsupportedGadgetSize { n: usize },
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("witness rejected: {0}")]
    InvalidWitness(String),
    #[error("solution does not solve the reduced instance: {0}")]
    InvalidSolution(Violation),
    #[error("extraction invariant broken: {0}")]
    ExtractionFailed(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueInstance {
    pub graph: Graph,
    pub ell: usize,
}

impl CliqueInstance {
    pub fn new(graph: Graph, ell: usize) -> Self {
        Self { graph, ell }
    }

    pub fn is_clique(&self, vertices: &[VertexId]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            u < self.graph.vertex_count() && vertices[i + 1..].iter().all(|&v| self.graph.has_edge(u, v))
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    CliqueSubdivision,
    CliqueCopies,
    SatK3,
    SatK4Plus,
}

impl ReductionKind {
    pub fn name(self) -> &'static str {
        match self {
            ReductionKind::CliqueSubdivision => "clique-subdivision",
            ReductionKind::CliqueCopies => "clique-copies",
            ReductionKind::SatK3 => "sat-k3",
            ReductionKind::SatK4Plus => "sat-k4plus",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Self::CliqueSubdivision, Self::CliqueCopies, Self::SatK3, Self::SatK4Plus]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

impl fmt::Display for ReductionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Clique(CliqueInstance),
    Formula(CnfFormula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Clique(Vec<VertexId>),
    Assignment(Vec<bool>),
}

/// Ids of the named parts of a reduced graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Layout {
    CliqueSubdivision {
        /// Subdivision vertex of source edge `(u, v)`, `u < v`.
        edge_vertex: BTreeMap<(VertexId, VertexId), VertexId>,
    },
    CliqueCopies {
        source_vertices: usize,
        ell: usize,
        /// `copy_base[i][j] + r` is vertex `r` of copy `(i, j)`; unused on
        /// the diagonal.
        copy_base: Vec<Vec<VertexId>>,
        /// Green vertex between `(i, j, r)` and `(j, i, s)`, keyed
        /// `(i, j, r, s)` with `i < j`.
        green: BTreeMap<(usize, usize, VertexId, VertexId), VertexId>,
    },
    SatK3 {
        variables: VariableVertices,
        y: Vec<VertexId>,
        ybar: Vec<VertexId>,
        clause: Vec<VertexId>,
    },
    SatK4Plus {
        variables: VariableVertices,
        clause: Vec<VertexId>,
        /// Leaves below each variable's star, `(k-1)^2` per variable.
        z: Vec<Vec<VertexId>>,
        /// Leaves below each clause's star, `(k-1)^2` per clause.
        w: Vec<Vec<VertexId>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableVertices {
    pub r: Vec<VertexId>,
    pub x: Vec<VertexId>,
    pub xbar: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedInstance {
    pub instance: AkcInstance,
    pub kind: ReductionKind,
    pub source: Source,
    pub layout: Layout,
}

impl ReducedInstance {
    /// `(vertex, label)` for every vertex of the reduced graph.
    pub fn source_map(&self) -> Vec<(VertexId, &str)> {
        let g = &self.instance.graph;
        g.vertices().map(|v| (v, g.label(v).unwrap_or(""))).collect()
    }

    /// Every anchor candidate that can matter for the clique-copies
    /// construction: its green vertices.
    pub fn green_vertices(&self) -> Option<VertexSet> {
        match &self.layout {
            Layout::CliqueCopies { green, .. } => Some(green.values().copied().collect()),
            _ => None,
        }
    }
}

fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

fn check_ell(src: &CliqueInstance) -> Result<(), ReductionError> {
    let vertices = src.graph.vertex_count();
    if src.ell < 4 || src.ell > vertices {
        return Err(ReductionError::UnsupportedEll { ell: src.ell, vertices });
    }
    Ok(())
}

/// Subdivides every edge of the source graph. Original vertices keep their
/// ids; subdivision vertices follow in edge order.
pub fn reduce_clique_subdivision(src: &CliqueInstance) -> Result<ReducedInstance, ReductionError> {
    check_ell(src)?;
    let g = &src.graph;
    let mut builder = GraphBuilder::new(g.vertex_count());
    for v in g.vertices() {
        builder.set_label(v, format!("v:{}", v + 1))?;
    }
    let mut edge_vertex = BTreeMap::new();
    for (u, v) in g.edges() {
        let w = builder.add_subdivided_edge(u, v, Some(format!("w:{}:{}", u + 1, v + 1)))?;
        edge_vertex.insert((u, v), w);
    }
    let ell = src.ell;
    let b = binom2(ell);
    let instance = AkcInstance::new(builder.build(), ell - 1, b, ell + b);
    Ok(ReducedInstance {
        instance,
        kind: ReductionKind::CliqueSubdivision,
        source: Source::Clique(src.clone()),
        layout: Layout::CliqueSubdivision { edge_vertex },
    })
}

/// Builds `ℓ(ℓ-1)` copies `G_ij` of the source vertex set. For every
/// unordered copy pair `{ij, ji}` and every ordered source edge `(r, s)` a
/// green vertex joins `v^r_ij` and `v^s_ji`. For every row `i` and source
/// vertex `r`, the copies `v^r_ij` (`j != i`) form a cycle of length `ℓ-1`.
#[allow(clippy::needless_range_loop)]
pub fn reduce_clique_copies(src: &CliqueInstance) -> Result<ReducedInstance, ReductionError> {
    check_ell(src)?;
    let g = &src.graph;
    let n = g.vertex_count();
    let ell = src.ell;
    let mut builder = GraphBuilder::new(0);
    let mut copy_base = vec![vec![usize::MAX; ell]; ell];
    for (i, row) in copy_base.iter_mut().enumerate() {
        for (j, base) in row.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            *base = builder.vertex_count();
            for r in 0..n {
                builder.add_vertex(Some(format!("v:{}:{}:{}", r + 1, i + 1, j + 1)));
            }
        }
    }
    let mut green = BTreeMap::new();
    for i in 0..ell {
        for j in i + 1..ell {
            for (a, c) in g.edges() {
                for (r, s) in [(a, c), (c, a)] {
                    let label = format!("green:{}:{}:{}:{}", i + 1, j + 1, r + 1, s + 1);
                    let x = builder.add_subdivided_edge(copy_base[i][j] + r, copy_base[j][i] + s, Some(label))?;
                    green.insert((i, j, r, s), x);
                }
            }
        }
    }
    for (i, row) in copy_base.iter().enumerate() {
        let ring: Vec<usize> = (0..ell).filter(|&j| j != i).collect();
        for r in 0..n {
            for (t, &j) in ring.iter().enumerate() {
                let next = ring[(t + 1) % ring.len()];
                builder.add_edge(row[j] + r, row[next] + r)?;
            }
        }
    }
    let b = binom2(ell);
    let instance = AkcInstance::new(builder.build(), 3, b, 3 * b);
    Ok(ReducedInstance {
        instance,
        kind: ReductionKind::CliqueCopies,
        source: Source::Clique(src.clone()),
        layout: Layout::CliqueCopies { source_vertices: n, ell, copy_base, green },
    })
}

/// Incidence graph of a restricted formula: `r_i - x_i`, `r_i - x̄_i`, and a
/// clause vertex `c_j` joined to each literal vertex it contains. Vertex ids:
/// `r_i = 3i`, `x_i = 3i+1`, `x̄_i = 3i+2`, `c_j = 3n+j`.
pub fn formula_graph(phi: &CnfFormula) -> Result<Graph, ReductionError> {
    let (builder, _, _) = formula_builder(phi)?;
    Ok(builder.build())
}

fn literal_vertex(vars: &VariableVertices, l: Literal) -> VertexId {
    if l.positive {
        vars.x[l.var]
    } else {
        vars.xbar[l.var]
    }
}

fn formula_builder(phi: &CnfFormula) -> Result<(GraphBuilder, VariableVertices, Vec<VertexId>), ReductionError> {
    phi.validate_restricted()?;
    let n = phi.num_vars();
    let mut builder = GraphBuilder::new(0);
    let mut vars = VariableVertices { r: Vec::new(), x: Vec::new(), xbar: Vec::new() };
    for i in 1..=n {
        let r = builder.add_vertex(Some(format!("r:{i}")));
        let x = builder.add_vertex(Some(format!("x:{i}")));
        let xbar = builder.add_vertex(Some(format!("xbar:{i}")));
        builder.add_edge(r, x)?;
        builder.add_edge(r, xbar)?;
        vars.r.push(r);
        vars.x.push(x);
        vars.xbar.push(xbar);
    }
    let mut clause = Vec::new();
    for (j, lits) in phi.clauses().iter().enumerate() {
        let c = builder.add_vertex(Some(format!("c:{}", j + 1)));
        for &l in lits {
            builder.add_edge(literal_vertex(&vars, l), c)?;
        }
        clause.push(c);
    }
    Ok((builder, vars, clause))
}

/// Gadget T on `2n+3` vertices: a triangular ladder `a_1 .. a_{2n+2}` (edges
/// `a_t a_{t+1}` and `a_t a_{t+2}`) plus an apex joined to both ends. The
/// apex (vertex 0, returned) is the only degree-2 vertex; everything else has
/// degree 3 or 4. The gadget is 2-degenerate, so on its own its 3-core is
/// empty, but one extra edge at the apex makes every degree at least 3.
pub fn gadget_t(n: usize) -> Result<(Graph, VertexId), ReductionError> {
    if n < 1 {
        return Err(ReductionError::UnsupportedGadgetSize { n });
    }
    let rungs = 2 * n + 2;
    let mut builder = GraphBuilder::new(rungs + 1);
    builder.set_label(0, "T:apex")?;
    for t in 1..=rungs {
        builder.set_label(t, format!("T:a{t}"))?;
        if t < rungs {
            builder.add_edge(t, t + 1)?;
        }
        if t + 2 <= rungs {
            builder.add_edge(t, t + 2)?;
        }
    }
    builder.add_edge(0, 1)?;
    builder.add_edge(0, rungs)?;
    Ok((builder.build(), 0))
}

/// Gadget W: a `K_4` with a pendant vertex (vertex 0, returned) hanging off
/// one of its corners.
pub fn gadget_w() -> (Graph, VertexId) {
    let mut builder = GraphBuilder::new(5);
    builder.set_label(0, "W:pendant").expect("in range");
    for v in 1..5 {
        builder.set_label(v, format!("W:q{v}")).expect("in range");
        for w in v + 1..5 {
            builder.add_edge(v, w).expect("K4 edge");
        }
    }
    builder.add_edge(0, 1).expect("pendant edge");
    (builder.build(), 0)
}

/// `k = 3`, `b = n`, `p = |V| - 2n`. Both spine edges of each variable are
/// subdivided (`y_i`, `ȳ_i`); a copy of T hangs at every `r_i` and `c_j`; a
/// copy of W hangs at every literal that occurs in exactly one clause.
pub fn reduce_sat_k3(phi: &CnfFormula) -> Result<ReducedInstance, ReductionError> {
    let (mut builder, vars, clause) = formula_builder(phi)?;
    let n = phi.num_vars();
    let mut y = Vec::with_capacity(n);
    let mut ybar = Vec::with_capacity(n);
    for i in 0..n {
        y.push(builder.subdivide(vars.r[i], vars.x[i], Some(format!("y:{}", i + 1)))?);
        ybar.push(builder.subdivide(vars.r[i], vars.xbar[i], Some(format!("ybar:{}", i + 1)))?);
    }
    let (t, t_root) = gadget_t(n)?;
    let (w, w_root) = gadget_w();
    for i in 0..n {
        builder.attach(&t, t_root, vars.r[i], |g, _| Some(format!("T:r{}:{g}", i + 1)))?;
        for (positive, host, name) in [(true, vars.x[i], "x"), (false, vars.xbar[i], "xbar")] {
            if phi.occurrences(Literal { var: i, positive }).len() == 1 {
                builder.attach(&w, w_root, host, |g, _| Some(format!("W:{name}{}:{g}", i + 1)))?;
            }
        }
    }
    for (j, &c) in clause.iter().enumerate() {
        builder.attach(&t, t_root, c, |g, _| Some(format!("T:c{}:{g}", j + 1)))?;
    }
    let graph = builder.build();
    let p = graph.vertex_count() - 2 * n;
    let instance = AkcInstance::new(graph, 3, n, p).planar(true);
    Ok(ReducedInstance {
        instance,
        kind: ReductionKind::SatK3,
        source: Source::Formula(phi.clone()),
        layout: Layout::SatK3 { variables: vars, y, ybar, clause },
    })
}

/// `k >= 4`. Each `r_i` and each `c_j` gets `k-1` new neighbors, each of
/// which gets `k-1` leaves. `b = n((k-1)^2+1) + m(k-1)^2`,
/// `p = b + nk + mk = |V| - n`.
pub fn reduce_sat_k4plus(phi: &CnfFormula, k: usize) -> Result<ReducedInstance, ReductionError> {
    if k < 4 {
        return Err(ReductionError::UnsupportedK { k });
    }
    let (mut builder, vars, clause) = formula_builder(phi)?;
    let n = phi.num_vars();
    let m = phi.num_clauses();
    let star = |builder: &mut GraphBuilder, center: VertexId, mid: &str, leaf: &str, owner: usize| {
        let mut leaves = Vec::with_capacity((k - 1) * (k - 1));
        for a in 1..k {
            let hub = builder.add_vertex(Some(format!("{mid}:{owner}:{a}")));
            builder.add_edge(center, hub).expect("fresh hub");
            for c in 1..k {
                let z = builder.add_vertex(Some(format!("{leaf}:{owner}:{a}.{c}")));
                builder.add_edge(hub, z).expect("fresh leaf");
                leaves.push(z);
            }
        }
        leaves
    };
    let z: Vec<Vec<VertexId>> = (0..n).map(|i| star(&mut builder, vars.r[i], "Y", "Z", i + 1)).collect();
    let w: Vec<Vec<VertexId>> = (0..m).map(|j| star(&mut builder, clause[j], "U", "Wc", j + 1)).collect();
    let graph = builder.build();
    let sq = (k - 1) * (k - 1);
    let b = n * (sq + 1) + m * sq;
    let p = b + n * k + m * k;
    debug_assert_eq!(p, graph.vertex_count() - n);
    let instance = AkcInstance::new(graph, k, b, p).planar(true);
    Ok(ReducedInstance {
        instance,
        kind: ReductionKind::SatK4Plus,
        source: Source::Formula(phi.clone()),
        layout: Layout::SatK4Plus { variables: vars, clause, z, w },
    })
}

fn clique_witness(src: &CliqueInstance, witness: &Witness) -> Result<Vec<VertexId>, ReductionError> {
    let Witness::Clique(vertices) = witness else {
        return Err(ReductionError::InvalidWitness("expected a clique".into()));
    };
    let mut sorted = vertices.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < src.ell || !src.is_clique(&sorted) {
        return Err(ReductionError::InvalidWitness(format!("{vertices:?} is not a clique of size {}", src.ell)));
    }
    sorted.truncate(src.ell);
    Ok(sorted)
}

fn assignment_witness<'a>(phi: &CnfFormula, witness: &'a Witness) -> Result<&'a [bool], ReductionError> {
    match witness {
        Witness::Assignment(a) if phi.is_satisfied_by(a) => Ok(a),
        Witness::Assignment(a) => Err(ReductionError::InvalidWitness(format!("{a:?} does not satisfy {phi}"))),
        Witness::Clique(_) => Err(ReductionError::InvalidWitness("expected an assignment".into())),
    }
}

/// Carries a source witness to a solution of the reduced instance, following
/// the constructive direction of each reduction.
#[allow(clippy::needless_range_loop)]
pub fn embed_witness(red: &ReducedInstance, witness: &Witness) -> Result<Solution, ReductionError> {
    let sol = match (&red.layout, &red.source) {
        (Layout::CliqueSubdivision { edge_vertex }, Source::Clique(src)) => {
            let clique = clique_witness(src, witness)?;
            let mut sol = Solution::new([], clique.iter().copied());
            for (a, &u) in clique.iter().enumerate() {
                for &v in &clique[a + 1..] {
                    let w = edge_vertex[&(u, v)];
                    sol.anchors.insert(w);
                    sol.core.insert(w);
                }
            }
            sol
        }
        (Layout::CliqueCopies { copy_base, green, ell, .. }, Source::Clique(src)) => {
            // row i picks the i-th smallest clique vertex in every copy (i, j)
            let clique = clique_witness(src, witness)?;
            let mut sol = Solution::default();
            for i in 0..*ell {
                for j in 0..*ell {
                    if i != j {
                        sol.core.insert(copy_base[i][j] + clique[i]);
                    }
                }
                for j in i + 1..*ell {
                    let g = green[&(i, j, clique[i], clique[j])];
                    sol.anchors.insert(g);
                    sol.core.insert(g);
                }
            }
            sol
        }
        (Layout::SatK3 { variables, y, ybar, .. }, Source::Formula(phi)) => {
            let assignment = assignment_witness(phi, witness)?;
            let mut dropped = VertexSet::new();
            let mut anchors = VertexSet::new();
            for (i, &value) in assignment.iter().enumerate() {
                if value {
                    anchors.insert(y[i]);
                    dropped.extend([variables.xbar[i], ybar[i]]);
                } else {
                    anchors.insert(ybar[i]);
                    dropped.extend([variables.x[i], y[i]]);
                }
            }
            let core = red.instance.graph.vertices().filter(|v| !dropped.contains(v)).collect();
            Solution { anchors, core }
        }
        (Layout::SatK4Plus { variables, z, w, .. }, Source::Formula(phi)) => {
            let assignment = assignment_witness(phi, witness)?;
            let mut dropped = VertexSet::new();
            let mut anchors: VertexSet = z.iter().chain(w).flatten().copied().collect();
            for (i, &value) in assignment.iter().enumerate() {
                let (keep, drop) =
                    if value { (variables.x[i], variables.xbar[i]) } else { (variables.xbar[i], variables.x[i]) };
                anchors.insert(keep);
                dropped.insert(drop);
            }
            let core = red.instance.graph.vertices().filter(|v| !dropped.contains(v)).collect();
            Solution { anchors, core }
        }
        _ => unreachable!("layout and source are built together"),
    };
    Ok(sol)
}

fn fail(msg: impl Into<String>) -> ReductionError {
    ReductionError::ExtractionFailed(msg.into())
}

/// Reads a source witness back out of any valid solution of the reduced
/// instance, checking the structural facts the reverse direction relies on.
/// Any failed check is reported as [`ReductionError::ExtractionFailed`].
pub fn extract_witness(red: &ReducedInstance, sol: &Solution) -> Result<Witness, ReductionError> {
    if let Some(v) = verify_solution(&red.instance, sol).violation {
        return Err(ReductionError::InvalidSolution(v));
    }
    let supercore = sol.supercore();
    match (&red.layout, &red.source) {
        (Layout::CliqueSubdivision { .. }, Source::Clique(src)) => {
            let n = src.graph.vertex_count();
            if let Some(v) = supercore.iter().find(|&&v| v >= n) {
                return Err(fail(format!("subdivision vertex {v} is in the supercore")));
            }
            if supercore.len() != src.ell {
                return Err(fail(format!("supercore has {} vertices, expected {}", supercore.len(), src.ell)));
            }
            let clique: Vec<_> = supercore.into_iter().collect();
            if !src.is_clique(&clique) {
                return Err(fail(format!("supercore {clique:?} is not a clique")));
            }
            Ok(Witness::Clique(clique))
        }
        (Layout::CliqueCopies { copy_base, green, ell, source_vertices }, Source::Clique(src)) => {
            let greens: VertexSet = green.values().copied().collect();
            if let Some(a) = sol.anchors.iter().find(|a| !greens.contains(a)) {
                return Err(fail(format!("anchor {a} is not a green vertex")));
            }
            let mut row_choice = vec![None; *ell];
            for i in 0..*ell {
                for j in (0..*ell).filter(|&j| j != i) {
                    let base = copy_base[i][j];
                    let picked: Vec<_> = supercore.range(base..base + source_vertices).map(|v| v - base).collect();
                    if picked.len() != 1 {
                        return Err(fail(format!("copy ({}, {}) holds {} supercore vertices", i + 1, j + 1, picked.len())));
                    }
                    match row_choice[i] {
                        None => row_choice[i] = Some(picked[0]),
                        Some(r) if r == picked[0] => {}
                        Some(_) => return Err(fail(format!("row {} picks different vertices", i + 1))),
                    }
                }
            }
            let mut clique: Vec<_> = row_choice.into_iter().map(|r| r.expect("ell >= 4 fills every row")).collect();
            clique.sort_unstable();
            clique.dedup();
            if clique.len() != *ell || !src.is_clique(&clique) {
                return Err(fail(format!("rows pick {clique:?}, not a clique of size {ell}")));
            }
            Ok(Witness::Clique(clique))
        }
        (Layout::SatK3 { y, .. }, Source::Formula(phi)) => {
            let assignment: Vec<bool> = y.iter().map(|v| sol.anchors.contains(v)).collect();
            if !phi.is_satisfied_by(&assignment) {
                return Err(fail(format!("assignment {assignment:?} read from y-anchors does not satisfy {phi}")));
            }
            Ok(Witness::Assignment(assignment))
        }
        (Layout::SatK4Plus { variables, .. }, Source::Formula(phi)) => {
            let assignment: Vec<bool> = variables.x.iter().map(|v| sol.anchors.contains(v)).collect();
            if !phi.is_satisfied_by(&assignment) {
                return Err(fail(format!("assignment {assignment:?} read from x-anchors does not satisfy {phi}")));
            }
            Ok(Witness::Assignment(assignment))
        }
        _ => unreachable!("layout and source are built together"),
    }
}

/// Rebuilds the reduction named by `kind` from its source.
pub fn reduce(kind: ReductionKind, source: &Source, k: Option<usize>) -> Result<ReducedInstance, ReductionError> {
    match (kind, source) {
        (ReductionKind::CliqueSubdivision, Source::Clique(c)) => reduce_clique_subdivision(c),
        (ReductionKind::CliqueCopies, Source::Clique(c)) => reduce_clique_copies(c),
        (ReductionKind::SatK3, Source::Formula(f)) => reduce_sat_k3(f),
        (ReductionKind::SatK4Plus, Source::Formula(f)) => reduce_sat_k4plus(f, k.unwrap_or(4)),
        _ => Err(ReductionError::InvalidWitness(format!("{kind} does not take this source"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::k_core;
    use crate::graph::named::*;

    fn two_clause() -> CnfFormula {
        CnfFormula::from_dimacs_clauses(2, &[&[1, 2], &[-1, -2]]).unwrap()
    }

    #[test]
    fn formula_graph_counts() {
        let g = formula_graph(&two_clause()).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (8, 8));
        assert_eq!(g.label(6), Some("c:1"));
        let bad = CnfFormula::from_dimacs_clauses(2, &[&[1, 2, -1, -2]]).unwrap();
        assert!(matches!(formula_graph(&bad), Err(ReductionError::Cnf(CnfError::ClauseTooLong { .. }))));
        let positive_only = CnfFormula::from_dimacs_clauses(1, &[&[1]]).unwrap();
        assert!(matches!(formula_graph(&positive_only), Err(ReductionError::Cnf(CnfError::MissingPolarity { .. }))));
    }

    #[test]
    fn gadget_t_shape() {
        let (t, apex) = gadget_t(1).unwrap();
        assert_eq!(t.degree_sequence(), vec![2, 3, 3, 3, 3]);
        assert_eq!(apex, 0);
        assert!(k_core(&t, 3).is_empty());
        for n in 1..=6 {
            let (t, apex) = gadget_t(n).unwrap();
            assert_eq!(t.vertex_count(), 2 * n + 3);
            assert_eq!(t.vertices().filter(|&v| t.degree(v) == 2).collect::<Vec<_>>(), vec![apex]);
            assert!(t.max_degree() <= 4);
            assert!(t.euler_planar_bound());
        }
        assert!(gadget_t(0).is_err());
    }

    #[test]
    fn gadget_w_shape() {
        let (w, pendant) = gadget_w();
        assert_eq!(w.degree_sequence(), vec![1, 4, 3, 3, 3]);
        assert_eq!(pendant, 0);
        assert_eq!(k_core(&w, 3), (1..5).collect());
    }

    #[test]
    fn subdivision_k4() {
        let red = reduce_clique_subdivision(&CliqueInstance::new(complete(4), 4)).unwrap();
        let i = &red.instance;
        assert_eq!((i.graph.vertex_count(), i.k, i.b, i.p), (10, 3, 6, 10));
        let sol = embed_witness(&red, &Witness::Clique(vec![0, 1, 2, 3])).unwrap();
        assert_eq!(sol.core.len(), 10);
        assert_eq!(sol.anchors.len(), 6);
        assert!(verify_solution(i, &sol).is_valid());
        assert_eq!(extract_witness(&red, &sol).unwrap(), Witness::Clique(vec![0, 1, 2, 3]));
        assert!(matches!(
            reduce_clique_subdivision(&CliqueInstance::new(complete(4), 3)),
            Err(ReductionError::UnsupportedEll { ell: 3, .. })
        ));
    }

    #[test]
    fn copies_k4() {
        let red = reduce_clique_copies(&CliqueInstance::new(complete(4), 4)).unwrap();
        let i = &red.instance;
        // 12 copies of 4 vertices, 6 copy pairs x 12 ordered edges
        assert_eq!(i.graph.vertex_count(), 48 + 72);
        assert_eq!((i.k, i.b, i.p), (3, 6, 18));
        let greens = red.green_vertices().unwrap();
        assert!(greens.iter().all(|&g| i.graph.degree(g) == 2));
        let sol = embed_witness(&red, &Witness::Clique(vec![3, 2, 1, 0])).unwrap();
        assert_eq!(sol.core.len(), 18);
        assert!(verify_solution(i, &sol).is_valid());
        assert_eq!(extract_witness(&red, &sol).unwrap(), Witness::Clique(vec![0, 1, 2, 3]));
        assert!(reduce_clique_copies(&CliqueInstance::new(complete(5), 3)).is_err());
    }

    #[test]
    fn sat_k3_counts() {
        let phi = CnfFormula::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let red = reduce_sat_k3(&phi).unwrap();
        let i = &red.instance;
        assert_eq!((i.graph.vertex_count(), i.k, i.b, i.p), (27, 3, 1, 25));
        assert!(i.graph.euler_planar_bound());
        assert!(i.graph.labels().iter().all(|l| l.is_some()));

        let red = reduce_sat_k3(&two_clause()).unwrap();
        let sol = embed_witness(&red, &Witness::Assignment(vec![true, false])).unwrap();
        assert!(verify_solution(&red.instance, &sol).is_valid());
        assert_eq!(extract_witness(&red, &sol).unwrap(), Witness::Assignment(vec![true, false]));
        assert!(embed_witness(&red, &Witness::Assignment(vec![true, true])).is_err());
    }

    #[test]
    fn sat_k3_degree_five() {
        let phi = CnfFormula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1], &[-2], &[-3]]).unwrap();
        let red = reduce_sat_k3(&phi).unwrap();
        assert_eq!(red.instance.graph.max_degree(), 5);
    }

    #[test]
    fn sat_k4plus_counts() {
        let red = reduce_sat_k4plus(&two_clause(), 4).unwrap();
        let i = &red.instance;
        assert_eq!((i.graph.vertex_count(), i.b, i.p), (56, 38, 54));
        assert!(i.graph.max_degree() <= 6);
        let sol = embed_witness(&red, &Witness::Assignment(vec![false, true])).unwrap();
        assert!(verify_solution(i, &sol).is_valid());
        assert_eq!(extract_witness(&red, &sol).unwrap(), Witness::Assignment(vec![false, true]));
        let three = CnfFormula::from_dimacs_clauses(3, &[&[1, 2, 3], &[-1], &[-2], &[-3]]).unwrap();
        let red = reduce_sat_k4plus(&three, 5).unwrap();
        assert_eq!(red.instance.graph.degree(red.instance.graph.find_label("c:1").unwrap()), 7);
        assert!(matches!(reduce_sat_k4plus(&two_clause(), 3), Err(ReductionError::UnsupportedK { k: 3 })));
    }

    #[test]
    fn extraction_rejects_invalid_solutions() {
        let red = reduce_clique_subdivision(&CliqueInstance::new(complete(4), 4)).unwrap();
        assert!(matches!(
            extract_witness(&red, &Solution::default()),
            Err(ReductionError::InvalidSolution(Violation::CoreTooSmall { .. }))
        ));
    }
}
