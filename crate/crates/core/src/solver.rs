//! Exact Anchored k-Core search.
//!
//! Both strategies walk anchor sets in lexicographic order of their sorted
//! members and keep the first set reaching the largest closure, so the
//! reported anchors are the lexicographically smallest optimal set no matter
//! how the work is split across threads.
//!
//! Anchors are only drawn from [`candidate_anchor_pool`]: anchoring a k-core
//! vertex never changes the closure, because the closure already contains the
//! whole k-core.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::engagement::{k_core, AkcInstance, Peeler, Solution, VertexSet};
use crate::graph::{Graph, GraphError, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    Exhaustive,
    #[default]
    BranchBound,
}

/// `Maximize` proves the optimum; `Decide` stops at the first solution of
/// size at least the target and prunes every branch that cannot reach it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Objective {
    #[default]
    Maximize,
    Decide,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub strategy: Strategy,
    pub objective: Objective,
    /// `(p_low, q_high)`: decide `|H| >= p_low`; `q_high` is checked as a
    /// certificate on the returned solution.
    pub size_window: Option<(usize, usize)>,
    pub time_limit: Option<Duration>,
    pub candidate_pool_override: Option<VertexSet>,
}

impl SolveOptions {
    pub fn exhaustive() -> Self {
        Self { strategy: Strategy::Exhaustive, ..Self::default() }
    }

    pub fn branch_bound() -> Self {
        Self { strategy: Strategy::BranchBound, ..Self::default() }
    }

    pub fn decide(mut self) -> Self {
        self.objective = Objective::Decide;
        self
    }

    pub fn with_pool(mut self, pool: VertexSet) -> Self {
        self.candidate_pool_override = Some(pool);
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
    /// Search hit its time limit before settling the question.
    Unknown,
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub best: Solution,
    pub optimum_size: usize,
    pub decision: Decision,
    /// True when `optimum_size` is the proven maximum.
    pub proven_optimal: bool,
    pub nodes_explored: u64,
    pub prefilter_fired: bool,
    pub timed_out: bool,
    pub wall_time: Duration,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("k = {k} is unsupported here (needs k >= 7)")]
    UnsupportedK { k: usize },
    #[error("graph has {edges} edges on {vertices} vertices, beyond the planar edge bound")]
    EulerBoundFailed { vertices: usize, edges: usize },
    #[error("{high_degree} of {vertices} vertices have degree >= {k}; a planar graph keeps this below 6/7")]
    DegreeRatioViolated { high_degree: usize, vertices: usize, k: usize },
    #[error("solution with |H| = {core} and |B| = {anchors} breaks the planar bound |H| <= 7|B|")]
    PlanarCertificateViolated { core: usize, anchors: usize },
    #[error("size window ({low}, {high}) is empty")]
    EmptyWindow { low: usize, high: usize },
}

/// Vertices outside the k-core: the only anchors that can change a closure.
pub fn candidate_anchor_pool(graph: &Graph, k: usize) -> VertexSet {
    let core = k_core(graph, k);
    graph.vertices().filter(|v| !core.contains(v)).collect()
}

pub fn solve(inst: &AkcInstance, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    match opts.strategy {
        Strategy::Exhaustive => solve_exhaustive(inst, opts),
        Strategy::BranchBound => solve_branch_bound(inst, opts),
    }
}

/// Tries every anchor set of size at most `b` drawn from the candidate pool
/// and keeps the largest closure.
pub fn solve_exhaustive(inst: &AkcInstance, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    run(inst, opts, exhaustive_search)
}

/// Depth-first include/exclude search over the candidate pool with closure
/// bounds; returns the same optimum and anchors as [`solve_exhaustive`].
pub fn solve_branch_bound(inst: &AkcInstance, opts: &SolveOptions) -> Result<SolveReport, SolveError> {
    run(inst, opts, branch_bound_search)
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Best {
    size: usize,
    anchors: Vec<VertexId>,
}

impl Best {
    /// Larger closure wins, then the lexicographically smaller anchor list.
    fn better(a: Best, b: Best) -> Best {
        match a.size.cmp(&b.size) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if a.anchors <= b.anchors {
                    a
                } else {
                    b
                }
            }
        }
    }
}

struct SearchInput<'a> {
    graph: &'a Graph,
    k: usize,
    pool: Vec<VertexId>,
    budget: usize,
    target: usize,
    objective: Objective,
    deadline: Option<Instant>,
}

struct SearchOutput {
    best: Best,
    nodes: u64,
    timed_out: bool,
}

/// Shared, monotone search state.
struct Shared {
    best_size: AtomicUsize,
    stop: AtomicBool,
    timed_out: AtomicBool,
    nodes: AtomicU64,
}

impl Shared {
    fn new(initial: usize) -> Self {
        Self {
            best_size: AtomicUsize::new(initial),
            stop: AtomicBool::new(false),
            timed_out: AtomicBool::new(false),
            nodes: AtomicU64::new(0),
        }
    }

    fn offer(&self, size: usize, input: &SearchInput) {
        self.best_size.fetch_max(size, Ordering::Relaxed);
        if input.objective == Objective::Decide && size >= input.target {
            self.stop.store(true, Ordering::Relaxed);
        }
    }

    fn should_stop(&self, input: &SearchInput, local_nodes: u64) -> bool {
        if self.stop.load(Ordering::Relaxed) {
            return true;
        }
        if local_nodes.is_multiple_of(256) {
            if let Some(deadline) = input.deadline {
                if Instant::now() >= deadline {
                    self.timed_out.store(true, Ordering::Relaxed);
                    self.stop.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }
}

fn run(
    inst: &AkcInstance,
    opts: &SolveOptions,
    search: fn(&SearchInput) -> SearchOutput,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let graph = &inst.graph;
    let n = graph.vertex_count();
    let mut notes = Vec::new();
    let target = match opts.size_window {
        Some((low, high)) if low > high => return Err(SolveError::EmptyWindow { low, high }),
        Some((low, _)) => low,
        None => inst.p,
    };

    let mut peeler = Peeler::new();
    let evaluate = |peeler: &mut Peeler, anchors: &[VertexId]| -> Solution {
        let mut mask = vec![false; n];
        for &a in anchors {
            mask[a] = true;
        }
        let mut alive = Vec::new();
        peeler.closure(graph, inst.k, &mask, &mut alive);
        Solution::new(anchors.iter().copied(), (0..n).filter(|&v| alive[v]))
    };

    let prefilter = planar_prefilter(inst);
    if target > n || matches!(prefilter, Prefilter::ImmediateNo { .. }) {
        let fired = matches!(prefilter, Prefilter::ImmediateNo { .. });
        if fired {
            notes.push(format!("planar prefilter: p = {target} exceeds 7b = {}", 7 * inst.b));
        } else {
            notes.push(format!("target {target} exceeds |V| = {n}"));
        }
        let best = evaluate(&mut peeler, &[]);
        return Ok(SolveReport {
            optimum_size: best.core.len(),
            best,
            decision: Decision::No,
            proven_optimal: false,
            nodes_explored: 0,
            prefilter_fired: fired,
            timed_out: false,
            wall_time: start.elapsed(),
            notes,
        });
    }

    let pool: Vec<VertexId> = match &opts.candidate_pool_override {
        Some(pool) => {
            for &v in pool {
                graph.check_vertex(v)?;
            }
            pool.iter().copied().collect()
        }
        None => candidate_anchor_pool(graph, inst.k).into_iter().collect(),
    };
    let budget = inst.b.min(pool.len());
    if budget < inst.b {
        notes.push(format!("budget {} clamped to candidate pool size {}", inst.b, pool.len()));
    }

    let input = SearchInput {
        graph,
        k: inst.k,
        pool,
        budget,
        target,
        objective: opts.objective,
        deadline: opts.time_limit.map(|t| start + t),
    };
    let out = search(&input);
    let best = evaluate(&mut peeler, &out.best.anchors);
    debug_assert_eq!(best.core.len(), out.best.size);

    if let Prefilter::SizeCap { cap } = prefilter {
        if best.core.len() > 7 * best.anchors.len() || best.core.len() > cap {
            return Err(SolveError::PlanarCertificateViolated {
                core: best.core.len(),
                anchors: best.anchors.len(),
            });
        }
    }
    if let Some((_, high)) = opts.size_window {
        if best.core.len() > high {
            notes.push(format!("best |H| = {} lies above the window bound {high}", best.core.len()));
        }
    }

    let size = best.core.len();
    let decision = if size >= target {
        Decision::Yes
    } else if out.timed_out {
        Decision::Unknown
    } else {
        Decision::No
    };
    Ok(SolveReport {
        optimum_size: size,
        best,
        decision,
        proven_optimal: !out.timed_out && opts.objective == Objective::Maximize,
        nodes_explored: out.nodes,
        prefilter_fired: false,
        timed_out: out.timed_out,
        wall_time: start.elapsed(),
        notes,
    })
}

fn exhaustive_search(input: &SearchInput) -> SearchOutput {
    let n = input.graph.vertex_count();
    let mut peeler = Peeler::new();
    let mut alive = Vec::new();
    let empty = vec![false; n];
    let root = Best { size: peeler.closure(input.graph, input.k, &empty, &mut alive), anchors: Vec::new() };
    let shared = Shared::new(root.size);
    shared.offer(root.size, input);
    shared.nodes.fetch_add(1, Ordering::Relaxed);

    let best = if input.budget == 0 || shared.stop.load(Ordering::Relaxed) {
        root
    } else {
        (0..input.pool.len())
            .into_par_iter()
            .map(|first| {
                let mut walker = Walker {
                    input,
                    shared: &shared,
                    peeler: Peeler::new(),
                    mask: vec![false; n],
                    alive: Vec::new(),
                    chosen: Vec::with_capacity(input.budget),
                    best: None,
                    nodes: 0,
                };
                walker.enumerate(first);
                shared.nodes.fetch_add(walker.nodes, Ordering::Relaxed);
                walker.best
            })
            .flatten()
            .reduce(|| root.clone(), Best::better)
    };
    SearchOutput {
        best,
        nodes: shared.nodes.load(Ordering::Relaxed),
        timed_out: shared.timed_out.load(Ordering::Relaxed),
    }
}

struct Walker<'a> {
    input: &'a SearchInput<'a>,
    shared: &'a Shared,
    peeler: Peeler,
    mask: Vec<bool>,
    alive: Vec<bool>,
    chosen: Vec<VertexId>,
    best: Option<Best>,
    nodes: u64,
}

impl Walker<'_> {
    /// Visits `chosen + pool[index]` and every extension by later pool members.
    fn enumerate(&mut self, index: usize) {
        self.nodes += 1;
        if self.shared.should_stop(self.input, self.nodes) {
            return;
        }
        let v = self.input.pool[index];
        self.chosen.push(v);
        self.mask[v] = true;
        let size = self.peeler.closure(self.input.graph, self.input.k, &self.mask, &mut self.alive);
        if self.best.as_ref().is_none_or(|b| size > b.size) {
            self.best = Some(Best { size, anchors: self.chosen.clone() });
            self.shared.offer(size, self.input);
        }
        if self.chosen.len() < self.input.budget {
            for next in index + 1..self.input.pool.len() {
                self.enumerate(next);
            }
        }
        self.mask[v] = false;
        self.chosen.pop();
    }
}

fn branch_bound_search(input: &SearchInput) -> SearchOutput {
    let n = input.graph.vertex_count();
    let mut peeler = Peeler::new();
    let mut alive = Vec::new();
    let mut mask = vec![false; n];
    let root_size = peeler.closure(input.graph, input.k, &mask, &mut alive);
    let root = Best { size: root_size, anchors: Vec::new() };
    let shared = Shared::new(root_size);
    shared.offer(root_size, input);
    shared.nodes.fetch_add(1, Ordering::Relaxed);
    if input.budget == 0 || shared.stop.load(Ordering::Relaxed) {
        return SearchOutput { best: root, nodes: 1, timed_out: false };
    }

    for &v in &input.pool {
        mask[v] = true;
    }
    let mut upper = Vec::new();
    let upper_size = peeler.closure(input.graph, input.k, &mask, &mut upper);
    let mut state = BbState { input, shared: &shared, peeler, mask, chosen: Vec::new(), nodes: 0 };
    let best = state.explore(0, input.budget, upper, upper_size, root);
    shared.nodes.fetch_add(state.nodes, Ordering::Relaxed);
    SearchOutput {
        best,
        nodes: shared.nodes.load(Ordering::Relaxed),
        timed_out: shared.timed_out.load(Ordering::Relaxed),
    }
}

/// Below this depth the include and exclude branches may run on different
/// threads.
const SPLIT_DEPTH: usize = 8;

struct BbState<'a> {
    input: &'a SearchInput<'a>,
    shared: &'a Shared,
    peeler: Peeler,
    /// Anchor mask for the current node: chosen anchors plus every undecided
    /// pool member.
    mask: Vec<bool>,
    chosen: Vec<VertexId>,
    nodes: u64,
}

impl<'a> BbState<'a> {
    fn fork(&self) -> Self {
        Self {
            input: self.input,
            shared: self.shared,
            peeler: Peeler::new(),
            mask: self.mask.clone(),
            chosen: self.chosen.clone(),
            nodes: 0,
        }
    }

    /// Node: `chosen` fixed from `pool[..index]`, `pool[index..]` undecided,
    /// `upper` = closure(chosen + pool[index..]). `best` holds the best value
    /// among nodes that precede this subtree in lexicographic order.
    fn explore(&mut self, index: usize, budget: usize, upper: Vec<bool>, upper_size: usize, best: Best) -> Best {
        let input = self.input;
        let pool = &input.pool;
        if index == pool.len() || budget == 0 {
            return best;
        }
        self.nodes += 1;
        if self.shared.should_stop(input, self.nodes) {
            return best;
        }

        // Undecided vertices that survive in `upper` only because they are
        // anchored there; at most `budget` of them can stay in any completion.
        let mut deficient = 0;
        let mut deficient_head = false;
        for (offset, &v) in pool[index..].iter().enumerate() {
            if upper[v] && self.upper_degree(&upper, v) < input.k {
                deficient += 1;
                deficient_head |= offset == 0;
            }
        }
        let bound = upper_size - deficient + deficient.min(budget);
        let global = self.shared.best_size.load(Ordering::Relaxed);
        if bound <= best.size || bound < global || (input.objective == Objective::Decide && bound < input.target) {
            return best;
        }

        let head = pool[index];

        // include `head`: the closure of chosen + head is bounded by `upper`
        // minus the deficient undecided vertices other than `head`
        let mut best = best;
        self.chosen.push(head);
        let cap = upper_size - deficient + usize::from(deficient_head);
        if cap > best.size {
            for &v in &pool[index + 1..] {
                self.mask[v] = false;
            }
            let mut own = upper.clone();
            let size = self.peeler.peel(input.graph, input.k, &self.mask, &mut own);
            for &v in &pool[index + 1..] {
                self.mask[v] = true;
            }
            if size > best.size {
                best = Best { size, anchors: self.chosen.clone() };
                self.shared.offer(size, input);
            }
        }

        let parallel = index < SPLIT_DEPTH && rayon::current_num_threads() > 1;
        if parallel {
            let mut include = self.fork();
            let mut exclude = self.fork();
            self.chosen.pop();
            exclude.chosen.pop();
            exclude.mask[head] = false;
            let upper_for_include = upper.clone();
            let mut after = upper;
            let after_size = exclude.peeler.peel(input.graph, input.k, &exclude.mask, &mut after);
            let before_split = best.clone();
            let (a, b) = rayon::join(
                || include.explore(index + 1, budget - 1, upper_for_include, upper_size, before_split),
                || exclude.explore(index + 1, budget, after, after_size, best),
            );
            self.nodes += include.nodes + exclude.nodes;
            return Best::better(a, b);
        }

        let best = self.explore(index + 1, budget - 1, upper.clone(), upper_size, best);
        self.chosen.pop();

        // exclude `head`
        self.mask[head] = false;
        let mut after = upper;
        let after_size = self.peeler.peel(input.graph, input.k, &self.mask, &mut after);
        let best = self.explore(index + 1, budget, after, after_size, best);
        self.mask[head] = true;
        best
    }

    fn upper_degree(&self, upper: &[bool], v: VertexId) -> usize {
        self.input.graph.neighbors(v).iter().filter(|&&w| upper[w]).count()
    }
}

/// Count of vertices with degree at least `k`, and its share of `|V|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeRatio {
    pub high_degree: usize,
    pub ratio: Ratio<usize>,
}

/// For a planar graph and `k >= 7`, fewer than six in seven vertices can have
/// degree `k` or more. Refuses graphs that fail the Euler edge bound and
/// reports a violation of the ratio as an error, since it disproves the
/// planarity claim.
pub fn planar_degree_ratio(graph: &Graph, k: usize) -> Result<DegreeRatio, SolveError> {
    if k < 7 {
        return Err(SolveError::UnsupportedK { k });
    }
    if !graph.euler_planar_bound() {
        return Err(SolveError::EulerBoundFailed { vertices: graph.vertex_count(), edges: graph.edge_count() });
    }
    let n = graph.vertex_count();
    let high_degree = graph.vertices().filter(|&v| graph.degree(v) >= k).count();
    let ratio = if n == 0 { Ratio::from_integer(0) } else { Ratio::new(high_degree, n) };
    if ratio >= Ratio::new(6, 7) {
        return Err(SolveError::DegreeRatioViolated { high_degree, vertices: n, k });
    }
    Ok(DegreeRatio { high_degree, ratio })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Prefilter {
    /// Not planar-tagged or `k < 7`.
    Inapplicable,
    /// `p > 7b`: no anchored k-core can be large enough.
    ImmediateNo { cap: usize },
    /// Any solution satisfies `|H| <= 7|B| <= cap`.
    SizeCap { cap: usize },
}

/// On planar graphs with `k >= 7` every non-anchor needs degree 7, so anchors
/// make up at least a seventh of `H`, giving `|H| <= 7b`.
pub fn planar_prefilter(inst: &AkcInstance) -> Prefilter {
    if !inst.planar_claim || inst.k < 7 {
        return Prefilter::Inapplicable;
    }
    let cap = 7 * inst.b;
    if inst.p > cap {
        Prefilter::ImmediateNo { cap }
    } else {
        Prefilter::SizeCap { cap }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engagement::verify_solution;
    use crate::graph::named::*;

    fn set(items: &[VertexId]) -> VertexSet {
        items.iter().copied().collect()
    }

    fn k4_with_pendant() -> Graph {
        let mut b = complete(4).to_builder();
        let u = b.add_vertex(None);
        b.add_edge(0, u).unwrap();
        b.build()
    }

    #[test]
    fn pool_examples() {
        assert!(candidate_anchor_pool(&complete(4), 3).is_empty());
        assert_eq!(candidate_anchor_pool(&path(5), 2), set(&[0, 1, 2, 3, 4]));
        assert_eq!(candidate_anchor_pool(&k4_with_pendant(), 3), set(&[4]));
    }

    #[test]
    fn exhaustive_path() {
        let inst = AkcInstance::new(path(10), 2, 2, 10);
        for opts in [SolveOptions::exhaustive(), SolveOptions::branch_bound()] {
            let r = solve(&inst, &opts).unwrap();
            assert_eq!(r.decision, Decision::Yes);
            assert_eq!(r.best.anchors, set(&[0, 9]));
            assert_eq!(r.optimum_size, 10);
            assert!(verify_solution(&inst, &r.best).is_valid());
        }
        let r = solve_exhaustive(&AkcInstance::new(path(10), 2, 0, 1), &SolveOptions::exhaustive()).unwrap();
        assert_eq!((r.decision, r.optimum_size), (Decision::No, 0));
    }

    #[test]
    fn complete_graph_needs_no_anchors() {
        let inst = AkcInstance::new(complete(4), 3, 0, 4);
        let r = solve_exhaustive(&inst, &SolveOptions::exhaustive()).unwrap();
        assert_eq!(r.decision, Decision::Yes);
        assert_eq!(r.best.core, set(&[0, 1, 2, 3]));
        let r = solve_branch_bound(&inst, &SolveOptions::branch_bound()).unwrap();
        assert_eq!(r.nodes_explored, 1);
        assert_eq!(r.optimum_size, 4);
    }

    #[test]
    fn budget_clamped() {
        let inst = AkcInstance::new(k4_with_pendant(), 3, 4, 5);
        let r = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(r.optimum_size, 5);
        assert_eq!(r.best.anchors, set(&[4]));
        assert!(r.notes.iter().any(|n| n.contains("clamped")));
    }

    #[test]
    fn target_beyond_vertex_count() {
        let r = solve(&AkcInstance::new(path(4), 2, 2, 5), &SolveOptions::default()).unwrap();
        assert_eq!(r.decision, Decision::No);
        assert_eq!(r.nodes_explored, 0);
    }

    #[test]
    fn decide_mode_stops_early() {
        let inst = AkcInstance::new(path(30), 2, 2, 30);
        let r = solve(&inst, &SolveOptions::branch_bound().decide()).unwrap();
        assert_eq!(r.decision, Decision::Yes);
        assert!(!r.proven_optimal);
        let r = solve(&AkcInstance::new(path(30), 2, 1, 30), &SolveOptions::branch_bound().decide()).unwrap();
        assert_eq!(r.decision, Decision::No);
    }

    #[test]
    fn timeout_is_unknown() {
        let inst = AkcInstance::new(path(400), 2, 3, 400);
        let opts = SolveOptions::exhaustive().with_time_limit(Duration::ZERO);
        let r = solve(&inst, &opts).unwrap();
        assert!(r.timed_out);
        assert_eq!(r.decision, Decision::Unknown);
    }

    #[test]
    fn degree_ratio_examples() {
        let r = planar_degree_ratio(&star(8), 7).unwrap();
        assert_eq!((r.high_degree, r.ratio), (1, Ratio::new(1, 9)));
        assert_eq!(planar_degree_ratio(&icosahedron(), 7).unwrap().high_degree, 0);
        assert_eq!(planar_degree_ratio(&grid(20, 20), 7).unwrap().ratio, Ratio::from_integer(0));
        assert_eq!(planar_degree_ratio(&grid(3, 3), 6), Err(SolveError::UnsupportedK { k: 6 }));
        assert!(matches!(planar_degree_ratio(&complete(8), 7), Err(SolveError::EulerBoundFailed { .. })));
    }

    #[test]
    fn prefilter_examples() {
        let g = grid(4, 4);
        let inst = AkcInstance::new(g.clone(), 7, 1, 8).planar(true);
        assert_eq!(planar_prefilter(&inst), Prefilter::ImmediateNo { cap: 7 });
        let r = solve(&inst, &SolveOptions::default()).unwrap();
        assert!(r.prefilter_fired);
        assert_eq!(r.decision, Decision::No);
        let inst = AkcInstance::new(g.clone(), 7, 2, 14).planar(true);
        assert_eq!(planar_prefilter(&inst), Prefilter::SizeCap { cap: 14 });
        assert_eq!(planar_prefilter(&AkcInstance::new(g, 7, 1, 8)), Prefilter::Inapplicable);
    }
}
