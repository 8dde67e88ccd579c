//! Engagement dynamics: k-core peeling, anchored closure, solution checking,
//! payoffs and the pure Nash equilibrium test of the engagement game.
//!
//! A player stays engaged while at least `k` friends are engaged. Anchors are
//! exempt from that rule. The anchored closure of an anchor set `B` is the
//! largest `H ⊇ B` in which every non-anchor has `k` neighbors inside `H`;
//! it is what survives the cascade of withdrawals.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;

use crate::graph::{Graph, GraphError, VertexId};

pub type VertexSet = BTreeSet<VertexId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AkcInstance {
    pub graph: Graph,
    pub k: usize,
    pub b: usize,
    pub p: usize,
    pub planar_claim: bool,
}

impl AkcInstance {
    pub fn new(graph: Graph, k: usize, b: usize, p: usize) -> Self {
        Self { graph, k, b, p, planar_claim: false }
    }

    pub fn planar(mut self, claim: bool) -> Self {
        self.planar_claim = claim;
        self
    }

    pub fn with_target(&self, p: usize) -> Self {
        Self { p, ..self.clone() }
    }
}

/// Anchor set `B` and engaged set `H`. Validity is decided by
/// [`verify_solution`], never assumed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Solution {
    pub anchors: VertexSet,
    pub core: VertexSet,
}

impl Solution {
    pub fn new(anchors: impl IntoIterator<Item = VertexId>, core: impl IntoIterator<Item = VertexId>) -> Self {
        Self { anchors: anchors.into_iter().collect(), core: core.into_iter().collect() }
    }

    /// `H \ B`, the non-anchored members.
    pub fn supercore(&self) -> VertexSet {
        self.core.difference(&self.anchors).copied().collect()
    }
}

/// Withdrawals in the order they happened, with the induced degree each
/// vertex had when it left.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CascadeTrace {
    pub removal_order: Vec<(VertexId, usize)>,
}

impl CascadeTrace {
    pub fn len(&self) -> usize {
        self.removal_order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.removal_order.is_empty()
    }

    /// Replays the trace against `G` and checks that each step removed a
    /// non-anchor whose degree among the survivors was below `k` and matched
    /// the recorded value.
    pub fn is_valid_for(&self, graph: &Graph, k: usize, anchors: &VertexSet) -> bool {
        let mut alive = vec![true; graph.vertex_count()];
        for &(v, recorded) in &self.removal_order {
            if v >= graph.vertex_count() || !alive[v] || anchors.contains(&v) {
                return false;
            }
            let degree = graph.neighbors(v).iter().filter(|&&w| alive[w]).count();
            if degree >= k || degree != recorded {
                return false;
            }
            alive[v] = false;
        }
        true
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StrategyProfile {
    pub engaged: VertexSet,
}

impl StrategyProfile {
    pub fn new(engaged: impl IntoIterator<Item = VertexId>) -> Self {
        Self { engaged: engaged.into_iter().collect() }
    }
}

/// Reusable scratch space for peeling. Each worker owns one.
#[derive(Clone, Debug, Default)]
pub struct Peeler {
    degree: Vec<usize>,
    stack: Vec<VertexId>,
}

impl Peeler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Peels `alive` down to the largest subset in which every non-anchor has
    /// at least `k` alive neighbors. Returns the number of survivors. The
    /// order of deletions is arbitrary; the result is not.
    pub fn peel(&mut self, graph: &Graph, k: usize, anchor: &[bool], alive: &mut [bool]) -> usize {
        let n = graph.vertex_count();
        self.degree.clear();
        self.degree.resize(n, 0);
        self.stack.clear();
        let mut survivors = 0;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            survivors += 1;
            let d = graph.neighbors(v).iter().filter(|&&w| alive[w]).count();
            self.degree[v] = d;
            if d < k && !anchor[v] {
                self.stack.push(v);
            }
        }
        // a vertex is pushed exactly once: when it first drops below k
        while let Some(v) = self.stack.pop() {
            alive[v] = false;
            survivors -= 1;
            for &w in graph.neighbors(v) {
                if alive[w] {
                    let before = self.degree[w];
                    self.degree[w] = before - 1;
                    if before == k && !anchor[w] {
                        self.stack.push(w);
                    }
                }
            }
        }
        survivors
    }

    /// Closure of the anchor mask over the whole vertex set.
    pub fn closure(&mut self, graph: &Graph, k: usize, anchor: &[bool], alive: &mut Vec<bool>) -> usize {
        alive.clear();
        alive.resize(graph.vertex_count(), true);
        self.peel(graph, k, anchor, alive)
    }
}

fn anchor_mask(graph: &Graph, anchors: &VertexSet) -> Result<Vec<bool>, GraphError> {
    let mut mask = vec![false; graph.vertex_count()];
    for &v in anchors {
        graph.check_vertex(v)?;
        mask[v] = true;
    }
    Ok(mask)
}

fn mask_to_set(mask: &[bool]) -> VertexSet {
    mask.iter().enumerate().filter(|(_, &a)| a).map(|(v, _)| v).collect()
}

/// The k-core: the unique maximal vertex set whose induced subgraph has
/// minimum degree at least `k`. `k = 0` returns every vertex.
pub fn k_core(graph: &Graph, k: usize) -> VertexSet {
    let anchor = vec![false; graph.vertex_count()];
    let mut alive = Vec::new();
    Peeler::new().closure(graph, k, &anchor, &mut alive);
    mask_to_set(&alive)
}

/// Anchored closure with the deterministic withdrawal schedule: the
/// deficient non-anchor of lowest current degree leaves first, ties broken
/// by lowest id.
pub fn anchored_closure(graph: &Graph, k: usize, anchors: &VertexSet) -> Result<(VertexSet, CascadeTrace), GraphError> {
    let anchor = anchor_mask(graph, anchors)?;
    let n = graph.vertex_count();
    let mut degree: Vec<usize> = graph.vertices().map(|v| graph.degree(v)).collect();
    let mut alive = vec![true; n];
    // bucket d holds deficient non-anchors of current degree d < k
    let mut buckets: Vec<BTreeSet<VertexId>> = vec![BTreeSet::new(); k];
    for v in 0..n {
        if !anchor[v] && degree[v] < k {
            buckets[degree[v]].insert(v);
        }
    }
    let mut trace = CascadeTrace::default();
    let mut lowest = 0;
    while lowest < k {
        let Some(v) = buckets[lowest].pop_first() else {
            lowest += 1;
            continue;
        };
        alive[v] = false;
        trace.removal_order.push((v, degree[v]));
        for &w in graph.neighbors(v) {
            if !alive[w] || anchor[w] {
                continue;
            }
            let d = degree[w];
            degree[w] = d - 1;
            if d < k {
                buckets[d].remove(&w);
            }
            if d - 1 < k {
                buckets[d - 1].insert(w);
                lowest = lowest.min(d - 1);
            }
        }
    }
    Ok((mask_to_set(&alive), trace))
}

/// Anchored closure where every withdrawal is drawn uniformly from the
/// currently deficient non-anchors. Confluence says the surviving set does
/// not depend on the draw.
pub fn anchored_closure_random<R: Rng + ?Sized>(
    graph: &Graph,
    k: usize,
    anchors: &VertexSet,
    rng: &mut R,
) -> Result<(VertexSet, CascadeTrace), GraphError> {
    let anchor = anchor_mask(graph, anchors)?;
    let n = graph.vertex_count();
    let mut degree: Vec<usize> = graph.vertices().map(|v| graph.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queued = vec![false; n];
    let mut pending: Vec<VertexId> = Vec::new();
    for v in 0..n {
        if !anchor[v] && degree[v] < k {
            pending.push(v);
            queued[v] = true;
        }
    }
    let mut trace = CascadeTrace::default();
    while !pending.is_empty() {
        let v = pending.swap_remove(rng.gen_range(0..pending.len()));
        alive[v] = false;
        trace.removal_order.push((v, degree[v]));
        for &w in graph.neighbors(v) {
            if alive[w] {
                degree[w] -= 1;
                if !anchor[w] && !queued[w] && degree[w] < k {
                    queued[w] = true;
                    pending.push(w);
                }
            }
        }
    }
    Ok((mask_to_set(&alive), trace))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    VertexOutOfRange { vertex: VertexId },
    AnchorOutsideCore { vertex: VertexId },
    TooManyAnchors { anchors: usize, budget: usize },
    CoreTooSmall { size: usize, target: usize },
    Deficient { vertex: VertexId, degree: usize, k: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} is not in the graph"),
            Violation::AnchorOutsideCore { vertex } => write!(f, "anchor {vertex} is not in H"),
            Violation::TooManyAnchors { anchors, budget } => write!(f, "{anchors} anchors exceed budget {budget}"),
            Violation::CoreTooSmall { size, target } => write!(f, "|H| = {size} is below target {target}"),
            Violation::Deficient { vertex, degree, k } => {
                write!(f, "vertex {vertex} has {degree} neighbors in H, needs {k}")
            }
        }
    }
}

/// Outcome of [`verify_solution`]; `violation` names the first failed
/// condition in the order: ids, `B ⊆ H`, budget, size, degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub violation: Option<Violation>,
}

impl Verification {
    pub fn is_valid(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn verify_solution(inst: &AkcInstance, sol: &Solution) -> Verification {
    let violation = find_violation(inst, sol);
    Verification { violation }
}

fn find_violation(inst: &AkcInstance, sol: &Solution) -> Option<Violation> {
    let g = &inst.graph;
    let n = g.vertex_count();
    if let Some(&vertex) = sol.core.iter().chain(&sol.anchors).find(|&&v| v >= n) {
        return Some(Violation::VertexOutOfRange { vertex });
    }
    if let Some(&vertex) = sol.anchors.iter().find(|v| !sol.core.contains(v)) {
        return Some(Violation::AnchorOutsideCore { vertex });
    }
    if sol.anchors.len() > inst.b {
        return Some(Violation::TooManyAnchors { anchors: sol.anchors.len(), budget: inst.b });
    }
    if sol.core.len() < inst.p {
        return Some(Violation::CoreTooSmall { size: sol.core.len(), target: inst.p });
    }
    let mut member = vec![false; n];
    for &v in &sol.core {
        member[v] = true;
    }
    sol.core.iter().filter(|v| !sol.anchors.contains(v)).find_map(|&v| {
        let degree = g.neighbors(v).iter().filter(|&&w| member[w]).count();
        (degree < inst.k).then_some(Violation::Deficient { vertex: v, degree, k: inst.k })
    })
}

/// Payoff of `v` under profile `S`: zero when disengaged, otherwise engaged
/// friends minus `k`.
pub fn payoff(graph: &Graph, k: usize, profile: &StrategyProfile, v: VertexId) -> Result<i64, GraphError> {
    graph.check_vertex(v)?;
    if !profile.engaged.contains(&v) {
        return Ok(0);
    }
    let friends = graph.neighbors(v).iter().filter(|w| profile.engaged.contains(w)).count();
    Ok(friends as i64 - k as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NashViolation {
    /// An engaged player with fewer than `k` engaged friends would drop out.
    EngagedBelowThreshold { vertex: VertexId, engaged_neighbors: usize },
    /// A disengaged player with at least `k` engaged friends would join.
    OutsiderWouldJoin { vertex: VertexId, engaged_neighbors: usize },
    VertexOutOfRange { vertex: VertexId },
}

impl fmt::Display for NashViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NashViolation::EngagedBelowThreshold { vertex, engaged_neighbors } => {
                write!(f, "engaged vertex {vertex} has only {engaged_neighbors} engaged neighbors")
            }
            NashViolation::OutsiderWouldJoin { vertex, engaged_neighbors } => {
                write!(f, "disengaged vertex {vertex} has {engaged_neighbors} engaged neighbors")
            }
            NashViolation::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} is not in the graph"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NashVerdict {
    pub violation: Option<NashViolation>,
}

impl NashVerdict {
    pub fn is_equilibrium(&self) -> bool {
        self.violation.is_none()
    }
}

/// Pure Nash test: nobody engaged wants out and nobody outside wants in.
/// Engaged players are checked first, then outsiders, each by ascending id.
pub fn nash_check(graph: &Graph, k: usize, profile: &StrategyProfile) -> NashVerdict {
    let n = graph.vertex_count();
    if let Some(&vertex) = profile.engaged.iter().find(|&&v| v >= n) {
        return NashVerdict { violation: Some(NashViolation::VertexOutOfRange { vertex }) };
    }
    let mut engaged = vec![false; n];
    for &v in &profile.engaged {
        engaged[v] = true;
    }
    let count = |v: VertexId| graph.neighbors(v).iter().filter(|&&w| engaged[w]).count();
    let inside = profile.engaged.iter().find_map(|&v| {
        let c = count(v);
        (c < k).then_some(NashViolation::EngagedBelowThreshold { vertex: v, engaged_neighbors: c })
    });
    let violation = inside.or_else(|| {
        graph.vertices().filter(|&v| !engaged[v]).find_map(|v| {
            let c = count(v);
            (c >= k).then_some(NashViolation::OutsiderWouldJoin { vertex: v, engaged_neighbors: c })
        })
    });
    NashVerdict { violation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

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
    fn k_core_examples() {
        assert!(k_core(&path(10), 2).is_empty());
        assert_eq!(k_core(&cycle(7), 2).len(), 7);
        assert_eq!(k_core(&k4_with_pendant(), 3), set(&[0, 1, 2, 3]));
        assert_eq!(k_core(&path(3), 0).len(), 3);
    }

    #[test]
    fn closure_examples() {
        let p5 = path(5);
        let (h, trace) = anchored_closure(&p5, 2, &set(&[0, 4])).unwrap();
        assert_eq!(h, set(&[0, 1, 2, 3, 4]));
        assert!(trace.is_empty());

        let (h, trace) = anchored_closure(&p5, 2, &VertexSet::new()).unwrap();
        assert!(h.is_empty());
        // endpoints tie at degree 1; lowest id first, then the cascade eats the path
        assert_eq!(trace.removal_order, vec![(0, 1), (1, 1), (2, 1), (3, 1), (4, 0)]);
        assert!(trace.is_valid_for(&p5, 2, &VertexSet::new()));

        let g = petersen();
        let all: VertexSet = g.vertices().collect();
        assert_eq!(anchored_closure(&g, 9, &all).unwrap().0, all);
        assert!(anchored_closure(&g, 2, &set(&[10])).is_err());
    }

    #[test]
    fn closure_k_zero_keeps_everything() {
        let (h, trace) = anchored_closure(&path(4), 0, &VertexSet::new()).unwrap();
        assert_eq!(h.len(), 4);
        assert!(trace.is_empty());
    }

    #[test]
    fn random_schedule_confluent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = k4_with_pendant();
        let (h, _) = anchored_closure(&g, 3, &set(&[4])).unwrap();
        for _ in 0..20 {
            let (h2, t) = anchored_closure_random(&g, 3, &set(&[4]), &mut rng).unwrap();
            assert_eq!(h, h2);
            assert!(t.is_valid_for(&g, 3, &set(&[4])));
        }
    }

    #[test]
    fn verify_examples() {
        let k4 = AkcInstance::new(complete(4), 3, 0, 4);
        assert!(verify_solution(&k4, &Solution::new([], 0..4)).is_valid());

        let p5 = AkcInstance::new(path(5), 2, 2, 5);
        assert!(verify_solution(&p5, &Solution::new([0, 4], 0..5)).is_valid());

        let p5b1 = AkcInstance::new(path(5), 2, 1, 5);
        let v = verify_solution(&p5b1, &Solution::new([0], 0..5));
        assert_eq!(v.violation, Some(Violation::Deficient { vertex: 4, degree: 1, k: 2 }));

        let v = verify_solution(&p5, &Solution::new([0, 1, 2], 0..5));
        assert_eq!(v.violation, Some(Violation::TooManyAnchors { anchors: 3, budget: 2 }));
        let v = verify_solution(&p5, &Solution::new([0], [1, 2]));
        assert_eq!(v.violation, Some(Violation::AnchorOutsideCore { vertex: 0 }));
        let v = verify_solution(&p5, &Solution::new([0, 4], [0, 4]));
        assert_eq!(v.violation, Some(Violation::CoreTooSmall { size: 2, target: 5 }));
        let v = verify_solution(&p5, &Solution::new([], [9]));
        assert_eq!(v.violation, Some(Violation::VertexOutOfRange { vertex: 9 }));
    }

    #[test]
    fn payoff_examples() {
        let k4 = complete(4);
        let all = StrategyProfile::new(0..4);
        assert_eq!(payoff(&k4, 3, &all, 2).unwrap(), 0);
        assert_eq!(payoff(&k4, 3, &StrategyProfile::default(), 1).unwrap(), 0);
        let c4 = cycle(4);
        let arc = StrategyProfile::new([0, 1, 2]);
        assert_eq!(payoff(&c4, 2, &arc, 1).unwrap(), 0);
        assert_eq!(payoff(&c4, 2, &arc, 0).unwrap(), -1);
        assert!(payoff(&c4, 2, &arc, 4).is_err());
    }

    #[test]
    fn nash_examples() {
        let k4 = complete(4);
        assert!(nash_check(&k4, 3, &StrategyProfile::new(0..4)).is_equilibrium());
        assert!(nash_check(&k4, 3, &StrategyProfile::default()).is_equilibrium());
        let v = nash_check(&k4, 3, &StrategyProfile::new([0, 1, 2]));
        assert_eq!(
            v.violation,
            Some(NashViolation::EngagedBelowThreshold { vertex: 0, engaged_neighbors: 2 })
        );
        // outsider condition on its own: the engaged triangle is happy at k=2,
        // the fourth vertex sees three engaged friends
        let v = nash_check(&k4, 2, &StrategyProfile::new([0, 1, 2]));
        assert_eq!(v.violation, Some(NashViolation::OutsiderWouldJoin { vertex: 3, engaged_neighbors: 3 }));
        // k beyond max degree: empty profile is the only equilibrium
        assert!(nash_check(&k4, 9, &StrategyProfile::default()).is_equilibrium());
        assert!(!nash_check(&k4, 9, &StrategyProfile::new(0..4)).is_equilibrium());
    }
}
