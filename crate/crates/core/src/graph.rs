//! Immutable undirected simple graphs.
//!
//! A [`Graph`] is stored in compressed adjacency form (sorted neighbor
//! slices), which keeps the peeling loops in [`crate::engagement`] cache
//! friendly. All mutation goes through [`GraphBuilder`]; once built, a graph
//! never changes and vertex ids stay stable for its whole lifetime.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

/// Vertex index in `[0, vertex_count)`.
pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range (graph has {vertex_count} vertices)")]
    VertexOutOfRange { vertex: VertexId, vertex_count: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("edge {0}-{1} does not exist")]
    MissingEdge(VertexId, VertexId),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    labels: Vec<Option<String>>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Every pair must be in range, loop-free
    /// and listed once (in either orientation).
    pub fn from_edges(n: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut builder = GraphBuilder::new(n);
        for &(u, v) in edges {
            builder.add_edge(u, v)?;
        }
        Ok(builder.build())
    }

    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        u < self.vertex_count() && v < self.vertex_count() && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<VertexId> {
        0..self.vertex_count()
    }

    /// Edges as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.neighbors(u).iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.vertices().map(|v| self.degree(v)).collect()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v).and_then(|l| l.as_deref())
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// First vertex carrying exactly this label.
    pub fn find_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, vertex_count: self.vertex_count() })
        }
    }

    /// Full scan of the representation invariants: symmetric, loop-free,
    /// strictly sorted (hence no parallel edges) adjacency.
    pub fn is_well_formed(&self) -> bool {
        if self.offsets.len() != self.vertex_count() + 1 {
            return false;
        }
        self.vertices().all(|u| {
            let nbrs = self.neighbors(u);
            nbrs.windows(2).all(|w| w[0] < w[1])
                && nbrs.iter().all(|&v| v != u && v < self.vertex_count() && self.has_edge(v, u))
        })
    }

    pub fn to_builder(&self) -> GraphBuilder {
        GraphBuilder {
            adjacency: self.vertices().map(|v| self.neighbors(v).iter().copied().collect()).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Replaces edge `uv` by the path `u - w - v` and returns the new graph
    /// with the id of `w` (always the old vertex count).
    pub fn subdivide_edge(
        &self,
        u: VertexId,
        v: VertexId,
        label: impl Into<String>,
    ) -> Result<(Graph, VertexId), GraphError> {
        let mut builder = self.to_builder();
        let w = builder.subdivide(u, v, Some(label.into()))?;
        Ok((builder.build(), w))
    }

    /// Disjoint union of `self` and `gadget` with `gadget_vertex` merged into
    /// `host_vertex`. The remaining gadget vertices are appended in their
    /// original order after the host vertices.
    pub fn attach_identify(
        &self,
        gadget: &Graph,
        gadget_vertex: VertexId,
        host_vertex: VertexId,
    ) -> Result<Graph, GraphError> {
        let mut builder = self.to_builder();
        builder.attach(gadget, gadget_vertex, host_vertex, |_, l| l.map(str::to_owned))?;
        Ok(builder.build())
    }

    /// Edge-count test from Euler's formula: `|E| <= 3|V| - 6` for `|V| >= 3`
    /// and `|E| <= |V| - 1` below that. Necessary for planarity, not
    /// sufficient.
    pub fn euler_planar_bound(&self) -> bool {
        let n = self.vertex_count();
        let m = self.edge_count();
        if n < 3 {
            m < n.max(1)
        } else {
            m <= 3 * n - 6
        }
    }

    /// Degree of each member of `set` inside the induced subgraph `G[set]`.
    pub fn induced_degrees(&self, set: &BTreeSet<VertexId>) -> Result<BTreeMap<VertexId, usize>, GraphError> {
        let mut member = vec![false; self.vertex_count()];
        for &v in set {
            self.check_vertex(v)?;
            member[v] = true;
        }
        Ok(set
            .iter()
            .map(|&v| (v, self.neighbors(v).iter().filter(|&&w| member[w]).count()))
            .collect())
    }

    /// Induced subgraph on `set`, renumbered in ascending order of the kept ids.
    pub fn induced_subgraph(&self, set: &BTreeSet<VertexId>) -> Result<Graph, GraphError> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in set.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i;
        }
        let mut builder = GraphBuilder::new(set.len());
        for (i, &v) in set.iter().enumerate() {
            builder.labels[i] = self.labels[v].clone();
            for &w in self.neighbors(v) {
                if index[w] != usize::MAX && v < w {
                    builder.add_edge(i, index[w])?;
                }
            }
        }
        Ok(builder.build())
    }
}

/// Mutable adjacency-set form used while constructing graphs.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    adjacency: Vec<BTreeSet<VertexId>>,
    labels: Vec<Option<String>>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        Self { adjacency: vec![BTreeSet::new(); n], labels: vec![None; n] }
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn add_vertex(&mut self, label: Option<String>) -> VertexId {
        self.adjacency.push(BTreeSet::new());
        self.labels.push(label);
        self.adjacency.len() - 1
    }

    pub fn set_label(&mut self, v: VertexId, label: impl Into<String>) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.labels[v] = Some(label.into());
        Ok(())
    }

    fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.adjacency.len() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, vertex_count: self.adjacency.len() })
        }
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency.get(u).is_some_and(|a| a.contains(&v))
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if !self.adjacency[u].insert(v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adjacency[v].insert(u);
        Ok(())
    }

    pub fn remove_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if !self.adjacency[u].remove(&v) {
            return Err(GraphError::MissingEdge(u, v));
        }
        self.adjacency[v].remove(&u);
        Ok(())
    }

    pub fn subdivide(&mut self, u: VertexId, v: VertexId, label: Option<String>) -> Result<VertexId, GraphError> {
        self.remove_edge(u, v)?;
        let w = self.add_vertex(label);
        self.add_edge(u, w)?;
        self.add_edge(w, v)?;
        Ok(w)
    }

    /// Adds a path `u - w - v` through a fresh vertex without requiring an
    /// existing edge `uv`.
    pub fn add_subdivided_edge(&mut self, u: VertexId, v: VertexId, label: Option<String>) -> Result<VertexId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        let w = self.add_vertex(label);
        self.add_edge(u, w)?;
        self.add_edge(w, v)?;
        Ok(w)
    }

    /// Copies `gadget` in with `gadget_vertex` identified with `host_vertex`.
    /// Returns the new id of every gadget vertex (`gadget_vertex` maps to
    /// `host_vertex`). `relabel` receives the gadget id and its label.
    pub fn attach(
        &mut self,
        gadget: &Graph,
        gadget_vertex: VertexId,
        host_vertex: VertexId,
        mut relabel: impl FnMut(VertexId, Option<&str>) -> Option<String>,
    ) -> Result<Vec<VertexId>, GraphError> {
        gadget.check_vertex(gadget_vertex)?;
        self.check_vertex(host_vertex)?;
        let mut map = vec![0; gadget.vertex_count()];
        for g in gadget.vertices() {
            map[g] = if g == gadget_vertex {
                host_vertex
            } else {
                self.add_vertex(relabel(g, gadget.label(g)))
            };
        }
        for (a, b) in gadget.edges() {
            self.add_edge(map[a], map[b])?;
        }
        Ok(map)
    }

    pub fn build(self) -> Graph {
        let mut offsets = Vec::with_capacity(self.adjacency.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for nbrs in &self.adjacency {
            targets.extend(nbrs.iter().copied());
            offsets.push(targets.len());
        }
        Graph { offsets, targets, labels: self.labels }
    }
}

/// Named small graphs used throughout the tests and generators.
pub mod named {
    use super::{Graph, GraphBuilder, VertexId};

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).expect("path edges are simple")
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle edges are simple")
    }

    pub fn complete(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Graph::from_edges(n, &edges).expect("complete graph edges are simple")
    }

    /// Hub 0 joined to `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edges(leaves + 1, &edges).expect("star edges are simple")
    }

    /// `width x height` grid, vertex `(x, y)` has id `y * width + x`.
    pub fn grid(width: usize, height: usize) -> Graph {
        let mut builder = GraphBuilder::new(width * height);
        let id = |x: usize, y: usize| -> VertexId { y * width + x };
        for y in 0..height {
            for x in 0..width {
                if x + 1 < width {
                    builder.add_edge(id(x, y), id(x + 1, y)).expect("grid edge");
                }
                if y + 1 < height {
                    builder.add_edge(id(x, y), id(x, y + 1)).expect("grid edge");
                }
            }
        }
        builder.build()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        Graph::from_edges(10, &edges).expect("petersen edges are simple")
    }

    /// The 5-regular icosahedron on 12 vertices.
    pub fn icosahedron() -> Graph {
        // top 0, upper ring 1..=5, lower ring 6..=10, bottom 11
        let mut edges = Vec::new();
        for i in 0..5 {
            let up = 1 + i;
            let up_next = 1 + (i + 1) % 5;
            let low = 6 + i;
            let low_next = 6 + (i + 1) % 5;
            edges.push((0, up));
            edges.push((up, up_next));
            edges.push((up, low));
            edges.push((up_next, low));
            edges.push((low, low_next));
            edges.push((low, 11));
        }
        Graph::from_edges(12, &edges).expect("icosahedron edges are simple")
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn build_cycle() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        assert_eq!(g.degree_sequence(), vec![2, 2, 2, 2]);
        assert!(g.is_well_formed());
        let single = Graph::from_edges(1, &[]).unwrap();
        assert_eq!((single.vertex_count(), single.edge_count()), (1, 0));
    }

    #[test]
    fn build_rejects_bad_pairs() {
        assert_eq!(Graph::from_edges(4, &[(0, 1), (0, 1)]), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(Graph::from_edges(4, &[(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(1, 0)));
        assert_eq!(Graph::from_edges(3, &[(2, 2)]), Err(GraphError::SelfLoop(2)));
        assert_eq!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, vertex_count: 3 })
        );
    }

    #[test]
    fn subdivide() {
        let k2 = complete(2);
        let (p3, w) = k2.subdivide_edge(0, 1, "w").unwrap();
        assert_eq!(w, 2);
        assert!(!p3.has_edge(0, 1));
        assert!(p3.has_edge(0, 2) && p3.has_edge(2, 1));
        assert_eq!(p3.degree(w), 2);
        assert_eq!(p3.label(w), Some("w"));

        let mut g = complete(3);
        for (u, v) in complete(3).edges().collect::<Vec<_>>() {
            g = g.subdivide_edge(u, v, "s").unwrap().0;
        }
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.degree_sequence(), vec![2; 6]);

        assert_eq!(cycle(4).subdivide_edge(0, 2, "x").unwrap_err(), GraphError::MissingEdge(0, 2));
    }

    #[test]
    fn attach() {
        let joined = complete(2).attach_identify(&complete(2), 0, 1).unwrap();
        assert_eq!(joined.vertex_count(), 3);
        assert_eq!(joined.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(matches!(
            complete(2).attach_identify(&complete(2), 0, 5),
            Err(GraphError::VertexOutOfRange { vertex: 5, .. })
        ));
        assert!(complete(2).attach_identify(&complete(2), 7, 0).is_err());
    }

    #[test]
    fn euler_bound() {
        assert!(!complete(5).euler_planar_bound());
        assert!(complete(4).euler_planar_bound());
        assert!(grid(10, 10).euler_planar_bound());
        assert!(Graph::empty(0).euler_planar_bound());
        assert!(complete(2).euler_planar_bound());
    }

    #[test]
    fn induced() {
        let k4 = complete(4);
        let all: BTreeSet<_> = (0..4).collect();
        assert!(k4.induced_degrees(&all).unwrap().values().all(|&d| d == 3));
        let three: BTreeSet<_> = (0..3).collect();
        assert!(k4.induced_degrees(&three).unwrap().values().all(|&d| d == 2));
        let pair: BTreeSet<_> = [0, 1].into_iter().collect();
        let degs = cycle(4).induced_degrees(&pair).unwrap();
        assert_eq!(degs, BTreeMap::from([(0, 1), (1, 1)]));
        assert!(k4.induced_degrees(&[9].into_iter().collect()).is_err());
    }

    #[test]
    fn named_graphs() {
        assert_eq!(petersen().degree_sequence(), vec![3; 10]);
        let ico = icosahedron();
        assert_eq!(ico.degree_sequence(), vec![5; 12]);
        assert_eq!(ico.edge_count(), 30);
        assert!(ico.euler_planar_bound());
        assert_eq!(grid(4, 4).edge_count(), 24);
    }
}
