//! Undirected multigraphs with loops, vertex subsets, generators for the
//! graph families used by the experiments, and the on-disk format.

mod format;
mod generators;
mod ops;

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

pub use format::{parse_graph, serialize_graph};
pub use generators::{generate, mangrove_depth, Family, GeneratorSpec, MAX_REGULAR_ROUNDS};
pub use ops::{boundary, graph_stats, induced_subgraph, lazy_transform, Boundary, GraphStats};

/// Multigraph on vertices `0..n`.
///
/// A loop of multiplicity `m` at `v` contributes `m` to `deg(v)` and `m` to
/// `A[v][v]`; a non-loop pair of multiplicity `m` contributes `m` to both
/// endpoint degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    n: usize,
    edges: BTreeMap<(usize, usize), u64>,
    adj: Vec<Vec<(usize, u64)>>,
    deg: Vec<u64>,
}

/// Accumulates edges; repeated pairs add their multiplicities.
#[derive(Debug, Clone)]
pub struct MultigraphBuilder {
    n: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

impl MultigraphBuilder {
    pub fn new(n: usize) -> Self {
        MultigraphBuilder { n, edges: BTreeMap::new() }
    }

    pub fn add_edge(&mut self, u: usize, v: usize, mult: u64) -> &mut Self {
        if mult > 0 {
            *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += mult;
        }
        self
    }

    pub fn add_loop(&mut self, v: usize, mult: u64) -> &mut Self {
        self.add_edge(v, v, mult)
    }

    pub fn build(self) -> Result<Multigraph> {
        Multigraph::from_edge_map(self.n, self.edges)
    }
}

impl Multigraph {
    pub fn builder(n: usize) -> MultigraphBuilder {
        MultigraphBuilder::new(n)
    }

    /// Builds a graph from `(u, v, mult)` triples, summing repeated pairs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, u64)>) -> Result<Self> {
        let mut b = MultigraphBuilder::new(n);
        for (u, v, m) in edges {
            b.add_edge(u, v, m);
        }
        b.build()
    }

    pub(crate) fn from_edge_map(n: usize, edges: BTreeMap<(usize, usize), u64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph needs at least one vertex"));
        }
        let mut adj = vec![Vec::new(); n];
        let mut deg = vec![0u64; n];
        for (&(u, v), &m) in &edges {
            if v >= n {
                return Err(Error::param(format!("vertex {v} out of range for n = {n}")));
            }
            if m == 0 {
                return Err(Error::param(format!("pair ({u},{v}) has zero multiplicity")));
            }
            adj[u].push((v, m));
            deg[u] += m;
            if u != v {
                adj[v].push((u, m));
                deg[v] += m;
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Multigraph { n, edges, adj, deg })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self, v: usize) -> u64 {
        self.deg[v]
    }

    pub fn degrees(&self) -> &[u64] {
        &self.deg
    }

    /// Δ, the maximum degree.
    pub fn max_degree(&self) -> u64 {
        self.deg.iter().copied().max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.deg.windows(2).all(|w| w[0] == w[1])
    }

    /// Neighbors of `v` with multiplicities, sorted by id; a loop appears as
    /// `(v, m)`.
    pub fn neighbors(&self, v: usize) -> &[(usize, u64)] {
        &self.adj[v]
    }

    pub fn mult(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    pub fn loop_mult(&self, v: usize) -> u64 {
        self.mult(v, v)
    }

    pub fn has_loops(&self) -> bool {
        self.edges.keys().any(|&(u, v)| u == v)
    }

    /// Pairs `(u, v, mult)` with `u <= v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.edges.iter().map(|(&(u, v), &m)| (u, v, m))
    }

    pub fn edge_map(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.edges
    }

    /// Neighbors other than `v` itself.
    pub fn proper_neighbors(&self, v: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adj[v].iter().copied().filter(move |&(w, _)| w != v)
    }

    /// BFS distances from `src` over the simple skeleton; `None` = unreachable.
    pub fn distances_from(&self, src: usize) -> Vec<Option<usize>> {
        self.distances_within(src, |_| true)
    }

    /// BFS distances from `src` using only vertices accepted by `allowed`.
    pub fn distances_within(&self, src: usize, allowed: impl Fn(usize) -> bool) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        if !allowed(src) {
            return dist;
        }
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for (w, _) in self.proper_neighbors(u) {
                if dist[w].is_none() && allowed(w) {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }

    /// Whether the subgraph induced on `set` is connected.
    pub fn is_connected_on(&self, set: &VertexSet) -> bool {
        let dist = self.distances_within(set.members()[0], |v| set.contains(v));
        set.members().iter().all(|&v| dist[v].is_some())
    }
}

/// Sorted set of distinct vertex ids of a parent graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    parent_n: usize,
    members: Vec<usize>,
    mask: Option<u64>,
}

impl VertexSet {
    pub fn new(g: &Multigraph, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::with_parent_n(g.n(), members)
    }

    pub fn with_parent_n(parent_n: usize, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(Error::param("vertex set must be nonempty"));
        }
        if let Some(&v) = members.iter().find(|&&v| v >= parent_n) {
            return Err(Error::param(format!("vertex {v} out of range for n = {parent_n}")));
        }
        let mask = (parent_n <= 64).then(|| members.iter().fold(0u64, |m, &v| m | (1 << v)));
        Ok(VertexSet { parent_n, members, mask })
    }

    pub fn all(g: &Multigraph) -> Self {
        Self::with_parent_n(g.n(), 0..g.n()).expect("graphs have n >= 1")
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn parent_n(&self) -> usize {
        self.parent_n
    }

    pub fn mask(&self) -> Option<u64> {
        self.mask
    }

    pub fn contains(&self, v: usize) -> bool {
        match self.mask {
            Some(m) => v < 64 && m >> v & 1 == 1,
            None => self.members.binary_search(&v).is_ok(),
        }
    }

    /// Position of `v` within the sorted member list.
    pub fn index_of(&self, v: usize) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == self.parent_n
    }

    /// `V \ S`, or `None` when `S = V`.
    pub fn complement(&self) -> Option<VertexSet> {
        let rest: Vec<usize> = (0..self.parent_n).filter(|&v| !self.contains(v)).collect();
        (!rest.is_empty()).then(|| VertexSet::with_parent_n(self.parent_n, rest).expect("in range"))
    }

    /// `S ∪ {v}`.
    pub fn with(&self, v: usize) -> Result<VertexSet> {
        VertexSet::with_parent_n(self.parent_n, self.members.iter().copied().chain([v]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_convention() {
        let g = Multigraph::from_edges(2, [(0, 0, 3), (0, 1, 2)]).unwrap();
        assert_eq!(g.degree(0), 5);
        assert_eq!(g.degree(1), 2);
        assert_eq!(g.loop_mult(0), 3);
        assert_eq!(g.neighbors(0), &[(0, 3), (1, 2)]);
    }

    #[test]
    fn builder_sums_repeats() {
        let g = Multigraph::from_edges(3, [(0, 1, 1), (1, 0, 2), (2, 1, 1)]).unwrap();
        assert_eq!(g.mult(0, 1), 3);
        assert_eq!(g.degrees(), &[3, 4, 1]);
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Multigraph::from_edges(2, [(0, 2, 1)]).is_err());
        assert!(Multigraph::from_edges(0, []).is_err());
    }

    #[test]
    fn vertex_set_invariants() {
        let g = Multigraph::from_edges(5, [(0, 1, 1)]).unwrap();
        let s = VertexSet::new(&g, [3, 1, 3]).unwrap();
        assert_eq!(s.members(), &[1, 3]);
        assert_eq!(s.mask(), Some(0b1010));
        assert!(s.contains(3) && !s.contains(2));
        assert_eq!(s.complement().unwrap().members(), &[0, 2, 4]);
        assert!(VertexSet::new(&g, []).is_err());
        assert!(VertexSet::new(&g, [5]).is_err());
        assert!(VertexSet::all(&g).complement().is_none());
    }

    #[test]
    fn large_sets_use_search() {
        let s = VertexSet::with_parent_n(100, [5, 70, 99]).unwrap();
        assert!(s.mask().is_none());
        assert!(s.contains(70) && !s.contains(71));
        assert_eq!(s.index_of(99), Some(2));
    }
}
