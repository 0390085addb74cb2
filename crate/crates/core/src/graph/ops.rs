use std::collections::BTreeMap;

use serde::Serialize;

use super::{Multigraph, MultigraphBuilder, VertexSet};
use crate::error::{Error, Result};

/// Graph on `S` keeping edges (and loops) with both ends in `S`, plus the map
/// from new ids back to ids in `g`.
pub fn induced_subgraph(g: &Multigraph, s: &VertexSet) -> (Multigraph, Vec<usize>) {
    let mut b = MultigraphBuilder::new(s.len());
    for (i, &u) in s.members().iter().enumerate() {
        for &(w, m) in g.neighbors(u) {
            if let Some(j) = s.index_of(w) {
                if i <= j {
                    b.add_edge(i, j, m);
                }
            }
        }
    }
    (b.build().expect("indices are in range"), s.members().to_vec())
}

/// Vertex boundary of `S` and the number of edges (with multiplicity) from it
/// to `V \ S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Boundary {
    pub vertices: VertexSet,
    pub edge_count: u64,
}

pub fn boundary(g: &Multigraph, s: &VertexSet) -> Result<Boundary> {
    if s.is_full() {
        return Err(Error::pre("boundary requires S to be a proper subset of V"));
    }
    let mut members = Vec::new();
    let mut edge_count = 0;
    for &u in s.members() {
        let out: u64 = g.proper_neighbors(u).filter(|&(w, _)| !s.contains(w)).map(|(_, m)| m).sum();
        if out > 0 {
            members.push(u);
            edge_count += out;
        }
    }
    if members.is_empty() {
        return Err(Error::pre("S has no neighbors outside itself (it is a union of components)"));
    }
    Ok(Boundary { vertices: VertexSet::new(g, members)?, edge_count })
}

/// Adds `deg(v)` loops at every vertex, so the walk becomes `(P + I) / 2`
/// and the normalized adjacency becomes `(Ã + I) / 2`.
pub fn lazy_transform(g: &Multigraph) -> Multigraph {
    let mut b = MultigraphBuilder::new(g.n());
    for (u, v, m) in g.edges() {
        b.add_edge(u, v, m);
    }
    for v in 0..g.n() {
        b.add_loop(v, g.degree(v));
    }
    b.build().expect("same vertex set")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub connected: bool,
    /// `None` when the graph is disconnected.
    pub diameter: Option<usize>,
    pub max_degree: u64,
    pub degree_histogram: BTreeMap<u64, usize>,
}

pub fn graph_stats(g: &Multigraph) -> GraphStats {
    let mut diameter = Some(0);
    for v in 0..g.n() {
        let ecc = g.distances_from(v).into_iter().try_fold(0, |acc, d| d.map(|d| acc.max(d)));
        diameter = match (diameter, ecc) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        if diameter.is_none() {
            break;
        }
    }
    let mut degree_histogram = BTreeMap::new();
    for &d in g.degrees() {
        *degree_histogram.entry(d).or_insert(0) += 1;
    }
    GraphStats {
        n: g.n(),
        connected: diameter.is_some(),
        diameter,
        max_degree: g.max_degree(),
        degree_histogram,
    }
}
