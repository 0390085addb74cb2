#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use walklab::graph::generate;
use walklab::{GeneratorSpec, Multigraph, VertexSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn g(spec: GeneratorSpec) -> Multigraph {
    generate(&spec).unwrap()
}

pub fn pick<T: Copy>(rng: &mut ChaCha8Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// A small connected graph from the cycle, random regular, lollipop and
/// mangrove families.
pub fn small_graph(rng: &mut ChaCha8Rng) -> Multigraph {
    match rng.random_range(0..4) {
        0 => g(GeneratorSpec::cycle(rng.random_range(5..=16))),
        1 => loop {
            let n = rng.random_range(6..=16u64);
            let d = rng.random_range(3..=4u64);
            if n * d % 2 == 0 {
                let seed = rng.random();
                if let Ok(h) = generate(&GeneratorSpec::random_regular(n, d, seed)) {
                    if h.is_connected() {
                        break h;
                    }
                }
            }
        },
        2 => g(GeneratorSpec::lollipop(rng.random_range(3..=5), rng.random_range(1..=6))),
        _ => g(GeneratorSpec::mangrove(4, rng.random_range(2..=6))),
    }
}

/// Grows a connected set of `size` vertices from a random start by adding
/// random outside neighbours.
pub fn connected_set(g: &Multigraph, size: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    assert!(size >= 1 && size <= g.n());
    loop {
        let mut members = vec![rng.random_range(0..g.n())];
        while members.len() < size {
            let frontier: Vec<usize> = members
                .iter()
                .flat_map(|&u| g.proper_neighbors(u).map(|(w, _)| w))
                .filter(|w| !members.contains(w))
                .collect();
            if frontier.is_empty() {
                break;
            }
            members.push(pick(rng, &frontier));
        }
        if members.len() == size {
            return VertexSet::new(g, members).unwrap();
        }
    }
}

/// Same as [`connected_set`] but containing `x`.
pub fn connected_set_with(g: &Multigraph, x: usize, size: usize, rng: &mut ChaCha8Rng) -> VertexSet {
    let mut members = vec![x];
    while members.len() < size {
        let frontier: Vec<usize> = members
            .iter()
            .flat_map(|&u| g.proper_neighbors(u).map(|(w, _)| w))
            .filter(|w| !members.contains(w))
            .collect();
        members.push(pick(rng, &frontier));
    }
    VertexSet::new(g, members).unwrap()
}

/// Random connected irregular simple graph: a random tree plus a few extra
/// edges.
pub fn random_irregular(rng: &mut ChaCha8Rng) -> Multigraph {
    loop {
        let n = rng.random_range(4..=20usize);
        let mut edges = std::collections::BTreeSet::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            edges.insert((u, v));
        }
        for _ in 0..rng.random_range(0..n) {
            let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
            if a != b {
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let h = Multigraph::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1))).unwrap();
        if !h.is_regular() {
            return h;
        }
    }
}
