use std::collections::HashSet;

use nalgebra::DMatrix;

use crate::certificate::CertifiedCheck;
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};
use crate::spectral::{eig_sym, matrix_view, MatrixKind};

/// Largest `Δ^{2s}` for which connected sets are enumerated.
pub const GAMMA_BUDGET: f64 = 1e7;

/// Number of connected `s`-vertex sets containing `x`, grown one
/// neighbouring vertex at a time with deduplication per level.
pub fn gamma_count(g: &Multigraph, x: usize, s: usize) -> Result<u64> {
    if x >= g.n() {
        return Err(Error::param(format!("vertex {x} out of range")));
    }
    if s == 0 {
        return Err(Error::param("s must be positive"));
    }
    let budget = (g.max_degree() as f64).powi(2 * s as i32);
    if budget > GAMMA_BUDGET {
        return Err(Error::Capacity(format!("Δ^(2s) = {budget:e} exceeds the enumeration budget {GAMMA_BUDGET:e}")));
    }
    let mut level: HashSet<Vec<usize>> = HashSet::from([vec![x]]);
    for _ in 1..s {
        let mut next = HashSet::new();
        for set in &level {
            for &u in set {
                for (w, _) in g.proper_neighbors(u) {
                    if let Err(pos) = set.binary_search(&w) {
                        let mut grown = set.clone();
                        grown.insert(pos, w);
                        next.insert(grown);
                    }
                }
            }
        }
        level = next;
    }
    Ok(level.len() as u64)
}

/// `|Γ_x^s| ≤ Δ^{2s}`.
pub fn gamma_enumeration_check(g: &Multigraph, x: usize, s: usize) -> Result<CertifiedCheck> {
    let count = gamma_count(g, x, s)?;
    let delta = g.max_degree() as f64;
    Ok(CertifiedCheck::le("gamma_count", count as f64, delta.powi(2 * s as i32))
        .input("x", x)
        .input("s", s)
        .input("max_degree", g.max_degree()))
}

fn power(m: &DMatrix<f64>, p: usize) -> DMatrix<f64> {
    let mut result = DMatrix::identity(m.nrows(), m.ncols());
    let mut base = m.clone();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// For `|T| = 2s`: `e_x Ã_T^{2k} e_x ≥ Δ^{-4s} e_z Ã_T^{2k-4s} e_z` at the
/// given `z`, and `max_z e_z Ã_T^{2k-4s} e_z ≥ λ1(Ã_T)^{2k-4s} / (2s)`.
pub fn walk_transfer_check(
    g: &Multigraph,
    t: &VertexSet,
    x: usize,
    z: usize,
    k: usize,
    s: usize,
) -> Result<Vec<CertifiedCheck>> {
    if t.len() != 2 * s {
        return Err(Error::pre(format!("|T| = {} but 2s = {}", t.len(), 2 * s)));
    }
    if !t.contains(x) || !t.contains(z) {
        return Err(Error::pre("x and z must lie in T"));
    }
    if 2 * k < 4 * s {
        return Err(Error::param(format!("2k = {} < 4s = {}", 2 * k, 4 * s)));
    }
    if !g.is_connected_on(t) {
        return Err(Error::Disconnected("T does not induce a connected subgraph".into()));
    }
    let m = matrix_view(g, MatrixKind::NormalizedAdjacency, Some(t))?.matrix;
    let short = power(&m, 2 * k - 4 * s);
    let long = &short * power(&m, 4 * s);
    let (ix, iz) = (t.index_of(x).unwrap(), t.index_of(z).unwrap());
    let delta = g.max_degree() as f64;
    let transfer = CertifiedCheck::ge("xzwalks", long[(ix, ix)], delta.powi(-4 * s as i32) * short[(iz, iz)])
        .input("x", x)
        .input("z", z);

    let mut best = 0;
    for i in 1..t.len() {
        if short[(i, i)] > short[(best, best)] {
            best = i;
        }
    }
    let lambda1 = eig_sym(&m)?.lambda1();
    let pigeon = CertifiedCheck::ge(
        "trace_pigeonhole",
        short[(best, best)],
        lambda1.powi((2 * k - 4 * s) as i32) / (2 * s) as f64,
    )
    .input("z", t.members()[best]);
    Ok([transfer, pigeon]
        .into_iter()
        .map(|c| c.input("set", t.members()).input("k", k).input("s", s))
        .collect())
}
