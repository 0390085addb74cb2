use nalgebra::DVector;
use serde::Serialize;

use super::{eig_sym, matrix_view, MatrixKind};
use crate::error::{Error, Result};
use crate::graph::{graph_stats, Multigraph, VertexSet};

/// Top eigenpair of a principal submatrix with the eigenvector made positive.
#[derive(Debug, Clone, Serialize)]
pub struct Perron {
    pub lambda1: f64,
    /// Entry `i` belongs to vertex `indices[i]`.
    pub vector: Vec<f64>,
    pub indices: Vec<usize>,
    pub residual: f64,
}

impl Perron {
    /// Entry at a vertex id of the ambient graph.
    pub fn at(&self, v: usize) -> Option<f64> {
        self.indices.binary_search(&v).ok().map(|i| self.vector[i])
    }

    /// Vertex with the largest entry (smallest id on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for i in 1..self.vector.len() {
            if self.vector[i] > self.vector[best] {
                best = i;
            }
        }
        self.indices[best]
    }
}

/// Perron data of `M_S` for `M ∈ {A, Ã}`; for [`MatrixKind::Transition`] the
/// returned vector is the unit right eigenvector `D_S^{1/2} ψ_S / ||·||` of
/// `P_S`.
pub fn perron(g: &Multigraph, s: &VertexSet, kind: MatrixKind) -> Result<Perron> {
    if !g.is_connected_on(s) {
        return Err(Error::Disconnected(format!(
            "induced subgraph on {:?} is not connected",
            s.members()
        )));
    }
    let view = matrix_view(g, kind, Some(s))?;
    let eig = eig_sym(&view.matrix)?;
    let mut psi = eig.vector(0);
    if psi.iter().sum::<f64>() < 0.0 {
        psi.iter_mut().for_each(|x| *x = -*x);
    }
    let lambda1 = eig.lambda1();
    let v = DVector::from_vec(psi.clone());
    let residual = (&view.matrix * &v - &v * lambda1).norm();
    if psi.iter().any(|&x| x <= 0.0) {
        return Err(Error::NonConvergence(format!(
            "Perron vector has a nonpositive entry (min {:e})",
            psi.iter().copied().fold(f64::INFINITY, f64::min)
        )));
    }
    if residual > 1e-10 * lambda1.abs().max(1.0) {
        return Err(Error::NonConvergence(format!("Perron residual {residual:e}")));
    }
    if kind == MatrixKind::Transition {
        let scaled: Vec<f64> = psi.iter().zip(&view.degrees).map(|(x, d)| x * d.sqrt()).collect();
        let norm = scaled.iter().map(|x| x * x).sum::<f64>().sqrt();
        psi = scaled.into_iter().map(|x| x / norm).collect();
    }
    Ok(Perron { lambda1, vector: psi, indices: view.indices, residual })
}

/// Two edges at distance at least 2 and the ±1 test vector built on them.
#[derive(Debug, Clone, Serialize)]
pub struct RayleighWitness {
    /// Rayleigh quotient of the test vector after projecting out the computed
    /// top eigenvector of `Ã`; a lower bound on `λ_2`.
    pub bound: f64,
    /// Rayleigh quotient of the unprojected test vector.
    pub raw: f64,
    pub lambda2: f64,
    pub edge_plus: (usize, usize),
    pub edge_minus: (usize, usize),
    pub phi: Vec<f64>,
}

/// Test-vector lower bound on `λ_2(Ã)`: `φ = +1` on one edge, `-1` on a
/// second edge at distance ≥ 2, projected orthogonal to the top eigenvector.
pub fn rayleigh_lambda2_lower_bound(g: &Multigraph) -> Result<RayleighWitness> {
    let stats = graph_stats(g);
    let diameter = stats
        .diameter
        .ok_or_else(|| Error::Disconnected("λ2 test vector needs a connected graph".into()))?;
    if diameter < 4 {
        return Err(Error::VacuousRegime(format!("diameter {diameter} < 4")));
    }
    // diametral pair (p, q); step one edge inward from each end
    let (p, q) = (0..g.n())
        .find_map(|p| {
            let dist = g.distances_from(p);
            (0..g.n()).find(|&q| dist[q] == Some(diameter)).map(|q| (p, q))
        })
        .expect("diameter is attained");
    let from_p = g.distances_from(p);
    let from_q = g.distances_from(q);
    let inward = |end: usize, dist_other: &[Option<usize>]| {
        g.proper_neighbors(end)
            .map(|(w, _)| w)
            .find(|&w| dist_other[w] == Some(diameter - 1))
            .expect("a geodesic leaves every endpoint")
    };
    let p2 = inward(p, &from_q);
    let q2 = inward(q, &from_p);
    let mut phi = vec![0.0; g.n()];
    phi[p] = 1.0;
    phi[p2] = 1.0;
    phi[q] = -1.0;
    phi[q2] = -1.0;

    let view = matrix_view(g, MatrixKind::NormalizedAdjacency, None)?;
    let eig = eig_sym(&view.matrix)?;
    let quotient = |x: &DVector<f64>| x.dot(&(&view.matrix * x)) / x.dot(x);
    let phi_v = DVector::from_vec(phi.clone());
    let top = DVector::from_vec(eig.vector(0));
    let projected = &phi_v - &top * top.dot(&phi_v);
    Ok(RayleighWitness {
        bound: quotient(&projected),
        raw: quotient(&phi_v),
        lambda2: eig.lambda2().unwrap_or(f64::NAN),
        edge_plus: (p.min(p2), p.max(p2)),
        edge_minus: (q.min(q2), q.max(q2)),
        phi,
    })
}
