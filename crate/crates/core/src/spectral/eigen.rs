use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::{json, Value};

use super::{matrix_view, Interval, MatrixKind};
use crate::certificate::{CertifiedCheck, Relation, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};

/// Largest dense problem accepted by [`eig_sym`].
pub const MAX_DIM: usize = 4096;

const SYMMETRY_TOL: f64 = 1e-12;

/// Eigenvalues in descending order with orthonormal eigenvector columns.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: DMatrix<f64>,
    /// `max_i ||M v_i - λ_i v_i||_2`
    pub residual: f64,
    /// `max |VᵀV - I|`
    #[serde(skip)]
    pub orthogonality_error: f64,
}

impl SpectralResult {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Second largest eigenvalue, or `None` for 1×1 problems.
    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.get(1).copied()
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    pub fn to_json(&self, with_vectors: bool) -> Value {
        let mut v = json!({ "eigenvalues": self.eigenvalues, "residual": self.residual });
        if with_vectors {
            let cols: Vec<Vec<f64>> = (0..self.dim()).map(|i| self.vector(i)).collect();
            v["eigenvectors"] = json!(cols);
        }
        v
    }
}

pub fn eig_sym(m: &DMatrix<f64>) -> Result<SpectralResult> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::param(format!("matrix is {}x{}, not square", n, m.ncols())));
    }
    if n == 0 {
        return Err(Error::param("empty matrix"));
    }
    if n > MAX_DIM {
        return Err(Error::Capacity(format!("dimension {n} exceeds dense limit {MAX_DIM}")));
    }
    let asym = (m - m.transpose()).abs().max();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = sym
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 100 * n.max(10))
        .ok_or_else(|| Error::NonConvergence(format!("QR iteration cap reached for n = {n}")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);

    let mv = &sym * &eigenvectors;
    let residual = (0..n)
        .map(|i| (mv.column(i) - eigenvectors.column(i) * eigenvalues[i]).norm())
        .fold(0.0, f64::max);
    let gram = eigenvectors.transpose() * &eigenvectors;
    let orthogonality_error = (gram - DMatrix::identity(n, n)).abs().max();

    let scale = eigenvalues.iter().fold(1.0f64, |a, l| a.max(l.abs()));
    if residual > 1e-9 * scale || orthogonality_error > 1e-9 {
        return Err(Error::NonConvergence(format!(
            "residual {residual:e}, orthogonality error {orthogonality_error:e}"
        )));
    }
    Ok(SpectralResult { eigenvalues, eigenvectors, residual, orthogonality_error })
}

/// Default counting tolerance `1e-8 · max(1, |λ_1|)`.
pub fn default_tol(eigs: &[f64]) -> f64 {
    1e-8 * eigs.iter().fold(1.0f64, |a, l| a.max(l.abs()))
}

/// Number of eigenvalues in `[lo - tol, hi + tol]`.
pub fn multiplicity(eigs: &[f64], interval: Interval, tol: f64) -> usize {
    eigs.iter().filter(|&&l| interval.contains(l, tol)).count()
}

/// Cauchy interlacing for the normalized adjacency matrix: deleting the rows
/// and columns of `deleted` removes at most `|deleted|` eigenvalues from any
/// interval's count.
pub fn interlacing_check(g: &Multigraph, deleted: &VertexSet, interval: Interval) -> Result<CertifiedCheck> {
    let kept = deleted
        .complement()
        .ok_or_else(|| Error::pre("cannot delete every vertex"))?;
    let full = eig_sym(&matrix_view(g, MatrixKind::NormalizedAdjacency, None)?.matrix)?;
    let sub = eig_sym(&matrix_view(g, MatrixKind::NormalizedAdjacency, Some(&kept))?.matrix)?;
    Ok(interlacing_from_spectra(&full.eigenvalues, &sub.eigenvalues, deleted.members(), interval))
}

/// Interlacing certificate from precomputed spectra of `Ã` and of its
/// principal submatrix with `deleted` removed.
pub(crate) fn interlacing_from_spectra(full: &[f64], sub: &[f64], deleted: &[usize], interval: Interval) -> CertifiedCheck {
    let tol = default_tol(full);
    let m_full = multiplicity(full, interval, tol);
    let m_sub = multiplicity(sub, interval, tol + DEFAULT_TOL);
    CertifiedCheck::new(
        "cauchy_interlacing",
        m_full as f64,
        (m_sub + deleted.len()) as f64,
        Relation::Le,
        DEFAULT_TOL,
    )
    .input("n", full.len())
    .input("deleted", deleted)
    .input("interval", interval)
    .input("m_full", m_full)
    .input("m_sub", m_sub)
}
