//! Matrix views of a multigraph (adjacency, normalized adjacency, transition)
//! and their principal submatrices, dense symmetric eigendecomposition,
//! Perron data, trace powers and interlacing checks.

mod eigen;
mod perron;
mod trace;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Multigraph, VertexSet};

pub use eigen::{default_tol, eig_sym, interlacing_check, multiplicity, SpectralResult, MAX_DIM};
pub(crate) use eigen::interlacing_from_spectra;
pub use perron::{perron, rayleigh_lambda2_lower_bound, Perron, RayleighWitness};
pub use trace::{trace_power, trace_power_with, TraceMode, TraceValue, EXACT_TRACE_MEMORY_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixKind {
    /// `A`
    Adjacency,
    /// `Ã = D^{-1/2} A D^{-1/2}`
    NormalizedAdjacency,
    /// `P = A D^{-1}`, similar to `Ã`.
    Transition,
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "adjacency" => Ok(MatrixKind::Adjacency),
            "normalized" | "normalized_adjacency" | "N" => Ok(MatrixKind::NormalizedAdjacency),
            "P" | "transition" => Ok(MatrixKind::Transition),
            _ => Err(Error::param(format!("unknown matrix kind {s:?}"))),
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::NormalizedAdjacency => "normalized_adjacency",
            MatrixKind::Transition => "transition",
        })
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Err(Error::param(format!("invalid interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lo - tol <= x && x <= self.hi + tol
    }
}

/// Principal submatrix of a full-graph matrix restricted to `indices`.
///
/// Degrees are always those of the ambient graph. The stored matrix is
/// symmetric: `A_S` for [`MatrixKind::Adjacency`], `Ã_S` otherwise; the
/// transition submatrix is recovered from `Ã_S` and the degrees.
#[derive(Debug, Clone)]
pub struct MatrixView {
    pub kind: MatrixKind,
    pub indices: Vec<usize>,
    pub matrix: DMatrix<f64>,
    pub degrees: Vec<f64>,
}

impl MatrixView {
    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    /// `P_S = D_S^{1/2} Ã_S D_S^{-1/2}` (column-stochastic convention
    /// `P = A D^{-1}`), or `A_S` for the adjacency kind.
    pub fn transition(&self) -> DMatrix<f64> {
        if self.kind == MatrixKind::Adjacency {
            return self.matrix.clone();
        }
        let s = self.degrees.iter().map(|d| d.sqrt()).collect::<Vec<_>>();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if s[j] == 0.0 {
                0.0
            } else {
                s[i] * self.matrix[(i, j)] / s[j]
            }
        })
    }
}

pub fn matrix_view(g: &Multigraph, kind: MatrixKind, s: Option<&VertexSet>) -> Result<MatrixView> {
    let indices: Vec<usize> = match s {
        Some(s) => {
            if s.parent_n() != g.n() {
                return Err(Error::param("vertex set belongs to a different graph"));
            }
            s.members().to_vec()
        }
        None => (0..g.n()).collect(),
    };
    if indices.is_empty() {
        return Err(Error::param("empty vertex set"));
    }
    let degrees: Vec<f64> = indices.iter().map(|&v| g.degree(v) as f64).collect();
    let m = indices.len();
    let mut matrix = DMatrix::zeros(m, m);
    let position = |v: usize| match s {
        Some(s) => s.index_of(v),
        None => Some(v),
    };
    for (i, &u) in indices.iter().enumerate() {
        for &(w, mult) in g.neighbors(u) {
            let Some(j) = position(w) else { continue };
            matrix[(i, j)] = match kind {
                MatrixKind::Adjacency => mult as f64,
                _ => mult as f64 / (degrees[i] * degrees[j]).sqrt(),
            };
        }
    }
    Ok(MatrixView { kind, indices, matrix, degrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorSpec};

    #[test]
    fn cycle_pair_view() {
        let g = generate(&GeneratorSpec::cycle(8)).unwrap();
        let s = VertexSet::new(&g, [0, 1]).unwrap();
        let v = matrix_view(&g, MatrixKind::NormalizedAdjacency, Some(&s)).unwrap();
        assert_eq!(v.matrix, DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.5, 0.0]));
    }

    #[test]
    fn triangle_full_view() {
        let g = generate(&GeneratorSpec::complete(3)).unwrap();
        let v = matrix_view(&g, MatrixKind::NormalizedAdjacency, None).unwrap();
        let expected = DMatrix::from_fn(3, 3, |i, j| if i == j { 0.0 } else { 0.5 });
        assert!((v.matrix - expected).abs().max() < 1e-15);
    }

    #[test]
    fn lollipop_clique_adjacency() {
        let g = generate(&GeneratorSpec::lollipop(3, 2)).unwrap();
        let s = VertexSet::new(&g, 0..4).unwrap();
        let v = matrix_view(&g, MatrixKind::Adjacency, Some(&s)).unwrap();
        let expected = DMatrix::from_fn(4, 4, |i, j| if i == j { 0.0 } else { 1.0 });
        assert_eq!(v.matrix, expected);
    }

    #[test]
    fn transition_columns_of_full_graph_sum_to_one() {
        let g = generate(&GeneratorSpec::lollipop(3, 2)).unwrap();
        let p = matrix_view(&g, MatrixKind::Transition, None).unwrap().transition();
        for j in 0..g.n() {
            assert!((p.column(j).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kind_and_interval_parsing() {
        assert_eq!("A".parse::<MatrixKind>().unwrap(), MatrixKind::Adjacency);
        assert!("Q".parse::<MatrixKind>().is_err());
        assert!(Interval::new(1.0, 0.0).is_err());
        assert!(Interval::point(0.5).contains(0.5 + 1e-12, 1e-9));
    }
}
