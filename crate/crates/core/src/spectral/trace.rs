use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::{eig_sym, matrix_view, MatrixKind};
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::par::{self, Exec};

/// Memory budget for exact integer trace powers.
pub const EXACT_TRACE_MEMORY_CAP: usize = 256 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    ExactInteger,
    Float,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceValue {
    /// Present when the exact integer route ran.
    #[serde(serialize_with = "decimal_opt")]
    pub exact: Option<BigUint>,
    pub value: f64,
    /// Absolute error estimate for the float route; zero when exact.
    pub error_estimate: f64,
    pub mode: TraceMode,
}

fn decimal_opt<S: Serializer>(v: &Option<BigUint>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => s.serialize_str(&x.to_str_radix(10)),
        None => s.serialize_none(),
    }
}

/// `tr(M^{2k})`. The exact route is only defined for the adjacency matrix and
/// computes `Σ_x ||A^k e_x||²` in arbitrary precision; when its estimated
/// footprint exceeds [`EXACT_TRACE_MEMORY_CAP`] it falls back to the float
/// route `Σ λ_i^{2k}` and says so in `mode`.
pub fn trace_power(g: &Multigraph, kind: MatrixKind, two_k: usize, mode: TraceMode) -> Result<TraceValue> {
    trace_power_with(g, kind, two_k, mode, Exec::default())
}

pub fn trace_power_with(
    g: &Multigraph,
    kind: MatrixKind,
    two_k: usize,
    mode: TraceMode,
    exec: Exec,
) -> Result<TraceValue> {
    if !two_k.is_multiple_of(2) {
        return Err(Error::param(format!("walk length {two_k} must be even")));
    }
    if mode == TraceMode::ExactInteger {
        if kind != MatrixKind::Adjacency {
            return Err(Error::param("exact integer traces are only defined for the adjacency matrix"));
        }
        if exact_footprint(g, two_k / 2, exec) <= EXACT_TRACE_MEMORY_CAP {
            let exact = exact_adjacency_trace(g, two_k / 2, exec);
            let value = exact.to_f64().unwrap_or(f64::INFINITY);
            return Ok(TraceValue { exact: Some(exact), value, error_estimate: 0.0, mode });
        }
    }
    let eig = eig_sym(&matrix_view(g, kind, None)?.matrix)?;
    let value: f64 = eig.eigenvalues.iter().map(|l| l.powi(two_k as i32)).sum();
    let rho = eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let error_estimate =
        g.n() as f64 * (two_k.max(1) as f64) * (eig.residual + f64::EPSILON * rho) * rho.powi(two_k as i32 - 1).max(1.0);
    Ok(TraceValue { exact: None, value, error_estimate, mode: TraceMode::Float })
}

fn exact_footprint(g: &Multigraph, k: usize, exec: Exec) -> usize {
    let bits = (k as f64 * (g.max_degree().max(2) as f64).log2()).ceil() as usize + 64;
    let workers = if exec.is_parallel() { std::thread::available_parallelism().map_or(1, |p| p.get()) } else { 1 };
    workers * 2 * g.n() * (bits / 8 + 32)
}

/// `A^k e_x` in exact arithmetic.
pub(crate) fn adjacency_power_column(g: &Multigraph, x: usize, k: usize) -> Vec<BigUint> {
    let mut cur = vec![BigUint::zero(); g.n()];
    cur[x] = BigUint::from(1u32);
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); g.n()];
        for (u, slot) in next.iter_mut().enumerate() {
            for &(w, m) in g.neighbors(u) {
                if !cur[w].is_zero() {
                    *slot += &cur[w] * m;
                }
            }
        }
        cur = next;
    }
    cur
}

fn exact_adjacency_trace(g: &Multigraph, k: usize, exec: Exec) -> BigUint {
    par::map_range(exec, g.n(), |x| {
        adjacency_power_column(g, x, k).iter().map(|c| c * c).sum::<BigUint>()
    })
    .into_iter()
    .sum()
}
