//! Certificate-producing versions of the Perron-vector lemmas: the λ1
//! perturbation bound for adding one vertex, the support-extension process,
//! the large-Perron-entry theorem with its electrical proof chain, and the
//! corollary for irregular graphs.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::certificate::{CertifiedCheck, Verdict};
use crate::electric::{effective_resistance, find_high_voltage_boundary_neighbor, VoltageMode};
use crate::error::{Error, Result};
use crate::graph::{boundary, induced_subgraph, Multigraph, VertexSet};
use crate::spectral::{eig_sym, matrix_view, perron, MatrixKind, Perron};

fn check_kind(kind: MatrixKind) -> Result<()> {
    match kind {
        MatrixKind::Adjacency | MatrixKind::NormalizedAdjacency => Ok(()),
        MatrixKind::Transition => Err(Error::param("kind must be adjacency or normalized")),
    }
}

/// Lower bound `½(λ1 + √(λ1² + c ψ(u)²))` on the top eigenvalue after
/// attaching a pendant vertex to `u` through a matrix entry of size `√c`.
fn pendant_bound(lambda1: f64, psi_u: f64, c: f64) -> f64 {
    0.5 * (lambda1 + (lambda1 * lambda1 + c * psi_u * psi_u).sqrt())
}

/// Squared matrix entry of one `(u, v)` edge: `1 / (d_u d_v)` for `Ã`, 1
/// for `A`.
fn edge_weight_sq(g: &Multigraph, u: usize, v: usize, kind: MatrixKind) -> f64 {
    match kind {
        MatrixKind::Adjacency => 1.0,
        _ => 1.0 / (g.degree(u) as f64 * g.degree(v) as f64),
    }
}

/// Adds `v` to `S` with all of `E(S)` and the single edge `(u, v)`:
/// `lhs = λ1(M_{S'})` against the pendant bound. For `Ã` the bound with
/// `Δ^{-2}` in place of `1/(d_u d_v)` is reported as `rhs_max_degree`.
pub fn perturbation_bound(g: &Multigraph, s: &VertexSet, u: usize, v: usize, kind: MatrixKind) -> Result<CertifiedCheck> {
    check_kind(kind)?;
    if !s.contains(u) || v >= g.n() || s.contains(v) {
        return Err(Error::param("need u in S and v outside S"));
    }
    if u == v || g.mult(u, v) == 0 {
        return Err(Error::param(format!("({u}, {v}) is not an edge")));
    }
    let p = perron(g, s, kind)?;
    let psi_u = p.at(u).expect("u in S");
    let view = matrix_view(g, kind, Some(s))?;
    let m = view.dim();
    let w = edge_weight_sq(g, u, v, kind);
    let iu = s.index_of(u).expect("u in S");
    let padded = DMatrix::from_fn(m + 1, m + 1, |i, j| match (i == m, j == m) {
        (false, false) => view.matrix[(i, j)],
        (true, true) => 0.0,
        (true, false) if j == iu => w.sqrt(),
        (false, true) if i == iu => w.sqrt(),
        _ => 0.0,
    });
    let lhs = eig_sym(&padded)?.lambda1();
    let rhs = pendant_bound(p.lambda1, psi_u, w);
    let mut check = CertifiedCheck::ge("perturbation", lhs, rhs)
        .input("set", s.members())
        .input("u", u)
        .input("v", v)
        .input("kind", kind)
        .input("lambda1", p.lambda1)
        .input("psi_u", psi_u);
    if kind == MatrixKind::NormalizedAdjacency {
        let delta = g.max_degree() as f64;
        check = check.input("rhs_max_degree", pendant_bound(p.lambda1, psi_u, 1.0 / (delta * delta)));
    }
    Ok(check)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// `u` = boundary vertex of largest Perron entry.
    Electric,
    /// `u` = vertex of largest Perron entry; it must have an outside
    /// neighbour.
    Argmax,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "electric" => Ok(Strategy::Electric),
            "argmax" => Ok(Strategy::Argmax),
            _ => Err(Error::param(format!("unknown strategy '{s}' (electric|argmax)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionStep {
    pub set: Vec<usize>,
    pub u: usize,
    pub v: usize,
    pub psi_u: f64,
    pub lambda1: f64,
    pub lambda1_next: f64,
    /// Increment promised by the pendant-vertex bound at `u`.
    pub guaranteed_increment: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtensionTrace {
    pub strategy: Strategy,
    pub kind: MatrixKind,
    pub steps: Vec<ExtensionStep>,
    pub final_set: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Extension {
    pub trace: ExtensionTrace,
    /// Final multiplicative bound(s) first, then per-step checks.
    pub checks: Vec<CertifiedCheck>,
}

impl Extension {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CertifiedCheck::passed)
    }
}

fn largest_entry(p: &Perron, candidates: impl Iterator<Item = usize>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for w in candidates {
        let x = p.at(w).expect("candidate in S");
        if best.is_none_or(|(_, b)| x > b) {
            best = Some((w, x));
        }
    }
    best.map(|(w, _)| w)
}

/// Grows `S` by `|S|` single vertices. Each step picks `u` by `strategy`,
/// adds the smallest-id outside neighbour `v` of `u`, and records λ1 before
/// and after.
pub fn extend_support(g: &Multigraph, s: &VertexSet, strategy: Strategy, kind: MatrixKind) -> Result<Extension> {
    check_kind(kind)?;
    let size = s.len();
    if size < 2 {
        return Err(Error::pre("S needs at least two vertices"));
    }
    if !g.is_connected_on(s) {
        return Err(Error::Disconnected("S does not induce a connected subgraph".into()));
    }
    if kind == MatrixKind::NormalizedAdjacency && 2 * size >= g.n() {
        return Err(Error::pre(format!("need |S| < n/2 (|S| = {size}, n = {})", g.n())));
    }
    if 2 * size > g.n() {
        return Err(Error::pre("graph too small to double S"));
    }
    let delta = g.max_degree() as f64;

    let mut current = s.clone();
    let mut steps = Vec::with_capacity(size);
    let mut checks = Vec::new();
    let mut p = perron(g, &current, kind)?;
    let lambda_start = p.lambda1;
    for _ in 0..size {
        let outside = |w: usize| g.proper_neighbors(w).map(|(x, _)| x).filter(|&x| !current.contains(x)).min();
        let u = match strategy {
            Strategy::Electric => {
                let b = boundary(g, &current)?;
                largest_entry(&p, b.vertices.members().iter().copied()).expect("boundary is nonempty")
            }
            Strategy::Argmax => p.argmax(),
        };
        let v = outside(u).ok_or_else(|| {
            Error::pre(format!("vertex {u} of largest Perron entry has no neighbour outside S (out of range)"))
        })?;
        let psi_u = p.at(u).expect("u in S");
        let guaranteed = pendant_bound(p.lambda1, psi_u, edge_weight_sq(g, u, v, kind)) - p.lambda1;

        if strategy == Strategy::Electric && kind == MatrixKind::NormalizedAdjacency {
            let si = current.len() as f64;
            let floor = 1.0 / (delta.powf(2.5) * p.lambda1 * si.powf(2.5));
            checks.push(CertifiedCheck::ge("boundary_entry", psi_u, floor).input("u", u).input("size", current.len()));
            checks.extend(electric_chain(g, &current, &p)?.checks);
        }

        let next = current.with(v)?;
        let q = perron(g, &next, kind)?;
        checks.push(
            CertifiedCheck::ge("step_increment", q.lambda1, p.lambda1 + guaranteed)
                .with_tol(1e-10)
                .input("u", u)
                .input("v", v),
        );
        steps.push(ExtensionStep {
            set: current.members().to_vec(),
            u,
            v,
            psi_u,
            lambda1: p.lambda1,
            lambda1_next: q.lambda1,
            guaranteed_increment: guaranteed,
        });
        current = next;
        p = q;
    }

    let lambda_end = p.lambda1;
    let sf = size as f64;
    let mut finals = match kind {
        MatrixKind::NormalizedAdjacency => vec![CertifiedCheck::ge(
            "extension_factor",
            lambda_end,
            lambda_start * (1.0 + 5.0 / (128.0 * delta.powi(7) * sf.powi(4))),
        )],
        _ => vec![
            CertifiedCheck::ge("extension_additive", lambda_end, lambda_start + 2f64.ln() / (6.0 * lambda_start.powi(2))),
            CertifiedCheck::ge(
                "extension_factor",
                lambda_end,
                lambda_start * (1.0 + 1.0 / (10.0 * lambda_start.powi(3))),
            ),
        ],
    };
    for c in &mut finals {
        *c = c.clone().input("initial", s.members()).input("final", current.members()).input("strategy", strategy);
    }
    finals.extend(checks);
    Ok(Extension {
        trace: ExtensionTrace { strategy, kind, steps, final_set: current.members().to_vec() },
        checks: finals,
    })
}

/// The three steps of the large-entry argument made explicit for `Ã_S`.
#[derive(Debug, Clone, Serialize)]
pub struct ElectricChain {
    pub t: usize,
    /// High-voltage neighbour of the boundary; `None` when `t` is itself on
    /// the boundary.
    pub x: Option<usize>,
    pub f_x: Option<f64>,
    /// Boundary vertex adjacent to `x` (or `t`).
    pub u: usize,
    /// `(D^{1/2}ψ)(x) / (D^{1/2}ψ)(t)`, reported only. The survival limit
    /// `1ᵀ P_S^k e_w` converges to the left Perron vector `D^{-1/2}ψ`, so
    /// this ratio need not dominate `f(x)`.
    pub right_ratio: Option<f64>,
    pub checks: Vec<CertifiedCheck>,
}

/// With `χ = D_S^{-1/2} ψ_S`: the voltage bounds at `x`, then
/// `χ(x)/χ(t) ≥ f(x)`, `Δ λ1 ψ(u) ≥ ψ(x)` and
/// `ψ(u) ≥ ψ(t) / (λ1 Δ^{5/2} |S|²)` for the best boundary neighbour `u` of `x`.
fn electric_chain(g: &Multigraph, set: &VertexSet, p: &Perron) -> Result<ElectricChain> {
    let t = p.argmax();
    let hv = find_high_voltage_boundary_neighbor(g, set, t)?;
    if hv.mode == VoltageMode::BoundaryMax {
        return Ok(ElectricChain { t, x: None, f_x: None, u: t, right_ratio: None, checks: Vec::new() });
    }
    let psi = |w: usize| p.at(w).expect("vertex in S");
    let sqrt_deg = |w: usize| (g.degree(w) as f64).sqrt();
    let chi = |w: usize| psi(w) / sqrt_deg(w);
    let x = hv.x;
    let b = VertexSet::with_parent_n(g.n(), hv.boundary.iter().copied())?;
    let u = largest_entry(p, g.proper_neighbors(x).map(|(w, _)| w).filter(|&w| b.contains(w)))
        .expect("x is adjacent to the boundary");
    let delta = g.max_degree() as f64;
    let size = set.len() as f64;
    let lambda1 = p.lambda1;
    let mut checks = hv.checks;
    checks.push(CertifiedCheck::ge("limratio", chi(x) / chi(t), hv.f_x).input("x", x).input("t", t));
    checks.push(CertifiedCheck::ge("transitionperron", delta * lambda1 * psi(u), psi(x)).input("x", x).input("u", u));
    checks.push(
        CertifiedCheck::ge("transitionperron_scaled", psi(u), psi(t) / (lambda1 * delta.powf(2.5) * size * size))
            .input("u", u)
            .input("t", t),
    );
    let right_ratio = psi(x) * sqrt_deg(x) / (psi(t) * sqrt_deg(t));
    Ok(ElectricChain { t, x: Some(x), f_x: Some(hv.f_x), u, right_ratio: Some(right_ratio), checks })
}

#[derive(Debug, Clone, Serialize)]
pub struct ElectricTheorem {
    pub t: usize,
    /// Boundary vertex with the largest Perron entry.
    pub u: usize,
    pub ratio: f64,
    pub lambda1: f64,
    /// Largest effective resistance between two vertices of the induced
    /// subgraph on `S`.
    pub max_resistance: f64,
    /// Edges from the boundary to the rest of `G`.
    pub boundary_edges: u64,
    pub chain: ElectricChain,
    /// Main bound, refined bound, then the proof chain.
    pub checks: Vec<CertifiedCheck>,
}

impl ElectricTheorem {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CertifiedCheck::passed)
    }
}

/// Checks that some boundary vertex `u` has
/// `ψ_S(u)/ψ_S(t) ≥ 1/(Δ^{5/2} λ1 |S|²)` and the refined
/// `≥ 1/(Δ^{3/2} λ1 |∂B| R)`, with `R` taken in the induced subgraph on `S`.
pub fn electric_theorem_check(g: &Multigraph, set: &VertexSet) -> Result<ElectricTheorem> {
    if set.is_full() {
        return Err(Error::pre("S must be a proper subset of V"));
    }
    let p = perron(g, set, MatrixKind::NormalizedAdjacency)?;
    let b = boundary(g, set)?.vertices;
    let t = p.argmax();
    let u = largest_entry(&p, b.members().iter().copied()).expect("boundary is nonempty");
    let ratio = p.at(u).unwrap() / p.at(t).unwrap();
    let delta = g.max_degree() as f64;
    let size = set.len() as f64;
    let lambda1 = p.lambda1;

    let boundary_edges: u64 = b
        .members()
        .iter()
        .map(|&w| g.proper_neighbors(w).filter(|&(x, _)| !b.contains(x)).map(|(_, m)| m).sum::<u64>())
        .sum();
    let (sub, _) = induced_subgraph(g, set);
    let mut max_resistance: f64 = 0.0;
    for a in 0..sub.n() {
        for c in a + 1..sub.n() {
            max_resistance = max_resistance.max(effective_resistance(&sub, a, c)?);
        }
    }

    let main = CertifiedCheck::ge("electric_main", ratio, 1.0 / (delta.powf(2.5) * lambda1 * size * size));
    let refined_rhs = 1.0 / (delta.powf(1.5) * lambda1 * boundary_edges as f64 * max_resistance);
    let refined = CertifiedCheck::ge("electric_refined", ratio, refined_rhs)
        .input("max_resistance", max_resistance)
        .input("resistance_graph", "induced")
        .input("boundary_edges", boundary_edges)
        .vacuous_if(set.len() < 2);
    // |S| = 1 without a loop: λ1 = 0 and both bounds are undefined
    let (main, refined) = if lambda1 > 0.0 {
        (main, refined)
    } else {
        (main.with_verdict(Verdict::Vacuous), refined.with_verdict(Verdict::Vacuous))
    };
    let chain = electric_chain(g, set, &p)?;
    let mut checks = vec![main, refined];
    checks.extend(chain.checks.iter().cloned());
    let checks = checks
        .into_iter()
        .map(|c| c.input("set", set.members()).input("u", u).input("t", t))
        .collect();
    Ok(ElectricTheorem { t, u, ratio, lambda1, max_resistance, boundary_edges, chain, checks })
}

/// Some vertex of non-maximal degree has
/// `φ_H(u) ≥ 1/(Δ² λ1(A_H) |V|^{5/2})`; reports the largest such entry.
pub fn irregular_corollary_check(h: &Multigraph) -> Result<CertifiedCheck> {
    if h.n() < 2 {
        return Err(Error::pre("corollary needs at least two vertices"));
    }
    if h.is_regular() {
        return Err(Error::pre("corollary requires irregular"));
    }
    let p = perron(h, &VertexSet::all(h), MatrixKind::Adjacency)?;
    let delta = h.max_degree();
    let (u, phi_u) = (0..h.n())
        .filter(|&v| h.degree(v) < delta)
        .map(|v| (v, p.vector[v]))
        .fold((usize::MAX, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let d = delta as f64;
    let rhs = 1.0 / (d * d * p.lambda1 * (h.n() as f64).powf(2.5));
    Ok(CertifiedCheck::ge("irregular_corollary", phi_u, rhs)
        .input("u", u)
        .input("lambda1", p.lambda1)
        .input("max_degree", delta)
        .input("n", h.n()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Verdict;
    use crate::graph::{generate, GeneratorSpec};
    use std::f64::consts::PI;

    fn g(spec: GeneratorSpec) -> Multigraph {
        generate(&spec).unwrap()
    }

    fn set(g: &Multigraph, v: &[usize]) -> VertexSet {
        VertexSet::new(g, v.iter().copied()).unwrap()
    }

    #[test]
    fn perturbation_on_cycle() {
        let c = g(GeneratorSpec::cycle(8));
        let chk = perturbation_bound(&c, &set(&c, &[0, 1]), 1, 2, MatrixKind::NormalizedAdjacency).unwrap();
        let rhs = 0.5 * (0.5 + (0.25f64 + 0.25 * 0.5).sqrt());
        assert!((chk.rhs - rhs).abs() < 1e-12);
        assert!((rhs - 0.5562).abs() < 1e-4);
        assert!((chk.lhs - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(chk.verdict, Verdict::Pass);
        assert!((chk.inputs["rhs_max_degree"].as_f64().unwrap() - rhs).abs() < 1e-12);
    }

    #[test]
    fn perturbation_adjacency_complete() {
        let k8 = g(GeneratorSpec::complete(8));
        let chk = perturbation_bound(&k8, &set(&k8, &[0, 1]), 0, 2, MatrixKind::Adjacency).unwrap();
        assert!((chk.rhs - 0.5 * (1.0 + 1.5f64.sqrt())).abs() < 1e-12);
        assert!((chk.lhs - 2f64.sqrt()).abs() < 1e-12);
        assert!(chk.passed());
    }

    #[test]
    fn perturbation_requires_edge() {
        let c = g(GeneratorSpec::cycle(8));
        assert!(perturbation_bound(&c, &set(&c, &[0, 1]), 1, 5, MatrixKind::NormalizedAdjacency).is_err());
    }

    #[test]
    fn extension_on_cycle() {
        let c = g(GeneratorSpec::cycle(8));
        let ext = extend_support(&c, &set(&c, &[0, 1]), Strategy::Electric, MatrixKind::NormalizedAdjacency).unwrap();
        assert_eq!(ext.trace.final_set.len(), 4);
        let last = ext.trace.steps.last().unwrap();
        // path on 4 vertices with entries 1/2
        assert!((last.lambda1_next - (PI / 5.0).cos()).abs() < 1e-12);
        assert!(ext.passed(), "{:#?}", ext.checks);
        for w in ext.trace.steps.windows(2) {
            assert!(w[1].lambda1 > w[0].lambda1);
        }
    }

    #[test]
    fn extension_adjacency_complete() {
        let k8 = g(GeneratorSpec::complete(8));
        let ext = extend_support(&k8, &set(&k8, &[0, 1]), Strategy::Argmax, MatrixKind::Adjacency).unwrap();
        assert_eq!(ext.checks[0].name, "extension_additive");
        assert!((ext.checks[0].rhs - (1.0 + 2f64.ln() / 6.0)).abs() < 1e-12);
        // T induces K_4 here
        assert!((ext.checks[0].lhs - 3.0).abs() < 1e-9);
        assert!(ext.passed());
    }

    #[test]
    fn extension_needs_an_edge() {
        let c = g(GeneratorSpec::cycle(8));
        assert!(extend_support(&c, &set(&c, &[0]), Strategy::Electric, MatrixKind::NormalizedAdjacency).is_err());
    }

    #[test]
    fn electric_theorem_cycle() {
        let c = g(GeneratorSpec::cycle(8));
        let r = electric_theorem_check(&c, &set(&c, &[0, 1, 2, 3])).unwrap();
        assert!((r.ratio - (PI / 5.0).sin() / (2.0 * PI / 5.0).sin()).abs() < 1e-10);
        assert!((r.checks[0].rhs - 1.0 / (2f64.powf(2.5) * (PI / 5.0).cos() * 16.0)).abs() < 1e-12);
        assert!(r.passed(), "{:#?}", r.checks);
        assert!(r.chain.x.is_some());
    }

    #[test]
    fn electric_theorem_pair_exits_early() {
        let c = g(GeneratorSpec::cycle(8));
        let r = electric_theorem_check(&c, &set(&c, &[3, 4])).unwrap();
        assert_eq!(r.ratio, 1.0);
        assert!(r.chain.x.is_none());
        assert!(r.passed());
    }

    #[test]
    fn electric_theorem_lollipop() {
        let l = g(GeneratorSpec::lollipop(4, 8));
        let r = electric_theorem_check(&l, &set(&l, &[0, 1, 2, 3, 4, 5])).unwrap();
        assert!(r.passed(), "{:#?}", r.checks);
    }

    #[test]
    fn corollary_on_star() {
        let star = g(GeneratorSpec::star(3));
        let c = irregular_corollary_check(&star).unwrap();
        assert!((c.lhs - 1.0 / 6f64.sqrt()).abs() < 1e-12);
        assert!((c.rhs - 1.0 / (9.0 * 3f64.sqrt() * 32.0)).abs() < 1e-12);
        assert!(c.passed());
        assert!(irregular_corollary_check(&g(GeneratorSpec::cycle(5))).is_err());
    }

    #[test]
    fn corollary_on_path_and_lollipop() {
        assert!(irregular_corollary_check(&g(GeneratorSpec::multipath(5, 1))).unwrap().passed());
        assert!(irregular_corollary_check(&g(GeneratorSpec::lollipop(4, 8))).unwrap().passed());
    }
}
