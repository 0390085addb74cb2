//! Unit-resistor networks on multigraphs: voltages, effective resistance,
//! contraction of a vertex set, absorbing-chain hitting probabilities and the
//! high-voltage neighbour of a contracted boundary.
//!
//! An edge of multiplicity `m` is `m` parallel unit resistors. Loops carry no
//! current and are ignored.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::certificate::CertifiedCheck;
use crate::error::{Error, Result};
use crate::graph::{boundary, Multigraph, MultigraphBuilder, VertexSet};

/// Largest Kirchhoff violation accepted from a solve.
pub const SOLVE_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct VoltageSolution {
    /// Voltage at every vertex; 0 on vertices that cannot reach `t`
    /// without passing `s`.
    pub f: Vec<f64>,
    pub s: usize,
    pub t: usize,
    /// Net current entering `s`, equal to `1 / Reff(s, t)`.
    pub flow_out: f64,
    pub residual: f64,
}

/// Solves the Dirichlet problem with `f = 0` on `zero` and `f = 1` on `one`:
/// harmonic (w.r.t. the loopless Laplacian) everywhere else. Vertices with no
/// path to `one` avoiding `zero` get 0.
fn dirichlet(g: &Multigraph, zero: &[usize], one: &[usize]) -> Result<(Vec<f64>, f64)> {
    let n = g.n();
    let mut fixed: Vec<Option<f64>> = vec![None; n];
    for &v in zero {
        fixed[v] = Some(0.0);
    }
    for &v in one {
        fixed[v] = Some(1.0);
    }
    // interior vertices that can reach `one` through the interior
    let mut live = vec![false; n];
    let mut stack: Vec<usize> = one.to_vec();
    while let Some(v) = stack.pop() {
        for (w, _) in g.proper_neighbors(v) {
            if fixed[w].is_none() && !live[w] {
                live[w] = true;
                stack.push(w);
            }
        }
    }
    let interior: Vec<usize> = (0..n).filter(|&v| live[v]).collect();
    let mut slot = vec![usize::MAX; n];
    for (i, &v) in interior.iter().enumerate() {
        slot[v] = i;
    }

    let m = interior.len();
    let mut f: Vec<f64> = fixed.iter().map(|x| x.unwrap_or(0.0)).collect();
    if m > 0 {
        let mut lap = DMatrix::<f64>::zeros(m, m);
        let mut rhs = DVector::<f64>::zeros(m);
        for (i, &v) in interior.iter().enumerate() {
            for (w, mult) in g.proper_neighbors(v) {
                let c = mult as f64;
                lap[(i, i)] += c;
                match fixed[w] {
                    Some(val) => rhs[i] += c * val,
                    None if live[w] => lap[(i, slot[w])] -= c,
                    None => unreachable!("interior neighbours of live vertices are live"),
                }
            }
        }
        let chol = lap
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NonConvergence("grounded Laplacian is not positive definite".into()))?;
        let x = chol.solve(&rhs);
        for (i, &v) in interior.iter().enumerate() {
            f[v] = x[i];
        }
    }

    let mut residual: f64 = 0.0;
    for &v in &interior {
        let net: f64 = g.proper_neighbors(v).map(|(w, mult)| mult as f64 * (f[v] - f[w])).sum();
        residual = residual.max(net.abs());
    }
    if residual > SOLVE_RESIDUAL {
        return Err(Error::NonConvergence(format!("Kirchhoff residual {residual:e}")));
    }
    Ok((f, residual))
}

fn check_vertex(g: &Multigraph, v: usize, what: &str) -> Result<()> {
    if v >= g.n() {
        return Err(Error::param(format!("{what} {v} out of range (n = {})", g.n())));
    }
    Ok(())
}

/// Voltages with `f(s) = 0`, `f(t) = 1`.
pub fn voltages(g: &Multigraph, s: usize, t: usize) -> Result<VoltageSolution> {
    check_vertex(g, s, "vertex")?;
    check_vertex(g, t, "vertex")?;
    if s == t {
        return Err(Error::param("source and sink coincide"));
    }
    if g.distances_from(s)[t].is_none() {
        return Err(Error::Disconnected(format!("{s} and {t} lie in different components")));
    }
    let (f, residual) = dirichlet(g, &[s], &[t])?;
    let flow_out = g.proper_neighbors(s).map(|(w, m)| m as f64 * f[w]).sum();
    Ok(VoltageSolution { f, s, t, flow_out, residual })
}

pub fn effective_resistance(g: &Multigraph, a: usize, b: usize) -> Result<f64> {
    Ok(1.0 / voltages(g, a, b)?.flow_out)
}

/// `G` with the vertex set `B` merged into one vertex.
#[derive(Debug, Clone)]
pub struct Contraction {
    pub graph: Multigraph,
    /// The merged vertex; always the last id.
    pub s: usize,
    /// Original vertex -> vertex of the contracted graph.
    pub to_k: Vec<usize>,
    /// Contracted vertex (other than `s`) -> original vertex.
    pub from_k: Vec<usize>,
}

/// Contracts `b` to a single vertex `s`. Edges inside `b` (and loops on it)
/// are dropped, edges into `b` are redirected to `s` with multiplicities
/// summed. Remaining vertices keep their relative order.
pub fn contract(g: &Multigraph, b: &VertexSet) -> Result<Contraction> {
    if b.is_full() {
        return Err(Error::pre("cannot contract the whole vertex set"));
    }
    let from_k: Vec<usize> = (0..g.n()).filter(|&v| !b.contains(v)).collect();
    let s = from_k.len();
    let mut to_k = vec![s; g.n()];
    for (i, &v) in from_k.iter().enumerate() {
        to_k[v] = i;
    }
    let mut builder = MultigraphBuilder::new(s + 1);
    for (u, v, m) in g.edges() {
        match (b.contains(u), b.contains(v)) {
            (true, true) => {}
            _ if u == v => {
                builder.add_loop(to_k[u], m);
            }
            _ => {
                builder.add_edge(to_k[u], to_k[v], m);
            }
        }
    }
    Ok(Contraction { graph: builder.build()?, s, to_k, from_k })
}

/// `P_x(τ_target < τ_taboo)` for the simple random walk, from the
/// absorbing-chain system `(I - Q) h = r` over transient states.
/// `taboo` may be empty.
pub fn hitting_prob(g: &Multigraph, x: usize, target: &[usize], taboo: &[usize]) -> Result<f64> {
    check_vertex(g, x, "start vertex")?;
    if target.is_empty() {
        return Err(Error::param("empty target set"));
    }
    let target = VertexSet::new(g, target.iter().copied())?;
    let taboo = VertexSet::with_parent_n(g.n(), taboo.iter().copied()).ok();
    let taboo = |v: usize| taboo.as_ref().is_some_and(|t| t.contains(v));
    if target.members().iter().any(|&v| taboo(v)) {
        return Err(Error::param("target and taboo sets intersect"));
    }
    if target.contains(x) || taboo(x) {
        return Err(Error::param("start vertex lies in the target or taboo set"));
    }
    let absorbing = |v: usize| target.contains(v) || taboo(v);
    let reach = g.distances_within(x, |v| !absorbing(v) || target.contains(v));
    if !target.members().iter().any(|&t| reach[t].is_some()) {
        return Ok(0.0);
    }
    // transient states: non-absorbing vertices reachable from x
    let states: Vec<usize> = (0..g.n()).filter(|&v| !absorbing(v) && reach[v].is_some()).collect();
    let mut slot = vec![usize::MAX; g.n()];
    for (i, &v) in states.iter().enumerate() {
        slot[v] = i;
    }
    let m = states.len();
    let mut sys = DMatrix::<f64>::identity(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for (i, &v) in states.iter().enumerate() {
        let d = g.degree(v) as f64;
        for &(w, mult) in g.neighbors(v) {
            let p = mult as f64 / d;
            if target.contains(w) {
                rhs[i] += p;
            } else if !taboo(w) {
                sys[(i, slot[w])] -= p;
            }
        }
    }
    let h = sys
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NonConvergence("absorbing system is singular".into()))?;
    let residual = (&sys * &h - &rhs).amax();
    if residual > SOLVE_RESIDUAL {
        return Err(Error::NonConvergence(format!("absorbing-chain residual {residual:e}")));
    }
    Ok(h[slot[x]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoltageMode {
    Electric,
    /// `t` already lies on the boundary; nothing to find.
    BoundaryMax,
}

#[derive(Debug, Clone, Serialize)]
pub struct HighVoltage {
    pub x: usize,
    pub f_x: f64,
    pub mode: VoltageMode,
    pub t: usize,
    pub boundary: Vec<usize>,
    /// `deg_K(s)`: edges from the boundary to the rest of `G`.
    pub deg_s: u64,
    /// Net current from `s` to `t` in the contracted graph.
    pub current: f64,
    pub checks: Vec<CertifiedCheck>,
}

impl HighVoltage {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CertifiedCheck::passed)
    }
}

/// Contracts the boundary `B` of `S` to `s`, puts unit voltage on `t` and
/// returns the interior neighbour `x` of `B` with the largest voltage (ties to
/// the smallest id). The certificate checks the Ohm-law lower bounds and that
/// `f(x)` equals the hitting probability `P_x(τ_t < τ_B)` in `G`.
pub fn find_high_voltage_boundary_neighbor(g: &Multigraph, set: &VertexSet, t: usize) -> Result<HighVoltage> {
    check_vertex(g, t, "vertex")?;
    if !set.contains(t) {
        return Err(Error::pre(format!("t = {t} is not in S")));
    }
    if !g.is_connected_on(set) {
        return Err(Error::Disconnected("S does not induce a connected subgraph".into()));
    }
    let bd = boundary(g, set)?;
    let b = bd.vertices;
    if b.contains(t) {
        return Ok(HighVoltage {
            x: t,
            f_x: 1.0,
            mode: VoltageMode::BoundaryMax,
            t,
            boundary: b.members().to_vec(),
            deg_s: 0,
            current: f64::INFINITY,
            checks: Vec::new(),
        });
    }

    let k = contract(g, &b)?;
    let sol = voltages(&k.graph, k.s, k.to_k[t])?;
    let deg_s = k.graph.degree(k.s);
    let mut best: Option<(usize, f64)> = None;
    for (w, _) in k.graph.proper_neighbors(k.s) {
        let fx = sol.f[w];
        let orig = k.from_k[w];
        if !set.contains(orig) {
            continue;
        }
        match best {
            Some((bx, bf)) if bf > fx || (bf == fx && bx < orig) => {}
            _ => best = Some((orig, fx)),
        }
    }
    let (x, f_x) = best.ok_or_else(|| Error::pre("boundary has no neighbour inside S"))?;

    let size = set.len() as f64;
    let delta = g.max_degree() as f64;
    // τ_t = 0 when the walk starts at t
    let hit = if x == t { 1.0 } else { hitting_prob(g, x, &[t], b.members())? };
    let checks = vec![
        CertifiedCheck::ge("current_lower_bound", sol.flow_out, 1.0 / size),
        CertifiedCheck::ge("ohm_edge_bound", f_x, 1.0 / (size * deg_s as f64)).input("deg_s", deg_s),
        CertifiedCheck::ge("ohm_degree_bound", f_x, 1.0 / (delta * size * size)),
        CertifiedCheck::le("hitting_identity", (f_x - hit).abs(), 0.0).with_tol(1e-7).input("hitting_prob", hit),
    ];
    Ok(HighVoltage {
        x,
        f_x,
        mode: VoltageMode::Electric,
        t,
        boundary: b.members().to_vec(),
        deg_s,
        current: sol.flow_out,
        checks: checks.into_iter().map(|c| c.input("x", x).input("t", t)).collect(),
    })
}
