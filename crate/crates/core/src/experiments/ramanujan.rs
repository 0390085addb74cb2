use std::collections::VecDeque;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::Report;
use crate::certificate::{CertifiedCheck, Verdict};
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::spectral::{default_tol, eig_sym, matrix_view, multiplicity, trace_power, Interval, MatrixKind, TraceMode};
use crate::walks::tree_closed_walk_count;

/// Two-colourability by BFS; a loop makes a graph non-bipartite.
pub fn is_bipartite(g: &Multigraph) -> bool {
    let mut colour: Vec<Option<bool>> = vec![None; g.n()];
    for start in 0..g.n() {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let cu = colour[u].unwrap();
            for &(w, _) in g.neighbors(u) {
                match colour[w] {
                    None => {
                        colour[w] = Some(!cu);
                        queue.push_back(w);
                    }
                    Some(cw) if cw == cu => return false,
                    _ => {}
                }
            }
        }
    }
    true
}

/// Trace lower bound on the number of adjacency eigenvalues in `[b, λ2]` of
/// a connected bipartite `d`-regular graph:
///
/// `m ≥ (tr A^{2k} - 2d^{2k} - (n-2) b^{2k}) / (2((2√(d-1))^{2k} - b^{2k}))`,
///
/// valid when every non-extremal eigenvalue has modulus at most `2√(d-1)`.
/// Also checks the tree lower bound `n · t_d(k) ≤ tr A^{2k}`.
pub fn ramanujan_trace_bound(g: &Multigraph, k: usize, b: f64) -> Result<Report> {
    if !g.is_connected() {
        return Err(Error::Disconnected("ramanujan bound needs a connected graph".into()));
    }
    if !g.is_regular() || !is_bipartite(g) {
        return Err(Error::pre("ramanujan bound needs a bipartite regular graph"));
    }
    let n = g.n();
    let d = g.max_degree();
    let df = d as f64;
    let radius = 2.0 * (df - 1.0).sqrt();
    if !(0.0..radius).contains(&b) {
        return Err(Error::param(format!("b = {b} must lie in [0, 2√(d-1)) = [0, {radius})")));
    }
    if k == 0 {
        return Err(Error::param("k must be positive"));
    }
    let two_k = 2 * k;
    let trace = trace_power(g, MatrixKind::Adjacency, two_k, TraceMode::ExactInteger)?;
    let eigs = eig_sym(&matrix_view(g, MatrixKind::Adjacency, None)?.matrix)?.eigenvalues;
    let float_trace: f64 = eigs.iter().map(|l| l.powi(two_k as i32)).sum();
    let tol = default_tol(&eigs);
    let worst = eigs[1..n - 1].iter().fold(0.0f64, |a, l| a.max(l.abs()));
    let ramanujan = worst <= radius + 1e-9;

    let p = two_k as i32;
    let m_lower = (trace.value - 2.0 * df.powi(p) - (n as f64 - 2.0) * b.powi(p)) / (2.0 * (radius.powi(p) - b.powi(p)));
    let lambda2 = eigs[1];
    let count = if b > lambda2 { 0 } else { multiplicity(&eigs, Interval::new(b, lambda2)?, tol) };

    let mut bound = CertifiedCheck::ge("multiplicity_lower", count as f64, m_lower.ceil())
        .vacuous_if(m_lower <= 0.0)
        .input("b", b)
        .input("lambda2", lambda2)
        .input("ramanujan", ramanujan);
    if !ramanujan {
        bound = bound.with_verdict(Verdict::Vacuous);
    }

    let tree = BigUint::from(n) * tree_closed_walk_count(d, k);
    let mut checks = vec![bound];
    if let Some(exact) = &trace.exact {
        checks.push(
            CertifiedCheck::le("tree_count", tree.to_f64().unwrap_or(f64::INFINITY), trace.value)
                .decided(&tree <= exact)
                .input("per_vertex", tree_closed_walk_count(d, k).to_str_radix(10)),
        );
        let rel = (trace.value - float_trace).abs() / trace.value.max(f64::MIN_POSITIVE);
        checks.push(CertifiedCheck::le("trace_exact_float", rel, 0.0).with_tol(1e-8));
    }

    let mut report = Report::new("ramanujan").param("n", n).param("d", d).param("k", k).param("b", b);
    report.checks = checks;
    report.set("m_lower", m_lower);
    report.set("count", count);
    report.set("lambda2", lambda2);
    report.set("ramanujan", ramanujan);
    report.set("max_nontrivial", worst);
    report.set("trace", &trace);
    report.set("float_trace", float_trace);
    report.set("tree_total", tree.to_str_radix(10));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorSpec};

    #[test]
    fn k33_is_vacuous() {
        let g = generate(&GeneratorSpec::complete_bipartite(3, 3)).unwrap();
        let r = ramanujan_trace_bound(&g, 2, 0.5).unwrap();
        assert_eq!(r.data["trace"]["exact"], "162");
        let m = r.data["m_lower"].as_f64().unwrap();
        assert!((m - (162.0 - 162.0 - 4.0 * 0.0625) / (2.0 * (64.0 - 0.0625))).abs() < 1e-15);
        assert_eq!(r.data["count"], 0);
        assert_eq!(r.check("multiplicity_lower").unwrap().verdict, Verdict::Vacuous);
        assert!(r.passed());
    }

    #[test]
    fn even_cycles() {
        for n in [4u64, 6, 10, 16] {
            let g = generate(&GeneratorSpec::cycle(n)).unwrap();
            for k in 1..=4 {
                let r = ramanujan_trace_bound(&g, k, 0.0).unwrap();
                assert!(r.passed(), "n={n} k={k}: {:#?}", r.checks);
            }
        }
    }

    #[test]
    fn tree_count_on_cubic_bipartite() {
        // K_{3,3}: tr A^4 = 162 >= 6 * 15
        let g = generate(&GeneratorSpec::complete_bipartite(3, 3)).unwrap();
        let r = ramanujan_trace_bound(&g, 2, 0.0).unwrap();
        let c = r.check("tree_count").unwrap();
        assert_eq!(c.lhs, 90.0);
        assert!(c.passed());
    }

    #[test]
    fn rejects_odd_cycle_and_bad_b() {
        let c5 = generate(&GeneratorSpec::cycle(5)).unwrap();
        assert!(!is_bipartite(&c5));
        assert!(ramanujan_trace_bound(&c5, 2, 0.0).is_err());
        let c6 = generate(&GeneratorSpec::cycle(6)).unwrap();
        assert!(ramanujan_trace_bound(&c6, 2, 2.0).is_err());
    }
}
