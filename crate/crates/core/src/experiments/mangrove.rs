use serde::Serialize;

use super::{Csv, Report};
use crate::certificate::CertifiedCheck;
use crate::error::{Error, Result};
use crate::graph::{generate, mangrove_depth, GeneratorSpec, Multigraph, VertexSet};
use crate::spectral::{eig_sym, perron, MatrixKind, MAX_DIM};
use nalgebra::DMatrix;

/// Quotient of the mangrove graph by its regular partition: path vertices
/// are singletons, tree vertices are grouped by tree and depth.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientModel {
    pub classes: Vec<Vec<usize>>,
    /// `b_q[i][j]` = neighbours a vertex of `X_i` has in `X_j`.
    pub b_q: Vec<Vec<u64>>,
    /// `C = D^{-1} B_Q D`, `D_ii = |X_i|^{-1/2}`.
    pub c: Vec<Vec<f64>>,
    pub lambda1: f64,
    /// Nonnegative unit Perron vector of `C`.
    pub perron: Vec<f64>,
    /// Index of `X_0` (first root) among the classes.
    pub first_tree: usize,
    pub depth: usize,
}

fn tree_levels(start: usize, d: usize, depth: usize) -> (Vec<Vec<usize>>, usize) {
    let mut levels = Vec::with_capacity(depth + 1);
    let mut next = start;
    let mut size = 1;
    for i in 0..=depth {
        levels.push((next..next + size).collect());
        next += size;
        size *= if i == 0 { d / 2 } else { d - 1 };
    }
    (levels, next)
}

/// Builds and verifies the regular partition of `mangrove(d, n)`.
pub fn mangrove_quotient(g: &Multigraph, d: u64, n: usize) -> Result<QuotientModel> {
    let depth = mangrove_depth(d, n as u64);
    let mut classes: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let (first, after) = tree_levels(n, d as usize, depth);
    let (second, end) = tree_levels(after, d as usize, depth);
    if end != g.n() {
        return Err(Error::pre(format!("graph has {} vertices, expected a mangrove with {end}", g.n())));
    }
    classes.extend(first);
    classes.extend(second);

    let m = classes.len();
    let mut class_of = vec![0; g.n()];
    for (i, cls) in classes.iter().enumerate() {
        for &u in cls {
            class_of[u] = i;
        }
    }
    let mut b_q = vec![vec![0u64; m]; m];
    for (i, cls) in classes.iter().enumerate() {
        for (k, &u) in cls.iter().enumerate() {
            let mut row = vec![0u64; m];
            for &(w, mult) in g.neighbors(u) {
                row[class_of[w]] += mult;
            }
            if k == 0 {
                b_q[i] = row;
            } else if row != b_q[i] {
                return Err(Error::pre(format!("partition is not regular at class {i} (vertex {u})")));
            }
        }
    }
    let sizes: Vec<f64> = classes.iter().map(|c| c.len() as f64).collect();
    let c = DMatrix::from_fn(m, m, |i, j| b_q[i][j] as f64 * (sizes[i] / sizes[j]).sqrt());
    let eig = eig_sym(&c)?;
    let mut perron = eig.vector(0);
    if perron.iter().sum::<f64>() < 0.0 {
        perron.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(QuotientModel {
        classes,
        b_q,
        c: (0..m).map(|i| (0..m).map(|j| c[(i, j)]).collect()).collect(),
        lambda1: eig.lambda1(),
        perron,
        first_tree: n,
        depth,
    })
}

/// `r_i / r_0 = sinh((ℓ+1-i)θ) (d-1)^{-i/2} / sinh((ℓ+1)θ)`.
fn sinh_ratio(lambda1: f64, d: f64, depth: usize, i: usize) -> f64 {
    let a = lambda1 / (2.0 * (d - 1.0).sqrt());
    let theta = (a + (a * a - 1.0).sqrt()).ln();
    let l1 = (depth + 1) as f64;
    ((l1 - i as f64) * theta).sinh() * (d - 1.0).powf(-(i as f64) / 2.0) / (l1 * theta).sinh()
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Per-`n` quotient checks plus the fitted exponent of the leaf entry.
pub fn mangrove_report(d: u64, n_list: &[u64]) -> Result<Report> {
    if n_list.is_empty() {
        return Err(Error::param("empty n list"));
    }
    let df = d as f64;
    let mut report = Report::new("mangrove").param("d", d).param("n", n_list);
    let mut csv = Csv::new(&["n", "depth", "vertices", "lambda1", "psi_root", "psi_leaf", "end_ratio", "end_bound"]);
    let mut rows = Vec::new();
    let (mut log_n, mut log_leaf) = (Vec::new(), Vec::new());
    for &n in n_list {
        let spec = GeneratorSpec::mangrove(d, n);
        spec.validate()?;
        let depth = mangrove_depth(d, n);
        let vertices = n as usize + 2 * (0..=depth).map(|i| if i == 0 { 1 } else { (d / 2) * (d - 1).pow(i as u32 - 1) } as usize).sum::<usize>();
        if vertices > MAX_DIM {
            return Err(Error::Capacity(format!("mangrove(d={d}, n={n}) has {vertices} vertices > {MAX_DIM}")));
        }
        let g = generate(&spec)?;
        let q = mangrove_quotient(&g, d, n as usize)?;
        let psi = perron(&g, &VertexSet::all(&g), MatrixKind::Adjacency)?;
        let lambda1 = psi.lambda1;

        let mass_err = q
            .classes
            .iter()
            .zip(&q.perron)
            .map(|(cls, pc)| (pc * pc - cls.iter().map(|&u| psi.vector[u].powi(2)).sum::<f64>()).abs())
            .fold(0.0, f64::max);
        let r: Vec<f64> = q.classes[q.first_tree..=q.first_tree + q.depth].iter().map(|c| psi.vector[c[0]]).collect();
        let sinh_err = (0..=q.depth)
            .map(|i| {
                let f = sinh_ratio(lambda1, df, q.depth, i);
                ((r[i] / r[0]) - f).abs() / f
            })
            .fold(0.0, f64::max);
        let end_ratio = r[q.depth] / r[0];
        let end_bound = 3.0 * df / n as f64;

        report.checks.push(CertifiedCheck::le("regular_partition", 0.0, 0.0).input("n", n).input("classes", q.classes.len()));
        report.checks.push(CertifiedCheck::le("quotient_lambda1", (q.lambda1 - lambda1).abs(), 0.0).with_tol(1e-9).input("n", n));
        report.checks.push(CertifiedCheck::le("mass", mass_err, 0.0).with_tol(1e-7).input("n", n));
        report.checks.push(CertifiedCheck::le("sinh_formula", sinh_err, 0.0).with_tol(1e-6).input("n", n).input("depth", q.depth));
        report.checks.push(CertifiedCheck::le("end_bound", end_ratio, end_bound).input("n", n));

        log_n.push((n as f64).ln());
        log_leaf.push(r[q.depth].ln());
        csv.push(vec![
            n.to_string(),
            q.depth.to_string(),
            g.n().to_string(),
            lambda1.to_string(),
            r[0].to_string(),
            r[q.depth].to_string(),
            end_ratio.to_string(),
            end_bound.to_string(),
        ]);
        rows.push(serde_json::json!({
            "n": n, "depth": q.depth, "vertices": g.n(), "lambda1": lambda1,
            "psi_root": r[0], "psi_leaf": r[q.depth], "end_ratio": end_ratio,
            "mass_error": mass_err, "sinh_error": sinh_err,
        }));
    }
    report.set("instances", rows);
    if log_n.len() >= 2 {
        let s = slope(&log_n, &log_leaf);
        report.set("slope", s);
        report.checks.push(CertifiedCheck::ge("leaf_slope_lower", s, -2.8));
        report.checks.push(CertifiedCheck::le("leaf_slope_upper", s, -2.2));
    } else {
        report.set("slope", serde_json::Value::Null);
    }
    report.csv = Some(csv);
    Ok(report)
}
