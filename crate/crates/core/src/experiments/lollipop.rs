use num_bigint::BigInt;
use num_rational::BigRational;

use super::{Csv, Report};
use crate::certificate::CertifiedCheck;
use crate::error::{Error, Result};
use crate::graph::{generate, GeneratorSpec, VertexSet};
use crate::spectral::{perron, MatrixKind};
use crate::walks::{ratio_string, ratio_to_f64, support_counts_exact};

/// Clique-plus-path report at the attachment vertex `v = 0`.
///
/// Checks `ψ(v) ≥ 1/√(d+2)` for the adjacency Perron vector, and that the
/// fraction of closed `2k`-walks at `v` with support at least `ℓ + d + 1` is
/// at most `(d+2)(2k+1) 2^{2ℓ} / λ1^{2ℓ}`. Walks are counted, not weighted.
pub fn lollipop_report(d: u64, n: u64, k: usize, ell: usize) -> Result<Report> {
    if d < 3 {
        return Err(Error::param(format!("lollipop report needs d >= 3 (got {d})")));
    }
    if k == 0 {
        return Err(Error::param("k must be positive"));
    }
    let g = generate(&GeneratorSpec::lollipop(d, n))?;
    let v = 0;
    let p = perron(&g, &VertexSet::all(&g), MatrixKind::Adjacency)?;
    let psi_v = p.at(v).expect("v is a vertex");
    let lambda1 = p.lambda1;
    let df = d as f64;
    let two_k = 2 * k;

    let counts = support_counts_exact(&g, v, two_k)?;
    let deep = counts.at_least(ell + d as usize + 1);
    let total = counts.total();
    let fraction = BigRational::new(BigInt::from(deep.clone()), BigInt::from(total.clone()));
    let rhs = (df + 2.0) * (two_k as f64 + 1.0) * 4f64.powi(ell as i32) / lambda1.powi(2 * ell as i32);

    let mut report = Report::new("lollipop").param("d", d).param("n", n).param("k", k).param("ell", ell);
    report.checks.push(CertifiedCheck::ge("perron_attachment", psi_v, 1.0 / (df + 2.0).sqrt()).input("v", v));
    report.checks.push(
        CertifiedCheck::le("depth_fraction", ratio_to_f64(&fraction), rhs)
            .vacuous_if(rhs >= 1.0)
            .input("min_support", ell + d as usize + 1)
            .input("two_k", two_k),
    );
    let ell_star = 2.0 * (k as f64).ln() / (lambda1 / 2.0).ln();
    report.set("vertices", g.n());
    report.set("lambda1", lambda1);
    report.set("psi_v", psi_v);
    report.set("deep_walks", deep.to_str_radix(10));
    report.set("total_walks", total.to_str_radix(10));
    report.set("fraction", ratio_string(&fraction));
    report.set("ell_star", ell_star);

    let mut csv = Csv::new(&["d", "n", "two_k", "ell", "psi_v", "fraction", "bound"]);
    csv.push(vec![
        d.to_string(),
        n.to_string(),
        two_k.to_string(),
        ell.to_string(),
        psi_v.to_string(),
        ratio_to_f64(&fraction).to_string(),
        rhs.to_string(),
    ]);
    report.csv = Some(csv);
    Ok(report)
}
