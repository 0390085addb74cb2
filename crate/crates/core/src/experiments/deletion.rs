use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Report;
use crate::certificate::{CertifiedCheck, Verdict};
use crate::error::{Error, Result};
use crate::graph::{graph_stats, lazy_transform, Multigraph, VertexSet};
use crate::spectral::{
    default_tol, eig_sym, interlacing_from_spectra, matrix_view, multiplicity, rayleigh_lambda2_lower_bound, Interval,
    MatrixKind,
};
use crate::walks::closed_walk_probs;
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeletionVariant {
    /// Bounded max degree: `s = ¼ (k / (Δ^7 ln Δ))^{1/5}`.
    Normalized,
    /// Simple `d`-regular: `s = min{⅛ (k / ln d)^{1/4}, (d - h)/2}`.
    HighDeg,
}

impl std::str::FromStr for DeletionVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(DeletionVariant::Normalized),
            "highdeg" => Ok(DeletionVariant::HighDeg),
            _ => Err(Error::param(format!("unknown variant '{s}' (normalized|highdeg)"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeletionOptions {
    pub variant: DeletionVariant,
    /// Number of random deletions tried; the one with the smallest
    /// `tr(Ã_H^{2k})` is kept.
    pub retries: usize,
    pub exec: Exec,
}

impl Default for DeletionOptions {
    fn default() -> Self {
        DeletionOptions { variant: DeletionVariant::Normalized, retries: 1, exec: Exec::default() }
    }
}

/// Derived parameters. Logs are natural; `log_Δ n = ln n / ln Δ`.
#[derive(Debug, Clone, Serialize)]
pub struct DeletionParams {
    pub n: usize,
    pub max_degree: u64,
    pub lazy: bool,
    /// `⌈⅓ log_Δ n⌉`
    pub k: usize,
    pub two_k: usize,
    /// `2 ln k`
    pub c: f64,
    pub s_raw: f64,
    /// `max(1, ⌊s_raw⌋)`
    pub s: usize,
    pub s_floor_binds: bool,
    /// `c / (2 log_Δ n)`
    pub eps: f64,
    /// `⌈c n / s⌉`
    pub deletions_raw: usize,
    /// `deletions_raw` capped at `n - 1`
    pub deletions: usize,
    pub deletions_capped: bool,
}

fn params(g: &Multigraph, variant: DeletionVariant, lazy: bool) -> DeletionParams {
    let n = g.n();
    let delta = g.max_degree();
    let (df, nf) = (delta as f64, n as f64);
    let log_delta_n = nf.ln() / df.ln();
    let k = ((log_delta_n / 3.0).ceil() as usize).max(1);
    let kf = k as f64;
    let c = 2.0 * kf.ln();
    let s_raw = match variant {
        DeletionVariant::Normalized => {
            let coef = if lazy { 1.0 / 11.0 } else { 0.25 };
            coef * (kf / (df.powi(7) * df.ln())).powf(0.2)
        }
        DeletionVariant::HighDeg => {
            // the lazy graph has d loops at every vertex and degree 2d
            (0.125 * (kf / df.ln()).powf(0.25)).min(df / 2.0)
        }
    };
    let s = (s_raw.floor() as usize).max(1);
    let deletions_raw = (c * nf / s as f64).ceil().max(0.0) as usize;
    let deletions = deletions_raw.min(n.saturating_sub(1));
    DeletionParams {
        n,
        max_degree: delta,
        lazy,
        k,
        two_k: 2 * k,
        c,
        s_raw,
        s,
        s_floor_binds: s_raw < 1.0,
        eps: c / (2.0 * log_delta_n),
        deletions_raw,
        deletions,
        deletions_capped: deletions < deletions_raw,
    }
}

fn vacuous(mut report: Report, reason: &str, lhs: f64, rhs: f64) -> Report {
    report.set("regime", "vacuous");
    report.set("vacuous_reason", reason);
    report.checks.push(CertifiedCheck::ge("regime", lhs, rhs).with_verdict(Verdict::Vacuous).input("reason", reason));
    report
}

/// One randomized run of the deletion argument: delete `D = ⌈cn/s⌉`
/// vertices uniformly at random, take `H` as the principal submatrix on the
/// rest, and evaluate every inequality of the trace chain for the realized
/// `H`. A lazy walk is used when `|λ_n| > |λ_2|`.
pub fn deletion_pipeline(g: &Multigraph, seed: u64, opts: &DeletionOptions) -> Result<Report> {
    if !g.is_connected() {
        return Err(Error::Disconnected("deletion pipeline needs a connected graph".into()));
    }
    if opts.retries == 0 {
        return Err(Error::param("retries must be at least 1"));
    }
    if opts.variant == DeletionVariant::HighDeg {
        let simple = !g.has_loops() && g.edges().all(|(_, _, m)| m == 1);
        if !(simple && g.is_regular()) {
            return Err(Error::pre("the high-degree variant needs a simple regular graph"));
        }
    }
    let mut report = Report::new("deletion")
        .param("n", g.n())
        .param("seed", seed)
        .param("variant", opts.variant)
        .param("retries", opts.retries);

    let delta = g.max_degree();
    if delta < 2 {
        report.set("params", params(g, opts.variant, false));
        return Ok(vacuous(report, "max degree below 2", delta as f64, 2.0));
    }
    let base = eig_sym(&matrix_view(g, MatrixKind::NormalizedAdjacency, None)?.matrix)?.eigenvalues;
    let lambda2_g = base[1];
    let lambda_n_g = *base.last().unwrap();
    let lazy = lambda_n_g.abs() > lambda2_g.abs();
    let p = params(g, opts.variant, lazy);
    report.set("params", &p);
    report.set("lambda2_input", lambda2_g);
    report.set("lambda_n_input", lambda_n_g);

    let diameter = graph_stats(g).diameter.unwrap_or(0);
    report.set("diameter", diameter);
    if diameter < 4 {
        return Ok(vacuous(report, "diameter below 4", diameter as f64, 4.0));
    }
    if p.c <= 0.0 || p.deletions == 0 {
        return Ok(vacuous(report, "k = 1 gives c = 0: no deletions", p.c, 0.0));
    }

    let work = if lazy { lazy_transform(g) } else { g.clone() };
    let full = if lazy { base.iter().map(|l| (1.0 + l) / 2.0).collect::<Vec<_>>() } else { base };
    let n = g.n();
    let two_k = p.two_k as i32;
    let lambda2 = full[1];
    let interval = Interval::new((1.0 - p.eps) * lambda2, lambda2)?;
    let trace_g: f64 = full.iter().map(|l| l.powi(two_k)).sum();

    // best of R uniform deletions
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Vec<usize>, Vec<f64>, f64, usize)> = None;
    for attempt in 0..opts.retries {
        let mut deleted = rand::seq::index::sample(&mut rng, n, p.deletions).into_vec();
        deleted.sort_unstable();
        let del = VertexSet::with_parent_n(n, deleted.iter().copied())?;
        let kept = del.complement().expect("at least one vertex kept");
        let sub = eig_sym(&matrix_view(&work, MatrixKind::NormalizedAdjacency, Some(&kept))?.matrix)?.eigenvalues;
        let trace_h: f64 = sub.iter().map(|l| l.powi(two_k)).sum();
        if best.as_ref().is_none_or(|b| trace_h < b.2) {
            best = Some((deleted, sub, trace_h, attempt));
        }
    }
    let (deleted, sub, trace_h, attempt) = best.expect("retries >= 1");

    let tol = default_tol(&full);
    let m_full = multiplicity(&full, interval, tol);
    let m_sub = multiplicity(&sub, interval, tol + crate::certificate::DEFAULT_TOL);
    let walk_sum: f64 = closed_walk_probs(&work, p.two_k, opts.exec)?.iter().sum();
    let witness = rayleigh_lambda2_lower_bound(&work)?;
    let top = (1.0 - p.eps).powi(two_k) * lambda2.powi(two_k);

    let checks = vec![
        CertifiedCheck::le("mprime_trace", m_sub as f64 * top, trace_h).input("m_sub", m_sub),
        CertifiedCheck::le("trace_dominance", trace_h, trace_g),
        CertifiedCheck::le("trace_spectral_bound", trace_g, n as f64 * lambda2.powi(two_k) + 1.0),
        interlacing_from_spectra(&full, &sub, &deleted, interval),
        CertifiedCheck::le("rayleigh_lambda2", witness.bound, lambda2)
            .input("edge_plus", witness.edge_plus)
            .input("edge_minus", witness.edge_minus),
        CertifiedCheck::ge("n_lambda2_power", n as f64 * lambda2.powi(two_k), 1.0),
        CertifiedCheck::le("trace_walk_identity", (trace_g - walk_sum).abs(), 0.0).with_tol(1e-8),
    ];
    report.checks = checks;

    let asymptotic_mprime = 4.0 * n as f64 * (3.0 * p.k as f64 * p.eps - p.c).exp();
    report.set("regime", "evaluated");
    report.set("lambda2", lambda2);
    report.set("interval", interval);
    report.set("m_full", m_full);
    report.set("m_sub", m_sub);
    report.set("trace_full", trace_g);
    report.set("trace_sub", trace_h);
    report.set("walk_trace", walk_sum);
    report.set("rayleigh_bound", witness.bound);
    report.set("rayleigh_raw", witness.raw);
    report.set("deleted", &deleted);
    report.set("attempt", attempt);
    report.set("asymptotic_mprime_bound", asymptotic_mprime);
    report.set("asymptotic_multiplicity_bound", p.deletions as f64 + asymptotic_mprime);

    let mut csv = super::Csv::new(&["n", "seed", "k", "s", "deletions", "lambda2", "m_full", "m_sub", "trace_full", "trace_sub"]);
    csv.push(vec![
        n.to_string(),
        seed.to_string(),
        p.k.to_string(),
        p.s.to_string(),
        p.deletions.to_string(),
        lambda2.to_string(),
        m_full.to_string(),
        m_sub.to_string(),
        trace_g.to_string(),
        trace_h.to_string(),
    ]);
    report.csv = Some(csv);
    Ok(report)
}
