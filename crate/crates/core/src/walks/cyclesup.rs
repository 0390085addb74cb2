use num_traits::ToPrimitive;
use serde::Serialize;

use super::exact::{support_profile_exact, MAX_EXACT_VERTICES};
use super::mc::{support_profile_mc, wilson};
use crate::certificate::{CertifiedCheck, Relation, Verdict};
use crate::error::{Error, Result};
use crate::graph::Multigraph;

/// Sample size and seed used when the exact profile is out of reach.
pub const CYCLESUP_MC_SAMPLES: usize = 100_000;
pub const CYCLESUP_MC_SEED: u64 = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleSupVariant {
    /// Bounded-degree bound with rate `k / (65 Δ^7 s^4)`.
    Normalized,
    /// Regular graphs with `h` loops per vertex, rate `k / (100 s^3)`.
    HighDeg,
}

impl std::str::FromStr for CycleSupVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(CycleSupVariant::Normalized),
            "highdeg" => Ok(CycleSupVariant::HighDeg),
            _ => Err(Error::param(format!("unknown variant '{s}' (normalized|highdeg)"))),
        }
    }
}

struct Range {
    threshold: f64,
    in_range: bool,
    rate: f64,
    hypotheses: bool,
}

fn range(g: &Multigraph, k: usize, s: usize, variant: CycleSupVariant) -> Range {
    let kf = k as f64;
    let sf = s as f64;
    match variant {
        CycleSupVariant::Normalized => {
            let delta = g.max_degree() as f64;
            let threshold = 0.25 * (kf / (delta.powi(7) * delta.ln())).powf(0.2);
            let hypotheses = g.is_connected() && 2 * k < g.n();
            Range {
                threshold,
                in_range: hypotheses && sf <= threshold,
                rate: kf / (65.0 * delta.powi(7) * sf.powi(4)),
                hypotheses,
            }
        }
        CycleSupVariant::HighDeg => {
            let d = g.max_degree();
            let h = g.loop_mult(0);
            let uniform_loops = (0..g.n()).all(|v| g.loop_mult(v) == h);
            let simple = g.edges().all(|(u, v, m)| u == v || m == 1);
            let hypotheses = g.is_regular() && uniform_loops && simple;
            let df = d as f64;
            let threshold = (0.125 * (kf / df.ln()).powf(0.25)).min((df - h as f64) / 2.0);
            Range { threshold, in_range: hypotheses && sf <= threshold, rate: kf / (100.0 * sf.powi(3)), hypotheses }
        }
    }
}

/// Checks `P_x(W^{2k,s}) <= exp(-rate) P_x(W^{2k,2s})`.
///
/// Both sides are always evaluated. The verdict is vacuous outside the
/// stated range or when either side vanishes. Graphs above the exact DP
/// capacity use Monte Carlo and may come back inconclusive.
pub fn cyclesup_check(g: &Multigraph, x: usize, k: usize, s: usize, variant: CycleSupVariant) -> Result<CertifiedCheck> {
    if s == 0 {
        return Err(Error::param("s must be positive"));
    }
    let r = range(g, k, s, variant);
    let factor = (-r.rate).exp();
    let name = match variant {
        CycleSupVariant::Normalized => "cyclesup",
        CycleSupVariant::HighDeg => "cyclesup_highdeg",
    };

    let (check, mode) = if g.n() <= MAX_EXACT_VERTICES {
        let p = support_profile_exact(g, x, 2 * k)?;
        let small = p.at_most_exact(s).expect("exact profile");
        let big = p.at_most_exact(2 * s).expect("exact profile");
        let lhs = p.at_most(s);
        let big_f = p.at_most(2 * s);
        let rhs = big_f * factor;
        // rhs - lhs = (P(2s) - P(s)) - P(2s) (1 - e^{-rate}), with the
        // difference taken exactly
        let gap = (big - small).to_f64().unwrap_or(f64::NAN);
        let slack = gap - big_f * (-(-r.rate).exp_m1());
        let tol = 1e-12 * rhs.abs().max(f64::MIN_POSITIVE);
        let c = CertifiedCheck::new(name, lhs, rhs, Relation::Le, tol).with_slack(slack);
        (c, "exact")
    } else {
        let p = support_profile_mc(g, x, 2 * k, CYCLESUP_MC_SAMPLES, CYCLESUP_MC_SEED)?;
        let total = p.total_closed.value;
        let n = CYCLESUP_MC_SAMPLES as f64;
        let ci = |frac: f64| wilson((frac * n).round(), n);
        let (s_lo, s_hi) = ci(p.at_most(s) / total);
        let (b_lo, b_hi) = ci(p.at_most(2 * s) / total);
        let lhs = p.at_most(s);
        let rhs = p.at_most(2 * s) * factor;
        let mut c = CertifiedCheck::le(name, lhs, rhs);
        c = if s_hi * total <= b_lo * total * factor {
            c.with_verdict(Verdict::Pass)
        } else if s_lo * total > b_hi * total * factor {
            c.with_verdict(Verdict::Fail)
        } else {
            c.with_verdict(Verdict::Inconclusive)
        };
        let c = c.input("lhs_ci95", (s_lo * total, s_hi * total)).input("rhs_ci95", (b_lo * total * factor, b_hi * total * factor));
        (c, "mc")
    };

    let trivial = check.lhs == 0.0 || check.rhs == 0.0;
    let verdict = if !r.in_range || trivial { Verdict::Vacuous } else { check.verdict };
    Ok(check
        .with_verdict(verdict)
        .input("x", x)
        .input("k", k)
        .input("s", s)
        .input("variant", variant)
        .input("max_degree", g.max_degree())
        .input("threshold", r.threshold)
        .input("hypotheses_met", r.hypotheses)
        .input("in_range", r.in_range)
        .input("rate", r.rate)
        .input("mode", mode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, lazy_transform, GeneratorSpec};

    fn g(spec: GeneratorSpec) -> Multigraph {
        generate(&spec).unwrap()
    }

    #[test]
    fn loopless_cycle_support_one_is_vacuous() {
        let c = cyclesup_check(&g(GeneratorSpec::cycle(12)), 0, 5, 1, CycleSupVariant::Normalized).unwrap();
        assert_eq!(c.lhs, 0.0);
        assert_eq!(c.verdict, Verdict::Vacuous);
        assert_eq!(c.inputs["in_range"], false);
    }

    #[test]
    fn complete_graph_highdeg_out_of_range() {
        let c = cyclesup_check(&g(GeneratorSpec::complete(8)), 0, 8, 2, CycleSupVariant::HighDeg).unwrap();
        let expected = 0.125 * (8.0 / 7f64.ln()).powf(0.25);
        assert!((c.inputs["threshold"].as_f64().unwrap() - expected).abs() < 1e-12);
        assert!(expected < 1.0);
        assert_eq!(c.inputs["hypotheses_met"], true);
        assert_eq!(c.verdict, Verdict::Vacuous);
        assert!(c.lhs > 0.0 && c.rhs > 0.0);
    }

    #[test]
    fn lazy_edge_has_positive_left_side() {
        let edge = lazy_transform(&g(GeneratorSpec::path(2)));
        let c = cyclesup_check(&edge, 0, 2, 1, CycleSupVariant::Normalized).unwrap();
        assert!(c.lhs > 0.0);
        assert_eq!(c.inputs["in_range"], false);
        assert_eq!(c.verdict, Verdict::Vacuous);
    }

    #[test]
    fn both_sides_monotone() {
        let lol = g(GeneratorSpec::lollipop(3, 5));
        let c = cyclesup_check(&lol, 0, 4, 2, CycleSupVariant::Normalized).unwrap();
        assert!(c.lhs <= c.rhs / (-c.inputs["rate"].as_f64().unwrap()).exp() + 1e-15);
    }
}
