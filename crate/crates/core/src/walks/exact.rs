use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::par::{self, Exec};

/// Largest graph handled by the visited-set DP.
pub const MAX_EXACT_VERTICES: usize = 24;

/// `(Ã^{2k})_{xx}`, the probability that a simple random walk from `x`
/// is back at `x` after `2k` steps.
pub fn closed_walk_prob(g: &Multigraph, x: usize, two_k: usize) -> Result<f64> {
    check_walk_args(g, x, two_k)?;
    let v = normalized_power_column(g, x, two_k / 2);
    Ok(v.iter().map(|a| a * a).sum())
}

/// Diagonal of `Ã^{2k}`.
pub fn closed_walk_probs(g: &Multigraph, two_k: usize, exec: Exec) -> Result<Vec<f64>> {
    par::try_map_range(exec, g.n(), |x| closed_walk_prob(g, x, two_k))
}

pub(crate) fn check_walk_args(g: &Multigraph, x: usize, two_k: usize) -> Result<()> {
    if x >= g.n() {
        return Err(Error::param(format!("vertex {x} out of range for n = {}", g.n())));
    }
    if !two_k.is_multiple_of(2) {
        return Err(Error::param(format!("walk length {two_k} must be even")));
    }
    Ok(())
}

fn normalized_power_column(g: &Multigraph, x: usize, k: usize) -> Vec<f64> {
    let inv_sqrt: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
        .collect();
    let mut cur = vec![0.0; g.n()];
    cur[x] = 1.0;
    for _ in 0..k {
        let next = (0..g.n())
            .map(|u| {
                g.neighbors(u)
                    .iter()
                    .map(|&(w, m)| m as f64 * inv_sqrt[u] * inv_sqrt[w] * cur[w])
                    .sum()
            })
            .collect();
        cur = next;
    }
    cur
}

/// Closed walks of length `2k` from `x` grouped by support size, with each
/// walk weighted by the product of its step weights. Weights are integers so
/// the result is exact.
#[derive(Debug, Clone)]
pub struct SupportCounts {
    pub x: usize,
    pub two_k: usize,
    pub by_support: BTreeMap<usize, BigUint>,
}

impl SupportCounts {
    pub fn total(&self) -> BigUint {
        self.by_support.values().sum()
    }

    /// Weight of walks with support at least `s`.
    pub fn at_least(&self, s: usize) -> BigUint {
        self.by_support.range(s..).map(|(_, c)| c).sum()
    }

    /// Weight of walks with support at most `s`.
    pub fn at_most(&self, s: usize) -> BigUint {
        self.by_support.range(..=s).map(|(_, c)| c).sum()
    }
}

/// Visited-set DP over states `(current vertex, visited mask)`. Each step
/// `v -> w` multiplies by `step(v, w, mult)`. States that cannot return to
/// `x` in the remaining steps are pruned.
pub(crate) fn support_dp(
    g: &Multigraph,
    x: usize,
    two_k: usize,
    step: impl Fn(usize, usize, u64) -> BigUint,
) -> Result<SupportCounts> {
    check_walk_args(g, x, two_k)?;
    if g.n() > MAX_EXACT_VERTICES {
        return Err(Error::Capacity(format!(
            "exact support DP handles n <= {MAX_EXACT_VERTICES} (got {}); use Monte Carlo mode",
            g.n()
        )));
    }
    let dist: Vec<usize> = g.distances_from(x).into_iter().map(|d| d.unwrap_or(usize::MAX)).collect();
    let weights: Vec<Vec<(usize, BigUint)>> = (0..g.n())
        .map(|v| g.neighbors(v).iter().map(|&(w, m)| (w, step(v, w, m))).collect())
        .collect();
    let mut layer: HashMap<(u32, u8), BigUint> = HashMap::from([((1u32 << x, x as u8), BigUint::one())]);
    for j in 0..two_k {
        let remaining = two_k - j - 1;
        let mut next: HashMap<(u32, u8), BigUint> = HashMap::with_capacity(layer.len() * 2);
        for ((mask, v), c) in &layer {
            for (w, wt) in &weights[*v as usize] {
                if dist[*w] > remaining {
                    continue;
                }
                let key = (mask | 1 << w, *w as u8);
                let add = c * wt;
                next.entry(key).and_modify(|e| *e += &add).or_insert(add);
            }
        }
        layer = next;
    }
    let mut by_support = BTreeMap::new();
    for ((mask, v), c) in layer {
        if v as usize == x {
            *by_support.entry(mask.count_ones() as usize).or_insert_with(BigUint::zero) += c;
        }
    }
    Ok(SupportCounts { x, two_k, by_support })
}

/// Unweighted closed-walk counts by support (multiedges counted with
/// multiplicity).
pub fn support_counts_exact(g: &Multigraph, x: usize, two_k: usize) -> Result<SupportCounts> {
    support_dp(g, x, two_k, |_, _, m| BigUint::from(m))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ProfileMode {
    Exact,
    Mc { n_samples: usize, seed: u64 },
}

/// Probability mass, exact when computed by the DP.
#[derive(Debug, Clone, PartialEq)]
pub struct Mass {
    pub value: f64,
    pub exact: Option<BigRational>,
    pub ci95: Option<(f64, f64)>,
}

impl Mass {
    pub(crate) fn exact(r: BigRational) -> Self {
        Mass { value: ratio_to_f64(&r), exact: Some(r), ci95: None }
    }
}

/// Joint law of (closed at `x`, support size) for walks of length `2k`.
#[derive(Debug, Clone)]
pub struct SupportProfile {
    pub x: usize,
    pub k2: usize,
    /// `s -> P_x(closed, support = s)`
    pub by_support: BTreeMap<usize, Mass>,
    /// `P_x(X_{2k} = x)`
    pub total_closed: Mass,
    pub mode: ProfileMode,
    /// Mean support conditioned on closure, with a 95% interval in MC mode.
    pub mean_support: f64,
    pub mean_support_ci95: Option<(f64, f64)>,
}

impl SupportProfile {
    /// `P_x(W^{2k,s})`: closed with support at most `s`.
    pub fn at_most(&self, s: usize) -> f64 {
        self.by_support.range(..=s).map(|(_, m)| m.value).sum()
    }

    pub fn at_most_exact(&self, s: usize) -> Option<BigRational> {
        self.by_support
            .range(..=s)
            .map(|(_, m)| m.exact.clone())
            .try_fold(BigRational::zero(), |acc, m| m.map(|m| acc + m))
    }

    /// `P(support = s | closed)`.
    pub fn conditional(&self, s: usize) -> f64 {
        match self.by_support.get(&s) {
            Some(m) if self.total_closed.value > 0.0 => m.value / self.total_closed.value,
            _ => 0.0,
        }
    }

    pub fn conditional_exact(&self, s: usize) -> Option<BigRational> {
        let total = self.total_closed.exact.as_ref()?;
        let m = self.by_support.get(&s).and_then(|m| m.exact.clone()).unwrap_or_else(BigRational::zero);
        (!total.is_zero()).then(|| m / total)
    }

    pub fn to_json(&self) -> Value {
        let mut entries = Vec::new();
        for (s, m) in &self.by_support {
            let mut e = json!({ "support": s, "mass": m.value, "conditional": self.conditional(*s) });
            if let Some(r) = &m.exact {
                e["mass_exact"] = json!(ratio_string(r));
            }
            if let ProfileMode::Mc { n_samples, seed } = self.mode {
                e["n_samples"] = json!(n_samples);
                e["seed"] = json!(seed);
                e["ci95"] = json!(m.ci95.map(|(a, b)| [a, b]));
            }
            entries.push(e);
        }
        let mut v = json!({
            "x": self.x,
            "k2": self.k2,
            "mode": self.mode,
            "total_closed": self.total_closed.value,
            "mean_support": self.mean_support,
            "by_support": entries,
        });
        if let Some(r) = &self.total_closed.exact {
            v["total_closed_exact"] = json!(ratio_string(r));
        }
        if let Some((a, b)) = self.mean_support_ci95 {
            v["mean_support_ci95"] = json!([a, b]);
        }
        v
    }
}

/// `"p/q"` in lowest terms with decimal digits.
pub fn ratio_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Float conversion that survives numerators and denominators beyond `f64`
/// range.
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    if let (Some(p), Some(q)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if p.is_finite() && q.is_finite() && q != 0.0 {
            return p / q;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let (p, q) = (r.numer() >> shift.max(0) as usize, r.denom() >> shift.max(0) as usize);
    if q.is_zero() {
        return f64::INFINITY;
    }
    p.to_f64().unwrap_or(0.0) / q.to_f64().unwrap_or(f64::INFINITY)
}

/// Exact law of the support of closed walks. Step `v -> w` has probability
/// `mult / deg(v)`; all walk weights share the denominator `L^{2k}` with `L`
/// the lcm of the degrees, so the DP runs on integer numerators.
pub fn support_profile_exact(g: &Multigraph, x: usize, two_k: usize) -> Result<SupportProfile> {
    let lcm = g
        .degrees()
        .iter()
        .filter(|&&d| d > 0)
        .fold(BigUint::one(), |acc, &d| acc.lcm(&BigUint::from(d)));
    let per_degree: Vec<BigUint> =
        g.degrees().iter().map(|&d| if d == 0 { BigUint::zero() } else { &lcm / d }).collect();
    let counts = support_dp(g, x, two_k, |v, _, m| &per_degree[v] * m)?;
    let denom = BigInt::from(num_traits::pow(lcm, two_k));
    let to_ratio = |c: &BigUint| BigRational::new(BigInt::from(c.clone()), denom.clone());
    let by_support: BTreeMap<usize, Mass> =
        counts.by_support.iter().map(|(&s, c)| (s, Mass::exact(to_ratio(c)))).collect();
    let total = to_ratio(&counts.total());
    let mean_support = if total.is_zero() {
        0.0
    } else {
        let weighted = counts
            .by_support
            .iter()
            .fold(BigUint::zero(), |acc, (&s, c)| acc + c * BigUint::from(s));
        ratio_to_f64(&BigRational::new(BigInt::from(weighted), BigInt::from(counts.total())))
    };
    Ok(SupportProfile {
        x,
        k2: two_k,
        by_support,
        total_closed: Mass::exact(total),
        mode: ProfileMode::Exact,
        mean_support,
        mean_support_ci95: None,
    })
}
