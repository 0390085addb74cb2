use rand::Rng;
use serde::Serialize;

use super::exact::check_walk_args;
use crate::error::{Error, Result};
use crate::graph::Multigraph;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkSample {
    /// `X_0, ..., X_{2k}` with `X_0 = X_{2k}`.
    pub vertices: Vec<usize>,
    /// Always 0: samples are exact draws from the conditional law.
    pub log_weight: f64,
}

impl WalkSample {
    pub fn support(&self) -> usize {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }
}

/// Exact sampler for the simple random walk from `x` conditioned on
/// `X_{2k} = x`.
///
/// `h[j][v]` is proportional to the probability that a walk from `v` sits at
/// `x` after `j` steps; each layer is rescaled to max 1, which cancels in the
/// step ratios `P(v→w) h[r-1][w] / h[r][v]`.
#[derive(Debug, Clone)]
pub struct ClosedWalkSampler<'g> {
    g: &'g Multigraph,
    x: usize,
    two_k: usize,
    h: Vec<Vec<f64>>,
}

impl<'g> ClosedWalkSampler<'g> {
    pub fn new(g: &'g Multigraph, x: usize, two_k: usize) -> Result<Self> {
        check_walk_args(g, x, two_k)?;
        let mut h = Vec::with_capacity(two_k + 1);
        let mut cur = vec![0.0; g.n()];
        cur[x] = 1.0;
        h.push(cur.clone());
        for _ in 0..two_k {
            let mut next: Vec<f64> = (0..g.n())
                .map(|v| {
                    let d = g.degree(v);
                    if d == 0 {
                        return 0.0;
                    }
                    g.neighbors(v).iter().map(|&(w, m)| m as f64 * cur[w]).sum::<f64>() / d as f64
                })
                .collect();
            let scale = next.iter().copied().fold(0.0, f64::max);
            if scale > 0.0 {
                next.iter_mut().for_each(|p| *p /= scale);
            }
            h.push(next.clone());
            cur = next;
        }
        if h[two_k][x] <= 0.0 {
            return Err(Error::pre(format!(
                "a walk from {x} cannot return after {two_k} steps (return probability 0)"
            )));
        }
        Ok(ClosedWalkSampler { g, x, two_k, h })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> WalkSample {
        let mut vertices = Vec::with_capacity(self.two_k + 1);
        let mut v = self.x;
        vertices.push(v);
        for i in 0..self.two_k {
            let layer = &self.h[self.two_k - i - 1];
            let nbrs = self.g.neighbors(v);
            let total: f64 = nbrs.iter().map(|&(w, m)| m as f64 * layer[w]).sum();
            let mut u = rng.random::<f64>() * total;
            let mut chosen = None;
            for &(w, m) in nbrs {
                let wt = m as f64 * layer[w];
                if wt <= 0.0 {
                    continue;
                }
                chosen = Some(w);
                if u < wt {
                    break;
                }
                u -= wt;
            }
            v = chosen.expect("a state with positive return weight has a feasible successor");
            vertices.push(v);
        }
        WalkSample { vertices, log_weight: 0.0 }
    }

    /// Probability this sampler assigns to a given walk (product of its step
    /// probabilities); 0 for walks it can never produce.
    pub fn law(&self, walk: &[usize]) -> f64 {
        if walk.len() != self.two_k + 1 || walk[0] != self.x {
            return 0.0;
        }
        let mut p = 1.0;
        for i in 0..self.two_k {
            let (v, w) = (walk[i], walk[i + 1]);
            let layer = &self.h[self.two_k - i - 1];
            let nbrs = self.g.neighbors(v);
            let total: f64 = nbrs.iter().map(|&(u, m)| m as f64 * layer[u]).sum();
            let m = self.g.mult(v, w);
            if total <= 0.0 || m == 0 {
                return 0.0;
            }
            p *= m as f64 * layer[w] / total;
        }
        p
    }
}

pub fn sample_closed_walk<R: Rng + ?Sized>(g: &Multigraph, x: usize, two_k: usize, rng: &mut R) -> Result<WalkSample> {
    Ok(ClosedWalkSampler::new(g, x, two_k)?.sample(rng))
}
