use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::exact::{closed_walk_prob, Mass, ProfileMode, SupportProfile};
use super::sampler::ClosedWalkSampler;
use crate::error::{Error, Result};
use crate::graph::Multigraph;
use crate::par::{self, Exec};

/// Number of independent RNG substreams a Monte Carlo run is split into.
/// Fixed independently of the thread count so output depends only on the
/// seed.
pub const DEFAULT_WORKERS: usize = 8;

const Z95: f64 = 1.959963984540054;

#[derive(Debug, Clone, Copy)]
pub struct McOptions {
    pub workers: usize,
    pub exec: Exec,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions { workers: DEFAULT_WORKERS, exec: Exec::default() }
    }
}

pub fn support_profile_mc(g: &Multigraph, x: usize, two_k: usize, n_samples: usize, seed: u64) -> Result<SupportProfile> {
    support_profile_mc_with(g, x, two_k, n_samples, seed, McOptions::default())
}

/// Monte Carlo support law: `N` exact conditional samples, empirical
/// frequencies scaled by the exactly computed return probability, Wilson 95%
/// intervals per support value.
pub fn support_profile_mc_with(
    g: &Multigraph,
    x: usize,
    two_k: usize,
    n_samples: usize,
    seed: u64,
    opts: McOptions,
) -> Result<SupportProfile> {
    if n_samples == 0 {
        return Err(Error::param("empty sample: N must be positive"));
    }
    let workers = opts.workers.max(1);
    let sampler = ClosedWalkSampler::new(g, x, two_k)?;
    let total = closed_walk_prob(g, x, two_k)?;

    let chunks = par::map_range(opts.exec, workers, |w| {
        let quota = n_samples / workers + usize::from(w < n_samples % workers);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(w as u64);
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for _ in 0..quota {
            *counts.entry(sampler.sample(&mut rng).support()).or_insert(0) += 1;
        }
        counts
    });
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for chunk in chunks {
        for (s, c) in chunk {
            *counts.entry(s).or_insert(0) += c;
        }
    }

    let n = n_samples as f64;
    let by_support = counts
        .iter()
        .map(|(&s, &c)| {
            let (lo, hi) = wilson(c as f64, n);
            let mass = Mass { value: total * c as f64 / n, exact: None, ci95: Some((total * lo, total * hi)) };
            (s, mass)
        })
        .collect();
    let mean = counts.iter().map(|(&s, &c)| s as f64 * c as f64).sum::<f64>() / n;
    let var = counts.iter().map(|(&s, &c)| c as f64 * (s as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let half = Z95 * (var / n).sqrt();
    Ok(SupportProfile {
        x,
        k2: two_k,
        by_support,
        total_closed: Mass { value: total, exact: None, ci95: None },
        mode: ProfileMode::Mc { n_samples, seed },
        mean_support: mean,
        mean_support_ci95: Some((mean - half, mean + half)),
    })
}

/// Wilson score interval for `successes / trials`.
pub(crate) fn wilson(successes: f64, trials: f64) -> (f64, f64) {
    let p = successes / trials;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / trials;
    let center = (p + z2 / (2.0 * trials)) / denom;
    let half = Z95 * (p * (1.0 - p) / trials + z2 / (4.0 * trials * trials)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
