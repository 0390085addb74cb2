use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Multigraph, MultigraphBuilder};
use crate::error::{Error, Result};

/// Rejection rounds allowed before the pairing model gives up.
pub const MAX_REGULAR_ROUNDS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Family {
    Cycle,
    Path,
    Multipath,
    Complete,
    CompleteBipartite,
    Star,
    RandomRegular,
    Lollipop,
    Mangrove,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Cycle,
        Family::Path,
        Family::Multipath,
        Family::Complete,
        Family::CompleteBipartite,
        Family::Star,
        Family::RandomRegular,
        Family::Lollipop,
        Family::Mangrove,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::Path => "path",
            Family::Multipath => "multipath",
            Family::Complete => "complete",
            Family::CompleteBipartite => "complete_bipartite",
            Family::Star => "star",
            Family::RandomRegular => "random_regular",
            Family::Lollipop => "lollipop",
            Family::Mangrove => "mangrove",
        }
    }

    /// (required, optional) parameter names.
    fn keys(self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            Family::Cycle | Family::Path | Family::Complete | Family::Star => (&["n"], &[]),
            Family::Multipath => (&["n"], &["mult"]),
            Family::CompleteBipartite => (&["a", "b"], &[]),
            Family::RandomRegular | Family::Lollipop | Family::Mangrove => (&["n", "d"], &[]),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param(format!("unknown graph family {s:?}")))
    }
}

/// A generator family with integer parameters and a seed (used only by
/// `random_regular`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub params: BTreeMap<String, u64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(family: Family, params: &[(&str, u64)]) -> Self {
        GeneratorSpec {
            family,
            params: params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn cycle(n: u64) -> Self {
        Self::new(Family::Cycle, &[("n", n)])
    }

    pub fn path(n: u64) -> Self {
        Self::new(Family::Path, &[("n", n)])
    }

    pub fn multipath(n: u64, mult: u64) -> Self {
        Self::new(Family::Multipath, &[("n", n), ("mult", mult)])
    }

    pub fn complete(n: u64) -> Self {
        Self::new(Family::Complete, &[("n", n)])
    }

    pub fn complete_bipartite(a: u64, b: u64) -> Self {
        Self::new(Family::CompleteBipartite, &[("a", a), ("b", b)])
    }

    /// `K_{1,n}`: a center with `n` leaves.
    pub fn star(n: u64) -> Self {
        Self::new(Family::Star, &[("n", n)])
    }

    pub fn random_regular(n: u64, d: u64, seed: u64) -> Self {
        Self::new(Family::RandomRegular, &[("n", n), ("d", d)]).with_seed(seed)
    }

    pub fn lollipop(d: u64, n: u64) -> Self {
        Self::new(Family::Lollipop, &[("d", d), ("n", n)])
    }

    pub fn mangrove(d: u64, n: u64) -> Self {
        Self::new(Family::Mangrove, &[("d", d), ("n", n)])
    }

    fn get(&self, key: &str) -> u64 {
        self.params.get(key).copied().unwrap_or(match key {
            "mult" => 1,
            _ => 0,
        })
    }

    /// Checks keys and per-family parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let (required, optional) = self.family.keys();
        for key in required {
            if !self.params.contains_key(*key) {
                return Err(Error::param(format!("{} requires parameter {key}", self.family)));
            }
        }
        if let Some(k) = self
            .params
            .keys()
            .find(|k| !required.contains(&k.as_str()) && !optional.contains(&k.as_str()))
        {
            return Err(Error::param(format!("{} does not take parameter {k}", self.family)));
        }
        let (n, d) = (self.get("n"), self.get("d"));
        let ok = match self.family {
            Family::Cycle => n >= 3,
            Family::Path | Family::Complete | Family::Star => n >= 1,
            Family::Multipath => n >= 1 && self.get("mult") >= 1,
            Family::CompleteBipartite => self.get("a") >= 1 && self.get("b") >= 1,
            Family::RandomRegular => d >= 1 && d < n && (n * d) % 2 == 0,
            Family::Lollipop => d >= 1,
            Family::Mangrove => d >= 4 && d % 2 == 0 && n >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::param(format!("parameters out of range for {}: {:?}", self.family, self.params)))
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gen:{}", self.family)?;
        for (k, v) in &self.params {
            write!(f, ",{k}={v}")?;
        }
        if self.family == Family::RandomRegular {
            write!(f, ",seed={}", self.seed)?;
        }
        Ok(())
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses `gen:<family>,key=value,...`; the `gen:` prefix is optional and
    /// a `seed=` key sets the seed.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.strip_prefix("gen:").unwrap_or(s);
        let mut parts = body.split(',').map(str::trim);
        let family: Family = parts.next().unwrap_or_default().parse()?;
        let mut spec = GeneratorSpec { family, params: BTreeMap::new(), seed: 0 };
        for part in parts.filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value, got {part:?}")))?;
            let v: u64 = v
                .trim()
                .parse()
                .map_err(|_| Error::param(format!("parameter {k} must be a nonnegative integer")))?;
            if k.trim() == "seed" {
                spec.seed = v;
            } else {
                spec.params.insert(k.trim().to_string(), v);
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Tree depth for the mangrove family: `round(log_{d-1} n)`, halves rounded
/// up, at least 1.
pub fn mangrove_depth(d: u64, n: u64) -> usize {
    let x = (n as f64).ln() / ((d - 1) as f64).ln();
    ((x + 0.5).floor() as usize).max(1)
}

pub fn generate(spec: &GeneratorSpec) -> Result<Multigraph> {
    spec.validate()?;
    let n = spec.get("n") as usize;
    let d = spec.get("d") as usize;
    match spec.family {
        Family::Cycle => Multigraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n, 1))),
        Family::Path => multipath(n, 1),
        Family::Multipath => multipath(n, spec.get("mult")),
        Family::Complete => {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v, 1)));
            Multigraph::from_edges(n, pairs)
        }
        Family::CompleteBipartite => {
            let (a, b) = (spec.get("a") as usize, spec.get("b") as usize);
            let pairs = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v, 1)));
            Multigraph::from_edges(a + b, pairs)
        }
        Family::Star => Multigraph::from_edges(n + 1, (1..=n).map(|v| (0, v, 1))),
        Family::RandomRegular => random_regular(n, d, spec.seed),
        Family::Lollipop => lollipop(d, n),
        Family::Mangrove => mangrove(d as u64, n),
    }
}

fn multipath(n: usize, mult: u64) -> Result<Multigraph> {
    Multigraph::from_edges(n, (1..n).map(|i| (i - 1, i, mult)))
}

/// `K_{d+1}` on `0..=d` with a path `d+1, ..., d+n` hung at clique vertex 0.
fn lollipop(d: usize, n: usize) -> Result<Multigraph> {
    let mut b = MultigraphBuilder::new(d + 1 + n);
    for u in 0..=d {
        for v in u + 1..=d {
            b.add_edge(u, v, 1);
        }
    }
    let mut prev = 0;
    for u in d + 1..d + 1 + n {
        b.add_edge(prev, u, 1);
        prev = u;
    }
    b.build()
}

/// Path `0..n` of `d/2`-multiedges with a tree at each end. Each root is
/// joined to its path endpoint by a `d/2`-multiedge and has `d/2` children;
/// deeper internal vertices have `d-1` children. Tree vertices are numbered
/// breadth-first, first tree before second.
fn mangrove(d: u64, n: usize) -> Result<Multigraph> {
    let depth = mangrove_depth(d, n as u64);
    let half = d / 2;
    let mut b = MultigraphBuilder::new(0);
    for i in 1..n {
        b.add_edge(i - 1, i, half);
    }
    let mut next = n;
    for anchor in [0, n - 1] {
        let root = next;
        next += 1;
        b.add_edge(anchor, root, half);
        let mut level = vec![root];
        for depth_i in 0..depth {
            let children = if depth_i == 0 { half } else { d - 1 };
            let mut next_level = Vec::with_capacity(level.len() * children as usize);
            for &p in &level {
                for _ in 0..children {
                    b.add_edge(p, next, 1);
                    next_level.push(next);
                    next += 1;
                }
            }
            level = next_level;
        }
    }
    b.n = next;
    b.build()
}

/// Configuration model: shuffle `n·d` half-edges, pair them consecutively,
/// reject until the result is simple.
fn random_regular(n: usize, d: usize, seed: u64) -> Result<Multigraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    'round: for _ in 0..MAX_REGULAR_ROUNDS {
        points.shuffle(&mut rng);
        let mut seen = BTreeSet::new();
        for pair in points.chunks_exact(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'round;
            }
        }
        return Multigraph::from_edges(n, seen.into_iter().map(|(u, v)| (u, v, 1)));
    }
    Err(Error::Generation(format!(
        "random_regular(n={n}, d={d}) found no simple pairing in {MAX_REGULAR_ROUNDS} rounds"
    )))
}
