//! Acceptance gate: one line per criterion. A criterion listed in
//! `KNOWN_UNATTAINABLE` is still evaluated in full; the gate only requires
//! that it fails for the documented reason and nothing else.

mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use common::*;
use rand::Rng;
use walklab::certificate::Verdict;
use walklab::electric::{contract, hitting_prob, voltages};
use walklab::experiments::{
    deletion_pipeline, gamma_enumeration_check, lollipop_report, mangrove_report, ramanujan_trace_bound,
    walk_transfer_check, DeletionOptions,
};
use walklab::graph::{boundary, lazy_transform};
use walklab::perron_lab::{
    electric_theorem_check, extend_support, irregular_corollary_check, perturbation_bound, Strategy,
};
use walklab::spectral::{eig_sym, matrix_view, perron};
use walklab::walks::{
    cyclesup_check, support_profile_exact, support_profile_mc, tree_closed_walk_count, ClosedWalkSampler,
    CycleSupVariant,
};
use walklab::{GeneratorSpec, MatrixKind, Multigraph, VertexSet};

/// Criterion 9's leaf-slope fit: the remaining mangrove checks must pass.
const KNOWN_UNATTAINABLE: &[(u32, &[&str])] = &[(9, &["leaf_slope_upper", "leaf_slope_lower"])];

struct Outcome {
    pass: bool,
    detail: String,
    /// Names of failing checks, for comparison with `KNOWN_UNATTAINABLE`.
    failing: Vec<String>,
}

impl Outcome {
    fn new(failing: Vec<String>, detail: String) -> Self {
        Outcome { pass: failing.is_empty(), detail, failing }
    }
}

fn normalized_spectrum(g: &Multigraph) -> Vec<f64> {
    eig_sym(&matrix_view(g, MatrixKind::NormalizedAdjacency, None).unwrap().matrix).unwrap().eigenvalues
}

fn c1_closed_form_spectra() -> Outcome {
    let start = Instant::now();
    let mut failing = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 3..=64u64 {
        let k = normalized_spectrum(&g(GeneratorSpec::complete(n)));
        let mut want = vec![-1.0 / (n as f64 - 1.0); n as usize];
        want[0] = 1.0;
        let mut c: Vec<f64> = (0..n).map(|j| (2.0 * PI * j as f64 / n as f64).cos()).collect();
        c.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let got = normalized_spectrum(&g(GeneratorSpec::cycle(n)));
        for (name, a, b) in [("complete", &k, &want), ("cycle", &got, &c)] {
            let err = a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            worst = worst.max(err);
            if err > 1e-9 {
                failing.push(format!("{name}({n})"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 5.0 {
        failing.push("runtime".into());
    }
    Outcome::new(failing, format!("max error {worst:.2e}, {secs:.2}s"))
}

fn c2_lemma_test() -> Outcome {
    let mut failing = Vec::new();
    let c8 = g(GeneratorSpec::cycle(8));
    let worked = perturbation_bound(&c8, &VertexSet::new(&c8, [0, 1]).unwrap(), 1, 2, MatrixKind::NormalizedAdjacency)
        .unwrap();
    if (worked.rhs - 0.5562).abs() > 5e-5 || (worked.lhs - std::f64::consts::FRAC_1_SQRT_2).abs() > 1e-12 || !worked.passed() {
        failing.push("worked cycle instance".into());
    }
    let mut rng = rng(2);
    let mut done = 0;
    while done < 500 {
        let h = small_graph(&mut rng);
        let size = rng.random_range(1..h.n());
        let s = connected_set(&h, size, &mut rng);
        let pairs: Vec<(usize, usize)> = s
            .members()
            .iter()
            .flat_map(|&u| h.proper_neighbors(u).filter(|(w, _)| !s.contains(*w)).map(move |(w, _)| (u, w)))
            .collect();
        if pairs.is_empty() {
            continue;
        }
        let (u, v) = pick(&mut rng, &pairs);
        let kind = if done % 2 == 0 { MatrixKind::NormalizedAdjacency } else { MatrixKind::Adjacency };
        let c = perturbation_bound(&h, &s, u, v, kind).unwrap();
        if !c.passed() {
            failing.push(format!("instance {done}: slack {:e}", c.slack));
        }
        done += 1;
    }
    Outcome::new(failing, format!("{done} instances, worked {:.4} >= {:.4}", worked.lhs, worked.rhs))
}

fn c3_lemma_increase() -> Outcome {
    let mut failing = Vec::new();
    let mut rng = rng(3);
    let mut done = 0;
    while done < 200 {
        let h = match rng.random_range(0..4) {
            0 => g(GeneratorSpec::cycle(rng.random_range(13..=20))),
            1 => g(GeneratorSpec::random_regular(pick(&mut rng, &[14, 16, 18, 20]), 3, rng.random())),
            2 => g(GeneratorSpec::lollipop(rng.random_range(3..=5), rng.random_range(6..=10))),
            _ => g(GeneratorSpec::mangrove(4, rng.random_range(6..=10))),
        };
        if !h.is_connected() {
            continue;
        }
        let s = rng.random_range(2..=6usize);
        if 2 * s >= h.n() {
            continue;
        }
        let set = connected_set(&h, s, &mut rng);
        let ext = extend_support(&h, &set, Strategy::Electric, MatrixKind::NormalizedAdjacency).unwrap();
        let monotone = ext.trace.steps.iter().all(|st| st.lambda1_next >= st.lambda1 - 1e-10);
        if !ext.passed() || !monotone {
            let names: Vec<&str> = ext.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
            failing.push(format!("instance {done} (s={s}) {names:?} monotone={monotone}"));
        }
        done += 1;
    }
    Outcome::new(failing, format!("{done} instances"))
}

fn c4_electric() -> Outcome {
    let mut failing = Vec::new();
    let mut rng = rng(4);
    let mut done = 0;
    let mut identity_err: f64 = 0.0;
    while done < 500 {
        let h = small_graph(&mut rng);
        let size = rng.random_range(2..h.n());
        let set = connected_set(&h, size, &mut rng);
        let thm = electric_theorem_check(&h, &set).unwrap();
        if !thm.checks.iter().any(|c| c.name == "electric_main" && c.verdict == Verdict::Pass) || !thm.passed() {
            let names: Vec<&str> = thm.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect();
            failing.push(format!("instance {done} {names:?}"));
        }
        // f(x) against the absorbing chain at every interior vertex of K
        let b = boundary(&h, &set).unwrap().vertices;
        let t = thm.t;
        if !b.contains(t) {
            let k = contract(&h, &b).unwrap();
            let sol = voltages(&k.graph, k.s, k.to_k[t]).unwrap();
            for &x in set.members().iter().filter(|&&x| !b.contains(x)) {
                let p = if x == t { 1.0 } else { hitting_prob(&h, x, &[t], b.members()).unwrap() };
                identity_err = identity_err.max((sol.f[k.to_k[x]] - p).abs());
            }
        }
        done += 1;
    }
    if identity_err > 1e-7 {
        failing.push(format!("hitting identity error {identity_err:e}"));
    }
    Outcome::new(failing, format!("{done} instances, identity error {identity_err:.1e}"))
}

fn c5_corollary() -> Outcome {
    let mut failing = Vec::new();
    let star = g(GeneratorSpec::star(3));
    let worked = irregular_corollary_check(&star).unwrap();
    if (worked.lhs - 0.4082).abs() > 5e-5 || (worked.rhs - 0.0020).abs() > 5e-5 {
        failing.push("K_{1,3} worked values".into());
    }
    let mut rng = rng(5);
    for i in 0..200 {
        let h = match i % 5 {
            0 => g(GeneratorSpec::star(rng.random_range(2..=40))),
            1 => g(GeneratorSpec::path(rng.random_range(3..=40))),
            2 => g(GeneratorSpec::lollipop(rng.random_range(3..=6), rng.random_range(1..=20))),
            3 => g(GeneratorSpec::mangrove(pick(&mut rng, &[4, 6]), rng.random_range(2..=20))),
            _ => random_irregular(&mut rng),
        };
        if !irregular_corollary_check(&h).unwrap().passed() {
            failing.push(format!("instance {i}"));
        }
    }
    Outcome::new(failing, format!("200 instances, K_(1,3) {:.4} >= {:.4}", worked.lhs, worked.rhs))
}

/// All closed walks from `x` of the given length with their SRW weights.
fn closed_walks(h: &Multigraph, x: usize, two_k: usize) -> Vec<(Vec<usize>, f64)> {
    fn go(h: &Multigraph, x: usize, left: usize, walk: &mut Vec<usize>, w: f64, out: &mut Vec<(Vec<usize>, f64)>) {
        let v = *walk.last().unwrap();
        if left == 0 {
            if v == x {
                out.push((walk.clone(), w));
            }
            return;
        }
        for &(u, m) in h.neighbors(v) {
            walk.push(u);
            go(h, x, left - 1, walk, w * m as f64 / h.degree(v) as f64, out);
            walk.pop();
        }
    }
    let mut out = Vec::new();
    go(h, x, two_k, &mut vec![x], 1.0, &mut out);
    out
}

/// Move sequences on the infinite `d`-regular tree, counted one by one.
fn brute_tree_walks(d: u64, two_k: usize) -> u64 {
    fn go(d: u64, depth: usize, left: usize) -> u64 {
        if left == 0 {
            return (depth == 0) as u64;
        }
        if depth > left {
            return 0;
        }
        let children = if depth == 0 { d } else { d - 1 };
        let mut total = 0;
        for _ in 0..children {
            total += go(d, depth + 1, left - 1);
        }
        if depth > 0 {
            total += go(d, depth - 1, left - 1);
        }
        total
    }
    go(d, 0, two_k)
}

fn c6_walks() -> Outcome {
    let mut failing = Vec::new();
    let mut corpus: Vec<(String, Multigraph)> = Vec::new();
    for n in 3..=8 {
        corpus.push((format!("cycle({n})"), g(GeneratorSpec::cycle(n))));
    }
    for n in 2..=8 {
        corpus.push((format!("path({n})"), g(GeneratorSpec::path(n))));
        corpus.push((format!("complete({n})"), g(GeneratorSpec::complete(n))));
    }
    for n in 1..=7 {
        corpus.push((format!("star({n})"), g(GeneratorSpec::star(n))));
    }
    for (a, b) in [(1, 2), (2, 2), (2, 3), (3, 3), (2, 5), (4, 4)] {
        corpus.push((format!("K({a},{b})"), g(GeneratorSpec::complete_bipartite(a, b))));
    }
    for (d, n) in [(3, 1), (3, 2), (3, 3), (3, 4), (4, 1), (4, 2), (4, 3), (5, 2)] {
        corpus.push((format!("lollipop({d},{n})"), g(GeneratorSpec::lollipop(d, n))));
    }
    corpus.push(("multipath(4,2)".into(), g(GeneratorSpec::multipath(4, 2))));
    for seed in 0..3 {
        corpus.push((format!("random_regular(8,3,{seed})"), g(GeneratorSpec::random_regular(8, 3, seed))));
    }
    corpus.push(("lazy(cycle(5))".into(), lazy_transform(&g(GeneratorSpec::cycle(5)))));
    corpus.push(("lazy(complete(4))".into(), lazy_transform(&g(GeneratorSpec::complete(4)))));

    let mut worst_tv: f64 = 0.0;
    let mut worst_law: f64 = 0.0;
    let mut cases = 0;
    for (name, h) in &corpus {
        for two_k in [2, 4, 6] {
            let Ok(sampler) = ClosedWalkSampler::new(h, 0, two_k) else { continue };
            cases += 1;
            let exact = support_profile_exact(h, 0, two_k).unwrap();
            let mc = support_profile_mc(h, 0, two_k, 100_000, 6).unwrap();
            let mut supports: Vec<usize> = exact.by_support.keys().chain(mc.by_support.keys()).copied().collect();
            supports.sort_unstable();
            supports.dedup();
            let tv = 0.5 * supports.iter().map(|&s| (exact.conditional(s) - mc.conditional(s)).abs()).sum::<f64>();
            worst_tv = worst_tv.max(tv);
            if tv >= 0.02 {
                failing.push(format!("{name} 2k={two_k}: TV {tv:.4}"));
            }
            // the sampler's law equals the conditional walk law
            let walks = closed_walks(h, 0, two_k);
            let total: f64 = walks.iter().map(|w| w.1).sum();
            for (w, p) in &walks {
                worst_law = worst_law.max((sampler.law(w) - p / total).abs());
            }
        }
    }
    if worst_law > 1e-12 {
        failing.push(format!("sampler law error {worst_law:e}"));
    }

    let c4 = support_profile_exact(&g(GeneratorSpec::cycle(4)), 0, 4).unwrap();
    let quarter = |s| c4.conditional_exact(s).map(|r| walklab::walks::ratio_string(&r));
    if (quarter(2), quarter(3), quarter(4)) != (Some("1/4".into()), Some("1/2".into()), Some("1/4".into())) {
        failing.push("cycle(4) profile".into());
    }
    let trees: Vec<String> = (1..=3).map(|k| tree_closed_walk_count(3, k).to_string()).collect();
    if trees != ["3", "15", "87"] || (1..=3).any(|k| trees[k - 1] != brute_tree_walks(3, 2 * k).to_string()) {
        failing.push(format!("tree counts {trees:?}"));
    }
    Outcome::new(failing, format!("{cases} cases, max support TV {worst_tv:.4}, law error {worst_law:.1e}"))
}

fn c7_constituents() -> Outcome {
    let mut failing = Vec::new();
    let mut rng = rng(7);
    let mut vacuous = 0;
    for i in 0..100 {
        let h = small_graph(&mut rng);
        let x = rng.random_range(0..h.n());
        let s = rng.random_range(1..=3usize).min(h.n() / 2);
        if !gamma_enumeration_check(&h, x, s).unwrap().passed() {
            failing.push(format!("gamma {i}"));
        }
        let t = connected_set_with(&h, x, 2 * s, &mut rng);
        let z = pick(&mut rng, t.members());
        let k = rng.random_range(2 * s..=2 * s + 4);
        let checks = walk_transfer_check(&h, &t, x, z, k, s).unwrap();
        if !checks.iter().all(|c| c.passed()) {
            failing.push(format!("transfer {i}"));
        }
        if h.n() <= 24 {
            let ks = rng.random_range(1..=6usize);
            let c = cyclesup_check(&h, x, ks, s, CycleSupVariant::Normalized).unwrap();
            let delta = h.max_degree() as f64;
            let threshold = 0.25 * (ks as f64 / (delta.powi(7) * delta.ln())).powf(0.2);
            if s as f64 > threshold {
                vacuous += 1;
                if c.verdict != Verdict::Vacuous || c.inputs["in_range"] != false {
                    failing.push(format!("cyclesup {i} not flagged out of range"));
                }
            }
        }
    }
    let k8 = g(GeneratorSpec::complete(8));
    let hd = cyclesup_check(&k8, 0, 8, 2, CycleSupVariant::HighDeg).unwrap();
    if hd.verdict != Verdict::Vacuous {
        failing.push("K_8 highdeg".into());
    }
    Outcome::new(failing, format!("100 instances, {vacuous} out-of-range cyclesup flagged vacuous"))
}

fn c8_deletion() -> Outcome {
    let start = Instant::now();
    let mut failing = Vec::new();
    let mut runs = 0;
    for n in [100u64, 200, 400] {
        for seed in 0..20 {
            let h = g(GeneratorSpec::random_regular(n, 3, seed));
            if !h.is_connected() {
                failing.push(format!("random_regular({n},3,{seed}) disconnected"));
                continue;
            }
            let r = deletion_pipeline(&h, seed, &DeletionOptions::default()).unwrap();
            for name in ["trace_dominance", "mprime_trace", "cauchy_interlacing"] {
                if r.check(name).is_none_or(|c| !c.passed()) {
                    failing.push(format!("n={n} seed={seed} {name}"));
                }
            }
            failing.extend(r.failures().map(|c| format!("n={n} seed={seed} {}", c.name)));
            runs += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 120.0 {
        failing.push("runtime".into());
    }
    Outcome::new(failing, format!("{runs} runs, {secs:.1}s"))
}

fn c9_mangrove() -> Outcome {
    let r = mangrove_report(4, &[16, 32, 64, 128]).unwrap();
    let failing: Vec<String> = r.failures().map(|c| c.name.clone()).collect();
    Outcome::new(failing, format!("slope {:.3}", r.data["slope"].as_f64().unwrap()))
}

fn c10_lollipop() -> Outcome {
    let mut failing = Vec::new();
    let mut worst: f64 = f64::INFINITY;
    for d in 3..=5 {
        for n in [2, 4, 8] {
            let h = g(GeneratorSpec::lollipop(d, n));
            let c = perron(&h, &VertexSet::all(&h), MatrixKind::Adjacency).unwrap().at(0).unwrap();
            let bound = 1.0 / (d as f64 + 2.0).sqrt();
            worst = worst.min(c - bound);
            if c < bound - 1e-9 {
                failing.push(format!("psi(v) d={d} n={n}"));
            }
        }
    }
    for ell in 2..=4 {
        let r = lollipop_report(4, 8, 10, ell).unwrap();
        if !r.passed() {
            failing.push(format!("fraction ell={ell}"));
        }
    }
    Outcome::new(failing, format!("min psi(v) slack {worst:.4}"))
}

fn c11_ramanujan() -> Outcome {
    let mut failing = Vec::new();
    let mut cases = 0;
    let mut graphs: Vec<(String, Multigraph)> =
        (2..=6).map(|d| (format!("K({d},{d})"), g(GeneratorSpec::complete_bipartite(d, d)))).collect();
    graphs.extend((2..=12).map(|m| (format!("cycle({})", 2 * m), g(GeneratorSpec::cycle(2 * m)))));
    for (name, h) in &graphs {
        let radius = 2.0 * (h.max_degree() as f64 - 1.0).sqrt();
        for k in 1..=5 {
            for b in [0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0].into_iter().filter(|&b| b < radius) {
                let r = ramanujan_trace_bound(h, k, b).unwrap();
                cases += 1;
                failing.extend(r.failures().map(|c| format!("{name} k={k} b={b} {}", c.name)));
            }
        }
    }
    Outcome::new(failing, format!("{cases} cases"))
}

fn c12_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_walklab");
    let invocations: &[&[&str]] = &[
        &["walk-sample", "gen:lollipop,d=4,n=8", "--x", "0", "--k", "10", "--n", "20000", "--seed", "5"],
        &["experiment", "deletion", "gen:random_regular,n=100,d=3", "--seed", "9"],
        &["spectrum", "gen:random_regular,n=20,d=3", "--seed", "2"],
        &["experiment", "mangrove", "--d", "4", "--n", "16,32"],
        &["check", "electric-thm", "gen:cycle,n=8", "--set", "0,1,2,3"],
        &["walk-exact", "gen:cycle,n=6", "--x", "0", "--k", "3"],
    ];
    let mut failing = Vec::new();
    for args in invocations {
        let run = || Command::new(bin).args(*args).env_remove("WALKLAB_SEED").output().unwrap();
        let (a, b) = (run(), run());
        if a.stdout != b.stdout || a.stdout.is_empty() {
            failing.push(args.join(" "));
        }
    }
    Outcome::new(failing, format!("{} invocations byte-identical", invocations.len()))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

#[test]
fn acceptance() {
    let criteria: Vec<Criterion> = vec![
        (1, "closed-form spectra", c1_closed_form_spectra),
        (2, "perturbation lemma", c2_lemma_test),
        (3, "support extension", c3_lemma_increase),
        (4, "large boundary entry", c4_electric),
        (5, "irregular corollary", c5_corollary),
        (6, "walk machinery", c6_walks),
        (7, "combinatorial constituents", c7_constituents),
        (8, "deletion pipeline", c8_deletion),
        (9, "mangrove", c9_mangrove),
        (10, "lollipop", c10_lollipop),
        (11, "trace multiplicity bound", c11_ramanujan),
        (12, "determinism", c12_determinism),
    ];
    let known: BTreeMap<u32, &[&str]> = KNOWN_UNATTAINABLE.iter().copied().collect();
    let mut unexpected = Vec::new();
    for (id, name, f) in criteria {
        let o = f();
        let status = if o.pass { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {id:>2} {status} {name}: {}", o.detail);
        if !o.pass {
            let shown: Vec<&String> = o.failing.iter().take(5).collect();
            line.push_str(&format!(" failing {shown:?}"));
        }
        match known.get(&id) {
            Some(allowed) if !o.pass => {
                line.push_str(" (known unattainable)");
                if o.failing.iter().any(|f| !allowed.contains(&f.as_str())) {
                    unexpected.push(id);
                }
            }
            _ if !o.pass => unexpected.push(id),
            _ => {}
        }
        println!("{line}");
    }
    assert!(unexpected.is_empty(), "criteria failed unexpectedly: {unexpected:?}");
}
