//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any failed.

mod common;

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use dynamic_resistance::dynamic::{geometric_skip, log2n};
use dynamic_resistance::numerics::{assemble, effective_resistance};
use dynamic_resistance::schur::{enumerate_terminal_free_walks, exact_schur, sample_schur_sketch};
use dynamic_resistance::walks::position_after;
use dynamic_resistance::{
    stream_from_seed, DynamicMultigraph, DynamicSc, DynamicScParams, EdgeId, EngineConfig,
    ErEngine, SolveOptions, SolverKind, TerminalMode, TerminalSet, VertexId, WalkStore,
};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

thread_local! {
    /// (checks, violations) of the generated/truncated step audit, fed by
    /// every dynamic run in this suite.
    static AMORTIZATION: RefCell<(u64, u64)> = const { RefCell::new((0, 0)) };
}

fn audit_steps(store: &WalkStore) {
    AMORTIZATION.with(|a| {
        let mut a = a.borrow_mut();
        a.0 += 1;
        if store.truncated_steps() > store.generated_steps() {
            a.1 += 1;
        }
    });
}

fn dense() -> SolveOptions {
    SolveOptions {
        kind: SolverKind::Dense,
        ..Default::default()
    }
}

fn c1_schur_exactness() -> Outcome {
    let mut rng = stream_from_seed(101);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for _ in 0..50 {
        let n = rng.gen_range(4..=40);
        let extra = rng.gen_range(0..=n);
        let g = random_connected(n, extra, &mut rng);
        let k = rng.gen_range(2..=n.min(10));
        let mut t = TerminalSet::new(n);
        while t.len() < k {
            t.insert(v(rng.gen_range(0..n)));
        }
        let sc = exact_schur(&g, &t).unwrap();
        let on_sc = pinv_oracle_view(&sc.to_view());
        let on_g = pinv_oracle(&g);
        let ts = t.members();
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                worst = worst.max((on_sc(ts[i], ts[j]) - on_g(ts[i], ts[j])).abs());
                pairs += 1;
            }
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max |ΔER| = {worst:.2e} over {pairs} terminal pairs on 50 graphs"),
    )
}

fn c2_sampler_unbiased() -> Outcome {
    let instances = [
        ("path-3", path(3), vec![0, 2]),
        ("triangle", complete(3), vec![0, 1]),
        ("K4", complete(4), vec![0, 1]),
    ];
    const SKETCHES: usize = 10_000;
    let mut rng = stream_from_seed(202);
    let mut pass = true;
    let mut worst_z: f64 = 0.0;
    for (_, g, ts) in &instances {
        let terminals: Vec<VertexId> = ts.iter().map(|&i| v(i)).collect();
        let t = TerminalSet::from_vertices(g.vertex_count(), terminals.iter().copied());
        let exact = exact_schur(g, &t).unwrap();
        let k = terminals.len();
        let mut sum = vec![0.0; k * k];
        let mut sum_sq = vec![0.0; k * k];
        for _ in 0..SKETCHES {
            let s = sample_schur_sketch(g, &t, 1, 1_000_000, &mut rng);
            let l = sketch_laplacian(&s.sketch, &terminals);
            for i in 0..k * k {
                sum[i] += l[i];
                sum_sq[i] += l[i] * l[i];
            }
        }
        let n = SKETCHES as f64;
        for a in 0..k {
            for b in 0..k {
                let i = a * k + b;
                let mean = sum[i] / n;
                let var = (sum_sq[i] / n - mean * mean) * n / (n - 1.0);
                let se = (var.max(0.0) / n).sqrt();
                let diff = (mean - exact.entry(terminals[a], terminals[b])).abs();
                if se > 0.0 {
                    worst_z = worst_z.max(diff / se);
                }
                if diff > 3.0 * se + 1e-12 {
                    pass = false;
                }
            }
        }
    }
    outcome(
        pass,
        format!("path-3, triangle, K4; worst |mean − SC| = {worst_z:.2} SE at {SKETCHES} sketches"),
    )
}

fn c3_static_accuracy() -> Outcome {
    let eps = 0.25;
    let n = 64;
    let rho = (log2n(n) / (eps * eps)).ceil() as usize;
    assert_eq!(rho, 96);
    let mut good = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..20u64 {
        let mut rng = stream_from_seed(300 + trial);
        let g = erdos_renyi_connected(n, 0.1, &mut rng);
        let mut t = TerminalSet::new(n);
        while t.len() < 8 {
            t.insert(v(rng.gen_range(0..n)));
        }
        let beta = (g.edge_count() as f64).powf(-0.2);
        let cap = DynamicScParams::edge_mode_cap(n, beta, 1.0);
        let s = sample_schur_sketch(&g, &t, rho, cap, &mut rng);
        let sys = assemble(&s.sketch.aggregated_view()).unwrap();
        let exact = pinv_oracle(&g);
        let ts = t.members();
        let mut all_ok = true;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                let est = effective_resistance(&sys, ts[i], ts[j], &dense()).unwrap();
                let rel = (est / exact(ts[i], ts[j]) - 1.0).abs();
                worst = worst.max(rel);
                all_ok &= rel <= eps;
            }
        }
        good += all_ok as usize;
    }
    outcome(
        good * 100 >= 95 * 20,
        format!("{good}/20 trials with all 28 pairs within 1±0.25 (ρ = {rho}, worst rel err {worst:.3})"),
    )
}

fn c4_dynamic_accuracy() -> Outcome {
    let n = 64;
    let eps = 0.25;
    let mut within = 0;
    let mut total = 0;
    let mut seeds_with_rebuild = 0;
    let mut post_rebuild = (0, 0);
    for seed in 0..20u64 {
        let mut rng = stream_from_seed(400 + seed);
        let mut g = ring(n);
        let backbone = g.edge_id_bound();
        for _ in 0..40 {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(2..n - 1)) % n;
            g.insert_edge(v(a), v(b)).unwrap();
        }
        let config = EngineConfig {
            eps,
            rebuild_factor: 0.02,
            seed: 4000 + seed,
            ..Default::default()
        };
        let mut engine = ErEngine::new(g, config).unwrap();
        let mut ops: Vec<bool> = vec![false; 100];
        ops.extend(vec![true; 20]);
        // queries at random slots; the first op is always an update
        for i in (2..ops.len()).rev() {
            let j = rng.gen_range(1..=i);
            ops.swap(i, j);
        }
        for is_query in ops {
            if is_query {
                let s = rng.gen_range(0..n);
                let t = (s + rng.gen_range(1..n)) % n;
                let before = engine.rebuilds();
                let est = engine.effective_resistance(v(s), v(t)).unwrap();
                let exact = pinv_oracle(engine.graph())(v(s), v(t));
                let ok = (est / exact - 1.0).abs() <= eps;
                within += ok as usize;
                total += 1;
                if before > 0 {
                    post_rebuild.0 += ok as usize;
                    post_rebuild.1 += 1;
                }
            } else {
                let deletable: Vec<EdgeId> = engine
                    .graph()
                    .edges()
                    .map(|(e, _, _)| e)
                    .filter(|e| e.index() >= backbone)
                    .collect();
                if rng.gen_bool(0.5) && !deletable.is_empty() {
                    let e = deletable[rng.gen_range(0..deletable.len())];
                    engine.delete(e).unwrap();
                } else {
                    let a = rng.gen_range(0..n);
                    let b = (a + rng.gen_range(1..n)) % n;
                    engine.insert(v(a), v(b)).unwrap();
                }
            }
            audit_steps(engine.dynamic().store());
        }
        seeds_with_rebuild += (engine.rebuilds() > 0) as usize;
    }
    outcome(
        within * 100 >= 95 * total && seeds_with_rebuild == 20,
        format!(
            "{within}/{total} queries within 1±0.25; {seeds_with_rebuild}/20 seeds crossed a rebuild ({}/{} post-rebuild answers within)",
            post_rebuild.0, post_rebuild.1
        ),
    )
}

/// Final graph: a 12-ring with chords (0,6), (3,9), (2,7).
fn c5_history(seed: u64, second: bool) -> Vec<f64> {
    let n = 12;
    let mut edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let ops: Vec<(bool, usize, usize)>;
    if !second {
        edges.push((0, 6));
        ops = vec![
            (true, 3, 9),
            (true, 1, 5),
            (true, 2, 7),
            (false, 1, 5),
            (true, 8, 11),
            (false, 8, 11),
        ];
    } else {
        edges.retain(|&e| e != (4, 5));
        edges.extend([(3, 9), (2, 7), (8, 10), (10, 1)]);
        ops = vec![
            (true, 0, 6),
            (false, 8, 10),
            (true, 4, 5),
            (false, 10, 1),
        ];
    }
    let g = DynamicMultigraph::from_edges(n, &edges).unwrap();
    let config = EngineConfig {
        eps: 0.4,
        mode: TerminalMode::Explicit(vec![v(0), v(3), v(6), v(9)]),
        rebuild_factor: 1e6,
        seed,
        ..Default::default()
    };
    let mut engine = ErEngine::new(g, config).unwrap();
    for (insert, a, b) in ops {
        if insert {
            engine.insert(v(a), v(b)).unwrap();
        } else {
            let e = engine
                .graph()
                .edges()
                .filter(|&(_, x, y)| (x, y) == (v(a), v(b)) || (x, y) == (v(b), v(a)))
                .map(|(e, _, _)| e)
                .last()
                .unwrap();
            engine.delete(e).unwrap();
        }
        audit_steps(engine.dynamic().store());
    }
    assert_eq!(engine.rebuilds(), 0);
    [(0, 3), (6, 9), (0, 9)]
        .iter()
        .map(|&(s, t)| engine.effective_resistance(v(s), v(t)).unwrap())
        .collect()
}

fn c5_history_independence() -> Outcome {
    const REPLAYS: u64 = 500;
    let mut a = vec![Vec::new(); 3];
    let mut b = vec![Vec::new(); 3];
    for r in 0..REPLAYS {
        for (i, x) in c5_history(50_000 + r, false).into_iter().enumerate() {
            a[i].push(x);
        }
        for (i, x) in c5_history(60_000 + r, true).into_iter().enumerate() {
            b[i].push(x);
        }
    }
    let ps: Vec<f64> = (0..3).map(|i| ks_two_sample(&a[i], &b[i])).collect();
    outcome(
        ps.iter().all(|&p| p > 0.01),
        format!(
            "KS p-values {:.3}, {:.3}, {:.3} over {REPLAYS} replays per history",
            ps[0], ps[1], ps[2]
        ),
    )
}

fn c6_geometric_skip() -> Outcome {
    const D: usize = 5;
    const L: usize = 12;
    const TRIALS: usize = 100_000;
    let mut rng = stream_from_seed(606);
    // first chosen index (L = none) and number chosen among L occurrences
    let mut first = [[0u64; L + 1]; 2];
    let mut count = [[0u64; L + 1]; 2];
    for _ in 0..TRIALS {
        let mut chosen = Vec::new();
        let mut i = 0usize;
        loop {
            i = i.saturating_add(geometric_skip(D, &mut rng));
            if i >= L {
                break;
            }
            chosen.push(i);
            i += 1;
        }
        first[0][chosen.first().copied().unwrap_or(L)] += 1;
        count[0][chosen.len()] += 1;

        let coins: Vec<usize> = (0..L).filter(|_| rng.gen_range(0..D) == 0).collect();
        first[1][coins.first().copied().unwrap_or(L)] += 1;
        count[1][coins.len()] += 1;
    }
    // merge sparse tails of the count histogram
    let merge = |h: &[u64; L + 1]| -> Vec<u64> {
        let mut out = h[..7].to_vec();
        out.push(h[7..].iter().sum());
        out
    };
    let p_first = chi_square_homogeneity(&first[0], &first[1]);
    let p_count = chi_square_homogeneity(&merge(&count[0]), &merge(&count[1]));
    outcome(
        p_first > 0.01 && p_count > 0.01,
        format!("chi-square p = {p_first:.3} (first index), {p_count:.3} (count) at d = {D}, {TRIALS} trials"),
    )
}

fn c7_load_conservation() -> Outcome {
    const WALKS: usize = 100_000;
    const HORIZON: usize = 10;
    let mut rng = stream_from_seed(707);
    let graphs = [("ring-16", ring(16)), ("random-32", random_connected(32, 40, &mut rng))];
    let mut worst: f64 = 0.0;
    for (_, g) in &graphs {
        let n = g.vertex_count();
        // counts[t][u][x]: walks from u standing on x after t + 1 steps
        let mut counts = vec![vec![vec![0u32; n]; n]; HORIZON];
        for (u, per_start) in (0..n).map(|u| (u, WALKS)) {
            for _ in 0..per_start {
                let mut x = v(u);
                for row in counts.iter_mut() {
                    x = position_after(g, x, 1, &mut rng).unwrap();
                    row[u][x.index()] += 1;
                }
            }
        }
        for row in &counts {
            for hat in 0..n {
                let load: f64 = (0..n)
                    .map(|u| g.degree(v(u)) as f64 * row[u][hat] as f64 / WALKS as f64)
                    .sum();
                let want = g.degree(v(hat)) as f64;
                worst = worst.max((load / want - 1.0).abs());
            }
        }
    }
    outcome(
        worst <= 0.05,
        format!("worst relative deviation {worst:.4} (ring-16, random-32, t ≤ {HORIZON}, {WALKS} walks per start)"),
    )
}

fn c8_load_bound() -> Outcome {
    const SAMPLES: usize = 30;
    let mut rng = stream_from_seed(808);
    let instances: Vec<(&str, DynamicMultigraph, Vec<usize>, usize)> = vec![
        ("ring-16, T = ∅", ring(16), vec![], 8),
        ("ring-16, T = {0}", ring(16), vec![0], 20),
        ("random-32", random_connected(32, 30, &mut rng), vec![0, 5, 9], 40),
        ("barbell", barbell(6, 4), vec![0], 30),
    ];
    let rho = 4;
    let mut pass = true;
    let mut tightest = f64::INFINITY;
    for (_, g, ts, cap) in &instances {
        let n = g.vertex_count();
        let t = TerminalSet::from_vertices(n, ts.iter().map(|&i| v(i)));
        let mut loads = vec![Vec::with_capacity(SAMPLES); n];
        for _ in 0..SAMPLES {
            let params = DynamicScParams {
                beta: 1.0,
                rho,
                step_cap: *cap,
                insert_terminal_prob: None,
                delete_rule: Default::default(),
            };
            let sc = DynamicSc::initialize(g.clone(), t.clone(), params, stream_from_seed(rng.gen()));
            for (u, l) in loads.iter_mut().enumerate() {
                l.push(sc.store().vertex_load(v(u)) as f64);
            }
        }
        for (u, l) in loads.iter().enumerate() {
            let (mean, sd) = mean_std(l);
            // positions 0..=cap on each half
            let bound = (g.degree(v(u)) * (cap + 1) * rho) as f64;
            let slack = bound + 3.0 * sd / (SAMPLES as f64).sqrt() - mean;
            tightest = tightest.min(slack / bound);
            pass &= slack >= 0.0;
        }
    }
    outcome(
        pass,
        format!("4 instances; smallest headroom (bound + 3σ̂ − mean)/bound = {tightest:.4}"),
    )
}

fn c9_hitting() -> Outcome {
    let mut rng = stream_from_seed(909);
    let instances = vec![
        ("erdos-renyi-64", erdos_renyi_connected(64, 0.08, &mut rng)),
        ("random-64", random_connected(64, 30, &mut rng)),
        ("ring-64", ring(64)),
        ("barbell", barbell(8, 6)),
    ];
    let mut capped = 0usize;
    let mut walks = 0usize;
    for (i, (_, g)) in instances.into_iter().enumerate() {
        let mut seed = 9000 + i as u64;
        let engine = loop {
            let e = ErEngine::new(g.clone(), EngineConfig { seed, ..Default::default() }).unwrap();
            if !e.terminals().is_empty() {
                break e;
            }
            seed += 100;
        };
        for w in engine.dynamic().store().walks() {
            walks += 1;
            if w.terminals().is_none() {
                capped += 1;
            }
        }
    }
    let frac = capped as f64 / walks as f64;
    outcome(
        frac <= 0.01,
        format!("{capped}/{walks} walks capped ({:.4}%) with default β and caps", 100.0 * frac),
    )
}

fn c10_amortization() -> Outcome {
    let (checks, bad) = AMORTIZATION.with(|a| *a.borrow());
    outcome(
        bad == 0 && checks > 0,
        format!("truncated ≤ generated steps after {checks} operations ({bad} violations)"),
    )
}

fn c11_resistance_distance() -> Outcome {
    let mut rng = stream_from_seed(1111);
    let mut pairs = 0;
    let mut violations = 0;
    for _ in 0..20 {
        let n = rng.gen_range(3..=40);
        let g = random_connected(n, rng.gen_range(0..=2 * n), &mut rng);
        let er = pinv_oracle(&g);
        for s in 0..n {
            let dist = bfs(&g, v(s));
            for t in s + 1..n {
                pairs += 1;
                if er(v(s), v(t)) > dist[t].unwrap() as f64 + 1e-9 {
                    violations += 1;
                }
            }
        }
    }
    outcome(violations == 0, format!("{violations} violations over {pairs} pairs on 20 graphs"))
}

fn c12_enumeration() -> Outcome {
    let instances: Vec<(&str, DynamicMultigraph, Vec<usize>)> = vec![
        ("triangle", complete(3), vec![0, 1]),
        ("path-3", path(3), vec![0, 2]),
        ("path-4", path(4), vec![0, 3]),
        ("path-5", path(5), vec![0, 2, 4]),
    ];
    let mut worst: f64 = 0.0;
    for (_, g, ts) in &instances {
        let t = TerminalSet::from_vertices(g.vertex_count(), ts.iter().map(|&i| v(i)));
        let exact = exact_schur(g, &t).unwrap();
        let partial = enumerate_terminal_free_walks(g, &t, 20).unwrap();
        for &a in t.members() {
            for &b in t.members() {
                worst = worst.max((partial.entry(a, b) - exact.entry(a, b)).abs());
            }
        }
    }
    outcome(
        worst <= 1e-3,
        format!("max |partial − SC| = {worst:.2e} at max_len = 20 (triangle, paths)"),
    )
}

fn c13_index_integrity() -> Outcome {
    let mut rng = stream_from_seed(1313);
    let n = 20;
    let g = random_connected(n, 25, &mut rng);
    let t = TerminalSet::from_vertices(n, [v(0), v(7), v(13)]);
    let params = DynamicScParams {
        beta: 0.2,
        rho: 4,
        step_cap: 30,
        insert_terminal_prob: Some(0.02),
        delete_rule: Default::default(),
    };
    let mut sc = DynamicSc::initialize(g, t, params, stream_from_seed(1314));
    let mut mismatches = 0;
    for op in 0..1000 {
        let roll: f64 = rng.gen();
        let live: Vec<EdgeId> = sc.graph().edges().map(|(e, _, _)| e).collect();
        if roll < 0.45 || live.is_empty() {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            sc.insert(v(a), v(b)).unwrap();
        } else if roll < 0.95 {
            sc.delete(live[rng.gen_range(0..live.len())]).unwrap();
        } else {
            sc.add_terminal(v(rng.gen_range(0..n))).unwrap();
        }
        audit_steps(sc.store());
        if op % 100 == 99 {
            let bound = sc.graph().edge_id_bound();
            if sc.store().index_counts(n, bound) != sc.store().rescan_counts(n, bound) {
                mismatches += 1;
            }
        }
    }
    let bound = sc.graph().edge_id_bound();
    let exact = sc.store().index_counts(n, bound) == sc.store().rescan_counts(n, bound);
    let audit = sc.audit();
    outcome(
        exact && mismatches == 0 && audit.is_ok(),
        format!(
            "after 1000 fuzzed ops: counts {} rescan, audit {}",
            if exact { "equal" } else { "differ from" },
            audit.err().unwrap_or_else(|| "clean".into())
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 13] = [
        (1, "schur exactness", c1_schur_exactness, Some(Duration::from_secs(30))),
        (2, "sampler unbiasedness", c2_sampler_unbiased, Some(Duration::from_secs(120))),
        (3, "static sketch accuracy", c3_static_accuracy, Some(Duration::from_secs(120))),
        (4, "dynamic accuracy", c4_dynamic_accuracy, Some(Duration::from_secs(300))),
        (5, "history independence", c5_history_independence, Some(Duration::from_secs(600))),
        (6, "geometric-skip law", c6_geometric_skip, Some(Duration::from_secs(10))),
        (7, "load conservation", c7_load_conservation, Some(Duration::from_secs(60))),
        (8, "load upper bound", c8_load_bound, None),
        (9, "hitting probability", c9_hitting, None),
        (11, "resistance ≤ distance", c11_resistance_distance, None),
        (12, "walk-decomposition convergence", c12_enumeration, None),
        (13, "index integrity", c13_index_integrity, None),
        // last: it audits every dynamic run above
        (10, "amortization audit", c10_amortization, None),
    ];
    let mut failed = 0;
    for (id, name, run, limit) in criteria {
        let start = Instant::now();
        let mut out = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                out.pass = false;
                out.detail.push_str(&format!(" [over the {}s budget]", limit.as_secs()));
            }
        }
        failed += !out.pass as usize;
        println!(
            "{:>2} {} {name}: {} ({:.1}s)",
            id,
            if out.pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
