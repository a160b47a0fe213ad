//! After any update sequence the walk collection should be distributed
//! like fresh walks on the final graph, so the mean sketch Laplacian must
//! match the exact Schur complement of the final graph.

mod common;

use common::*;
use dynamic_resistance::schur::exact_schur;
use dynamic_resistance::{
    stream_from_seed, DeleteRule, DynamicMultigraph, DynamicSc, DynamicScParams, EdgeId,
    TerminalSet, VertexId,
};

const REPLAYS: usize = 6000;

fn params(rule: DeleteRule) -> DynamicScParams {
    DynamicScParams {
        beta: 1.0,
        rho: 1,
        step_cap: 100_000,
        insert_terminal_prob: None,
        delete_rule: rule,
    }
}

/// Largest |mean − SC| in units of standard error over all entries.
fn worst_z(
    g0: &DynamicMultigraph,
    terminals: &[VertexId],
    rule: DeleteRule,
    seed: u64,
    ops: impl Fn(&mut DynamicSc),
) -> f64 {
    let n = g0.vertex_count();
    let t = TerminalSet::from_vertices(n, terminals.iter().copied());
    let k = terminals.len();
    let mut sum = vec![0.0; k * k];
    let mut sum_sq = vec![0.0; k * k];
    let mut final_graph = None;
    for r in 0..REPLAYS {
        let mut sc = DynamicSc::initialize(
            g0.clone(),
            t.clone(),
            params(rule),
            stream_from_seed(seed * 1_000_003 + r as u64),
        );
        ops(&mut sc);
        let l = sketch_laplacian(sc.sketch(), terminals);
        for i in 0..k * k {
            sum[i] += l[i];
            sum_sq[i] += l[i] * l[i];
        }
        final_graph.get_or_insert_with(|| (sc.graph().clone(), sc.terminals().clone()));
    }
    let (g, t_final) = final_graph.unwrap();
    assert_eq!(t_final.len(), k, "ops must not change T in these scenarios");
    let exact = exact_schur(&g, &t_final).unwrap();
    let n = REPLAYS as f64;
    let mut worst: f64 = 0.0;
    for a in 0..k {
        for b in 0..k {
            let i = a * k + b;
            let mean = sum[i] / n;
            let se = ((sum_sq[i] / n - mean * mean).max(0.0) / (n - 1.0)).sqrt();
            let diff = (mean - exact.entry(terminals[a], terminals[b])).abs();
            if se > 0.0 {
                worst = worst.max(diff / se);
            } else {
                assert!(diff < 1e-12);
            }
        }
    }
    worst
}

/// A star of short cycles hung off vertex 1, so walks revisit 1 often.
fn revisiting_graph() -> DynamicMultigraph {
    DynamicMultigraph::from_edges(
        7,
        &[(0, 1), (1, 2), (2, 1), (1, 3), (3, 4), (4, 1), (1, 5), (5, 6), (6, 0)],
    )
    .unwrap()
}

#[test]
fn insert_matches_fresh_walks() {
    let g = revisiting_graph();
    let ts = [v(0), v(6)];
    let z = worst_z(&g, &ts, DeleteRule::FirstTraversal, 1, |sc| {
        sc.insert(v(2), v(4)).unwrap();
        sc.insert(v(1), v(3)).unwrap();
    });
    assert!(z < 4.0, "z = {z}");
}

#[test]
fn delete_first_traversal_matches_fresh_walks() {
    let g = revisiting_graph();
    let ts = [v(0), v(6)];
    // (1,2) is a parallel pair; drop one copy, then the chord (4,1)
    let z = worst_z(&g, &ts, DeleteRule::FirstTraversal, 2, |sc| {
        sc.delete(EdgeId(1)).unwrap();
        sc.delete(EdgeId(5)).unwrap();
    });
    assert!(z < 4.0, "z = {z}");
}

#[test]
fn mixed_updates_match_fresh_walks() {
    let g = revisiting_graph();
    let ts = [v(0), v(6), v(3)];
    let z = worst_z(&g, &ts, DeleteRule::FirstTraversal, 3, |sc| {
        let (e, _) = sc.insert(v(2), v(5)).unwrap();
        sc.delete(EdgeId(4)).unwrap();
        sc.insert(v(4), v(6)).unwrap();
        sc.delete(e).unwrap();
    });
    assert!(z < 4.0, "z = {z}");
}

#[test]
fn add_terminal_matches_fresh_walks() {
    let g = revisiting_graph();
    let n = g.vertex_count();
    let base = TerminalSet::from_vertices(n, [v(0), v(6)]);
    let k = 3;
    let ts = [v(0), v(4), v(6)];
    let mut sum = vec![0.0; k * k];
    let mut sum_sq = vec![0.0; k * k];
    for r in 0..REPLAYS {
        let mut sc = DynamicSc::initialize(
            g.clone(),
            base.clone(),
            params(DeleteRule::FirstTraversal),
            stream_from_seed(77_000 + r as u64),
        );
        sc.add_terminal(v(4)).unwrap();
        let l = sketch_laplacian(sc.sketch(), &ts);
        for i in 0..k * k {
            sum[i] += l[i];
            sum_sq[i] += l[i] * l[i];
        }
    }
    let exact = exact_schur(&g, &TerminalSet::from_vertices(n, ts)).unwrap();
    let nn = REPLAYS as f64;
    for a in 0..k {
        for b in 0..k {
            let i = a * k + b;
            let mean = sum[i] / nn;
            let se = ((sum_sq[i] / nn - mean * mean) / (nn - 1.0)).sqrt();
            let diff = (mean - exact.entry(ts[a], ts[b])).abs();
            assert!(diff < 4.0 * se + 1e-12, "entry ({a},{b}): {diff} vs se {se}");
        }
    }
}

/// Regrowing from the first visit to an endpoint keeps walks that
/// avoided the deleted edge on their early visits but crossed it later
/// with a different prefix law than fresh walks.
#[test]
fn first_visit_rule_is_biased() {
    let g = revisiting_graph();
    let ts = [v(0), v(6)];
    let del = |sc: &mut DynamicSc| {
        sc.delete(EdgeId(1)).unwrap();
        sc.delete(EdgeId(5)).unwrap();
    };
    let biased = worst_z(&g, &ts, DeleteRule::FirstVisit, 4, del);
    let fair = worst_z(&g, &ts, DeleteRule::FirstTraversal, 4, del);
    assert!(fair < 4.0, "first-traversal z = {fair}");
    assert!(biased > 6.0, "first-visit z = {biased}");
}
