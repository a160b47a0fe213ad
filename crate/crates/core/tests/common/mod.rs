//! Oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::VecDeque;

use dynamic_resistance::numerics::{assemble, pinv_dense, resistance_from_pinv};
use dynamic_resistance::{DynamicMultigraph, SchurSketch, VertexId, WeightedGraphView};
use rand::seq::SliceRandom;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn v(i: usize) -> VertexId {
    VertexId::from(i)
}

/// Random spanning tree (each vertex attaches to an earlier one in a
/// shuffled order) plus `extra` uniformly random edges, parallels allowed.
pub fn random_connected<R: Rng>(n: usize, extra: usize, rng: &mut R) -> DynamicMultigraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = DynamicMultigraph::new(n);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.insert_edge(v(order[i]), v(order[j])).unwrap();
    }
    for _ in 0..extra {
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        g.insert_edge(v(a), v(b)).unwrap();
    }
    g
}

/// G(n, p) conditioned on being connected (by rejection).
pub fn erdos_renyi_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> DynamicMultigraph {
    loop {
        let mut g = DynamicMultigraph::new(n);
        for a in 0..n {
            for b in a + 1..n {
                if rng.gen::<f64>() < p {
                    g.insert_edge(v(a), v(b)).unwrap();
                }
            }
        }
        if is_connected(&g) {
            return g;
        }
    }
}

pub fn ring(n: usize) -> DynamicMultigraph {
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    DynamicMultigraph::from_edges(n, &edges).unwrap()
}

pub fn path(n: usize) -> DynamicMultigraph {
    let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    DynamicMultigraph::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> DynamicMultigraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    DynamicMultigraph::from_edges(n, &edges).unwrap()
}

/// Two cliques of size `k` joined by a path with `bridge` edges.
pub fn barbell(k: usize, bridge: usize) -> DynamicMultigraph {
    let n = 2 * k + bridge.saturating_sub(1);
    let mut edges = Vec::new();
    for off in [0, k] {
        for a in 0..k {
            for b in a + 1..k {
                edges.push((off + a, off + b));
            }
        }
    }
    let mut prev = k - 1;
    for i in 0..bridge.saturating_sub(1) {
        edges.push((prev, 2 * k + i));
        prev = 2 * k + i;
    }
    edges.push((prev, k));
    DynamicMultigraph::from_edges(n, &edges).unwrap()
}

pub fn bfs(g: &DynamicMultigraph, s: VertexId) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.vertex_count()];
    dist[s.index()] = Some(0);
    let mut queue = VecDeque::from([s]);
    while let Some(x) = queue.pop_front() {
        let d = dist[x.index()].unwrap();
        for &(_, y) in g.incident(x) {
            if dist[y.index()].is_none() {
                dist[y.index()] = Some(d + 1);
                queue.push_back(y);
            }
        }
    }
    dist
}

pub fn is_connected(g: &DynamicMultigraph) -> bool {
    g.vertex_count() == 0 || bfs(g, v(0)).iter().all(Option::is_some)
}

/// Resistances of `view` through the dense pseudoinverse.
pub fn pinv_oracle_view(view: &WeightedGraphView) -> impl Fn(VertexId, VertexId) -> f64 {
    let sys = assemble(view).expect("valid view");
    let p = pinv_dense(&sys).expect("small enough");
    move |s, t| resistance_from_pinv(&p, s, t)
}

pub fn pinv_oracle(g: &DynamicMultigraph) -> impl Fn(VertexId, VertexId) -> f64 {
    pinv_oracle_view(&WeightedGraphView::from_graph(g))
}

/// Dense Laplacian of a sketch restricted to `terminals`, row-major.
pub fn sketch_laplacian(h: &SchurSketch, terminals: &[VertexId]) -> Vec<f64> {
    let k = terminals.len();
    let mut local = vec![usize::MAX; h.vertex_count()];
    for (i, t) in terminals.iter().enumerate() {
        local[t.index()] = i;
    }
    let mut l = vec![0.0; k * k];
    for (_, e) in h.iter() {
        if e.t1 == e.t2 {
            continue;
        }
        let (i, j) = (local[e.t1.index()], local[e.t2.index()]);
        l[i * k + j] -= e.weight;
        l[j * k + i] -= e.weight;
        l[i * k + i] += e.weight;
        l[j * k + j] += e.weight;
    }
    l
}

/// Two-sample Kolmogorov–Smirnov test; returns the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    kolmogorov_q(lambda)
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Chi-square test of homogeneity for two histograms over the same bins.
/// Bins empty in both samples are dropped.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let total = na + nb;
    let mut stat = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        bins += 1;
        let ea = col * na / total;
        let eb = col * nb / total;
        stat += (x as f64 - ea).powi(2) / ea + (y as f64 - eb).powi(2) / eb;
    }
    let dof = (bins - 1).max(1) as f64;
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}
