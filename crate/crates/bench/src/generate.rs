//! Synthetic graphs and mixed update streams.

use std::str::FromStr;

use dynamic_resistance::io::StreamEvent;
use dynamic_resistance::{stream_from_seed, DynamicMultigraph, VertexId};
use rand::Rng;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    /// Random spanning tree plus uniform random edges up to `m`.
    ErdosRenyi,
    Ring,
    /// Two cliques on `⌊n/2⌋` and `⌈n/2⌉` vertices joined by one edge.
    Barbell,
    /// A path on `n` vertices whose middle edge is a bundle of `parallel`
    /// copies.
    MultiParallel,
}

impl FromStr for GenKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "erdos-renyi" => Ok(GenKind::ErdosRenyi),
            "ring" => Ok(GenKind::Ring),
            "barbell" => Ok(GenKind::Barbell),
            "multi-parallel" => Ok(GenKind::MultiParallel),
            _ => Err(format!(
                "unknown kind {s:?} (expected erdos-renyi, ring, barbell or multi-parallel)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    /// Edge count for `erdos-renyi`; ignored otherwise.
    pub m: usize,
    pub ops: usize,
    /// Bundle size for `multi-parallel`.
    pub parallel: usize,
    pub seed: u64,
    /// Event mix; normalized internally.
    pub insert_weight: f64,
    pub delete_weight: f64,
    pub query_weight: f64,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize) -> Self {
        Self {
            kind,
            n,
            m: 2 * n,
            ops: 0,
            parallel: 2,
            seed: 0,
            insert_weight: 0.4,
            delete_weight: 0.4,
            query_weight: 0.2,
        }
    }
}

fn random_pair<R: Rng>(n: usize, rng: &mut R) -> (VertexId, VertexId) {
    let a = rng.gen_range(0..n);
    let b = (a + rng.gen_range(1..n)) % n;
    (VertexId::from(a), VertexId::from(b))
}

fn infeasible(msg: impl Into<String>) -> BenchError {
    BenchError::InfeasibleParams(msg.into())
}

fn graph_for<R: Rng>(spec: &GenSpec, rng: &mut R) -> Result<DynamicMultigraph, BenchError> {
    let n = spec.n;
    let mut edges = Vec::new();
    match spec.kind {
        GenKind::ErdosRenyi => {
            if n < 2 {
                return Err(infeasible("erdos-renyi needs n ≥ 2"));
            }
            if spec.m < n - 1 {
                return Err(infeasible(format!(
                    "m = {} cannot connect {n} vertices",
                    spec.m
                )));
            }
            for i in 1..n {
                edges.push((i, rng.gen_range(0..i)));
            }
            while edges.len() < spec.m {
                let a = rng.gen_range(0..n);
                let b = (a + rng.gen_range(1..n)) % n;
                edges.push((a, b));
            }
        }
        GenKind::Ring => {
            if n < 3 {
                return Err(infeasible("ring needs n ≥ 3"));
            }
            edges.extend((0..n).map(|i| (i, (i + 1) % n)));
        }
        GenKind::Barbell => {
            if n < 4 {
                return Err(infeasible("barbell needs n ≥ 4"));
            }
            let k = n / 2;
            for (lo, hi) in [(0, k), (k, n)] {
                for a in lo..hi {
                    for b in a + 1..hi {
                        edges.push((a, b));
                    }
                }
            }
            edges.push((k - 1, k));
        }
        GenKind::MultiParallel => {
            if n < 2 || spec.parallel == 0 {
                return Err(infeasible("multi-parallel needs n ≥ 2 and parallel ≥ 1"));
            }
            let mid = (n - 1) / 2;
            for i in 0..n - 1 {
                let copies = if i == mid { spec.parallel } else { 1 };
                edges.extend(std::iter::repeat((i, i + 1)).take(copies));
            }
        }
    }
    Ok(DynamicMultigraph::from_edges(n, &edges).expect("generated edges are valid"))
}

/// Builds the graph and a stream of `ops` events. Deletes always name a
/// live edge; queries name distinct vertices.
pub fn generate(spec: &GenSpec) -> Result<(DynamicMultigraph, Vec<StreamEvent>), BenchError> {
    let weights = [spec.insert_weight, spec.delete_weight, spec.query_weight];
    if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) || weights.iter().sum::<f64>() <= 0.0 {
        return Err(infeasible("event weights must be non-negative with a positive sum"));
    }
    let mut rng = stream_from_seed(spec.seed);
    let g = graph_for(spec, &mut rng)?;
    let n = spec.n;
    if spec.ops > 0 && n < 2 {
        return Err(infeasible("events need at least two vertices"));
    }
    // live edges by endpoints; which parallel copy a delete hits does not
    // matter for the generator
    let mut live: Vec<(VertexId, VertexId)> = g.edges().map(|(_, a, b)| (a, b)).collect();
    let total: f64 = weights.iter().sum();
    let mut events = Vec::with_capacity(spec.ops);
    for _ in 0..spec.ops {
        let x = rng.gen::<f64>() * total;
        if x < spec.insert_weight || (x < spec.insert_weight + spec.delete_weight && live.is_empty()) {
            let (a, b) = random_pair(n, &mut rng);
            live.push((a, b));
            events.push(StreamEvent::Insert(a, b));
        } else if x < spec.insert_weight + spec.delete_weight {
            let i = rng.gen_range(0..live.len());
            let (a, b) = live.swap_remove(i);
            events.push(StreamEvent::Delete(a, b));
        } else {
            let (a, b) = random_pair(n, &mut rng);
            events.push(StreamEvent::Query(a, b));
        }
    }
    Ok((g, events))
}
