use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use dynamic_resistance::dynamic::log2n;
use dynamic_resistance::engine::EngineError;
use dynamic_resistance::io::StreamEvent;
use dynamic_resistance::numerics::{assemble, pinv_dense, resistance_from_pinv};
use dynamic_resistance::schur::sample_schur_sketch;
use dynamic_resistance::{
    stream_from_seed, DynamicMultigraph, DynamicScParams, EdgeId, EngineConfig, ErEngine,
    TerminalMode, TerminalSet, VertexId, WeightedGraphView,
};

use crate::report::{records_digest, ClassTimes, Params, Record, RunReport, Summary};
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oracle {
    Exact,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub engine: EngineConfig,
    pub oracle: Oracle,
}

fn key(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    (a.min(b), a.max(b))
}

fn invalid(line: usize, message: impl Into<String>) -> BenchError {
    BenchError::StreamInvalid {
        line,
        message: message.into(),
    }
}

/// Checks vertex ranges, self-loops and that every delete has a live
/// edge to remove, without touching any engine state.
pub fn validate_stream(g: &DynamicMultigraph, events: &[(usize, StreamEvent)]) -> Result<(), BenchError> {
    let n = g.vertex_count();
    let mut live: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    for (_, a, b) in g.edges() {
        *live.entry(key(a, b)).or_default() += 1;
    }
    for &(line, ev) in events {
        let (a, b) = match ev {
            StreamEvent::Insert(a, b) | StreamEvent::Delete(a, b) | StreamEvent::Query(a, b) => (a, b),
        };
        if let Some(x) = [a, b].into_iter().find(|x| x.index() >= n) {
            return Err(invalid(line, format!("vertex {x} out of range for n = {n}")));
        }
        match ev {
            StreamEvent::Insert(..) if a == b => {
                return Err(invalid(line, format!("self-loop at {a}")));
            }
            StreamEvent::Insert(..) => *live.entry(key(a, b)).or_default() += 1,
            StreamEvent::Delete(..) => match live.get_mut(&key(a, b)) {
                Some(c) if *c > 0 => *c -= 1,
                _ => return Err(invalid(line, format!("no live edge ({a}, {b}) to delete"))),
            },
            StreamEvent::Query(..) => {}
        }
    }
    Ok(())
}

fn mode_name(mode: &TerminalMode) -> &'static str {
    match mode {
        TerminalMode::EdgeEndpoint => "edge",
        TerminalMode::VertexSample => "vertex",
        TerminalMode::Explicit(_) => "explicit",
    }
}

/// Replays `events` against a fresh engine on `g`.
///
/// Deletes name endpoints and remove the most recently inserted live
/// parallel edge between them. In vertex mode every queried pair is
/// registered up front.
pub fn run_stream(
    g: DynamicMultigraph,
    events: &[(usize, StreamEvent)],
    cfg: &RunConfig,
) -> Result<RunReport, BenchError> {
    validate_stream(&g, events)?;
    let mut stacks: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for (e, a, b) in g.edges() {
        stacks.entry(key(a, b)).or_default().push(e);
    }
    let eps = cfg.engine.eps;
    let mut engine = ErEngine::new(g, cfg.engine.clone())?;
    if cfg.engine.mode == TerminalMode::VertexSample {
        for &(_, ev) in events {
            if let StreamEvent::Query(s, t) = ev {
                if s != t {
                    engine.register_pair(s, t)?;
                }
            }
        }
    }

    let mut records = Vec::with_capacity(events.len());
    let mut times = ClassTimes::default();
    let (mut inserts, mut deletes, mut queries, mut answered) = (0, 0, 0, 0);
    let mut within = 0;
    let mut max_rel: Option<f64> = None;
    let mut h_events = 0;
    for &(line, ev) in events {
        match ev {
            StreamEvent::Insert(u, v) => {
                let start = Instant::now();
                let (e, stats) = engine.insert(u, v)?;
                let time_ns = start.elapsed().as_nanos() as u64;
                times.insert += time_ns;
                inserts += 1;
                h_events += stats.h_events;
                stacks.entry(key(u, v)).or_default().push(e);
                records.push(Record::Insert {
                    line,
                    u: u.0,
                    v: v.0,
                    edge: e.0,
                    new_walks: stats.new_walks,
                    rerouted: stats.rerouted,
                    terminals_added: stats.terminals_added,
                    h_events: stats.h_events,
                    time_ns,
                });
            }
            StreamEvent::Delete(u, v) => {
                let e = stacks
                    .get_mut(&key(u, v))
                    .and_then(Vec::pop)
                    .expect("validated stream");
                let start = Instant::now();
                let stats = engine.delete(e)?;
                let time_ns = start.elapsed().as_nanos() as u64;
                times.delete += time_ns;
                deletes += 1;
                h_events += stats.h_events;
                records.push(Record::Delete {
                    line,
                    u: u.0,
                    v: v.0,
                    edge: e.0,
                    deleted_walks: stats.deleted_walks,
                    regenerated_walks: stats.regenerated_walks,
                    h_events: stats.h_events,
                    time_ns,
                });
            }
            StreamEvent::Query(s, t) => {
                queries += 1;
                let start = Instant::now();
                let result = engine.query(s, t);
                let time_ns = start.elapsed().as_nanos() as u64;
                times.query += time_ns;
                let (estimate, error, added, h, rebuilt) = match result {
                    Ok(out) => (Some(out.value), None, out.terminals_added, out.h_events, out.rebuilt),
                    Err(EngineError::Disconnected { .. }) => (None, Some("disconnected".to_string()), 0, 0, false),
                    Err(e) => return Err(e.into()),
                };
                h_events += h;
                let exact = match (cfg.oracle, estimate) {
                    (Oracle::Exact, Some(_)) => Some(exact_resistance(engine.graph(), s, t)?),
                    _ => None,
                };
                let rel_err = match (estimate, exact) {
                    (Some(est), Some(x)) if x > 0.0 => Some((est / x - 1.0).abs()),
                    (Some(est), Some(_)) => Some(est.abs()),
                    _ => None,
                };
                if estimate.is_some() {
                    answered += 1;
                }
                if let Some(r) = rel_err {
                    within += (r <= eps) as usize;
                    max_rel = Some(max_rel.map_or(r, |m| m.max(r)));
                }
                records.push(Record::Query {
                    line,
                    s: s.0,
                    t: t.0,
                    estimate,
                    exact,
                    rel_err,
                    error,
                    terminals_added: added,
                    h_events: h,
                    rebuilt,
                    time_ns,
                });
            }
        }
    }

    let summary = Summary {
        event: "summary",
        events: events.len(),
        inserts,
        deletes,
        queries,
        answered,
        within_eps: (cfg.oracle == Oracle::Exact).then_some(within),
        max_rel_err: max_rel,
        rebuilds: engine.rebuilds(),
        final_edges: engine.graph().edge_count(),
        final_terminals: engine.terminals().len(),
        h_events,
        params: Params {
            eps,
            mode: mode_name(&cfg.engine.mode).to_string(),
            beta: engine.beta(),
            rho: engine.params().rho,
            step_cap: engine.params().step_cap,
            rho_factor: cfg.engine.rho_factor,
            cap_factor: cfg.engine.cap_factor,
            resparsify: cfg.engine.resparsify,
            oracle: match cfg.oracle {
                Oracle::Exact => "exact",
                Oracle::None => "none",
            }
            .to_string(),
        },
        seed: cfg.engine.seed,
        digest: records_digest(&records),
        time_ns: times,
    };
    Ok(RunReport { records, summary })
}

fn exact_resistance(g: &DynamicMultigraph, s: VertexId, t: VertexId) -> Result<f64, BenchError> {
    let sys = assemble(&WeightedGraphView::from_graph(g)).map_err(|e| BenchError::Config(e.to_string()))?;
    let p = pinv_dense(&sys).map_err(|e| BenchError::Config(format!("exact oracle: {e}")))?;
    Ok(resistance_from_pinv(&p, s, t))
}

/// Static sketch of `g` onto `terminals`, aggregated, as text: a header
/// `n k` followed by `k` lines `u v weight`.
pub fn cmd_sketch(
    g: &DynamicMultigraph,
    terminals: &[VertexId],
    eps: f64,
    beta: Option<f64>,
    rho_factor: f64,
    cap_factor: f64,
    seed: u64,
) -> Result<String, BenchError> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(BenchError::Config(format!("eps = {eps} not in (0, 1)")));
    }
    let n = g.vertex_count();
    let beta = beta.unwrap_or_else(|| (g.edge_count().max(1) as f64).powf(-0.2));
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(BenchError::Config(format!("beta = {beta} not in (0, 1]")));
    }
    let rho = DynamicScParams::rho_for(n, eps, rho_factor);
    let cap = DynamicScParams::edge_mode_cap(n, beta, cap_factor);
    let t = TerminalSet::from_vertices(n, terminals.iter().copied());
    let sketch = sample_schur_sketch(g, &t, rho, cap, &mut stream_from_seed(seed));
    log::info!(
        "sketch: rho = {rho}, cap = {cap}, {} walks, {} capped, log2 n = {:.2}",
        sketch.walks,
        sketch.capped,
        log2n(n)
    );
    let view = sketch.sketch.aggregated_view();
    let mut out = format!("{} {}\n", n, view.edges.len());
    for (u, v, w) in view.edges {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    Ok(out)
}
