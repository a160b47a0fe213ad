//! Dynamic maintenance of the walk collection and its sketch `H`.
//!
//! Each update only touches walks whose law changes:
//!
//! - **Insert `(u, v)`**: a walk standing on `u` should now leave through
//!   the new edge with probability `1/deg(u)`. Rather than flipping a coin
//!   at every old occurrence of `u`, the scan jumps ahead by geometrically
//!   distributed skips over the rank/select index and reroutes only the
//!   selected occurrences through the new edge.
//! - **Delete `e`**: walks born on `e` are dropped; walks that crossed `e`
//!   are regrown from the point where they first crossed it. Walks that
//!   never crossed `e` already follow the post-deletion law.
//! - **AddTerminal `u`**: every walk is cut at its first visit to `u`.
//!
//! Every walk whose two halves both end on terminals owns exactly one
//! H-edge of weight `1/(ρℓ)`. All H mutations are appended to a change
//! log so downstream consumers can follow `H` incrementally.

use std::collections::BTreeMap;

use rand::Rng;

use crate::graph::{DynamicMultigraph, EdgeId, GraphError, VertexId};
use crate::numerics::WeightedGraphView;
use crate::schur::TerminalSet;
use crate::sketch::{HEdge, SchurSketch};
use crate::walks::{simulate_walk, Place, Side, WalkId, WalkStore, WalkStoreError};
use crate::RandomStream;

pub use crate::sketch::ChangeEvent;

/// Where a walk that crossed a deleted edge is regrown from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeleteRule {
    /// From the position where the half first crossed the deleted edge.
    /// Every earlier step out of `u` or `v` avoided the edge, which is
    /// exactly the post-deletion law, so this keeps the collection
    /// distributed as fresh walks in the new graph.
    #[default]
    FirstTraversal,
    /// From the half's first visit to either endpoint. Walks that revisit
    /// an endpoint many times are kept with the wrong bias under this
    /// rule; it exists for comparison.
    FirstVisit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicScParams {
    pub beta: f64,
    pub rho: usize,
    pub step_cap: usize,
    /// Probability of promoting both endpoints of an inserted edge to
    /// terminals. `None` disables the coin (vertex-sampled terminals).
    pub insert_terminal_prob: Option<f64>,
    pub delete_rule: DeleteRule,
}

/// `log₂ n`, floored at 1 so tiny graphs still get positive parameters.
pub fn log2n(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

impl DynamicScParams {
    /// `ρ = ⌈c_ρ · log₂ n / ε²⌉`.
    pub fn rho_for(n: usize, eps: f64, rho_factor: f64) -> usize {
        ((rho_factor * log2n(n) / (eps * eps)).ceil() as usize).max(1)
    }

    /// `⌈c_len · β⁻² · (log₂ n)³⌉`.
    pub fn edge_mode_cap(n: usize, beta: f64, cap_factor: f64) -> usize {
        ((cap_factor * log2n(n).powi(3) / (beta * beta)).ceil() as usize).max(1)
    }

    /// `⌈c_len · β⁻³ · (log₂ n)⁴⌉`.
    pub fn vertex_mode_cap(n: usize, beta: f64, cap_factor: f64) -> usize {
        ((cap_factor * log2n(n).powi(4) / beta.powi(3)).ceil() as usize).max(1)
    }

    /// Edge-endpoint parameters with the insert coin enabled.
    pub fn edge_mode(n: usize, beta: f64, eps: f64) -> Self {
        Self {
            beta,
            rho: Self::rho_for(n, eps, 1.0),
            step_cap: Self::edge_mode_cap(n, beta, 1.0),
            insert_terminal_prob: Some(beta),
            delete_rule: DeleteRule::default(),
        }
    }
}

/// What one operation did.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UpdateStats {
    pub new_walks: usize,
    pub deleted_walks: usize,
    /// Distinct walks regrown after a deletion.
    pub regenerated_walks: usize,
    /// Occurrences rerouted through an inserted edge.
    pub rerouted: usize,
    pub truncated_walks: usize,
    pub terminals_added: usize,
    pub h_events: usize,
}

impl UpdateStats {
    fn absorb(&mut self, other: UpdateStats) {
        self.new_walks += other.new_walks;
        self.deleted_walks += other.deleted_walks;
        self.regenerated_walks += other.regenerated_walks;
        self.rerouted += other.rerouted;
        self.truncated_walks += other.truncated_walks;
        self.terminals_added += other.terminals_added;
        self.h_events += other.h_events;
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DynamicError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Walks(#[from] WalkStoreError),
}

/// Number of failures before the first success of Bernoulli(1/d) coins,
/// by inverting the geometric CDF.
pub fn geometric_skip<R: Rng + ?Sized>(d: usize, rng: &mut R) -> usize {
    if d <= 1 {
        return 0;
    }
    let x: f64 = rng.gen();
    let k = ((1.0 - x).ln() / (1.0 - 1.0 / d as f64).ln()).floor();
    if k >= usize::MAX as f64 {
        usize::MAX
    } else {
        k as usize
    }
}

/// The dynamic Schur complement structure.
#[derive(Debug, Clone)]
pub struct DynamicSc {
    graph: DynamicMultigraph,
    terminals: TerminalSet,
    store: WalkStore,
    sketch: SchurSketch,
    params: DynamicScParams,
    rng: RandomStream,
    log: Vec<ChangeEvent>,
}

impl DynamicSc {
    /// Draws `ρ` combined walks for every edge of `graph`.
    pub fn initialize(
        graph: DynamicMultigraph,
        terminals: TerminalSet,
        params: DynamicScParams,
        rng: RandomStream,
    ) -> Self {
        let n = graph.vertex_count();
        let m = graph.edge_count();
        assert!(params.rho >= 1 && params.step_cap >= 1);
        if m > 0 && params.beta * (m as f64) < (n.max(2) as f64).ln() {
            log::warn!(
                "beta*m = {:.2} is below ln n = {:.2}; hitting guarantees may not hold",
                params.beta * m as f64,
                (n.max(2) as f64).ln()
            );
        }
        let mut sc = Self {
            store: WalkStore::new(n, params.step_cap),
            sketch: SchurSketch::new(n),
            graph,
            terminals,
            params,
            rng,
            log: Vec::new(),
        };
        let edges: Vec<EdgeId> = sc.graph.edges().map(|(e, _, _)| e).collect();
        for e in edges {
            sc.spawn_walks(e);
        }
        sc
    }

    pub fn graph(&self) -> &DynamicMultigraph {
        &self.graph
    }

    pub fn terminals(&self) -> &TerminalSet {
        &self.terminals
    }

    pub fn store(&self) -> &WalkStore {
        &self.store
    }

    pub fn sketch(&self) -> &SchurSketch {
        &self.sketch
    }

    pub fn params(&self) -> &DynamicScParams {
        &self.params
    }

    pub fn into_parts(self) -> (DynamicMultigraph, RandomStream) {
        (self.graph, self.rng)
    }

    /// Every H-edge as a weighted multigraph on the original vertex ids.
    pub fn sketch_view(&self) -> WeightedGraphView {
        self.sketch.view()
    }

    /// Pending change events, oldest first.
    pub fn change_log(&self) -> &[ChangeEvent] {
        &self.log
    }

    pub fn take_changes(&mut self) -> Vec<ChangeEvent> {
        std::mem::take(&mut self.log)
    }

    fn desired_edge(&self, w: WalkId) -> Option<HEdge> {
        let walk = self.store.get(w)?;
        walk.terminals().map(|(t1, t2)| HEdge {
            t1,
            t2,
            weight: 1.0 / (self.params.rho as f64 * walk.combined_len() as f64),
        })
    }

    fn sync(&mut self, w: WalkId) -> usize {
        let desired = self.desired_edge(w);
        let events = self.sketch.set(w, desired);
        let k = events.len();
        self.log.extend(events);
        k
    }

    fn spawn_walks(&mut self, e: EdgeId) -> UpdateStats {
        let mut stats = UpdateStats::default();
        for i in 0..self.params.rho {
            let draft = simulate_walk(
                &self.graph,
                &self.terminals,
                e,
                i as u32,
                self.params.step_cap,
                &mut self.rng,
            )
            .expect("edge is live");
            let w = self.store.record_walk(draft);
            stats.h_events += self.sync(w);
            stats.new_walks += 1;
        }
        stats
    }

    /// Adds `u` to `T` and cuts every walk at its first visit to `u`.
    pub fn add_terminal(&mut self, u: VertexId) -> Result<UpdateStats, DynamicError> {
        if !self.graph.contains_vertex(u) {
            return Err(GraphError::UnknownVertex(u).into());
        }
        let mut stats = UpdateStats::default();
        if !self.terminals.insert(u) {
            return Ok(stats);
        }
        stats.terminals_added = 1;
        let mut walks: Vec<WalkId> = self.store.walks_through_vertex(u).map(|o| o.walk).collect();
        walks.sort_unstable();
        walks.dedup();
        for w in walks {
            self.store.truncate_at_first(w, u)?;
            stats.truncated_walks += 1;
            stats.h_events += self.sync(w);
        }
        Ok(stats)
    }

    /// Inserts edge `(u, v)` and reroutes old walks through it.
    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<(EdgeId, UpdateStats), DynamicError> {
        for x in [u, v] {
            if !self.graph.contains_vertex(x) {
                return Err(GraphError::UnknownVertex(x).into());
            }
        }
        if u == v {
            return Err(GraphError::SelfLoopRejected(u).into());
        }
        let mut stats = UpdateStats::default();
        if let Some(p) = self.params.insert_terminal_prob {
            if self.rng.gen::<f64>() < p {
                stats.absorb(self.add_terminal(u)?);
                stats.absorb(self.add_terminal(v)?);
            }
        }
        let horizon = self.store.clock();
        let e = self.graph.insert_edge(u, v)?;
        stats.absorb(self.spawn_walks(e));
        for x in [u, v] {
            stats.absorb(self.reroute_through(x, e, horizon)?);
        }
        Ok((e, stats))
    }

    /// Geometric-skip scan over occurrences of `x` stamped before
    /// `horizon`, rerouting each selected departure through `e`.
    fn reroute_through(&mut self, x: VertexId, e: EdgeId, horizon: u64) -> Result<UpdateStats, DynamicError> {
        let mut stats = UpdateStats::default();
        if self.terminals.contains(x) {
            // walks stop on terminals, so no old walk ever left `x`
            return Ok(stats);
        }
        let d = self.graph.degree(x);
        let mut rank = 0usize;
        loop {
            rank = rank.saturating_add(geometric_skip(d, &mut self.rng));
            // rerouting only deletes occurrences ranked after the current
            // one, so the bound is recomputed each round
            if rank >= self.store.occurrences_before(x, horizon) {
                break;
            }
            let occ = self
                .store
                .occurrence_at_rank(x, rank)
                .expect("rank below count");
            let Place::Half { side, pos } = occ.place else {
                unreachable!("vertex indexes hold half positions only");
            };
            let departs = self
                .store
                .get(occ.walk)
                .expect("indexed walk is live")
                .half(side)
                .departs_from(pos as usize);
            if departs {
                self.store.regenerate_suffix(
                    occ.walk,
                    side,
                    pos as usize,
                    Some(e),
                    &self.graph,
                    &self.terminals,
                    &mut self.rng,
                )?;
                stats.rerouted += 1;
                stats.h_events += self.sync(occ.walk);
            }
            rank += 1;
        }
        Ok(stats)
    }

    /// Deletes edge `e`, dropping its own walks and regrowing walks that
    /// crossed it.
    pub fn delete(&mut self, e: EdgeId) -> Result<UpdateStats, DynamicError> {
        let (u, v) = self.graph.delete_edge(e)?;
        let mut stats = UpdateStats::default();
        let mut origin_walks = Vec::new();
        let mut first_cross: BTreeMap<(WalkId, Side), usize> = BTreeMap::new();
        for occ in self.store.walks_through_edge(e) {
            match occ.place {
                Place::Origin => origin_walks.push(occ.walk),
                Place::Half { side, pos } => {
                    let slot = first_cross.entry((occ.walk, side)).or_insert(usize::MAX);
                    *slot = (*slot).min(pos as usize);
                }
            }
        }
        for w in origin_walks {
            self.store.remove_walk(w)?;
            stats.deleted_walks += 1;
            stats.h_events += self.sync(w);
        }
        let mut touched: Vec<WalkId> = Vec::new();
        for ((w, side), step) in first_cross {
            if self.store.get(w).is_none() {
                // born on `e` and crossed it again; already dropped
                continue;
            }
            let from = match self.params.delete_rule {
                DeleteRule::FirstTraversal => step,
                DeleteRule::FirstVisit => self
                    .store
                    .get(w)
                    .expect("walk is live")
                    .half(side)
                    .vertices()
                    .iter()
                    .position(|&x| x == u || x == v)
                    .expect("a half crossing (u,v) visits u or v"),
            };
            self.store.regenerate_suffix(
                w,
                side,
                from,
                None,
                &self.graph,
                &self.terminals,
                &mut self.rng,
            )?;
            touched.push(w);
        }
        touched.dedup();
        for w in touched {
            stats.regenerated_walks += 1;
            stats.h_events += self.sync(w);
        }
        Ok(stats)
    }

    /// Full consistency audit of walks, indexes, terminals and `H`.
    pub fn audit(&self) -> Result<(), String> {
        self.graph.check_consistency()?;
        let n = self.graph.vertex_count();
        self.store.check_integrity(n, self.graph.edge_id_bound())?;
        let mut terminal_walks = 0;
        for walk in self.store.walks() {
            if !self.graph.is_live(walk.origin()) {
                return Err(format!("walk {} has dead origin", walk.id()));
            }
            for side in Side::BOTH {
                let half = walk.half(side);
                let vs = half.vertices();
                for (i, &e) in half.edges().iter().enumerate() {
                    let (a, b) = self
                        .graph
                        .endpoints(e)
                        .ok_or_else(|| format!("walk {} uses dead edge {e}", walk.id()))?;
                    if !((a == vs[i] && b == vs[i + 1]) || (b == vs[i] && a == vs[i + 1])) {
                        return Err(format!("walk {} step {i} not along {e}", walk.id()));
                    }
                }
                if vs[..vs.len() - 1].iter().any(|&x| self.terminals.contains(x)) {
                    return Err(format!("walk {} passes through a terminal", walk.id()));
                }
                let last = *vs.last().unwrap();
                if half.status().vertex() != last
                    || half.status().is_terminal() != self.terminals.contains(last)
                {
                    return Err(format!("walk {} has a stale end status", walk.id()));
                }
                if half.steps() > self.params.step_cap {
                    return Err(format!("walk {} exceeds the step cap", walk.id()));
                }
            }
            let want = self.desired_edge(walk.id());
            if want.is_some() {
                terminal_walks += 1;
            }
            if self.sketch.get(walk.id()) != want {
                return Err(format!("H-edge of walk {} is out of sync", walk.id()));
            }
        }
        if self.sketch.len() != terminal_walks {
            return Err(format!(
                "{} H-edges for {terminal_walks} terminal walks",
                self.sketch.len()
            ));
        }
        for (_, h) in self.sketch.iter() {
            if !self.terminals.contains(h.t1) || !self.terminals.contains(h.t2) {
                return Err("H-edge endpoint outside T".into());
            }
        }
        Ok(())
    }
}
