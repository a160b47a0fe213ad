//! The walk collection and its reverse indexes.
//!
//! Every walk hangs off an origin edge `(u, v)` and consists of two half
//! walks, one leaving `u` and one leaving `v`. Each half runs until it
//! stands on a terminal or has taken `step_cap` steps. Read end to end,
//! the combined walk is `t1 … u, (u,v), v … t2`.
//!
//! Every vertex position and every traversed edge of every half is an
//! *occurrence*, and each vertex and each edge keeps an order-statistic
//! index of its occurrences. Index keys are `(stamp, position)`: a stamp
//! is drawn from a monotone clock whenever a half (or a regenerated
//! suffix of one) is generated, so key order is generation order and
//! within one half it agrees with position order.

use std::fmt::{self, Write as _};

use rand::Rng;
use thiserror::Error;

use crate::graph::{DynamicMultigraph, EdgeId, GraphError, VertexId};
use crate::ostree::{Forest, Root};
use crate::schur::TerminalSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WalkId(pub u32);

impl WalkId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for WalkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// Which endpoint of the origin edge a half walk leaves from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    U = 0,
    V = 1,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::U, Side::V];

    #[inline]
    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndStatus {
    ReachedTerminal(VertexId),
    CappedAt(VertexId),
}

impl EndStatus {
    pub fn vertex(self) -> VertexId {
        match self {
            EndStatus::ReachedTerminal(v) | EndStatus::CappedAt(v) => v,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, EndStatus::ReachedTerminal(_))
    }
}

impl fmt::Display for EndStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EndStatus::ReachedTerminal(v) => write!(f, "T:{v}"),
            EndStatus::CappedAt(v) => write!(f, "C:{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkStoreError {
    #[error("walk {0} does not exist")]
    UnknownWalk(WalkId),
    #[error("rank {rank} out of range for {count} occurrences")]
    RankOutOfRange { rank: usize, count: usize },
    #[error("vertex {0} is not on walk {1}")]
    VertexNotOnWalk(VertexId, WalkId),
    #[error("invalid regeneration position {pos} on walk {walk}")]
    InvalidPosition { walk: WalkId, pos: usize },
    #[error("edge {0} is not incident to the walk position")]
    ForcedEdgeNotIncident(EdgeId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Where an occurrence sits inside its walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    /// The origin edge itself (edge indexes only).
    Origin,
    /// Vertex position `pos` of a half, or the step from `pos` to
    /// `pos + 1` in edge indexes.
    Half { side: Side, pos: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence {
    pub walk: WalkId,
    pub place: Place,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccKey {
    pub stamp: u64,
    pub pos: u32,
}

/// One half of a combined walk, generated outward from an origin endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfWalk {
    vertices: Vec<VertexId>,
    edges: Vec<EdgeId>,
    stamps: Vec<u64>,
    status: EndStatus,
}

impl HalfWalk {
    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn status(&self) -> EndStatus {
        self.status
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.edges.len()
    }

    /// Whether the walk stepped away from position `pos`.
    pub fn departs_from(&self, pos: usize) -> bool {
        pos < self.edges.len()
    }

    fn vertex_key(&self, pos: usize) -> OccKey {
        OccKey {
            stamp: self.stamps[pos],
            pos: pos as u32,
        }
    }

    fn step_key(&self, step: usize) -> OccKey {
        OccKey {
            stamp: self.stamps[step + 1],
            pos: step as u32,
        }
    }
}

/// A half walk before it is stamped and indexed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfDraft {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub status: EndStatus,
}

impl HalfDraft {
    pub fn steps(&self) -> usize {
        self.edges.len()
    }
}

/// A combined walk before it is recorded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkDraft {
    pub origin: EdgeId,
    pub replica: u32,
    pub halves: [HalfDraft; 2],
}

impl WalkDraft {
    pub fn combined_len(&self) -> usize {
        self.halves[0].steps() + self.halves[1].steps() + 1
    }

    pub fn terminals(&self) -> Option<(VertexId, VertexId)> {
        terminal_pair(self.halves[0].status, self.halves[1].status)
    }
}

fn terminal_pair(a: EndStatus, b: EndStatus) -> Option<(VertexId, VertexId)> {
    match (a, b) {
        (EndStatus::ReachedTerminal(x), EndStatus::ReachedTerminal(y)) => Some((x, y)),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    id: WalkId,
    origin: EdgeId,
    replica: u32,
    origin_stamp: u64,
    halves: [HalfWalk; 2],
}

impl Walk {
    pub fn id(&self) -> WalkId {
        self.id
    }

    pub fn origin(&self) -> EdgeId {
        self.origin
    }

    pub fn replica(&self) -> u32 {
        self.replica
    }

    pub fn half(&self, side: Side) -> &HalfWalk {
        &self.halves[side.idx()]
    }

    /// Edge count of the combined walk, origin edge included.
    pub fn combined_len(&self) -> usize {
        self.halves[0].steps() + self.halves[1].steps() + 1
    }

    /// `(t1, t2)` when both halves ended on terminals.
    pub fn terminals(&self) -> Option<(VertexId, VertexId)> {
        terminal_pair(self.halves[0].status, self.halves[1].status)
    }

    /// Vertex sequence `t1 … u, v … t2`.
    pub fn vertex_sequence(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self.halves[0].vertices.iter().rev().copied().collect();
        out.extend_from_slice(&self.halves[1].vertices);
        out
    }

    /// Edge sequence aligned with [`Walk::vertex_sequence`].
    pub fn edge_sequence(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.halves[0].edges.iter().rev().copied().collect();
        out.push(self.origin);
        out.extend_from_slice(&self.halves[1].edges);
        out
    }
}

/// Runs one half walk from `start` until it stands on a terminal or has
/// taken `cap` steps.
pub fn simulate_half<R: Rng + ?Sized>(
    g: &DynamicMultigraph,
    t: &TerminalSet,
    start: VertexId,
    cap: usize,
    rng: &mut R,
) -> HalfDraft {
    let mut draft = HalfDraft {
        vertices: vec![start],
        edges: Vec::new(),
        status: EndStatus::CappedAt(start),
    };
    extend_half(g, t, &mut draft.vertices, &mut draft.edges, cap, None, rng);
    draft.status = end_status(t, &draft.vertices, cap);
    draft
}

/// Both halves of the combined walk for `origin`.
pub fn simulate_walk<R: Rng + ?Sized>(
    g: &DynamicMultigraph,
    t: &TerminalSet,
    origin: EdgeId,
    replica: u32,
    cap: usize,
    rng: &mut R,
) -> Result<WalkDraft, GraphError> {
    let (u, v) = g.endpoints(origin).ok_or(GraphError::UnknownEdge(origin))?;
    let hu = simulate_half(g, t, u, cap, rng);
    let hv = simulate_half(g, t, v, cap, rng);
    Ok(WalkDraft {
        origin,
        replica,
        halves: [hu, hv],
    })
}

/// Appends steps to a half. Returns the number of steps added.
fn extend_half<R: Rng + ?Sized>(
    g: &DynamicMultigraph,
    t: &TerminalSet,
    vertices: &mut Vec<VertexId>,
    edges: &mut Vec<EdgeId>,
    cap: usize,
    mut forced: Option<(EdgeId, VertexId)>,
    rng: &mut R,
) -> usize {
    let before = edges.len();
    loop {
        let x = *vertices.last().expect("half walks are never empty");
        if edges.len() >= cap {
            break;
        }
        let step = match forced.take() {
            Some(s) => s,
            None => {
                if t.contains(x) {
                    break;
                }
                match g.sample_incident(x, rng) {
                    Ok(s) => s,
                    Err(_) => break,
                }
            }
        };
        edges.push(step.0);
        vertices.push(step.1);
    }
    edges.len() - before
}

fn end_status(t: &TerminalSet, vertices: &[VertexId], _cap: usize) -> EndStatus {
    let last = *vertices.last().expect("half walks are never empty");
    if t.contains(last) {
        EndStatus::ReachedTerminal(last)
    } else {
        EndStatus::CappedAt(last)
    }
}

/// Snapshot of per-vertex and per-edge occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LoadCounts {
    pub vertex: Vec<usize>,
    pub edge: Vec<usize>,
}

/// The walk collection `W` with reverse indexes.
#[derive(Debug, Clone)]
pub struct WalkStore {
    walks: Vec<Option<Walk>>,
    live: usize,
    vertex_roots: Vec<Root>,
    edge_roots: Vec<Root>,
    forest: Forest<OccKey, Occurrence>,
    clock: u64,
    step_cap: usize,
    generated_steps: u64,
    truncated_steps: u64,
}

impl WalkStore {
    pub fn new(n: usize, step_cap: usize) -> Self {
        assert!(step_cap >= 1, "step cap must be positive");
        Self {
            walks: Vec::new(),
            live: 0,
            vertex_roots: vec![Root::default(); n],
            edge_roots: Vec::new(),
            forest: Forest::new(),
            clock: 0,
            step_cap,
            generated_steps: 0,
            truncated_steps: 0,
        }
    }

    pub fn step_cap(&self) -> usize {
        self.step_cap
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// Current clock value. Every stamp handed out later is at least this.
    pub fn clock(&self) -> u64 {
        self.clock
    }

    pub fn generated_steps(&self) -> u64 {
        self.generated_steps
    }

    /// Steps removed by truncation, regeneration or walk deletion.
    pub fn truncated_steps(&self) -> u64 {
        self.truncated_steps
    }

    pub fn get(&self, w: WalkId) -> Option<&Walk> {
        self.walks.get(w.index()).and_then(|x| x.as_ref())
    }

    pub fn walks(&self) -> impl Iterator<Item = &Walk> {
        self.walks.iter().filter_map(|w| w.as_ref())
    }

    fn walk_mut(&mut self, w: WalkId) -> Result<&mut Walk, WalkStoreError> {
        self.walks
            .get_mut(w.index())
            .and_then(|x| x.as_mut())
            .ok_or(WalkStoreError::UnknownWalk(w))
    }

    fn tick(&mut self) -> u64 {
        let s = self.clock;
        self.clock += 1;
        s
    }

    fn edge_root(&mut self, e: EdgeId) -> &mut Root {
        if e.index() >= self.edge_roots.len() {
            self.edge_roots.resize(e.index() + 1, Root::default());
        }
        &mut self.edge_roots[e.index()]
    }

    fn index_vertex(&mut self, x: VertexId, key: OccKey, occ: Occurrence) {
        let root = &mut self.vertex_roots[x.index()];
        self.forest.insert(root, key, occ);
    }

    fn unindex_vertex(&mut self, x: VertexId, key: OccKey) {
        let root = &mut self.vertex_roots[x.index()];
        let gone = self.forest.remove(root, &key);
        debug_assert!(gone.is_some(), "missing vertex occurrence");
    }

    fn index_edge(&mut self, e: EdgeId, key: OccKey, occ: Occurrence) {
        if e.index() >= self.edge_roots.len() {
            self.edge_roots.resize(e.index() + 1, Root::default());
        }
        let root = &mut self.edge_roots[e.index()];
        self.forest.insert(root, key, occ);
    }

    fn unindex_edge(&mut self, e: EdgeId, key: OccKey) {
        let root = self.edge_root(e);
        let mut r = *root;
        let gone = self.forest.remove(&mut r, &key);
        self.edge_roots[e.index()] = r;
        debug_assert!(gone.is_some(), "missing edge occurrence");
    }

    /// Stamps and indexes a freshly simulated walk.
    pub fn record_walk(&mut self, draft: WalkDraft) -> WalkId {
        let id = WalkId(self.walks.len() as u32);
        let origin_stamp = self.tick();
        let mut halves = Vec::with_capacity(2);
        for half in draft.halves {
            let stamp = self.tick();
            self.generated_steps += half.steps() as u64;
            halves.push(HalfWalk {
                stamps: vec![stamp; half.vertices.len()],
                vertices: half.vertices,
                edges: half.edges,
                status: half.status,
            });
        }
        let hv = halves.pop().unwrap();
        let hu = halves.pop().unwrap();
        let walk = Walk {
            id,
            origin: draft.origin,
            replica: draft.replica,
            origin_stamp,
            halves: [hu, hv],
        };
        self.index_edge(
            walk.origin,
            OccKey {
                stamp: origin_stamp,
                pos: 0,
            },
            Occurrence {
                walk: id,
                place: Place::Origin,
            },
        );
        for side in Side::BOTH {
            self.index_half_range(&walk, side, 0);
        }
        self.walks.push(Some(walk));
        self.live += 1;
        id
    }

    /// Indexes vertex positions `from..` and steps `from..` of one half.
    fn index_half_range(&mut self, walk: &Walk, side: Side, from: usize) {
        let half = &walk.halves[side.idx()];
        for pos in from..half.vertices.len() {
            let occ = Occurrence {
                walk: walk.id,
                place: Place::Half {
                    side,
                    pos: pos as u32,
                },
            };
            self.index_vertex(half.vertices[pos], half.vertex_key(pos), occ);
            if pos < half.edges.len() {
                self.index_edge(half.edges[pos], half.step_key(pos), occ);
            }
        }
    }

    /// Removes vertex positions `> keep` and steps `>= keep` of one half
    /// from the indexes and from the walk. Returns the number of steps cut.
    fn cut_half(&mut self, w: WalkId, side: Side, keep: usize) -> usize {
        let walk = self.walks[w.index()].take().expect("walk is live");
        let half = &walk.halves[side.idx()];
        let mut cut = 0;
        for pos in keep..half.vertices.len() {
            if pos > keep {
                self.unindex_vertex(half.vertices[pos], half.vertex_key(pos));
            }
            if pos < half.edges.len() {
                self.unindex_edge(half.edges[pos], half.step_key(pos));
                cut += 1;
            }
        }
        let mut walk = walk;
        let half = &mut walk.halves[side.idx()];
        half.vertices.truncate(keep + 1);
        half.stamps.truncate(keep + 1);
        half.edges.truncate(keep);
        self.walks[w.index()] = Some(walk);
        self.truncated_steps += cut as u64;
        cut
    }

    /// Deletes a walk and all of its occurrences.
    pub fn remove_walk(&mut self, w: WalkId) -> Result<Walk, WalkStoreError> {
        let walk = self
            .walks
            .get_mut(w.index())
            .and_then(|x| x.take())
            .ok_or(WalkStoreError::UnknownWalk(w))?;
        self.unindex_edge(
            walk.origin,
            OccKey {
                stamp: walk.origin_stamp,
                pos: 0,
            },
        );
        for half in &walk.halves {
            for pos in 0..half.vertices.len() {
                self.unindex_vertex(half.vertices[pos], half.vertex_key(pos));
                if pos < half.edges.len() {
                    self.unindex_edge(half.edges[pos], half.step_key(pos));
                }
            }
            self.truncated_steps += half.steps() as u64;
        }
        self.live -= 1;
        Ok(walk)
    }

    pub fn vertex_load(&self, u: VertexId) -> usize {
        self.forest.len(self.vertex_roots[u.index()])
    }

    pub fn edge_load(&self, e: EdgeId) -> usize {
        self.edge_roots
            .get(e.index())
            .map_or(0, |&r| self.forest.len(r))
    }

    /// Occurrences at `u` in generation order.
    pub fn walks_through_vertex(&self, u: VertexId) -> impl Iterator<Item = Occurrence> + '_ {
        self.forest.iter(self.vertex_roots[u.index()]).map(|e| e.1)
    }

    /// Occurrences on `e` (origin included) in generation order.
    pub fn walks_through_edge(&self, e: EdgeId) -> impl Iterator<Item = Occurrence> + '_ {
        let root = self.edge_roots.get(e.index()).copied().unwrap_or_default();
        self.forest.iter(root).map(|e| e.1)
    }

    /// The `i`-th occurrence at `u` in generation order, 1-based.
    pub fn select_occurrence(&self, u: VertexId, i: usize) -> Result<Occurrence, WalkStoreError> {
        let count = self.vertex_load(u);
        if i == 0 || i > count {
            return Err(WalkStoreError::RankOutOfRange { rank: i, count });
        }
        Ok(self.forest.select(self.vertex_roots[u.index()], i - 1).unwrap().1)
    }

    /// Number of occurrences at `u` generated before clock value `stamp`.
    pub fn occurrences_before(&self, u: VertexId, stamp: u64) -> usize {
        self.forest
            .rank(self.vertex_roots[u.index()], &OccKey { stamp, pos: 0 })
    }

    /// The occurrence at `u` with exactly `rank` earlier ones (0-based).
    pub fn occurrence_at_rank(&self, u: VertexId, rank: usize) -> Option<Occurrence> {
        self.forest
            .select(self.vertex_roots[u.index()], rank)
            .map(|e| e.1)
    }

    /// Shortens every half of `w` that visits `u` to its first visit and
    /// marks that end as having reached a terminal. Returns the number of
    /// steps removed.
    pub fn truncate_at_first(&mut self, w: WalkId, u: VertexId) -> Result<usize, WalkStoreError> {
        let walk = self.get(w).ok_or(WalkStoreError::UnknownWalk(w))?;
        let firsts: Vec<(Side, usize)> = Side::BOTH
            .iter()
            .filter_map(|&side| {
                walk.halves[side.idx()]
                    .vertices
                    .iter()
                    .position(|&x| x == u)
                    .map(|p| (side, p))
            })
            .collect();
        if firsts.is_empty() {
            return Err(WalkStoreError::VertexNotOnWalk(u, w));
        }
        let mut removed = 0;
        for (side, pos) in firsts {
            removed += self.cut_half(w, side, pos);
            self.walk_mut(w)?.halves[side.idx()].status = EndStatus::ReachedTerminal(u);
        }
        Ok(removed)
    }

    /// Drops the part of one half after position `from` and regrows it as
    /// a fresh random walk in the current graph. With `forced` set, the
    /// first new step takes exactly that edge.
    #[allow(clippy::too_many_arguments)]
    pub fn regenerate_suffix<R: Rng + ?Sized>(
        &mut self,
        w: WalkId,
        side: Side,
        from: usize,
        forced: Option<EdgeId>,
        g: &DynamicMultigraph,
        t: &TerminalSet,
        rng: &mut R,
    ) -> Result<(), WalkStoreError> {
        let walk = self.get(w).ok_or(WalkStoreError::UnknownWalk(w))?;
        let half = &walk.halves[side.idx()];
        if from >= half.vertices.len() {
            return Err(WalkStoreError::InvalidPosition { walk: w, pos: from });
        }
        let x = half.vertices[from];
        let forced = match forced {
            None => None,
            Some(e) => {
                if from >= self.step_cap {
                    return Err(WalkStoreError::InvalidPosition { walk: w, pos: from });
                }
                let (a, b) = g.endpoints(e).ok_or(GraphError::UnknownEdge(e))?;
                let other = if a == x {
                    b
                } else if b == x {
                    a
                } else {
                    return Err(WalkStoreError::ForcedEdgeNotIncident(e));
                };
                Some((e, other))
            }
        };
        self.cut_half(w, side, from);
        let stamp = self.tick();
        let cap = self.step_cap;
        let mut walk = self.walks[w.index()].take().expect("walk is live");
        let added = {
            let half = &mut walk.halves[side.idx()];
            let added = extend_half(g, t, &mut half.vertices, &mut half.edges, cap, forced, rng);
            half.stamps.resize(half.vertices.len(), stamp);
            half.status = end_status(t, &half.vertices, cap);
            added
        };
        self.generated_steps += added as u64;
        self.index_half_range(&walk, side, from + 1);
        // the step leaving `from` is new even though the position is not
        let half = &walk.halves[side.idx()];
        if from < half.edges.len() {
            let occ = Occurrence {
                walk: w,
                place: Place::Half {
                    side,
                    pos: from as u32,
                },
            };
            self.index_edge(half.edges[from], half.step_key(from), occ);
        }
        self.walks[w.index()] = Some(walk);
        Ok(())
    }

    /// Brute-force occurrence counts from the walks themselves.
    pub fn rescan_counts(&self, n: usize, edge_bound: usize) -> LoadCounts {
        let mut c = LoadCounts {
            vertex: vec![0; n],
            edge: vec![0; edge_bound],
        };
        for walk in self.walks() {
            c.edge[walk.origin.index()] += 1;
            for half in &walk.halves {
                for x in &half.vertices {
                    c.vertex[x.index()] += 1;
                }
                for e in &half.edges {
                    c.edge[e.index()] += 1;
                }
            }
        }
        c
    }

    /// Counts read off the indexes.
    pub fn index_counts(&self, n: usize, edge_bound: usize) -> LoadCounts {
        LoadCounts {
            vertex: (0..n).map(|x| self.vertex_load(VertexId::from(x))).collect(),
            edge: (0..edge_bound)
                .map(|e| self.edge_load(EdgeId(e as u32)))
                .collect(),
        }
    }

    /// Full audit: every index entry points at a matching live position,
    /// every position is indexed, and generation order is respected.
    pub fn check_integrity(&self, n: usize, edge_bound: usize) -> Result<(), String> {
        let rescan = self.rescan_counts(n, edge_bound);
        let indexed = self.index_counts(n, edge_bound);
        if rescan != indexed {
            return Err("index counts differ from rescan".into());
        }
        for x in 0..n {
            let x = VertexId::from(x);
            let mut prev: Option<OccKey> = None;
            for (key, occ) in self.forest.iter(self.vertex_roots[x.index()]) {
                let walk = self
                    .get(occ.walk)
                    .ok_or_else(|| format!("vertex {x} indexes dead walk {}", occ.walk))?;
                let Place::Half { side, pos } = occ.place else {
                    return Err(format!("origin occurrence in vertex index of {x}"));
                };
                let half = walk.half(side);
                let pos = pos as usize;
                if half.vertices.get(pos) != Some(&x) || half.vertex_key(pos) != key {
                    return Err(format!("stale vertex occurrence {occ:?} at {x}"));
                }
                if prev.is_some_and(|p| p >= key) {
                    return Err(format!("vertex index of {x} out of order"));
                }
                prev = Some(key);
            }
        }
        for (e, &root) in self.edge_roots.iter().enumerate() {
            for (key, occ) in self.forest.iter(root) {
                let walk = self
                    .get(occ.walk)
                    .ok_or_else(|| format!("edge {e} indexes dead walk {}", occ.walk))?;
                let ok = match occ.place {
                    Place::Origin => walk.origin.index() == e && walk.origin_stamp == key.stamp,
                    Place::Half { side, pos } => {
                        let half = walk.half(side);
                        let pos = pos as usize;
                        half.edges.get(pos).map(|x| x.index()) == Some(e)
                            && half.step_key(pos) == key
                    }
                };
                if !ok {
                    return Err(format!("stale edge occurrence {occ:?} on e{e}"));
                }
            }
        }
        if self.truncated_steps > self.generated_steps {
            return Err("truncated more steps than generated".into());
        }
        Ok(())
    }

    /// One line per walk:
    /// `walkid origin_edge replica status1 status2 : v0 e0 v1 e1 ... vk`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for walk in self.walks() {
            let vs = walk.vertex_sequence();
            let es = walk.edge_sequence();
            let _ = write!(
                out,
                "{} {} {} {} {} :",
                walk.id.0,
                walk.origin.0,
                walk.replica,
                walk.halves[0].status,
                walk.halves[1].status
            );
            for (i, v) in vs.iter().enumerate() {
                let _ = write!(out, " {}", v.0);
                if let Some(e) = es.get(i) {
                    let _ = write!(out, " {}", e.0);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Position of a walk after `steps` steps from `start`, ignoring
/// terminals and caps.
pub fn position_after<R: Rng + ?Sized>(
    g: &DynamicMultigraph,
    start: VertexId,
    steps: usize,
    rng: &mut R,
) -> Result<VertexId, GraphError> {
    let mut x = start;
    for _ in 0..steps {
        x = g.sample_incident(x, rng)?.1;
    }
    Ok(x)
}
