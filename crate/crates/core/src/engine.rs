//! The two-level engine: a dynamic Schur sketch over a sampled terminal
//! set, periodically rebuilt, plus the query path that solves on `H`.

use std::collections::BTreeSet;

use rand::Rng;
use thiserror::Error;

use crate::dynamic::{log2n, DeleteRule, DynamicError, DynamicSc, DynamicScParams, UpdateStats};
use crate::graph::{DynamicMultigraph, EdgeId, GraphError, VertexId};
use crate::numerics::{self, NumericsError, SolveOptions};
use crate::schur::TerminalSet;
use crate::unionfind::UnionFind;
use crate::{stream_from_seed, RandomStream};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminalMode {
    /// Both endpoints of each edge join `T` with probability `β`, and each
    /// insertion flips the same coin. `β` defaults to `m^{-1/5}`.
    EdgeEndpoint,
    /// Each vertex joins `T` with probability `β`, defaulting to
    /// `n^{-1/7}`. Only registered pairs may be queried.
    VertexSample,
    /// A fixed terminal list, kept across rebuilds.
    Explicit(Vec<VertexId>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub eps: f64,
    pub mode: TerminalMode,
    pub beta: Option<f64>,
    pub rho_factor: f64,
    pub cap_factor: f64,
    /// Rebuild after `⌈rebuild_factor · β · m⌉` query-driven terminal
    /// additions.
    pub rebuild_factor: f64,
    pub solve: SolveOptions,
    /// Sparsify `H` by leverage scores before solving once it has more
    /// than `20 · n · log₂ n / ε²` aggregated edges.
    pub resparsify: bool,
    pub delete_rule: DeleteRule,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            eps: 0.25,
            mode: TerminalMode::EdgeEndpoint,
            beta: None,
            rho_factor: 1.0,
            cap_factor: 1.0,
            rebuild_factor: 1.0,
            solve: SolveOptions::default(),
            resparsify: false,
            delete_rule: DeleteRule::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{s} and {t} are disconnected")]
    Disconnected { s: VertexId, t: VertexId },
    #[error("pair ({s}, {t}) was not registered")]
    PairNotRegistered { s: VertexId, t: VertexId },
    #[error("operation requires vertex-sampled terminals")]
    WrongMode,
    #[error("{terminals} terminals exceed the budget of {bound:.1}")]
    TerminalBudgetExceeded { terminals: usize, bound: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dynamic(#[from] DynamicError),
    #[error(transparent)]
    Numerics(NumericsError),
}

/// One answered query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryOutcome {
    pub value: f64,
    pub terminals_added: usize,
    pub h_events: usize,
    /// Whether this query triggered a rebuild (after answering).
    pub rebuilt: bool,
}

#[derive(Debug, Clone)]
pub struct ErEngine {
    sc: DynamicSc,
    config: EngineConfig,
    beta: f64,
    m_at_rebuild: usize,
    additions_since_rebuild: usize,
    rebuilds: usize,
    pinned: BTreeSet<VertexId>,
    registered: BTreeSet<(VertexId, VertexId)>,
    components: UnionFind,
    rng: RandomStream,
}

fn ordered(s: VertexId, t: VertexId) -> (VertexId, VertexId) {
    if s <= t {
        (s, t)
    } else {
        (t, s)
    }
}

fn components_of(g: &DynamicMultigraph) -> UnionFind {
    let mut uf = UnionFind::new(g.vertex_count());
    for (_, u, v) in g.edges() {
        uf.union(u.index(), v.index());
    }
    uf
}

impl ErEngine {
    pub fn new(graph: DynamicMultigraph, config: EngineConfig) -> Result<Self, EngineError> {
        if !(config.eps > 0.0 && config.eps < 1.0) {
            return Err(EngineError::InvalidConfig(format!("eps = {} not in (0, 1)", config.eps)));
        }
        if let Some(b) = config.beta {
            if !(b > 0.0 && b <= 1.0) {
                return Err(EngineError::InvalidConfig(format!("beta = {b} not in (0, 1]")));
            }
        }
        for (name, x) in [
            ("rho factor", config.rho_factor),
            ("cap factor", config.cap_factor),
            ("rebuild factor", config.rebuild_factor),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(EngineError::InvalidConfig(format!("{name} = {x} must be positive")));
            }
        }
        if let TerminalMode::Explicit(list) = &config.mode {
            if let Some(&bad) = list.iter().find(|v| !graph.contains_vertex(**v)) {
                return Err(GraphError::UnknownVertex(bad).into());
            }
        }
        let mut rng = stream_from_seed(config.seed);
        let sc_rng = stream_from_seed(rng.gen());
        let components = components_of(&graph);
        // placeholder epoch; `start_epoch` replaces it immediately
        let n = graph.vertex_count();
        let placeholder = DynamicSc::initialize(
            DynamicMultigraph::new(0),
            TerminalSet::new(0),
            DynamicScParams {
                beta: 1.0,
                rho: 1,
                step_cap: 1,
                insert_terminal_prob: None,
                delete_rule: config.delete_rule,
            },
            stream_from_seed(0),
        );
        let mut engine = Self {
            sc: placeholder,
            config,
            beta: 1.0,
            m_at_rebuild: 0,
            additions_since_rebuild: 0,
            rebuilds: 0,
            pinned: BTreeSet::new(),
            registered: BTreeSet::new(),
            components,
            rng,
        };
        debug_assert_eq!(engine.components.len(), n);
        engine.start_epoch(graph, sc_rng);
        Ok(engine)
    }

    fn epoch_beta(&self, g: &DynamicMultigraph) -> f64 {
        if let Some(b) = self.config.beta {
            return b;
        }
        match self.config.mode {
            TerminalMode::VertexSample => (g.vertex_count().max(1) as f64).powf(-1.0 / 7.0),
            _ => (g.edge_count().max(1) as f64).powf(-1.0 / 5.0),
        }
    }

    fn epoch_params(&self, n: usize) -> DynamicScParams {
        let c = &self.config;
        let vertex_mode = c.mode == TerminalMode::VertexSample;
        DynamicScParams {
            beta: self.beta,
            rho: DynamicScParams::rho_for(n, c.eps / 2.0, c.rho_factor),
            step_cap: if vertex_mode {
                DynamicScParams::vertex_mode_cap(n, self.beta, c.cap_factor)
            } else {
                DynamicScParams::edge_mode_cap(n, self.beta, c.cap_factor)
            },
            insert_terminal_prob: match c.mode {
                TerminalMode::EdgeEndpoint => Some(self.beta),
                _ => None,
            },
            delete_rule: c.delete_rule,
        }
    }

    fn sample_terminals(&mut self, g: &DynamicMultigraph) -> TerminalSet {
        let n = g.vertex_count();
        let mut t = TerminalSet::new(n);
        match &self.config.mode {
            TerminalMode::EdgeEndpoint => {
                for (_, u, v) in g.edges() {
                    if self.rng.gen::<f64>() < self.beta {
                        t.insert(u);
                        t.insert(v);
                    }
                }
            }
            TerminalMode::VertexSample => {
                for u in g.vertices() {
                    if self.rng.gen::<f64>() < self.beta {
                        t.insert(u);
                    }
                }
            }
            TerminalMode::Explicit(list) => {
                for &u in list {
                    t.insert(u);
                }
            }
        }
        for &u in &self.pinned {
            t.insert(u);
        }
        t
    }

    fn start_epoch(&mut self, graph: DynamicMultigraph, sc_rng: RandomStream) {
        self.beta = self.epoch_beta(&graph);
        self.m_at_rebuild = graph.edge_count();
        self.additions_since_rebuild = 0;
        let terminals = self.sample_terminals(&graph);
        let params = self.epoch_params(graph.vertex_count());
        log::debug!(
            "epoch {}: beta = {:.4}, |T| = {}, rho = {}, cap = {}",
            self.rebuilds,
            self.beta,
            terminals.len(),
            params.rho,
            params.step_cap
        );
        self.sc = DynamicSc::initialize(graph, terminals, params, sc_rng);
    }

    /// Re-samples `T` from the current graph and rebuilds the sketch.
    pub fn rebuild(&mut self) {
        let placeholder = DynamicSc::initialize(
            DynamicMultigraph::new(0),
            TerminalSet::new(0),
            *self.sc.params(),
            stream_from_seed(0),
        );
        let (graph, sc_rng) = std::mem::replace(&mut self.sc, placeholder).into_parts();
        self.rebuilds += 1;
        self.start_epoch(graph, sc_rng);
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn graph(&self) -> &DynamicMultigraph {
        self.sc.graph()
    }

    pub fn terminals(&self) -> &TerminalSet {
        self.sc.terminals()
    }

    pub fn dynamic(&self) -> &DynamicSc {
        &self.sc
    }

    /// `β` of the current epoch.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn params(&self) -> &DynamicScParams {
        self.sc.params()
    }

    pub fn rebuilds(&self) -> usize {
        self.rebuilds
    }

    pub fn additions_since_rebuild(&self) -> usize {
        self.additions_since_rebuild
    }

    /// `⌈rebuild_factor · β · m⌉` with `m` taken at the last rebuild.
    pub fn rebuild_threshold(&self) -> usize {
        ((self.config.rebuild_factor * self.beta * self.m_at_rebuild as f64).ceil() as usize).max(1)
    }

    /// High-probability cap on `|T|` in edge mode: `8βm + 8 ln n + 8`.
    pub fn terminal_budget(&self) -> f64 {
        let m = self.m_at_rebuild.max(self.graph().edge_count()) as f64;
        let n = self.graph().vertex_count().max(2) as f64;
        8.0 * self.beta * m + 8.0 * n.ln() + 8.0
    }

    fn check_budget(&self) -> Result<(), EngineError> {
        if self.config.mode != TerminalMode::EdgeEndpoint {
            return Ok(());
        }
        let terminals = self.terminals().len();
        let bound = self.terminal_budget();
        if terminals as f64 > bound {
            return Err(EngineError::TerminalBudgetExceeded { terminals, bound });
        }
        Ok(())
    }

    pub fn insert(&mut self, u: VertexId, v: VertexId) -> Result<(EdgeId, UpdateStats), EngineError> {
        let (e, stats) = self.sc.insert(u, v)?;
        self.components.union(u.index(), v.index());
        self.check_budget()?;
        Ok((e, stats))
    }

    pub fn delete(&mut self, e: EdgeId) -> Result<UpdateStats, EngineError> {
        let stats = self.sc.delete(e)?;
        self.components = components_of(self.graph());
        Ok(stats)
    }

    /// Pins `s` and `t` into `T` for the engine's lifetime.
    pub fn register_pair(&mut self, s: VertexId, t: VertexId) -> Result<(), EngineError> {
        if self.config.mode != TerminalMode::VertexSample {
            return Err(EngineError::WrongMode);
        }
        for x in [s, t] {
            if !self.graph().contains_vertex(x) {
                return Err(GraphError::UnknownVertex(x).into());
            }
        }
        self.registered.insert(ordered(s, t));
        for x in [s, t] {
            self.pinned.insert(x);
            self.sc.add_terminal(x)?;
        }
        Ok(())
    }

    pub fn effective_resistance(&mut self, s: VertexId, t: VertexId) -> Result<f64, EngineError> {
        Ok(self.query(s, t)?.value)
    }

    /// Answers `ER(s, t)`, promoting both endpoints to terminals first.
    pub fn query(&mut self, s: VertexId, t: VertexId) -> Result<QueryOutcome, EngineError> {
        for x in [s, t] {
            if !self.graph().contains_vertex(x) {
                return Err(GraphError::UnknownVertex(x).into());
            }
        }
        let mut out = QueryOutcome {
            value: 0.0,
            terminals_added: 0,
            h_events: 0,
            rebuilt: false,
        };
        if s == t {
            return Ok(out);
        }
        if self.config.mode == TerminalMode::VertexSample && !self.registered.contains(&ordered(s, t)) {
            return Err(EngineError::PairNotRegistered { s, t });
        }
        if !self.components.same(s.index(), t.index()) {
            return Err(EngineError::Disconnected { s, t });
        }
        for x in [s, t] {
            let stats = self.sc.add_terminal(x)?;
            out.terminals_added += stats.terminals_added;
            out.h_events += stats.h_events;
        }
        self.additions_since_rebuild += out.terminals_added;
        out.value = self.solve_on_sketch(s, t)?;
        if self.additions_since_rebuild >= self.rebuild_threshold() {
            self.rebuild();
            out.rebuilt = true;
        }
        self.check_budget()?;
        Ok(out)
    }

    fn solve_on_sketch(&mut self, s: VertexId, t: VertexId) -> Result<f64, EngineError> {
        let eps = self.config.eps;
        let mut view = self.sc.sketch().aggregated_view();
        if self.config.resparsify {
            let n = view.n as f64;
            let threshold = 20.0 * n * log2n(view.n) / (eps * eps);
            if view.edges.len() as f64 > threshold {
                view = numerics::sparsify_by_leverage(&view, eps / 4.0, &mut self.rng)
                    .map_err(EngineError::Numerics)?;
            }
        }
        let sys = numerics::assemble(&view).map_err(EngineError::Numerics)?;
        let mut opts = self.config.solve;
        opts.tolerance = opts.tolerance.min(eps / 4.0);
        numerics::effective_resistance(&sys, s, t, &opts).map_err(|e| match e {
            NumericsError::Disconnected { s, t } => EngineError::Disconnected { s, t },
            other => EngineError::Numerics(other),
        })
    }
}
