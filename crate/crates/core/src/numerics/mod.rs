//! Laplacian assembly, linear solves and effective resistances over
//! weighted multigraphs.
//!
//! Effective resistance between `s` and `t` is `χᵀ L† χ` with
//! `χ = 1_s − 1_t`. We compute it with a single grounded solve
//! `L x = χ` restricted to the connected component holding `s` and `t`.
//! Small components are factorized densely; larger ones go through
//! Jacobi-preconditioned conjugate gradients.

mod cg;
pub mod dense;
mod pinv;
mod sparsify;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::VertexId;
use crate::unionfind::UnionFind;

pub use pinv::{pinv_dense, pinv_dense_with_cap, resistance_from_pinv, DEFAULT_DENSE_CAP};
pub use sparsify::{sparsify_by_leverage, sparsify_by_leverage_with, SPARSIFY_OVERSAMPLE};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("edge ({u}, {v}) has non-positive or non-finite weight {weight}")]
    NonPositiveWeight { u: usize, v: usize, weight: f64 },
    #[error("vertices {s} and {t} are in different components")]
    Disconnected { s: VertexId, t: VertexId },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),
    #[error("{n} vertices exceed the dense cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("dense factorization failed: matrix is not positive definite")]
    NotPositiveDefinite,
}

/// A weighted multigraph as a list of `(u, v, weight)` triples.
///
/// Parallel triples are allowed and summed on assembly. Triples with
/// `u == v` contribute nothing to a Laplacian and are skipped there.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedGraphView {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraphView {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
        }
    }

    pub fn push(&mut self, u: usize, v: usize, w: f64) {
        self.edges.push((u, v, w));
    }

    /// Unit-weight view of an unweighted multigraph.
    pub fn from_graph(g: &crate::graph::DynamicMultigraph) -> Self {
        Self {
            n: g.vertex_count(),
            edges: g
                .edges()
                .map(|(_, u, v)| (u.index(), v.index(), 1.0))
                .collect(),
        }
    }

    /// Merges parallel triples and drops self-loops. Pairs come out with
    /// `u < v`, sorted.
    pub fn aggregated(&self) -> WeightedGraphView {
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(u, v, w) in &self.edges {
            if u == v {
                continue;
            }
            *acc.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        WeightedGraphView {
            n: self.n,
            edges: acc.into_iter().map(|((u, v), w)| (u, v, w)).collect(),
        }
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// Quadratic form `xᵀ L x` without assembling `L`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v, w)| {
                let d = x[u] - x[v];
                w * d * d
            })
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    /// Dense factorization below `SolveOptions::dense_below` vertices,
    /// preconditioned CG otherwise.
    Auto,
    Iterative,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Relative residual target for CG, in `(0, 1)`.
    pub tolerance: f64,
    /// Zero means `10 · n`.
    pub max_iterations: usize,
    pub kind: SolverKind,
    pub dense_below: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 0,
            kind: SolverKind::Auto,
            dense_below: 300,
        }
    }
}

impl SolveOptions {
    fn use_dense(&self, component_size: usize) -> bool {
        match self.kind {
            SolverKind::Dense => true,
            SolverKind::Iterative => false,
            SolverKind::Auto => component_size < self.dense_below,
        }
    }
}

/// Assembled Laplacian in compressed rows, plus connected components.
#[derive(Debug, Clone)]
pub struct LaplacianSystem {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
    diag: Vec<f64>,
    labels: Vec<usize>,
    members: Vec<Vec<usize>>,
}

/// Assembles `L = D − A` from a weighted view.
pub fn assemble(view: &WeightedGraphView) -> Result<LaplacianSystem, NumericsError> {
    for &(u, v, w) in &view.edges {
        if !(w > 0.0 && w.is_finite()) {
            return Err(NumericsError::NonPositiveWeight { u, v, weight: w });
        }
        for x in [u, v] {
            if x >= view.n {
                return Err(NumericsError::VertexOutOfRange(VertexId::from(x)));
            }
        }
    }
    let agg = view.aggregated();
    let n = view.n;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let mut uf = UnionFind::new(n);
    for &(u, v, w) in &agg.edges {
        adj[u].push((v, w));
        adj[v].push((u, w));
        uf.union(u, v);
    }
    let mut row_ptr = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(2 * agg.edges.len() + n);
    let mut vals = Vec::with_capacity(2 * agg.edges.len() + n);
    let mut diag = vec![0.0; n];
    row_ptr.push(0);
    for (u, row) in adj.iter_mut().enumerate() {
        row.sort_by_key(|&(v, _)| v);
        let d: f64 = row.iter().map(|&(_, w)| w).sum();
        diag[u] = d;
        let mut placed = false;
        for &(v, w) in row.iter() {
            if !placed && v > u {
                cols.push(u);
                vals.push(d);
                placed = true;
            }
            cols.push(v);
            vals.push(-w);
        }
        if !placed {
            cols.push(u);
            vals.push(d);
        }
        row_ptr.push(cols.len());
    }
    let (labels, k) = uf.labels();
    let mut members = vec![Vec::new(); k];
    for (x, &l) in labels.iter().enumerate() {
        members[l].push(x);
    }
    Ok(LaplacianSystem {
        n,
        row_ptr,
        cols,
        vals,
        diag,
        labels,
        members,
    })
}

impl LaplacianSystem {
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn entry(&self, u: usize, v: usize) -> f64 {
        self.row(u)
            .find(|&(c, _)| c == v)
            .map(|(_, x)| x)
            .unwrap_or(0.0)
    }

    /// `(column, value)` pairs of row `u`, diagonal included.
    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[u]..self.row_ptr[u + 1];
        self.cols[r.clone()]
            .iter()
            .copied()
            .zip(self.vals[r].iter().copied())
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn component_of(&self, u: usize) -> usize {
        self.labels[u]
    }

    pub fn component_count(&self) -> usize {
        self.members.len()
    }

    pub fn connected(&self, s: usize, t: usize) -> bool {
        self.labels[s] == self.labels[t]
    }

    /// `y = L x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, out) in y.iter_mut().enumerate() {
            *out = self.row(u).map(|(c, a)| a * x[c]).sum();
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n * self.n];
        for u in 0..self.n {
            for (c, a) in self.row(u) {
                m[u * self.n + c] = a;
            }
        }
        m
    }

    fn check_vertex(&self, x: VertexId) -> Result<(), NumericsError> {
        if x.index() < self.n {
            Ok(())
        } else {
            Err(NumericsError::VertexOutOfRange(x))
        }
    }

    /// Effective resistances for a batch of pairs. Components that need a
    /// dense factorization are factorized once and reused across the batch.
    pub fn resistances(
        &self,
        pairs: &[(VertexId, VertexId)],
        opts: &SolveOptions,
    ) -> Result<Vec<f64>, NumericsError> {
        let mut factors: BTreeMap<usize, GroundedComponent> = BTreeMap::new();
        let mut out = Vec::with_capacity(pairs.len());
        for &(s, t) in pairs {
            self.check_vertex(s)?;
            self.check_vertex(t)?;
            if s == t {
                out.push(0.0);
                continue;
            }
            if !self.connected(s.index(), t.index()) {
                return Err(NumericsError::Disconnected { s, t });
            }
            let c = self.labels[s.index()];
            if !factors.contains_key(&c) {
                factors.insert(c, GroundedComponent::new(self, c, opts)?);
            }
            out.push(factors[&c].resistance(self, s.index(), t.index(), opts)?);
        }
        Ok(out)
    }
}

/// A component with its first member grounded, optionally factorized.
struct GroundedComponent {
    /// Global vertex ids; index 0 is the ground.
    members: Vec<usize>,
    local: Vec<usize>,
    chol: Option<dense::Cholesky>,
}

const NOT_LOCAL: usize = usize::MAX;

impl GroundedComponent {
    fn new(sys: &LaplacianSystem, c: usize, opts: &SolveOptions) -> Result<Self, NumericsError> {
        let members = sys.members[c].clone();
        let mut local = vec![NOT_LOCAL; sys.n];
        for (i, &x) in members.iter().enumerate() {
            local[x] = i;
        }
        let k = members.len() - 1;
        let chol = if opts.use_dense(members.len()) {
            let mut a = vec![0.0; k * k];
            for (i, &x) in members.iter().enumerate().skip(1) {
                for (col, val) in sys.row(x) {
                    let j = local[col];
                    if j > 0 {
                        a[(i - 1) * k + (j - 1)] = val;
                    }
                }
            }
            Some(dense::Cholesky::factor(a, k)?)
        } else {
            None
        };
        Ok(Self {
            members,
            local,
            chol,
        })
    }

    fn resistance(
        &self,
        sys: &LaplacianSystem,
        s: usize,
        t: usize,
        opts: &SolveOptions,
    ) -> Result<f64, NumericsError> {
        let k = self.members.len() - 1;
        let mut rhs = vec![0.0; k];
        let (ls, lt) = (self.local[s], self.local[t]);
        if ls > 0 {
            rhs[ls - 1] += 1.0;
        }
        if lt > 0 {
            rhs[lt - 1] -= 1.0;
        }
        let x = match &self.chol {
            Some(chol) => {
                chol.solve_in_place(&mut rhs);
                rhs
            }
            None => cg::solve_grounded(sys, &self.members, &self.local, &rhs, opts)?,
        };
        let xs = if ls > 0 { x[ls - 1] } else { 0.0 };
        let xt = if lt > 0 { x[lt - 1] } else { 0.0 };
        Ok(xs - xt)
    }
}

/// `χ(s,t)ᵀ L† χ(s,t)`; zero when `s == t`.
pub fn effective_resistance(
    sys: &LaplacianSystem,
    s: VertexId,
    t: VertexId,
    opts: &SolveOptions,
) -> Result<f64, NumericsError> {
    Ok(sys.resistances(&[(s, t)], opts)?[0])
}
