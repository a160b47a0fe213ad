//! Static Schur complement constructions.
//!
//! Three ways of looking at `SC(G, T) = L_TT − L_TF L_FF⁻¹ L_FT`:
//!
//! - [`exact_schur`] eliminates the non-terminals algebraically.
//! - [`sample_schur_sketch`] draws `ρ` combined random walks per edge and
//!   turns each terminal-to-terminal walk of length `ℓ` into an edge of
//!   weight `1/(ρℓ)`. Its expectation is the exact complement (up to
//!   the step cap).
//! - [`enumerate_terminal_free_walks`] sums, over every walk whose
//!   endpoints are terminals and whose interior avoids `T`, the product of
//!   `1/deg` over interior vertices. This series converges to the exact
//!   complement as the length bound grows.

use rand::Rng;
use thiserror::Error;

use crate::graph::{DynamicMultigraph, VertexId};
use crate::numerics::dense::Cholesky;
use crate::numerics::{NumericsError, WeightedGraphView, DEFAULT_DENSE_CAP};
use crate::sketch::{HEdge, SchurSketch};
use crate::unionfind::UnionFind;
use crate::walks::{simulate_walk, WalkId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchurError {
    #[error("instance too large: {what} = {value} exceeds {cap}")]
    TooLarge {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Membership bitset plus insertion-ordered member list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TerminalSet {
    member: Vec<bool>,
    order: Vec<VertexId>,
}

impl TerminalSet {
    pub fn new(n: usize) -> Self {
        Self {
            member: vec![false; n],
            order: Vec::new(),
        }
    }

    pub fn from_vertices(n: usize, vs: impl IntoIterator<Item = VertexId>) -> Self {
        let mut t = Self::new(n);
        for v in vs {
            t.insert(v);
        }
        t
    }

    pub fn all(n: usize) -> Self {
        Self::from_vertices(n, (0..n).map(VertexId::from))
    }

    /// Returns `true` if `v` was not already a member.
    pub fn insert(&mut self, v: VertexId) -> bool {
        let slot = &mut self.member[v.index()];
        if *slot {
            return false;
        }
        *slot = true;
        self.order.push(v);
        true
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.member.get(v.index()).copied().unwrap_or(false)
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.member.len()
    }

    /// Members in insertion order.
    pub fn members(&self) -> &[VertexId] {
        &self.order
    }
}

/// Dense Laplacian on terminal coordinates (in `TerminalSet` order).
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSchur {
    n: usize,
    terminals: Vec<VertexId>,
    local: Vec<usize>,
    lap: Vec<f64>,
}

impl ExactSchur {
    fn zeros(n: usize, terminals: &[VertexId]) -> Self {
        let mut local = vec![usize::MAX; n];
        for (i, t) in terminals.iter().enumerate() {
            local[t.index()] = i;
        }
        let k = terminals.len();
        Self {
            n,
            terminals: terminals.to_vec(),
            local,
            lap: vec![0.0; k * k],
        }
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn dim(&self) -> usize {
        self.terminals.len()
    }

    /// Entry by vertex ids; zero when either is not a terminal.
    pub fn entry(&self, a: VertexId, b: VertexId) -> f64 {
        let (i, j) = (self.local[a.index()], self.local[b.index()]);
        if i == usize::MAX || j == usize::MAX {
            return 0.0;
        }
        self.lap[i * self.dim() + j]
    }

    /// Entry by terminal positions.
    pub fn local_entry(&self, i: usize, j: usize) -> f64 {
        self.lap[i * self.dim() + j]
    }

    fn add_edge_weight(&mut self, a: VertexId, b: VertexId, w: f64) {
        let k = self.dim();
        let (i, j) = (self.local[a.index()], self.local[b.index()]);
        self.lap[i * k + j] -= w;
        self.lap[j * k + i] -= w;
        self.lap[i * k + i] += w;
        self.lap[j * k + j] += w;
    }

    /// The complement as a weighted graph on the original vertex ids.
    /// Off-diagonal entries of magnitude below `1e-14` are dropped.
    pub fn to_view(&self) -> WeightedGraphView {
        let k = self.dim();
        let mut view = WeightedGraphView::new(self.n);
        for i in 0..k {
            for j in i + 1..k {
                let w = -self.lap[i * k + j];
                if w > 1e-14 {
                    view.push(self.terminals[i].index(), self.terminals[j].index(), w);
                }
            }
        }
        view
    }

    pub fn max_row_sum(&self) -> f64 {
        let k = self.dim();
        (0..k)
            .map(|i| self.lap[i * k..(i + 1) * k].iter().sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

/// Dense Laplacian of `g` over all vertices, unit weight per edge.
fn dense_laplacian(g: &DynamicMultigraph) -> Vec<f64> {
    let n = g.vertex_count();
    let mut l = vec![0.0; n * n];
    for (_, u, v) in g.edges() {
        let (u, v) = (u.index(), v.index());
        l[u * n + u] += 1.0;
        l[v * n + v] += 1.0;
        l[u * n + v] -= 1.0;
        l[v * n + u] -= 1.0;
    }
    l
}

/// Algebraic Schur complement of `g` onto `t`.
///
/// Non-terminals are eliminated one connected component of `G[F]` at a
/// time. A component adjacent to some terminal has a nonsingular block;
/// a component touching no terminal is dropped since it couples to
/// nothing in `T`.
pub fn exact_schur(g: &DynamicMultigraph, t: &TerminalSet) -> Result<ExactSchur, SchurError> {
    let n = g.vertex_count();
    if n > DEFAULT_DENSE_CAP {
        return Err(SchurError::TooLarge {
            what: "vertices",
            value: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let l = dense_laplacian(g);
    let mut out = ExactSchur::zeros(n, t.members());
    let k = out.dim();
    for (i, a) in t.members().iter().enumerate() {
        for (j, b) in t.members().iter().enumerate() {
            out.lap[i * k + j] = l[a.index() * n + b.index()];
        }
    }

    let mut uf = UnionFind::new(n);
    for (_, u, v) in g.edges() {
        if !t.contains(u) && !t.contains(v) {
            uf.union(u.index(), v.index());
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for x in 0..n {
        if !t.contains(VertexId::from(x)) {
            comps.entry(uf.find(x)).or_default().push(x);
        }
    }

    for members in comps.values() {
        let c = members.len();
        // coupling rows L_{T,C}; keep only terminals adjacent to C
        let mut coupled: Vec<(usize, Vec<f64>)> = Vec::new();
        for (i, a) in t.members().iter().enumerate() {
            let row: Vec<f64> = members.iter().map(|&x| l[a.index() * n + x]).collect();
            if row.iter().any(|&w| w != 0.0) {
                coupled.push((i, row));
            }
        }
        if coupled.is_empty() {
            continue;
        }
        let mut block = vec![0.0; c * c];
        for (p, &x) in members.iter().enumerate() {
            for (q, &y) in members.iter().enumerate() {
                block[p * c + q] = l[x * n + y];
            }
        }
        let chol = Cholesky::factor(block, c)?;
        let solved: Vec<Vec<f64>> = coupled
            .iter()
            .map(|(_, row)| {
                let mut z = row.clone();
                chol.solve_in_place(&mut z);
                z
            })
            .collect();
        for (p, (i, _)) in coupled.iter().enumerate() {
            for (j, row_j) in &coupled {
                let dot: f64 = solved[p].iter().zip(row_j).map(|(a, b)| a * b).sum();
                out.lap[i * k + j] -= dot;
            }
        }
    }
    Ok(out)
}

/// Random-walk Schur complement sketch.
///
/// For every live edge `(u, v)` and each of `rho` replicas, walks out of
/// `u` and out of `v` until each hits `T` (or takes `step_cap` steps).
/// When both reach terminals `t1`, `t2`, the sketch gains an edge
/// `(t1, t2)` of weight `1/(rho·ℓ)` with `ℓ` the combined edge count,
/// the origin edge included. Walks that hit the cap contribute nothing.
pub fn sample_schur_sketch<R: Rng + ?Sized>(
    g: &DynamicMultigraph,
    t: &TerminalSet,
    rho: usize,
    step_cap: usize,
    rng: &mut R,
) -> StaticSketch {
    assert!(rho >= 1 && step_cap >= 1);
    let mut sketch = SchurSketch::new(g.vertex_count());
    let mut walks = 0u32;
    let mut capped = 0;
    for (e, _, _) in g.edges() {
        for i in 0..rho {
            let draft = simulate_walk(g, t, e, i as u32, step_cap, rng).expect("edge is live");
            match draft.terminals() {
                Some((t1, t2)) => {
                    let weight = 1.0 / (rho as f64 * draft.combined_len() as f64);
                    sketch.set(WalkId(walks), Some(HEdge { t1, t2, weight }));
                }
                None => capped += 1,
            }
            walks += 1;
        }
    }
    StaticSketch {
        sketch,
        walks: walks as usize,
        capped,
    }
}

/// Output of [`sample_schur_sketch`].
#[derive(Debug, Clone)]
pub struct StaticSketch {
    pub sketch: SchurSketch,
    pub walks: usize,
    /// Walks with at least one half that hit the step cap.
    pub capped: usize,
}

pub const ENUMERATION_MAX_VERTICES: usize = 12;
pub const ENUMERATION_MAX_LEN: usize = 32;

/// Partial sum of the terminal-free walk expansion of `SC(G, T)`.
///
/// Sums over walks of length `1 ..= max(max_len, 1)` that start and end in
/// `T` with every interior vertex outside `T`. A walk contributes
/// `∏ 1/deg(interior vertex)` to the edge between its endpoints, and each
/// undirected walk is counted once (from its smaller endpoint). Walks that
/// return to their starting terminal are self-loops and do not affect a
/// Laplacian, so they are skipped.
///
/// Mass is propagated length by length, which sums exactly the same terms
/// as listing the walks one at a time.
pub fn enumerate_terminal_free_walks(
    g: &DynamicMultigraph,
    t: &TerminalSet,
    max_len: usize,
) -> Result<ExactSchur, SchurError> {
    let n = g.vertex_count();
    if n > ENUMERATION_MAX_VERTICES {
        return Err(SchurError::TooLarge {
            what: "vertices",
            value: n,
            cap: ENUMERATION_MAX_VERTICES,
        });
    }
    if max_len > ENUMERATION_MAX_LEN {
        return Err(SchurError::TooLarge {
            what: "max_len",
            value: max_len,
            cap: ENUMERATION_MAX_LEN,
        });
    }
    let bound = max_len.max(1);
    let mut out = ExactSchur::zeros(n, t.members());
    for &a in t.members() {
        let mut mass = vec![0.0; n];
        for &(_, y) in g.incident(a) {
            if t.contains(y) {
                if a < y {
                    out.add_edge_weight(a, y, 1.0);
                }
            } else {
                mass[y.index()] += 1.0;
            }
        }
        for _len in 2..=bound {
            let mut next = vec![0.0; n];
            for x in g.vertices() {
                let m = mass[x.index()];
                if m == 0.0 {
                    continue;
                }
                let share = m / g.degree(x) as f64;
                for &(_, z) in g.incident(x) {
                    if t.contains(z) {
                        if a < z {
                            out.add_edge_weight(a, z, share);
                        }
                    } else {
                        next[z.index()] += share;
                    }
                }
            }
            mass = next;
        }
    }
    Ok(out)
}
