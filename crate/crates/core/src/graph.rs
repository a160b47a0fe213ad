//! Dynamic unweighted undirected multigraph.

use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Dense vertex index in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Edge identifier, assigned monotonically and never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(v as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0} rejected")]
    SelfLoopRejected(VertexId),
    #[error("vertex {0} out of range")]
    UnknownVertex(VertexId),
    #[error("edge {0} is not live")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(VertexId),
}

#[derive(Debug, Clone, Copy)]
struct EdgeRecord {
    ends: [VertexId; 2],
    /// Position of this edge inside each endpoint's incidence list.
    slots: [usize; 2],
}

/// Multigraph on a fixed vertex set with stable edge ids.
///
/// Incidence lists use swap-remove, so their order is unspecified.
#[derive(Debug, Clone)]
pub struct DynamicMultigraph {
    edges: Vec<Option<EdgeRecord>>,
    incidence: Vec<Vec<(EdgeId, VertexId)>>,
    live: usize,
}

impl DynamicMultigraph {
    pub fn new(n: usize) -> Self {
        Self {
            edges: Vec::new(),
            incidence: vec![Vec::new(); n],
            live: 0,
        }
    }

    /// Builds a graph from an endpoint list; edge ids follow list order.
    pub fn from_edges(n: usize, pairs: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Self::new(n);
        for &(u, v) in pairs {
            g.insert_edge(VertexId::from(u), VertexId::from(v))?;
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.incidence.len()
    }

    pub fn edge_count(&self) -> usize {
        self.live
    }

    /// One past the largest edge id ever handed out.
    pub fn edge_id_bound(&self) -> usize {
        self.edges.len()
    }

    pub fn degree(&self, u: VertexId) -> usize {
        self.incidence[u.index()].len()
    }

    pub fn contains_vertex(&self, u: VertexId) -> bool {
        u.index() < self.incidence.len()
    }

    pub fn is_live(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(e.index()), Some(Some(_)))
    }

    pub fn endpoints(&self, e: EdgeId) -> Option<(VertexId, VertexId)> {
        self.edges
            .get(e.index())
            .and_then(|r| r.as_ref())
            .map(|r| (r.ends[0], r.ends[1]))
    }

    /// Incident `(edge, neighbor)` entries of `u`, in unspecified order.
    pub fn incident(&self, u: VertexId) -> &[(EdgeId, VertexId)] {
        &self.incidence[u.index()]
    }

    /// Live edges in increasing id order.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges.iter().enumerate().filter_map(|(i, r)| {
            r.as_ref()
                .map(|r| (EdgeId(i as u32), r.ends[0], r.ends[1]))
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.incidence.len() as u32).map(VertexId)
    }

    pub fn insert_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        for x in [u, v] {
            if !self.contains_vertex(x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        if u == v {
            return Err(GraphError::SelfLoopRejected(u));
        }
        let id = EdgeId(self.edges.len() as u32);
        let su = self.incidence[u.index()].len();
        self.incidence[u.index()].push((id, v));
        let sv = self.incidence[v.index()].len();
        self.incidence[v.index()].push((id, u));
        self.edges.push(Some(EdgeRecord {
            ends: [u, v],
            slots: [su, sv],
        }));
        self.live += 1;
        Ok(id)
    }

    pub fn delete_edge(&mut self, e: EdgeId) -> Result<(VertexId, VertexId), GraphError> {
        let rec = self
            .edges
            .get_mut(e.index())
            .and_then(|r| r.take())
            .ok_or(GraphError::UnknownEdge(e))?;
        for side in 0..2 {
            let x = rec.ends[side];
            let slot = rec.slots[side];
            let list = &mut self.incidence[x.index()];
            list.swap_remove(slot);
            if let Some(&(moved, _)) = list.get(slot) {
                // Patch the back-index of whichever entry was swapped in.
                let m = self.edges[moved.index()]
                    .as_mut()
                    .expect("incidence entry refers to a live edge");
                if m.ends[0] == x {
                    m.slots[0] = slot;
                } else {
                    m.slots[1] = slot;
                }
            }
        }
        self.live -= 1;
        Ok((rec.ends[0], rec.ends[1]))
    }

    /// Uniformly random incident entry of `u`: each of the `deg(u)` entries
    /// with probability exactly `1/deg(u)`.
    pub fn sample_incident<R: Rng + ?Sized>(
        &self,
        u: VertexId,
        rng: &mut R,
    ) -> Result<(EdgeId, VertexId), GraphError> {
        let list = &self.incidence[u.index()];
        if list.is_empty() {
            return Err(GraphError::IsolatedVertex(u));
        }
        Ok(list[rng.gen_range(0..list.len())])
    }

    /// Full rescan of the incidence structure. Used by tests.
    pub fn check_consistency(&self) -> Result<(), String> {
        let mut degree_sum = 0;
        for (x, list) in self.incidence.iter().enumerate() {
            degree_sum += list.len();
            for (slot, &(e, other)) in list.iter().enumerate() {
                let rec = self.edges[e.index()]
                    .as_ref()
                    .ok_or_else(|| format!("dead edge {e} in incidence of {x}"))?;
                let side = if rec.ends[0].index() == x && rec.slots[0] == slot {
                    0
                } else if rec.ends[1].index() == x && rec.slots[1] == slot {
                    1
                } else {
                    return Err(format!("bad back-index for {e} at vertex {x}"));
                };
                if rec.ends[1 - side] != other {
                    return Err(format!("wrong neighbor for {e} at vertex {x}"));
                }
            }
        }
        if degree_sum != 2 * self.live {
            return Err(format!("degree sum {degree_sum} != 2m = {}", 2 * self.live));
        }
        let live = self.edges.iter().filter(|r| r.is_some()).count();
        if live != self.live {
            return Err(format!("live count {} != records {live}", self.live));
        }
        Ok(())
    }
}
