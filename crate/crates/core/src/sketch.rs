//! The sketch graph `H`: one weighted edge per walk that reached
//! terminals at both ends, keyed by the walk's id.

use crate::graph::VertexId;
use crate::numerics::WeightedGraphView;
use crate::walks::WalkId;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEdge {
    pub t1: VertexId,
    pub t2: VertexId,
    pub weight: f64,
}

impl HEdge {
    fn same_endpoints(&self, other: &HEdge) -> bool {
        (self.t1, self.t2) == (other.t1, other.t2) || (self.t1, self.t2) == (other.t2, other.t1)
    }
}

/// A mutation of `H`. Handles are walk ids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChangeEvent {
    AddEdge {
        handle: WalkId,
        t1: VertexId,
        t2: VertexId,
        weight: f64,
    },
    RemoveEdge {
        handle: WalkId,
    },
    Reweight {
        handle: WalkId,
        weight: f64,
    },
}

impl ChangeEvent {
    pub fn handle(&self) -> WalkId {
        match *self {
            ChangeEvent::AddEdge { handle, .. }
            | ChangeEvent::RemoveEdge { handle }
            | ChangeEvent::Reweight { handle, .. } => handle,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SchurSketch {
    n: usize,
    edges: Vec<Option<HEdge>>,
    count: usize,
}

impl SchurSketch {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            count: 0,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Number of H-edges, self-loops included.
    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn get(&self, handle: WalkId) -> Option<HEdge> {
        self.edges.get(handle.index()).copied().flatten()
    }

    pub fn iter(&self) -> impl Iterator<Item = (WalkId, HEdge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.map(|e| (WalkId(i as u32), e)))
    }

    /// Sets the edge for `handle` and reports what changed. An endpoint
    /// change is reported as a removal followed by an addition.
    pub fn set(&mut self, handle: WalkId, edge: Option<HEdge>) -> Vec<ChangeEvent> {
        if handle.index() >= self.edges.len() {
            self.edges.resize(handle.index() + 1, None);
        }
        let slot = &mut self.edges[handle.index()];
        let old = *slot;
        *slot = edge;
        match (old, edge) {
            (None, None) => vec![],
            (None, Some(e)) => {
                self.count += 1;
                vec![add_event(handle, e)]
            }
            (Some(_), None) => {
                self.count -= 1;
                vec![ChangeEvent::RemoveEdge { handle }]
            }
            (Some(a), Some(b)) if a == b => vec![],
            (Some(a), Some(b)) if a.same_endpoints(&b) => vec![ChangeEvent::Reweight {
                handle,
                weight: b.weight,
            }],
            (Some(_), Some(b)) => vec![ChangeEvent::RemoveEdge { handle }, add_event(handle, b)],
        }
    }

    /// Applies a logged event. Used to replay a change log.
    pub fn apply(&mut self, event: &ChangeEvent) {
        match *event {
            ChangeEvent::AddEdge {
                handle,
                t1,
                t2,
                weight,
            } => {
                self.set(handle, Some(HEdge { t1, t2, weight }));
            }
            ChangeEvent::RemoveEdge { handle } => {
                self.set(handle, None);
            }
            ChangeEvent::Reweight { handle, weight } => {
                let mut e = self.get(handle).expect("reweight of a missing edge");
                e.weight = weight;
                self.set(handle, Some(e));
            }
        }
    }

    /// All H-edges as a weighted multigraph over the original vertex ids.
    pub fn view(&self) -> WeightedGraphView {
        WeightedGraphView {
            n: self.n,
            edges: self
                .iter()
                .map(|(_, e)| (e.t1.index(), e.t2.index(), e.weight))
                .collect(),
        }
    }

    /// Parallel edges merged, self-loops dropped.
    pub fn aggregated_view(&self) -> WeightedGraphView {
        self.view().aggregated()
    }
}

fn add_event(handle: WalkId, e: HEdge) -> ChangeEvent {
    ChangeEvent::AddEdge {
        handle,
        t1: e.t1,
        t2: e.t2,
        weight: e.weight,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: u32, b: u32, w: f64) -> Option<HEdge> {
        Some(HEdge {
            t1: VertexId(a),
            t2: VertexId(b),
            weight: w,
        })
    }

    #[test]
    fn diff_events() {
        let mut h = SchurSketch::new(4);
        let w = WalkId(3);
        assert_eq!(h.set(w, e(0, 1, 0.5)).len(), 1);
        assert!(h.set(w, e(0, 1, 0.5)).is_empty());
        assert!(matches!(
            h.set(w, e(1, 0, 0.25))[..],
            [ChangeEvent::Reweight { .. }]
        ));
        assert_eq!(h.set(w, e(2, 0, 0.25)).len(), 2);
        assert_eq!(h.len(), 1);
        assert!(matches!(h.set(w, None)[..], [ChangeEvent::RemoveEdge { .. }]));
        assert!(h.is_empty());
    }
}
