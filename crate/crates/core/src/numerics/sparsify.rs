//! Spectral sparsification by effective-resistance (leverage score)
//! sampling.
//!
//! Each aggregated edge `e` with weight `w_e` and resistance `R_e` has
//! leverage `w_e R_e`; leverages sum to `n − c` over `c` components. An
//! edge is kept with probability `p_e = min(1, C · w_e R_e · ln n / ε²)`
//! and reweighted to `w_e / p_e`, so the expected Laplacian is unchanged.

use rand::Rng;

use super::{assemble, NumericsError, SolveOptions, WeightedGraphView};
use crate::graph::VertexId;

/// Default oversampling constant `C`.
pub const SPARSIFY_OVERSAMPLE: f64 = 0.5;

pub fn sparsify_by_leverage<R: Rng + ?Sized>(
    view: &WeightedGraphView,
    eps: f64,
    rng: &mut R,
) -> Result<WeightedGraphView, NumericsError> {
    sparsify_by_leverage_with(view, eps, SPARSIFY_OVERSAMPLE, rng)
}

/// Target size is `C · n ln n / ε²` aggregated edges; inputs at or below
/// it are returned unchanged.
pub fn sparsify_by_leverage_with<R: Rng + ?Sized>(
    view: &WeightedGraphView,
    eps: f64,
    oversample: f64,
    rng: &mut R,
) -> Result<WeightedGraphView, NumericsError> {
    assert!(eps > 0.0 && eps < 1.0, "eps must lie in (0, 1)");
    let n = view.n;
    if n < 2 {
        return Ok(view.clone());
    }
    let log_n = (n as f64).ln();
    let target = oversample * n as f64 * log_n / (eps * eps);
    let agg = view.aggregated();
    if agg.edges.len() as f64 <= target || view.edges.len() as f64 <= target {
        return Ok(view.clone());
    }
    let sys = assemble(&agg)?;
    let pairs: Vec<(VertexId, VertexId)> = agg
        .edges
        .iter()
        .map(|&(u, v, _)| (VertexId::from(u), VertexId::from(v)))
        .collect();
    let resistances = sys.resistances(&pairs, &SolveOptions::default())?;
    let mut out = WeightedGraphView::new(n);
    for (&(u, v, w), r) in agg.edges.iter().zip(resistances) {
        let p = (oversample * w * r * log_n / (eps * eps)).min(1.0);
        if p >= 1.0 || rng.gen::<f64>() < p {
            out.push(u, v, w / p);
        }
    }
    log::debug!(
        "sparsified {} aggregated edges down to {}",
        agg.edges.len(),
        out.edges.len()
    );
    Ok(out)
}
