//! Dense Moore–Penrose pseudoinverse, used as a test oracle.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{LaplacianSystem, NumericsError};
use crate::graph::VertexId;

pub const DEFAULT_DENSE_CAP: usize = 2048;

pub fn pinv_dense(sys: &LaplacianSystem) -> Result<DMatrix<f64>, NumericsError> {
    pinv_dense_with_cap(sys, DEFAULT_DENSE_CAP)
}

/// `L†` through a symmetric eigendecomposition; eigenvalues below
/// `1e-10 · λ_max` are treated as the null space.
pub fn pinv_dense_with_cap(sys: &LaplacianSystem, cap: usize) -> Result<DMatrix<f64>, NumericsError> {
    let n = sys.vertex_count();
    if n > cap {
        return Err(NumericsError::TooLarge { n, cap });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let l = DMatrix::from_row_slice(n, n, &sys.to_dense());
    let eig = SymmetricEigen::new(l);
    let lmax = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = 1e-10 * lmax.max(f64::MIN_POSITIVE);
    let mut out = DMatrix::zeros(n, n);
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let q = eig.eigenvectors.column(i);
            out += (q * q.transpose()) / lambda;
        }
    }
    Ok(out)
}

/// `P[s][s] + P[t][t] − 2 P[s][t]` for a pseudoinverse `P`.
pub fn resistance_from_pinv(p: &DMatrix<f64>, s: VertexId, t: VertexId) -> f64 {
    let (s, t) = (s.index(), t.index());
    p[(s, s)] + p[(t, t)] - 2.0 * p[(s, t)]
}
