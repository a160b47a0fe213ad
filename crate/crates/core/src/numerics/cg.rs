//! Jacobi-preconditioned conjugate gradients on a grounded component.

use super::{LaplacianSystem, NumericsError, SolveOptions};

/// Solves the Laplacian restricted to `members[1..]` (with `members[0]`
/// grounded). `local` maps global ids to positions in `members`.
pub(super) fn solve_grounded(
    sys: &LaplacianSystem,
    members: &[usize],
    local: &[usize],
    rhs: &[f64],
    opts: &SolveOptions,
) -> Result<Vec<f64>, NumericsError> {
    let k = members.len() - 1;
    let apply = |x: &[f64], y: &mut [f64]| {
        for (i, out) in y.iter_mut().enumerate() {
            let g = members[i + 1];
            let mut s = 0.0;
            for (c, a) in sys.row(g) {
                let j = local[c];
                if j > 0 && j != usize::MAX {
                    s += a * x[j - 1];
                }
            }
            *out = s;
        }
    };
    let inv_diag: Vec<f64> = members[1..].iter().map(|&g| 1.0 / sys.diag[g]).collect();
    let max_iter = if opts.max_iterations == 0 {
        10 * members.len().max(10)
    } else {
        opts.max_iterations
    };

    let b_norm = rhs.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut x = vec![0.0; k];
    if b_norm == 0.0 {
        return Ok(x);
    }
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; k];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut residual = 1.0;
    for it in 0..max_iter {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rz / pap;
        for i in 0..k {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = r.iter().map(|x| x * x).sum::<f64>().sqrt() / b_norm;
        if residual <= opts.tolerance {
            log::trace!("cg converged in {} iterations", it + 1);
            return Ok(x);
        }
        for i in 0..k {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(NumericsError::NotConverged {
        iterations: max_iter,
        residual,
    })
}
