//! Small dense kernels: Cholesky factorization of SPD matrices.

use super::NumericsError;

/// Lower-triangular Cholesky factor of a row-major `k × k` SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    k: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(mut a: Vec<f64>, k: usize) -> Result<Self, NumericsError> {
        assert_eq!(a.len(), k * k);
        for j in 0..k {
            let mut d = a[j * k + j];
            for p in 0..j {
                d -= a[j * k + p] * a[j * k + p];
            }
            if !(d > 0.0) {
                return Err(NumericsError::NotPositiveDefinite);
            }
            let d = d.sqrt();
            a[j * k + j] = d;
            for i in j + 1..k {
                let mut s = a[i * k + j];
                for p in 0..j {
                    s -= a[i * k + p] * a[j * k + p];
                }
                a[i * k + j] = s / d;
            }
        }
        // zero the strict upper triangle so `l` is exactly the factor
        for i in 0..k {
            for j in i + 1..k {
                a[i * k + j] = 0.0;
            }
        }
        Ok(Self { k, l: a })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    /// Solves `L Lᵀ x = b`, overwriting `b` with `x`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let k = self.k;
        for i in 0..k {
            let mut s = b[i];
            for p in 0..i {
                s -= self.l[i * k + p] * b[p];
            }
            b[i] = s / self.l[i * k + i];
        }
        for i in (0..k).rev() {
            let mut s = b[i];
            for p in i + 1..k {
                s -= self.l[p * k + i] * b[p];
            }
            b[i] = s / self.l[i * k + i];
        }
    }
}
