//! Thin wrappers over nalgebra's dense LU with partial pivoting.

use nalgebra::{DMatrix, DVector, LU, Dyn};

use crate::error::{Error, Result};

/// LU factorization of a square matrix, rejected when numerically singular.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: LU<f64, Dyn, Dyn>,
    n: usize,
}

impl DenseLu {
    pub fn new(a: &DMatrix<f64>, what: &str) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::InvalidArgument(format!(
                "{what}: matrix is {}x{}, not square",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let scale = a.amax().max(f64::MIN_POSITIVE);
        let lu = a.clone().lu();
        let u = lu.u();
        let min_pivot = (0..n).map(|i| u[(i, i)].abs()).fold(f64::INFINITY, f64::min);
        if n > 0 && !(min_pivot > 1e-13 * scale) {
            return Err(Error::Singular(format!("{what}: smallest pivot {min_pivot:e}")));
        }
        Ok(DenseLu { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_vec(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    pub fn solve(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.lu
            .solve(b)
            .ok_or_else(|| Error::Singular("LU solve failed".into()))
    }

    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        self.lu
            .try_inverse()
            .ok_or_else(|| Error::Singular("LU inverse failed".into()))
    }
}

/// 2-norm condition number from the singular values.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = a.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Solves `x * a = b` for `x` (right division), i.e. `aᵀ xᵀ = bᵀ`.
pub fn right_divide(b: &DMatrix<f64>, a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let lu = DenseLu::new(&a.transpose(), what)?;
    Ok(lu.solve(&b.transpose())?.transpose())
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
