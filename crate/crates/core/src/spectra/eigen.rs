use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::lanczos;
use crate::error::{Error, Result};
use crate::operator::{norm, SymmetricOperator};
use crate::rng::seeded;

/// Largest dimension handled by dense `O(n^3)` routines unless overridden.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMethod {
    Dense,
    Iterative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Selection {
    All,
    TopK(usize),
}

/// Eigenpairs sorted by descending eigenvalue.
///
/// Column `i` of `vectors` belongs to `values[i]`; each column is scaled so
/// its largest-magnitude entry (lowest index on ties) is nonnegative.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub method: EigenMethod,
    /// `max_i ||M x_i - λ_i x_i||_2`.
    pub residual: f64,
    /// Number of leading pairs that met the convergence tolerance. Equal to
    /// `values.len()` for dense solves.
    pub converged: usize,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_converged(&self) -> bool {
        self.converged == self.values.len()
    }

    /// Turns a partial iterative result into [`Error::ConvergenceFailure`].
    pub fn require_converged(self) -> Result<Self> {
        if self.is_converged() {
            Ok(self)
        } else {
            Err(Error::ConvergenceFailure { k_achieved: self.converged })
        }
    }

    pub fn vector(&self, i: usize) -> Vec<f64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// Largest absolute eigenvalue among those computed.
    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Eigen-decomposition of a symmetric operator.
///
/// `Dense` densifies and runs a symmetric QR eigensolver. `Iterative` runs
/// Lanczos with full reorthogonalization and needs `TopK(k)` with `k < n`.
pub fn eigen_decompose<O: SymmetricOperator + ?Sized>(
    op: &O,
    selection: Selection,
    method: EigenMethod,
) -> Result<EigenSystem> {
    let n = op.dim();
    let k = match selection {
        Selection::All => n,
        Selection::TopK(k) => {
            if k == 0 || k > n {
                return Err(Error::InvalidArgument(format!("cannot select {k} of {n} eigenpairs")));
            }
            k
        }
    };
    match method {
        EigenMethod::Dense => Ok(dense(op, k)),
        EigenMethod::Iterative => {
            if k >= n {
                return Err(Error::InvalidArgument(format!(
                    "iterative solver needs k < n (k = {k}, n = {n})"
                )));
            }
            Ok(lanczos::top_k(op, k, lanczos::Options::default()))
        }
    }
}

fn dense<O: SymmetricOperator + ?Sized>(op: &O, k: usize) -> EigenSystem {
    let eig = SymmetricEigen::new(op.to_dense());
    let order = descending_order(eig.eigenvalues.as_slice());
    let values: Vec<f64> = order.iter().take(k).map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(op.dim(), k);
    for (col, &i) in order.iter().take(k).enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    finish(op, values, vectors, EigenMethod::Dense, k)
}

/// Sorted eigenvalues only (descending), for norm and inertia computations.
pub fn dense_eigenvalues<O: SymmetricOperator + ?Sized>(op: &O) -> Vec<f64> {
    let vals = op.to_dense().symmetric_eigenvalues();
    let mut v: Vec<f64> = vals.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

pub(crate) fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

pub(crate) fn finish<O: SymmetricOperator + ?Sized>(
    op: &O,
    values: Vec<f64>,
    mut vectors: DMatrix<f64>,
    method: EigenMethod,
    converged: usize,
) -> EigenSystem {
    let n = op.dim();
    let mut residual: f64 = 0.0;
    let mut y = vec![0.0; n];
    for (c, &lambda) in values.iter().enumerate() {
        let mut col = vectors.column_mut(c);
        apply_sign_convention(col.as_mut_slice());
        let x = col.as_slice();
        op.apply(x, &mut y);
        let r: f64 = y.iter().zip(x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        residual = residual.max(r);
    }
    EigenSystem { values, vectors, method, residual, converged }
}

/// Flips `x` so that its largest-magnitude entry is nonnegative; entries
/// within 1e-10 relative of the maximum count as ties and the lowest index
/// wins.
pub fn apply_sign_convention(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = x.iter().position(|v| v.abs() >= max * (1.0 - 1e-10)).unwrap_or(0);
    if x[pivot] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// `||A||_2` for symmetric `A`: the largest absolute eigenvalue. Dense up
/// to `dense_limit`, power iteration beyond it.
pub fn spectral_norm<O: SymmetricOperator + ?Sized>(op: &O, dense_limit: usize) -> f64 {
    if op.dim() == 0 {
        return 0.0;
    }
    if op.dim() <= dense_limit {
        dense_eigenvalues(op).iter().fold(0.0, |m, v| m.max(v.abs()))
    } else {
        power_iteration(op, 1e-9, 5000)
    }
}

/// Power iteration for `max |λ|`; stops when successive estimates agree to
/// `tol` relative or after `max_iter` steps.
pub fn power_iteration<O: SymmetricOperator + ?Sized>(op: &O, tol: f64, max_iter: usize) -> f64 {
    let n = op.dim();
    let mut rng = seeded(0x9e37_79b9);
    let mut x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let nx = norm(&x);
    x.iter_mut().for_each(|v| *v /= nx);
    let mut y = vec![0.0; n];
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        op.apply(&x, &mut y);
        let ny = norm(&y);
        if ny == 0.0 {
            return 0.0;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
        if (ny - estimate).abs() <= tol * ny {
            return ny;
        }
        estimate = ny;
    }
    estimate
}
