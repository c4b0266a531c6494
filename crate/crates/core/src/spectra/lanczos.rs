//! Lanczos iteration with full reorthogonalization for the top eigenpairs
//! of a symmetric operator.
//!
//! An invariant subspace (β ≈ 0) restarts the recurrence from a fresh random
//! vector orthogonal to the basis, so repeated eigenvalues are recovered one
//! block at a time.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rand_chacha::ChaCha8Rng;

use super::eigen::{descending_order, finish, EigenMethod, EigenSystem};
use crate::operator::{dot, norm, SymmetricOperator};
use crate::rng::seeded;

#[derive(Clone, Copy, Debug)]
pub struct Options {
    /// Ritz pair accepted when `|β_m s_mi| <= tol * max|θ|`.
    pub tol: f64,
    /// Iteration cap as a multiple of `n`.
    pub max_iter_factor: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter_factor: 10, seed: 0x1a2c_05e5 }
    }
}

pub fn top_k<O: SymmetricOperator + ?Sized>(op: &O, k: usize, opts: Options) -> EigenSystem {
    let n = op.dim();
    let max_iter = opts.max_iter_factor * n;
    let mut rng = seeded(opts.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut alpha: Vec<f64> = Vec::new();
    // beta[j] couples basis j and j + 1
    let mut beta: Vec<f64> = Vec::new();

    let Some(v0) = fresh_vector(n, &basis, &mut rng) else {
        return finish(op, Vec::new(), DMatrix::zeros(n, 0), EigenMethod::Iterative, 0);
    };
    basis.push(v0);

    let min_steps = n.min((2 * k).max(k + 10));
    let mut w = vec![0.0; n];
    let mut iterations = 0;
    let mut scale: f64 = 0.0;
    let mut last_beta = 0.0;
    let mut ritz = None;

    while iterations < max_iter {
        iterations += 1;
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            for v in &basis {
                let c = dot(&w, v);
                axpy(-c, v, &mut w);
            }
        }
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        let m = basis.len();
        let breakdown = b <= 1e-12 * scale.max(f64::MIN_POSITIVE);
        let full = m == n;
        last_beta = if full || breakdown { 0.0 } else { b };

        if m >= min_steps && (m.is_multiple_of(5) || breakdown || full) {
            let pairs = ritz_pairs(&alpha, &beta, last_beta, k, opts.tol);
            let done = pairs.2 >= k || full;
            ritz = Some(pairs);
            if done {
                break;
            }
        } else {
            ritz = None;
        }
        if full {
            break;
        }

        beta.push(last_beta);
        if breakdown {
            match fresh_vector(n, &basis, &mut rng) {
                Some(v) => basis.push(v),
                None => break,
            }
        } else {
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }

    let (vals, coeffs, converged) = match ritz {
        Some(r) if r.1.nrows() == alpha.len() => r,
        _ => ritz_pairs(&alpha, &beta[..alpha.len() - 1], last_beta, k, opts.tol),
    };

    let m = coeffs.nrows();
    let kk = k.min(vals.len());
    let mut vectors = DMatrix::zeros(n, kk);
    for c in 0..kk {
        let mut col = vec![0.0; n];
        for (r, v) in basis.iter().take(m).enumerate() {
            axpy(coeffs[(r, c)], v, &mut col);
        }
        let nc = norm(&col);
        col.iter_mut().for_each(|x| *x /= nc);
        vectors.set_column(c, &nalgebra::DVector::from_vec(col));
    }
    finish(op, vals[..kk].to_vec(), vectors, EigenMethod::Iterative, converged.min(kk))
}

/// Ritz values (descending), their coefficient vectors in the Lanczos
/// basis, and how many of the leading `k` have converged.
fn ritz_pairs(
    alpha: &[f64],
    beta: &[f64],
    last_beta: f64,
    k: usize,
    tol: f64,
) -> (Vec<f64>, DMatrix<f64>, usize) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let order = descending_order(eig.eigenvalues.as_slice());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut coeffs = DMatrix::zeros(m, m);
    for (c, &i) in order.iter().enumerate() {
        coeffs.set_column(c, &eig.eigenvectors.column(i));
    }
    let theta_max = vals.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let converged = (0..k.min(m))
        .take_while(|&c| (last_beta * coeffs[(m - 1, c)]).abs() <= tol * theta_max)
        .count();
    (vals, coeffs, converged)
}

/// Random unit vector orthogonal to `basis`, or `None` once the basis spans
/// the space.
fn fresh_vector(n: usize, basis: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
    if basis.len() >= n {
        return None;
    }
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for b in basis {
                let c = dot(&v, b);
                axpy(-c, b, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
