//! Effective resistances `R_e = (e_i - e_j)^T L^+ (e_i - e_j)` and the
//! leverage-score sampling distribution they induce.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Components, Laplacian};
use crate::operator::{dot, SymmetricOperator};
use crate::rng::seeded;

/// Eigenvalues of `L` below `PINV_CUTOFF * ρ(L)` are treated as zero.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Distortion targeted by the sketched resistances.
pub const SKETCH_DISTORTION: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ResistanceMode {
    /// Dense pseudoinverse per connected component.
    Exact,
    /// Random-projection sketch of `W^{1/2} B L^+` with Laplacian solves.
    Approximate { seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeResistance {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    pub resistance: f64,
    /// Sampling probability, proportional to `weight * resistance`.
    pub probability: f64,
}

impl EdgeResistance {
    pub fn leverage(&self) -> f64 {
        self.weight * self.resistance
    }
}

/// `sum_e w_e R_e`, which equals `n - components` for exact resistances.
pub fn foster_sum(resistances: &[EdgeResistance]) -> f64 {
    resistances.iter().map(EdgeResistance::leverage).sum()
}

/// Number of projection rows used by the approximate mode.
pub fn sketch_rows(n: usize) -> usize {
    (24.0 * (n.max(2) as f64).ln() / (SKETCH_DISTORTION * SKETCH_DISTORTION)).ceil() as usize
}

/// Effective resistance of every edge of `l`, in edge order.
///
/// Exact mode needs `n <= dense_limit`. Disconnected graphs are handled
/// component by component.
pub fn effective_resistances(
    l: &Laplacian,
    mode: ResistanceMode,
    dense_limit: usize,
) -> Result<Vec<EdgeResistance>> {
    let raw = match mode {
        ResistanceMode::Exact => {
            if l.n() > dense_limit {
                return Err(Error::DenseLimitExceeded { n: l.n(), limit: dense_limit });
            }
            exact(l)
        }
        ResistanceMode::Approximate { seed } => approximate(l, seed),
    };
    let edges = l.adjacency().edges();
    let total: f64 = edges.iter().zip(&raw).map(|(e, r)| e.weight * r).sum();
    Ok(edges
        .iter()
        .zip(raw)
        .map(|(e, r)| EdgeResistance {
            i: e.i,
            j: e.j,
            weight: e.weight,
            resistance: r,
            probability: e.weight * r / total,
        })
        .collect())
}

fn exact(l: &Laplacian) -> Vec<f64> {
    let adjacency = l.adjacency();
    if adjacency.is_empty() {
        return Vec::new();
    }
    let dense = l.to_dense();
    let rho = dense.clone().symmetric_eigenvalues().amax();
    let cutoff = PINV_CUTOFF * rho;

    let components = adjacency.components();
    let members = components.members();
    // position of each vertex inside its component
    let mut local = vec![0usize; l.n()];
    for m in &members {
        for (k, &v) in m.iter().enumerate() {
            local[v] = k;
        }
    }
    let pinvs: Vec<Option<DMatrix<f64>>> = members
        .par_iter()
        .map(|m| {
            if m.len() < 2 {
                return None;
            }
            let sub = DMatrix::from_fn(m.len(), m.len(), |a, b| dense[(m[a], m[b])]);
            Some(pseudoinverse(sub, cutoff))
        })
        .collect();

    adjacency
        .edges()
        .par_iter()
        .map(|e| {
            let p = pinvs[components.labels[e.i]].as_ref().expect("edge inside a component");
            let (a, b) = (local[e.i], local[e.j]);
            p[(a, a)] + p[(b, b)] - 2.0 * p[(a, b)]
        })
        .collect()
}

fn pseudoinverse(m: DMatrix<f64>, cutoff: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let s = eig.eigenvalues.len();
    let mut out = DMatrix::zeros(s, s);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let u = eig.eigenvectors.column(k);
            out += (u * u.transpose()) / lambda;
        }
    }
    out
}

const SKETCH_CHUNK: usize = 32;

fn approximate(l: &Laplacian, seed: u64) -> Vec<f64> {
    let adjacency = l.adjacency();
    let edges = adjacency.edges();
    if edges.is_empty() {
        return Vec::new();
    }
    let n = l.n();
    let k = sketch_rows(n);
    let scale = 1.0 / (k as f64).sqrt();
    let sqrt_w: Vec<f64> = edges.iter().map(|e| e.weight.sqrt()).collect();
    let components = adjacency.components();

    let chunks: Vec<Vec<f64>> = (0..k.div_ceil(SKETCH_CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut partial = vec![0.0; edges.len()];
            let mut y = vec![0.0; n];
            for row in c * SKETCH_CHUNK..((c + 1) * SKETCH_CHUNK).min(k) {
                let mut rng: ChaCha8Rng = seeded(seed);
                rng.set_stream(row as u64);
                y.iter_mut().for_each(|v| *v = 0.0);
                for (e, sw) in edges.iter().zip(&sqrt_w) {
                    let q = if rng.random::<bool>() { scale } else { -scale };
                    y[e.i] += q * sw;
                    y[e.j] -= q * sw;
                }
                let z = solve_laplacian(l, &components, &y, 1e-10);
                for (acc, e) in partial.iter_mut().zip(edges) {
                    let d = z[e.i] - z[e.j];
                    *acc += d * d;
                }
            }
            partial
        })
        .collect();

    let mut out = vec![0.0; edges.len()];
    for partial in &chunks {
        for (o, p) in out.iter_mut().zip(partial) {
            *o += p;
        }
    }
    out
}

/// Jacobi-preconditioned conjugate gradients for `L z = y` with `y` in the
/// range of `L`; the solution is returned with zero mean per component.
pub fn solve_laplacian(l: &Laplacian, components: &Components, y: &[f64], rel_tol: f64) -> Vec<f64> {
    let n = l.n();
    let mut rhs = y.to_vec();
    components.project_off_kernel(&mut rhs);
    let inv_diag: Vec<f64> = l.degrees().iter().map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 }).collect();
    let target = rel_tol * dot(&rhs, &rhs).sqrt();

    let mut x = vec![0.0; n];
    let mut r = rhs;
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, b)| a * b).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..(10 * n).max(100) {
        if dot(&r, &r).sqrt() <= target {
            break;
        }
        l.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    components.project_off_kernel(&mut x);
    x
}
