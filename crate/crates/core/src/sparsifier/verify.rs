use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::resistance::PINV_CUTOFF;
use crate::error::Result;
use crate::matrix::Laplacian;
use crate::operator::{norm, SymmetricOperator};
use crate::rng::seeded;
use crate::spectra::{check_dims, CHECK_SLACK, DEFAULT_DENSE_LIMIT};

/// Evidence that `(1 - ε) L ⪯ L̂ ⪯ (1 + ε) L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifierVerification {
    pub epsilon: f64,
    pub probes: usize,
    /// Extremes of `x^T L̂ x / x^T L x` over random probes orthogonal to the
    /// kernel of `L`.
    pub probe_min: f64,
    pub probe_max: f64,
    /// Extreme generalized eigenvalues of `(L̂, L)` on the range of `L`, when
    /// computed.
    pub exact_min: Option<f64>,
    pub exact_max: Option<f64>,
    /// Every edge of `L̂` joins two vertices in the same component of `L`,
    /// so `L̂` vanishes on the kernel of `L`.
    pub kernel_compatible: bool,
    pub pass: bool,
}

impl SparsifierVerification {
    /// Whether a ratio lies in `[1 - ε, 1 + ε]` up to the shared check slack.
    pub fn in_band(epsilon: f64, ratio: f64) -> bool {
        ratio >= (1.0 - epsilon) * (1.0 - CHECK_SLACK) && ratio <= (1.0 + epsilon) * (1.0 + CHECK_SLACK)
    }
}

pub fn verify_sparsifier(
    l: &Laplacian,
    l_hat: &Laplacian,
    epsilon: f64,
    probes: usize,
    seed: u64,
) -> Result<SparsifierVerification> {
    verify_sparsifier_with(l, l_hat, epsilon, probes, seed, DEFAULT_DENSE_LIMIT)
}

/// Checks the quadratic-form sandwich by random probes and, for
/// `n <= dense_limit`, by the exact generalized spectrum.
pub fn verify_sparsifier_with(
    l: &Laplacian,
    l_hat: &Laplacian,
    epsilon: f64,
    probes: usize,
    seed: u64,
    dense_limit: usize,
) -> Result<SparsifierVerification> {
    check_dims(l.n(), l_hat.n())?;
    let n = l.n();
    let components = l.adjacency().components();
    let kernel_compatible =
        l_hat.adjacency().edges().iter().all(|e| components.labels[e.i] == components.labels[e.j]);

    let mut probe_min = f64::INFINITY;
    let mut probe_max = f64::NEG_INFINITY;
    if !l.is_zero() {
        let mut rng = seeded(seed);
        let mut x = vec![0.0; n];
        for _ in 0..probes {
            x.iter_mut().for_each(|v| *v = rng.sample(StandardNormal));
            components.project_off_kernel(&mut x);
            let nx = norm(&x);
            if nx == 0.0 {
                continue;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let den = l.energy(&x);
            if den <= 0.0 {
                continue;
            }
            let ratio = l_hat.energy(&x) / den;
            probe_min = probe_min.min(ratio);
            probe_max = probe_max.max(ratio);
        }
    }
    if probe_min > probe_max {
        // no probe had positive energy under L: L has an empty range
        let ratio = if l_hat.is_zero() { 1.0 } else { f64::INFINITY };
        probe_min = ratio;
        probe_max = ratio;
    }

    let (exact_min, exact_max) = if n <= dense_limit && kernel_compatible {
        match generalized_extremes(l, l_hat) {
            Some((lo, hi)) => (Some(lo), Some(hi)),
            None => (Some(1.0), Some(1.0)),
        }
    } else {
        (None, None)
    };

    let band = |r: f64| SparsifierVerification::in_band(epsilon, r);
    let pass = kernel_compatible
        && band(probe_min)
        && band(probe_max)
        && exact_min.is_none_or(band)
        && exact_max.is_none_or(band);

    Ok(SparsifierVerification {
        epsilon,
        probes,
        probe_min: finite_or_max(probe_min),
        probe_max: finite_or_max(probe_max),
        exact_min,
        exact_max,
        kernel_compatible,
        pass,
    })
}

fn finite_or_max(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// Extreme eigenvalues of `Λ^{-1/2} U_rᵀ L̂ U_r Λ^{-1/2}` where `L = U Λ Uᵀ`
/// restricted to eigenvalues above the pseudoinverse cutoff. `None` when the
/// range of `L` is empty.
pub fn generalized_extremes(l: &Laplacian, l_hat: &Laplacian) -> Option<(f64, f64)> {
    let eig = SymmetricEigen::new(l.to_dense());
    let rho = eig.eigenvalues.amax();
    let keep: Vec<usize> =
        (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > PINV_CUTOFF * rho).collect();
    if keep.is_empty() {
        return None;
    }
    let n = l.n();
    let mut basis = DMatrix::zeros(n, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        let s = 1.0 / eig.eigenvalues[k].sqrt();
        basis.set_column(c, &(eig.eigenvectors.column(k) * s));
    }
    let reduced = basis.transpose() * l_hat.to_dense() * &basis;
    let sym = (&reduced + reduced.transpose()) * 0.5;
    let vals = sym.symmetric_eigenvalues();
    Some((vals.min(), vals.max()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Adjacency;
    use crate::sparsifier::{sparsify, SparsifierOptions};

    fn k5() -> Laplacian {
        let mut t = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                t.push((i, j, 1.0));
            }
        }
        Adjacency::new(5, t).unwrap().laplacian()
    }

    #[test]
    fn identical_laplacians_pass() {
        let l = k5();
        let v = verify_sparsifier(&l, &l, 0.1, 200, 3).unwrap();
        assert_eq!((v.probe_min, v.probe_max), (1.0, 1.0));
        assert!((v.exact_min.unwrap() - 1.0).abs() < 1e-12);
        assert!((v.exact_max.unwrap() - 1.0).abs() < 1e-12);
        assert!(v.pass);
    }

    #[test]
    fn doubled_laplacian_fails() {
        let l = k5();
        let v = verify_sparsifier(&l, &l.scaled(2.0).unwrap(), 0.5, 100, 3).unwrap();
        assert!((v.exact_max.unwrap() - 2.0).abs() < 1e-12);
        assert!((v.probe_max - 2.0).abs() < 1e-12);
        assert!(!v.pass);
    }

    #[test]
    fn sampled_k5_passes() {
        let l = k5();
        let r = sparsify(&l, &SparsifierOptions::new(0.3, 7)).unwrap();
        let v = verify_sparsifier(&l, &r.l_hat, 0.3, 1000, 1).unwrap();
        assert!(v.pass, "{v:?}");
        assert!(v.probe_min >= v.exact_min.unwrap() - 1e-12);
        assert!(v.probe_max <= v.exact_max.unwrap() + 1e-12);
    }

    #[test]
    fn edges_across_components_are_caught() {
        let l = Adjacency::new(4, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap().laplacian();
        let bridged = Adjacency::new(4, [(0, 1, 1.0), (2, 3, 1.0), (1, 2, 0.01)]).unwrap().laplacian();
        let v = verify_sparsifier(&l, &bridged, 0.5, 50, 0).unwrap();
        assert!(!v.kernel_compatible);
        assert!(!v.pass);
    }

    #[test]
    fn zero_laplacians() {
        let z = Adjacency::empty(3).laplacian();
        assert!(verify_sparsifier(&z, &z, 0.2, 10, 0).unwrap().pass);
        let one = Adjacency::new(3, [(0, 1, 1.0)]).unwrap().laplacian();
        assert!(!verify_sparsifier(&z, &one, 0.2, 10, 0).unwrap().pass);
        assert!(verify_sparsifier(&z, &Adjacency::empty(2).laplacian(), 0.2, 10, 0).is_err());
    }
}
