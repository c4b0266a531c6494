use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{decompose, reconstruct, Adjacency, OdnMatrix};
use crate::sparsifier::{sparsify, verify_sparsifier_with, SparsifierOptions};
use crate::spectra::{
    dense_eigenvalues, eigen_decompose, theorem1_terms, EigenMethod, Selection, Verdict, CHECK_SLACK,
};

/// Standardizes the columns of `data` (rows are samples) and returns their
/// correlation matrix, normalized by the number of samples.
///
/// Negatively correlated column pairs yield [`Error::NotOdn`] listing every
/// offending `(i, j, r_ij)` with `i < j`.
pub fn correlation_from_data(data: &DMatrix<f64>) -> Result<OdnMatrix> {
    let (samples, cols) = data.shape();
    if samples < 2 || cols == 0 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples and 1 column, got {samples}x{cols}"
        )));
    }
    let mut z = data.clone();
    for (j, mut col) in z.column_iter_mut().enumerate() {
        if let Some(r) = col.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i: r, j });
        }
        let mean = col.mean();
        col.add_scalar_mut(-mean);
        let sd = (col.norm_squared() / samples as f64).sqrt();
        if sd <= 1e-12 * (1.0 + mean.abs()) {
            return Err(Error::ZeroVarianceColumn(j));
        }
        col /= sd;
    }
    let corr = z.transpose() * &z / samples as f64;

    let mut triples = Vec::new();
    let mut negative = Vec::new();
    for i in 0..cols {
        for j in i + 1..cols {
            let r = corr[(i, j)].clamp(-1.0, 1.0);
            if r < 0.0 {
                negative.push((i, j, r));
            } else {
                triples.push((i, j, r));
            }
        }
    }
    if !negative.is_empty() {
        return Err(Error::NotOdn(negative));
    }
    OdnMatrix::new(Adjacency::new(cols, triples)?, vec![1.0; cols])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariancePair {
    /// 1-based component index.
    pub index: usize,
    /// `Var(z_i) = λ_i`
    pub variance: f64,
    /// `Var(ẑ_i) = λ̂_i`
    pub variance_hat: f64,
    pub gap: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativeVariance {
    pub sum: f64,
    pub sum_hat: f64,
    pub gap: f64,
    /// `p ε sqrt(n) ρ(L_M)`: the per-component bounds summed.
    pub summed_bound: f64,
    /// `Σ_{i<=p} i ε sqrt(n) ρ(L_M) = p(p+1)/2 ε sqrt(n) ρ(L_M)`, the index
    /// factor taken literally. Never smaller than `summed_bound`.
    pub literal_bound: f64,
    /// Checked against `literal_bound`.
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverTimings {
    pub dense_seconds: f64,
    pub sparse_seconds: f64,
}

/// Leading principal-component variances of a correlation matrix and of its
/// sparsified counterpart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaComparison {
    pub n: usize,
    pub p: usize,
    pub epsilon: f64,
    pub seed: u64,
    pub variances: Vec<VariancePair>,
    /// `ε sqrt(n) ρ(L_M)`
    pub per_component_bound: f64,
    /// `(Δ - δ) / 2`; zero for a correlation matrix.
    pub slack_term: f64,
    pub cumulative: CumulativeVariance,
    /// All eigenvalues of `M` are nonnegative (up to 1e-10 relative).
    pub positive_semidefinite: bool,
    /// The sampled Laplacian passed the ε-sandwich verification.
    pub sparsifier_verified: bool,
    pub nnz_before: usize,
    pub nnz_after: usize,
    pub sparse_method: String,
    pub sparse_converged: bool,
    /// Wall-clock, excluded from serialized output so reports stay
    /// reproducible.
    #[serde(skip)]
    pub solver_timings: SolverTimings,
}

impl PcaComparison {
    pub fn has_violation(&self) -> bool {
        self.variances.iter().any(|v| v.verdict.is_violation()) || self.cumulative.verdict.is_violation()
    }
}

pub fn pca_compare(m: &OdnMatrix, epsilon: f64, p: usize, seed: u64) -> Result<PcaComparison> {
    pca_compare_with(m, p, &SparsifierOptions::new(epsilon, seed), 1000)
}

/// Sparsifies the correlation matrix `m`, solves for the top `p` eigenpairs
/// of `m` densely and of `M̂` with Lanczos, and checks each variance gap
/// against `ε sqrt(n) ρ(L_M)`.
pub fn pca_compare_with(
    m: &OdnMatrix,
    p: usize,
    opts: &SparsifierOptions,
    probes: usize,
) -> Result<PcaComparison> {
    let n = m.n();
    if let Some((index, &value)) = m.diag().iter().enumerate().find(|(_, v)| (**v - 1.0).abs() > 1e-9) {
        return Err(Error::NotCorrelation { index, value });
    }
    if p == 0 || p > n {
        return Err(Error::InvalidArgument(format!("p = {p} must lie in 1..={n}")));
    }
    let terms = theorem1_terms(m, opts.epsilon, opts.dense_limit)?;

    let dec = decompose(m);
    let sparsifier = sparsify(dec.laplacian(), opts)?;
    let verification = verify_sparsifier_with(
        dec.laplacian(),
        &sparsifier.l_hat,
        opts.epsilon,
        probes,
        opts.seed.wrapping_add(1),
        opts.dense_limit,
    )?;
    let m_hat = reconstruct(sparsifier.a_hat(), dec.d)?;

    let started = Instant::now();
    let full = dense_eigenvalues(m);
    let dense_seconds = started.elapsed().as_secs_f64();

    let started = Instant::now();
    let (method, sys_hat) = if p < n {
        ("iterative", eigen_decompose(&m_hat, Selection::TopK(p), EigenMethod::Iterative)?)
    } else {
        ("dense", eigen_decompose(&m_hat, Selection::All, EigenMethod::Dense)?)
    };
    let sparse_seconds = started.elapsed().as_secs_f64();

    let rho = full.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let positive_semidefinite = full.iter().all(|&v| v >= -1e-10 * rho);
    let hypothesis = verification.pass;
    let per_component_bound = terms.sparsification_term;
    let slack_term = terms.centering_term;
    let roundoff = 1e-12 * rho;

    let variances: Vec<VariancePair> = full
        .iter()
        .zip(&sys_hat.values)
        .take(p)
        .enumerate()
        .map(|(i, (&variance, &variance_hat))| {
            let gap = (variance - variance_hat).abs();
            let ok = gap <= (per_component_bound + slack_term) * (1.0 + CHECK_SLACK) + roundoff;
            VariancePair {
                index: i + 1,
                variance,
                variance_hat,
                gap,
                verdict: Verdict::from_bool(ok).under_hypothesis(hypothesis),
            }
        })
        .collect();

    let sum: f64 = variances.iter().map(|v| v.variance).sum();
    let sum_hat: f64 = variances.iter().map(|v| v.variance_hat).sum();
    let pf = variances.len() as f64;
    let unit = per_component_bound + slack_term;
    let summed_bound = pf * unit;
    let literal_bound = pf * (pf + 1.0) / 2.0 * unit;
    let cumulative_gap = (sum - sum_hat).abs();
    let cumulative = CumulativeVariance {
        sum,
        sum_hat,
        gap: cumulative_gap,
        summed_bound,
        literal_bound,
        verdict: Verdict::from_bool(
            cumulative_gap <= literal_bound * (1.0 + CHECK_SLACK) + pf * roundoff,
        )
        .under_hypothesis(hypothesis),
    };

    Ok(PcaComparison {
        n,
        p,
        epsilon: opts.epsilon,
        seed: opts.seed,
        variances,
        per_component_bound,
        slack_term,
        cumulative,
        positive_semidefinite,
        sparsifier_verified: hypothesis,
        nnz_before: m.nnz(),
        nnz_after: m_hat.nnz(),
        sparse_method: method.to_string(),
        sparse_converged: sys_hat.is_converged(),
        solver_timings: SolverTimings { dense_seconds, sparse_seconds },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn identical_columns_are_perfectly_correlated() {
        let x = dmatrix![1.0, 1.0; 2.0, 2.0; 4.0, 4.0; 3.0, 3.0];
        let m = correlation_from_data(&x).unwrap();
        assert!((m.get(0, 1) - 1.0).abs() < 1e-15);
        assert_eq!(m.diag(), &[1.0, 1.0]);
    }

    #[test]
    fn anticorrelated_columns_are_rejected() {
        let x = dmatrix![1.0, -1.0, 0.5; 2.0, -2.0, 0.1; 3.0, -3.0, 0.7];
        match correlation_from_data(&x).unwrap_err() {
            Error::NotOdn(pairs) => {
                assert_eq!(pairs[0].0, 0);
                assert_eq!(pairs[0].1, 1);
                assert!((pairs[0].2 + 1.0).abs() < 1e-12);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn zero_variance_column() {
        let x = dmatrix![1.0, 5.0; 2.0, 5.0; 3.0, 5.0];
        assert!(matches!(correlation_from_data(&x), Err(Error::ZeroVarianceColumn(1))));
    }

    #[test]
    fn identity_correlation() {
        let m = OdnMatrix::from_dense(&DMatrix::identity(4, 4)).unwrap();
        let c = pca_compare(&m, 0.25, 2, 0).unwrap();
        assert_eq!(c.nnz_after, c.nnz_before);
        for v in &c.variances {
            assert_eq!(v.variance, 1.0);
            assert!((v.variance_hat - 1.0).abs() < 1e-12);
            assert_eq!(v.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn preconditions() {
        let m = OdnMatrix::from_dense(&dmatrix![2.0, 0.5; 0.5, 1.0]).unwrap();
        assert!(matches!(pca_compare(&m, 0.25, 1, 0), Err(Error::NotCorrelation { index: 0, .. })));
        let c = OdnMatrix::from_dense(&dmatrix![1.0, 0.5; 0.5, 1.0]).unwrap();
        assert!(matches!(pca_compare(&c, 0.25, 3, 0), Err(Error::InvalidArgument(_))));
        assert!(matches!(pca_compare(&c, 1.25, 1, 0), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn equicorrelation_spectrum() {
        let n = 20;
        let mut dense = DMatrix::from_element(n, n, 0.5);
        dense.fill_diagonal(1.0);
        let m = OdnMatrix::from_dense(&dense).unwrap();
        let c = pca_compare(&m, 0.25, 3, 5).unwrap();
        assert!((c.variances[0].variance - 10.5).abs() < 1e-10);
        assert!((c.variances[1].variance - 0.5).abs() < 1e-10);
        assert_eq!(c.slack_term, 0.0);
        assert!(c.positive_semidefinite);
        assert!(c.cumulative.literal_bound >= c.cumulative.summed_bound);
        if c.sparsifier_verified {
            assert!(!c.has_violation());
        }
    }
}
