use serde::{Deserialize, Serialize};

use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::matrix::OdnMatrix;
use crate::operator::{dot, Difference, SymmetricOperator};
use crate::rng::seeded;
use crate::spectra::{check_dims, dense_eigenvalues, spectral_norm, Inertia, CHECK_SLACK};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadformRecord {
    pub x: Vec<f64>,
    pub q: f64,
    pub q_hat: f64,
    pub gap: f64,
    /// `||M - M̂||_2 ||x||²`
    pub certified_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadformReport {
    pub records: Vec<QuadformRecord>,
    pub difference_norm: f64,
    pub inertia: Inertia,
    pub inertia_hat: Inertia,
}

impl QuadformReport {
    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn inertia_agrees(&self) -> bool {
        self.inertia == self.inertia_hat
    }
}

/// `count` standard Gaussian vectors of length `n`.
pub fn random_probes(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = seeded(seed);
    (0..count).map(|_| StandardNormal.sample_iter(&mut rng).take(n).collect()).collect()
}

/// Compares `Q(x) = xᵀMx` with `Q̂(x) = xᵀM̂x` on each probe vector against
/// the certified bound `||M - M̂|| ||x||²`.
pub fn quadform_gap(m: &OdnMatrix, m_hat: &OdnMatrix, xs: &[Vec<f64>]) -> Result<QuadformReport> {
    check_dims(m.n(), m_hat.n())?;
    for x in xs {
        check_dims(m.n(), x.len())?;
    }
    let difference_norm = spectral_norm(&Difference::new(m, m_hat), usize::MAX);
    let records = xs
        .iter()
        .map(|x| {
            let q = m.quadratic_form(x);
            let q_hat = m_hat.quadratic_form(x);
            let gap = (q - q_hat).abs();
            let certified_bound = difference_norm * dot(x, x);
            let roundoff = 1e-12 * (q.abs() + q_hat.abs());
            QuadformRecord {
                x: x.clone(),
                q,
                q_hat,
                gap,
                certified_bound,
                pass: gap <= certified_bound * (1.0 + CHECK_SLACK) + roundoff,
            }
        })
        .collect();
    Ok(QuadformReport {
        records,
        difference_norm,
        inertia: Inertia::of(&dense_eigenvalues(m)),
        inertia_hat: Inertia::of(&dense_eigenvalues(m_hat)),
    })
}
