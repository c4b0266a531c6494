//! Numerical checks of the perturbation inequalities behind the
//! sparsification guarantee.

use serde::{Deserialize, Serialize};

use super::eigen::{dense_eigenvalues, spectral_norm, EigenSystem, DEFAULT_DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::matrix::{decompose, Laplacian, OdnMatrix};
use crate::operator::{Difference, SymmetricOperator};

/// Relative slack granted to every inequality check.
pub const CHECK_SLACK: f64 = 1e-9;

/// Outcome of a check whose inequality may depend on an unmet precondition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisUnmet,
}

impl Verdict {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// A failed inequality whose hypothesis did not hold is not a violation.
    pub fn under_hypothesis(self, hypothesis_met: bool) -> Self {
        match (self, hypothesis_met) {
            (Verdict::Fail, false) => Verdict::HypothesisUnmet,
            (v, _) => v,
        }
    }

    pub fn is_violation(self) -> bool {
        self == Verdict::Fail
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

pub(crate) fn validate_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeylCheck {
    pub max_deviation: f64,
    pub norm: f64,
    pub pass: bool,
}

/// `max_i |α_i - β_i| <= ||A - B||_2` for sorted spectra of symmetric `A`, `B`.
pub fn weyl_check<A, B>(a: &A, b: &B) -> Result<WeylCheck>
where
    A: SymmetricOperator + ?Sized,
    B: SymmetricOperator + ?Sized,
{
    check_dims(a.dim(), b.dim())?;
    let alpha = dense_eigenvalues(a);
    let beta = dense_eigenvalues(b);
    let max_deviation = alpha.iter().zip(&beta).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let norm = spectral_norm(&Difference::new(a, b), usize::MAX);
    let pass = max_deviation <= norm + CHECK_SLACK * (1.0 + norm);
    Ok(WeylCheck { max_deviation, norm, pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Check {
    /// `||A_G - A_H||_2`
    pub adjacency_gap: f64,
    /// `||L_G - L_H||_2`
    pub laplacian_gap: f64,
    /// `sqrt(n) * ||L_G - L_H||_2`
    pub scaled_laplacian_gap: f64,
    pub pass: bool,
}

/// Adjacency differences are controlled by Laplacian differences:
/// `||A_G - A_H|| <= sqrt(n) ||L_G - L_H||`.
pub fn lemma2_check(g: &Laplacian, h: &Laplacian) -> Result<Lemma2Check> {
    check_dims(g.n(), h.n())?;
    let adjacency_gap = spectral_norm(&Difference::new(g.adjacency(), h.adjacency()), usize::MAX);
    let laplacian_gap = spectral_norm(&Difference::new(g, h), usize::MAX);
    let scaled_laplacian_gap = (g.n() as f64).sqrt() * laplacian_gap;
    let pass = adjacency_gap <= scaled_laplacian_gap * (1.0 + CHECK_SLACK);
    Ok(Lemma2Check { adjacency_gap, laplacian_gap, scaled_laplacian_gap, pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Check {
    /// `||L - L̂||_2`
    pub gap_norm: f64,
    /// `ε ρ(L)`
    pub bound: f64,
    pub verdict: Verdict,
}

/// `||L - L̂|| <= ε ρ(L)`, which holds whenever `L̂` is an ε-spectral
/// sparsifier of `L`. Pass `hypothesis_met = false` when it is not, and a
/// violated inequality is reported as [`Verdict::HypothesisUnmet`].
pub fn lemma1_check(
    l: &Laplacian,
    l_hat: &Laplacian,
    epsilon: f64,
    hypothesis_met: bool,
) -> Result<Lemma1Check> {
    check_dims(l.n(), l_hat.n())?;
    validate_epsilon(epsilon)?;
    let gap_norm = spectral_norm(&Difference::new(l, l_hat), usize::MAX);
    let bound = epsilon * spectral_norm(l, usize::MAX);
    let pass = gap_norm <= bound * (1.0 + CHECK_SLACK);
    Ok(Lemma1Check { gap_norm, bound, verdict: Verdict::from_bool(pass).under_hypothesis(hypothesis_met) })
}

/// Per-index eigenvector angle against its Davis–Kahan bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleBound {
    /// 1-based eigenvalue index.
    pub index: usize,
    pub sin_theta: f64,
    /// `R / min(|β_{i-1} - α_i|, |β_{i+1} - α_i|)`; `None` when the gap is
    /// below tolerance.
    pub bound: Option<f64>,
    /// The same bound with the two spectra's roles swapped, for diagnostics.
    pub swapped_bound: Option<f64>,
    pub pass: bool,
}

/// Davis–Kahan sin θ check between eigensystems of `A` and `B`.
///
/// `r_norm` must be `||A - B||_2`. Boundary gaps use `β_0 = +∞` and
/// `β_{n+1} = -∞`. `gap_tol` defaults to `1e-8 ρ(A)`.
pub fn davis_kahan(
    a_sys: &EigenSystem,
    b_sys: &EigenSystem,
    r_norm: f64,
    gap_tol: Option<f64>,
) -> Result<Vec<AngleBound>> {
    let n = a_sys.vectors.nrows();
    check_dims(n, b_sys.vectors.nrows())?;
    check_dims(n, a_sys.len())?;
    check_dims(n, b_sys.len())?;
    let gap_tol = gap_tol.unwrap_or(1e-8 * a_sys.spectral_radius());

    let bound_for = |mine: &[f64], other: &[f64], i: usize| -> Option<f64> {
        let above = if i == 0 { f64::INFINITY } else { (other[i - 1] - mine[i]).abs() };
        let below = if i + 1 == n { f64::INFINITY } else { (mine[i] - other[i + 1]).abs() };
        let gap = above.min(below);
        if gap < gap_tol {
            None
        } else {
            Some(r_norm / gap)
        }
    };

    let out = (0..n)
        .map(|i| {
            let a = a_sys.vectors.column(i);
            let b = b_sys.vectors.column(i);
            let c = a.dot(&b).clamp(-1.0, 1.0);
            // `sqrt(1 - c²)` loses half the digits near c = 1; the norm of
            // the orthogonal residual is the same quantity, computed stably.
            let sin_theta = (b - a * c).norm().min((1.0 - c * c).max(0.0).sqrt());
            let bound = bound_for(&a_sys.values, &b_sys.values, i);
            let swapped_bound = bound_for(&b_sys.values, &a_sys.values, i);
            let pass = match bound {
                None => true,
                Some(b) => b >= 1.0 || sin_theta <= b + CHECK_SLACK,
            };
            AngleBound { index: i + 1, sin_theta, bound, swapped_bound, pass }
        })
        .collect();
    Ok(out)
}

/// The two terms of the eigenvalue deviation bound for a sparsified ODN
/// matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    /// `ε sqrt(n) ρ(L_M) + (Δ - δ) / 2`
    pub value: f64,
    /// `ε sqrt(n) ρ(L_M)`
    pub sparsification_term: f64,
    /// `(Δ - δ) / 2`
    pub centering_term: f64,
    pub rho_laplacian: f64,
    pub delta_max: f64,
    pub delta_min: f64,
}

pub fn theorem1_bound(m: &OdnMatrix, epsilon: f64) -> Result<f64> {
    Ok(theorem1_terms(m, epsilon, DEFAULT_DENSE_LIMIT)?.value)
}

/// Bound terms; `ρ(L_M)` is computed densely up to `dense_limit` and with
/// Lanczos beyond it.
pub fn theorem1_terms(m: &OdnMatrix, epsilon: f64, dense_limit: usize) -> Result<Theorem1Bound> {
    validate_epsilon(epsilon)?;
    let dec = decompose(m);
    let l = dec.laplacian();
    let rho = if l.is_zero() {
        0.0
    } else if l.n() <= dense_limit {
        spectral_norm(l, dense_limit)
    } else {
        super::eigen::eigen_decompose(l, super::Selection::TopK(1), super::EigenMethod::Iterative)?
            .values[0]
    };
    let sparsification_term = epsilon * (m.n() as f64).sqrt() * rho;
    let centering_term = dec.half_spread();
    Ok(Theorem1Bound {
        value: sparsification_term + centering_term,
        sparsification_term,
        centering_term,
        rho_laplacian: rho,
        delta_max: dec.delta_max,
        delta_min: dec.delta_min,
    })
}
