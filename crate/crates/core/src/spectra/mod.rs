//! Eigensolvers and numerical verification of the eigenvalue and
//! eigenvector perturbation bounds.

mod checks;
mod eigen;
mod lanczos;
mod report;

pub use checks::{
    davis_kahan, lemma1_check, lemma2_check, theorem1_bound, theorem1_terms, weyl_check,
    AngleBound, Lemma1Check, Lemma2Check, Theorem1Bound, Verdict, WeylCheck, CHECK_SLACK,
};
pub(crate) use checks::{check_dims, validate_epsilon};
pub use eigen::{
    apply_sign_convention, dense_eigenvalues, eigen_decompose, power_iteration, spectral_norm,
    EigenMethod, EigenSystem, Selection, DEFAULT_DENSE_LIMIT,
};
pub use lanczos::{top_k as lanczos_top_k, Options as LanczosOptions};
pub use report::{spectral_report, EigenPair, Inertia, SpectralChecks, SpectralReport, StageDeviations};
