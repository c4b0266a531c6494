//! Spectral sparsification of symmetric off-diagonal-nonnegative (ODN)
//! matrices.
//!
//! An ODN matrix `M` splits into a graph Laplacian `L_M` and a diagonal.
//! Centering the diagonal at `d = (Δ + δ) / 2`, sparsifying `L_M` by
//! effective-resistance sampling and adding `dI` back yields a sparse ODN
//! matrix `M̂` whose eigenvalues satisfy
//!
//! ```text
//! |λ_i - λ̂_i| <= ε sqrt(n) ρ(L_M) + (Δ - δ) / 2
//! ```
//!
//! whenever the sampled Laplacian is an ε-spectral sparsifier. The
//! [`spectra`] module checks that bound and each inequality it rests on.

pub mod applications;
pub mod error;
pub mod io;
pub mod matrix;
pub mod operator;
pub mod pipeline;
pub mod rng;
pub mod sparsifier;
pub mod spectra;

pub use error::{Error, Result};
pub use matrix::{
    center_diagonal, decompose, reconstruct, validate_odn, Adjacency, CooMatrix, Edge, Laplacian,
    LaplacianDecomposition, OdnMatrix,
};
pub use operator::SymmetricOperator;
pub use pipeline::{run_pipeline, PipelineConfig, PipelineOutput};
pub use sparsifier::{
    effective_resistances, sparsify, sparsify_laplacian, verify_sparsifier, EdgeResistance,
    ResistanceMode, SparsifierOptions, SparsifierResult, SparsifierVerification,
};
pub use spectra::{
    davis_kahan, eigen_decompose, lemma1_check, lemma2_check, spectral_report, theorem1_bound,
    weyl_check, EigenMethod, EigenSystem, Selection, SpectralReport, Verdict,
};
