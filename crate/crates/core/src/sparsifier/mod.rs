//! Spectral sparsification of graph Laplacians by effective-resistance
//! importance sampling.

mod resistance;
mod sampling;
mod verify;

pub use resistance::{
    effective_resistances, foster_sum, sketch_rows, solve_laplacian, EdgeResistance, ResistanceMode,
    PINV_CUTOFF, SKETCH_DISTORTION,
};
pub use sampling::{
    sample_budget, sparsify, sparsify_laplacian, ResistanceChoice, SampledEdge, SparsifierOptions,
    SparsifierResult, DEFAULT_OVERSAMPLING, THEOREM_EPSILON_LIMIT,
};
pub use verify::{generalized_extremes, verify_sparsifier, verify_sparsifier_with, SparsifierVerification};
