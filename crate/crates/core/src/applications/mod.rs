//! Downstream uses of a sparsified ODN matrix: certified quadratic-form
//! gaps and approximate PCA on correlation matrices.

mod pca;
mod quadform;

pub use pca::{
    correlation_from_data, pca_compare, pca_compare_with, CumulativeVariance, PcaComparison,
    SolverTimings, VariancePair,
};
pub use quadform::{quadform_gap, random_probes, QuadformRecord, QuadformReport};
