//! Off-diagonal-nonnegative matrices and their graph decomposition.

mod graph;
mod odn;

pub use graph::{Adjacency, Components, Edge, Laplacian};
pub use odn::{
    center_diagonal, decompose, reconstruct, validate_odn, CooMatrix, LaplacianDecomposition,
    OdnMatrix, SYMMETRY_TOLERANCE,
};
