use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::graph::{Adjacency, Laplacian};
use crate::error::{Error, Result};
use crate::operator::SymmetricOperator;

/// Relative tolerance under which mirrored entries are considered equal and
/// averaged.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Unvalidated square matrix in coordinate form; absent entries are zero.
/// Both triangles are expected (a mirrored pair missing one side is treated
/// as asymmetric unless the present value is zero).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooMatrix {
    pub n: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(n: usize) -> Self {
        Self { n, entries: Vec::new() }
    }

    pub fn push(&mut self, i: usize, j: usize, value: f64) {
        self.entries.push((i, j, value));
    }

    /// Every nonzero of a square dense matrix.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let n = m.nrows();
        let mut coo = Self::new(n);
        for j in 0..n {
            for i in 0..n {
                let v = m[(i, j)];
                if v != 0.0 {
                    coo.push(i, j, v);
                }
            }
        }
        Ok(coo)
    }
}

/// Symmetric real matrix whose off-diagonal entries are all nonnegative.
///
/// Stored as the strict upper triangle (an [`Adjacency`]) plus a dense
/// diagonal. Off-diagonal zeros are never stored, so `stored_pairs` is the
/// number of nonzero off-diagonal pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdnMatrix {
    offdiag: Adjacency,
    diag: Vec<f64>,
}

impl OdnMatrix {
    pub fn new(offdiag: Adjacency, diag: Vec<f64>) -> Result<Self> {
        if offdiag.n() != diag.len() {
            return Err(Error::DimensionMismatch { expected: offdiag.n(), found: diag.len() });
        }
        if diag.is_empty() {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        if let Some(i) = diag.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { i, j: i });
        }
        Ok(Self { offdiag, diag })
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        validate_odn(&CooMatrix::from_dense(m)?)
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &Adjacency {
        &self.offdiag
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else {
            self.offdiag.weight(i, j)
        }
    }

    /// Number of stored `i < j` pairs.
    pub fn stored_pairs(&self) -> usize {
        self.offdiag.edge_count()
    }

    /// Off-diagonal nonzeros counting both triangles.
    pub fn nnz_offdiag(&self) -> usize {
        2 * self.stored_pairs()
    }

    /// Nonzero count with the diagonal treated as dense: `2 * pairs + n`.
    pub fn nnz(&self) -> usize {
        self.nnz_offdiag() + self.n()
    }

    pub fn delta_max(&self) -> f64 {
        self.diag.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn delta_min(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Coordinate list with both triangles expanded, diagonal zeros omitted.
    pub fn to_coo(&self) -> CooMatrix {
        let mut coo = CooMatrix::new(self.n());
        for (i, &v) in self.diag.iter().enumerate() {
            if v != 0.0 {
                coo.push(i, i, v);
            }
        }
        for e in self.offdiag.edges() {
            coo.push(e.i, e.j, e.weight);
            coo.push(e.j, e.i, e.weight);
        }
        coo
    }
}

impl SymmetricOperator for OdnMatrix {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.offdiag.apply(x, y);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += self.diag[i] * x[i];
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = self.offdiag.to_dense();
        for (i, d) in self.diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }
}

/// Checks that `raw` is a symmetric off-diagonal-nonnegative matrix.
///
/// Mirrored entries that differ by at most [`SYMMETRY_TOLERANCE`] relative
/// are averaged. Negative off-diagonal values are reported before asymmetry.
pub fn validate_odn(raw: &CooMatrix) -> Result<OdnMatrix> {
    let n = raw.n;
    if n == 0 {
        return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
    }
    let mut diag: Vec<Option<f64>> = vec![None; n];
    let mut off: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for &(i, j, v) in &raw.entries {
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange { i, j, n });
        }
        if !v.is_finite() {
            return Err(Error::NonFinite { i, j });
        }
        if i == j {
            if diag[i].replace(v).is_some() {
                return Err(Error::DuplicateEntry { i, j });
            }
        } else if off.insert((i, j), v).is_some() {
            return Err(Error::DuplicateEntry { i, j });
        }
    }

    let mut pairs: Vec<(usize, usize)> =
        off.keys().map(|&(i, j)| if i < j { (i, j) } else { (j, i) }).collect();
    pairs.sort_unstable();
    pairs.dedup();

    for &(i, j) in &pairs {
        for (a, b) in [(i, j), (j, i)] {
            if let Some(&v) = off.get(&(a, b)) {
                if v < 0.0 {
                    return Err(Error::NegativeOffDiagonal { i: a, j: b, value: v });
                }
            }
        }
    }

    let mut triples = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let upper = off.get(&(i, j)).copied().unwrap_or(0.0);
        let lower = off.get(&(j, i)).copied().unwrap_or(0.0);
        let delta = (upper - lower).abs();
        if delta > SYMMETRY_TOLERANCE * upper.abs().max(lower.abs()) {
            return Err(Error::Asymmetric { i, j, delta });
        }
        let v = if upper == lower { upper } else { 0.5 * (upper + lower) };
        triples.push((i, j, v));
    }

    let offdiag = Adjacency::new(n, triples)?;
    OdnMatrix::new(offdiag, diag.into_iter().map(|v| v.unwrap_or(0.0)).collect())
}

/// The graph view of an ODN matrix: `A_M`, `D_M`, `L_M = D_M - A_M`, and the
/// diagonal extremes with their midpoint `d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaplacianDecomposition {
    laplacian: Laplacian,
    pub delta_max: f64,
    pub delta_min: f64,
    pub d: f64,
}

impl LaplacianDecomposition {
    pub fn n(&self) -> usize {
        self.laplacian.n()
    }

    pub fn adjacency(&self) -> &Adjacency {
        self.laplacian.adjacency()
    }

    pub fn degrees(&self) -> &[f64] {
        self.laplacian.degrees()
    }

    pub fn laplacian(&self) -> &Laplacian {
        &self.laplacian
    }

    /// `(Δ - δ) / 2`, the distance from `M` to its centered form.
    pub fn half_spread(&self) -> f64 {
        (self.delta_max - self.delta_min) / 2.0
    }
}

pub fn decompose(m: &OdnMatrix) -> LaplacianDecomposition {
    let delta_max = m.delta_max();
    let delta_min = m.delta_min();
    LaplacianDecomposition {
        laplacian: m.offdiag.laplacian(),
        delta_max,
        delta_min,
        d: (delta_max + delta_min) / 2.0,
    }
}

/// Replaces every diagonal entry with the midpoint `d = (Δ + δ) / 2`.
pub fn center_diagonal(m: &OdnMatrix) -> OdnMatrix {
    let d = (m.delta_max() + m.delta_min()) / 2.0;
    OdnMatrix { offdiag: m.offdiag.clone(), diag: vec![d; m.n()] }
}

/// `Â + dI`. The adjacency type already guarantees a valid off-diagonal part.
pub fn reconstruct(a_hat: &Adjacency, d: f64) -> Result<OdnMatrix> {
    OdnMatrix::new(a_hat.clone(), vec![d; a_hat.n()])
}
