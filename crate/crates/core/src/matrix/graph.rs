//! Weighted undirected graphs in edge-list form and their Laplacians.

use nalgebra::DMatrix;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::SymmetricOperator;

/// Undirected weighted edge with `i < j` and a strictly positive weight.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
}

/// Symmetric nonnegative matrix with zero diagonal, stored as its strict
/// upper triangle. Edges are sorted by `(i, j)` and unique.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjacency {
    n: usize,
    edges: Vec<Edge>,
}

impl Adjacency {
    /// Builds an adjacency from `(i, j, w)` triples given in either orientation.
    /// Zero weights are dropped.
    pub fn new<I>(n: usize, triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut edges = Vec::new();
        for (a, b, w) in triples {
            if a >= n || b >= n {
                return Err(Error::IndexOutOfRange { i: a, j: b, n });
            }
            if a == b {
                return Err(Error::InvalidArgument(format!(
                    "adjacency entry ({a}, {b}) lies on the diagonal"
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite { i: a, j: b });
            }
            if w < 0.0 {
                return Err(Error::NegativeOffDiagonal { i: a, j: b, value: w });
            }
            if w == 0.0 {
                continue;
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            edges.push(Edge { i, j, weight: w });
        }
        edges.sort_by_key(|e| (e.i, e.j));
        if let Some(w) = edges.windows(2).find(|w| (w[0].i, w[0].j) == (w[1].i, w[1].j)) {
            return Err(Error::DuplicateEntry { i: w[0].i, j: w[0].j });
        }
        Ok(Self { n, edges })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    /// Caller guarantees the edges are sorted, unique, positive and in range.
    pub(crate) fn from_sorted_unchecked(n: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| (w[0].i, w[0].j) < (w[1].i, w[1].j)));
        Self { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Weight of `(i, j)`; zero when absent or on the diagonal.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.edges
            .binary_search_by_key(&(i, j), |e| (e.i, e.j))
            .map(|k| self.edges[k].weight)
            .unwrap_or(0.0)
    }

    /// Weighted degrees `sum_{j != i} w_ij`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for e in &self.edges {
            deg[e.i] += e.weight;
            deg[e.j] += e.weight;
        }
        deg
    }

    pub fn laplacian(&self) -> Laplacian {
        Laplacian::new(self.clone())
    }

    /// Connected components of the graph (isolated vertices are singletons).
    pub fn components(&self) -> Components {
        let mut uf = UnionFind::<usize>::new(self.n);
        for e in &self.edges {
            uf.union(e.i, e.j);
        }
        let roots = uf.into_labeling();
        let mut relabel = vec![usize::MAX; self.n];
        let mut labels = vec![0; self.n];
        let mut count = 0;
        for (v, &r) in roots.iter().enumerate() {
            if relabel[r] == usize::MAX {
                relabel[r] = count;
                count += 1;
            }
            labels[v] = relabel[r];
        }
        Components { labels, count }
    }
}

impl SymmetricOperator for Adjacency {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for e in &self.edges {
            y[e.i] += e.weight * x[e.j];
            y[e.j] += e.weight * x[e.i];
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            m[(e.i, e.j)] = e.weight;
            m[(e.j, e.i)] = e.weight;
        }
        m
    }
}

/// Vertex partition into connected components, labelled in order of first
/// appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub labels: Vec<usize>,
    pub count: usize,
}

impl Components {
    /// Vertex lists per component, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.labels.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    /// Subtracts the per-component mean from `x`, projecting it off the
    /// Laplacian kernel.
    pub fn project_off_kernel(&self, x: &mut [f64]) {
        let mut sums = vec![0.0; self.count];
        let mut sizes = vec![0usize; self.count];
        for (v, &c) in self.labels.iter().enumerate() {
            sums[c] += x[v];
            sizes[c] += 1;
        }
        for (v, &c) in self.labels.iter().enumerate() {
            x[v] -= sums[c] / sizes[c] as f64;
        }
    }
}

/// Graph Laplacian `L = D - A`, kept as the adjacency plus degree vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laplacian {
    adjacency: Adjacency,
    degrees: Vec<f64>,
}

impl Laplacian {
    pub fn new(adjacency: Adjacency) -> Self {
        let degrees = adjacency.degrees();
        Self { adjacency, degrees }
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.adjacency.n
    }

    pub fn is_zero(&self) -> bool {
        self.adjacency.is_empty()
    }

    /// `x^T L x = sum_e w_e (x_i - x_j)^2`, which is nonnegative by
    /// construction.
    pub fn energy(&self, x: &[f64]) -> f64 {
        self.adjacency
            .edges
            .iter()
            .map(|e| {
                let d = x[e.i] - x[e.j];
                e.weight * d * d
            })
            .sum()
    }

    /// `L` scaled by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let adj = Adjacency::new(
            self.n(),
            self.adjacency.edges.iter().map(|e| (e.i, e.j, e.weight * factor)),
        )?;
        Ok(Self::new(adj))
    }
}

impl SymmetricOperator for Laplacian {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.degrees[i] * x[i];
        }
        for e in &self.adjacency.edges {
            y[e.i] -= e.weight * x[e.j];
            y[e.j] -= e.weight * x[e.i];
        }
    }

    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = -self.adjacency.to_dense();
        for (i, d) in self.degrees.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.energy(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_orientation_and_drops_zeros() {
        let a = Adjacency::new(3, [(2, 0, 1.5), (1, 2, 0.0), (0, 1, 2.0)]).unwrap();
        assert_eq!(a.edge_count(), 2);
        assert_eq!(a.edges()[0], Edge { i: 0, j: 1, weight: 2.0 });
        assert_eq!(a.weight(2, 0), 1.5);
        assert_eq!(a.weight(1, 2), 0.0);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(matches!(
            Adjacency::new(2, [(0, 1, -1.0)]),
            Err(Error::NegativeOffDiagonal { .. })
        ));
        assert!(matches!(
            Adjacency::new(2, [(0, 1, 1.0), (1, 0, 1.0)]),
            Err(Error::DuplicateEntry { i: 0, j: 1 })
        ));
        assert!(matches!(Adjacency::new(2, [(0, 2, 1.0)]), Err(Error::IndexOutOfRange { .. })));
        assert!(Adjacency::new(2, [(1, 1, 1.0)]).is_err());
    }

    #[test]
    fn components_of_disconnected_graph() {
        let a = Adjacency::new(5, [(0, 1, 1.0), (3, 4, 1.0)]).unwrap();
        let c = a.components();
        assert_eq!(c.count, 3);
        assert_eq!(c.members(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        let mut x = vec![1.0, 3.0, 7.0, -1.0, 1.0];
        c.project_off_kernel(&mut x);
        assert_eq!(x, vec![-1.0, 1.0, 0.0, -1.0, 1.0]);
    }

    #[test]
    fn laplacian_apply_matches_dense() {
        let a = Adjacency::new(4, [(0, 1, 1.0), (1, 2, 2.0), (0, 3, 0.5)]).unwrap();
        let l = a.laplacian();
        let dense = l.to_dense();
        let x = [1.0, -2.0, 0.5, 3.0];
        let mut y = [0.0; 4];
        l.apply(&x, &mut y);
        let expect = &dense * nalgebra::DVector::from_column_slice(&x);
        for i in 0..4 {
            assert!((y[i] - expect[i]).abs() < 1e-14);
        }
        assert!((l.energy(&x) - l.to_dense().quadratic_form(&x)).abs() < 1e-12);
        for row in dense.row_iter() {
            assert_eq!(row.sum(), 0.0);
        }
    }
}
