use rand::Rng;
use serde::{Deserialize, Serialize};

use super::resistance::{effective_resistances, foster_sum, EdgeResistance, ResistanceMode};
use crate::error::{Error, Result};
use crate::matrix::{Adjacency, Edge, Laplacian, LaplacianDecomposition};
use crate::rng::seeded;
use crate::spectra::{validate_epsilon, DEFAULT_DENSE_LIMIT};

/// Default oversampling constant `C` in `q = C n ln n / ε²`.
pub const DEFAULT_OVERSAMPLING: f64 = 9.0;

/// Largest ε covered by the existence guarantee the bound was stated under.
pub const THEOREM_EPSILON_LIMIT: f64 = 1.0 / 120.0;

/// How resistances are obtained for the sampling distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResistanceChoice {
    /// Exact up to the dense limit, sketched beyond it.
    #[default]
    Auto,
    Exact,
    Approximate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifierOptions {
    pub epsilon: f64,
    pub seed: u64,
    pub constant: f64,
    pub resistances: ResistanceChoice,
    pub dense_limit: usize,
}

impl SparsifierOptions {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self {
            epsilon,
            seed,
            constant: DEFAULT_OVERSAMPLING,
            resistances: ResistanceChoice::Auto,
            dense_limit: DEFAULT_DENSE_LIMIT,
        }
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = constant;
        self
    }

    fn resistance_mode(&self, n: usize) -> ResistanceMode {
        let approx = ResistanceMode::Approximate { seed: self.seed ^ 0x5eed_5eed_5eed_5eed };
        match self.resistances {
            ResistanceChoice::Exact => ResistanceMode::Exact,
            ResistanceChoice::Approximate => approx,
            ResistanceChoice::Auto if n <= self.dense_limit => ResistanceMode::Exact,
            ResistanceChoice::Auto => approx,
        }
    }
}

/// Number of times an input edge was drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampledEdge {
    pub i: usize,
    pub j: usize,
    pub count: u64,
}

/// A sampled spectral sparsifier `L̂ = D̂ - Â` of an input Laplacian.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsifierResult {
    pub l_hat: Laplacian,
    pub epsilon: f64,
    pub seed: u64,
    pub oversample_constant: f64,
    /// Total draws `q`.
    pub samples_drawn: usize,
    pub distinct_edges: usize,
    /// Multiset of draws, one entry per distinct edge in edge order.
    pub sampled: Vec<SampledEdge>,
    pub resistances: Vec<EdgeResistance>,
    pub resistance_mode: Option<ResistanceMode>,
    /// ε exceeds [`THEOREM_EPSILON_LIMIT`].
    pub outside_theorem_regime: bool,
}

impl SparsifierResult {
    pub fn a_hat(&self) -> &Adjacency {
        self.l_hat.adjacency()
    }

    pub fn foster_sum(&self) -> f64 {
        foster_sum(&self.resistances)
    }
}

/// `q = ceil(C n ln(max(n, 2)) / ε²)`.
pub fn sample_budget(n: usize, epsilon: f64, constant: f64) -> usize {
    (constant * n as f64 * (n.max(2) as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

pub fn sparsify_laplacian(
    decomp: &LaplacianDecomposition,
    epsilon: f64,
    seed: u64,
    constant: f64,
) -> Result<SparsifierResult> {
    sparsify(decomp.laplacian(), &SparsifierOptions::new(epsilon, seed).with_constant(constant))
}

/// Importance-samples edges with probability proportional to leverage
/// `w_e R_e`, drawing `q` times with replacement; each draw of `e` adds
/// `w_e / (q p_e)` to `Â_e`.
pub fn sparsify(l: &Laplacian, opts: &SparsifierOptions) -> Result<SparsifierResult> {
    validate_epsilon(opts.epsilon)?;
    if !(opts.constant.is_finite() && opts.constant > 0.0) {
        return Err(Error::InvalidConstant(opts.constant));
    }
    let n = l.n();
    let mut result = SparsifierResult {
        l_hat: Adjacency::empty(n).laplacian(),
        epsilon: opts.epsilon,
        seed: opts.seed,
        oversample_constant: opts.constant,
        samples_drawn: 0,
        distinct_edges: 0,
        sampled: Vec::new(),
        resistances: Vec::new(),
        resistance_mode: None,
        outside_theorem_regime: opts.epsilon > THEOREM_EPSILON_LIMIT,
    };
    if l.is_zero() {
        return Ok(result);
    }

    let mode = opts.resistance_mode(n);
    let resistances = effective_resistances(l, mode, opts.dense_limit)?;
    let q = sample_budget(n, opts.epsilon, opts.constant);

    let mut cdf = Vec::with_capacity(resistances.len());
    let mut acc = 0.0;
    for r in &resistances {
        acc += r.probability;
        cdf.push(acc);
    }
    let last = cdf.len() - 1;
    // pin the top of the CDF so every u in [0, 1) lands on an edge
    cdf[last] = f64::INFINITY;

    let mut counts = vec![0u64; resistances.len()];
    let mut rng = seeded(opts.seed);
    for _ in 0..q {
        let u: f64 = rng.random();
        let idx = cdf.partition_point(|&c| c <= u).min(last);
        counts[idx] += 1;
    }

    let qf = q as f64;
    let mut edges = Vec::new();
    let mut sampled = Vec::new();
    for (r, &c) in resistances.iter().zip(&counts) {
        if c == 0 {
            continue;
        }
        let weight = (c as f64 / qf) * r.weight / r.probability;
        edges.push(Edge { i: r.i, j: r.j, weight });
        sampled.push(SampledEdge { i: r.i, j: r.j, count: c });
    }

    result.distinct_edges = edges.len();
    result.l_hat = Adjacency::from_sorted_unchecked(n, edges).laplacian();
    result.samples_drawn = q;
    result.sampled = sampled;
    result.resistances = resistances;
    result.resistance_mode = Some(mode);
    Ok(result)
}
