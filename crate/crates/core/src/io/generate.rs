//! Seeded generators for synthetic ODN matrices.
//!
//! Specs have the textual form `model:key=value,...`, e.g.
//! `erdos-renyi:n=200,density=0.2,seed=42` or `grid:rows=10,cols=10,diag_lo=-1,diag_hi=1`.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `n` | dimension (not grid) | required |
//! | `density` | edge probability (erdos-renyi) | required |
//! | `rows`, `cols` | grid shape | `cols = rows` |
//! | `rho` | off-diagonal value (equicorrelation) | `0.5` |
//! | `weight` | constant edge weight | uniform on `(0, 1]` |
//! | `diag` | constant diagonal | `1` |
//! | `diag_lo`, `diag_hi` | uniform diagonal on `[lo, hi)` | |
//! | `seed` | generator seed | `0` |

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{Adjacency, OdnMatrix};
use crate::rng::seeded;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    ErdosRenyi { n: usize, density: f64 },
    Complete { n: usize },
    Path { n: usize },
    Grid { rows: usize, cols: usize },
    Equicorrelation { n: usize, rho: f64 },
}

impl Model {
    pub fn n(&self) -> usize {
        match *self {
            Model::ErdosRenyi { n, .. }
            | Model::Complete { n }
            | Model::Path { n }
            | Model::Equicorrelation { n, .. } => n,
            Model::Grid { rows, cols } => rows * cols,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    /// Uniform on `(0, 1]`.
    Uniform,
    Constant(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DiagSpec {
    Constant(f64),
    /// Uniform on `[lo, hi)`.
    Uniform(f64, f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub model: Model,
    pub weights: WeightSpec,
    pub diag: DiagSpec,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(model: Model) -> Self {
        Self { model, weights: WeightSpec::Uniform, diag: DiagSpec::Constant(1.0), seed: 0 }
    }

    pub fn weights(mut self, weights: WeightSpec) -> Self {
        self.weights = weights;
        self
    }

    pub fn diag(mut self, diag: DiagSpec) -> Self {
        self.diag = diag;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if self.model.n() == 0 {
            return bad("dimension must be at least 1");
        }
        match self.model {
            Model::ErdosRenyi { density, .. } if !(0.0..=1.0).contains(&density) => {
                return bad("density must lie in [0, 1]")
            }
            Model::Equicorrelation { rho, .. } if !(0.0..=1.0).contains(&rho) => {
                return bad("rho must lie in [0, 1]")
            }
            _ => {}
        }
        if let WeightSpec::Constant(w) = self.weights {
            if !(w.is_finite() && w > 0.0) {
                return bad("weight must be positive and finite");
            }
        }
        match self.diag {
            DiagSpec::Constant(c) if !c.is_finite() => bad("diag must be finite"),
            DiagSpec::Uniform(lo, hi) if !(lo.is_finite() && hi.is_finite() && lo < hi) => {
                bad("diag_lo must be below diag_hi")
            }
            _ => Ok(()),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::InvalidSpec(m);
        let (model, params) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = std::collections::BTreeMap::new();
        for part in params.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return Err(bad(format!("repeated key {k:?}")));
            }
        }
        let mut take = |key: &str| kv.remove(key);
        fn num<T: FromStr>(key: &str, v: Option<String>) -> Result<Option<T>> {
            v.map(|s| s.parse::<T>().map_err(|_| Error::InvalidSpec(format!("bad value for {key}: {s:?}"))))
                .transpose()
        }
        let need = |key: &str, v: Option<usize>| v.ok_or_else(|| Error::InvalidSpec(format!("missing {key}")));

        let n: Option<usize> = num("n", take("n"))?;
        let model = match model.trim() {
            "erdos-renyi" | "er" => Model::ErdosRenyi {
                n: need("n", n)?,
                density: num("density", take("density"))?
                    .ok_or_else(|| bad("missing density".into()))?,
            },
            "complete" => Model::Complete { n: need("n", n)? },
            "path" => Model::Path { n: need("n", n)? },
            "grid" => {
                let rows = need("rows", num("rows", take("rows"))?)?;
                let cols = num("cols", take("cols"))?.unwrap_or(rows);
                Model::Grid { rows, cols }
            }
            "equicorrelation" => Model::Equicorrelation {
                n: need("n", n)?,
                rho: num("rho", take("rho"))?.unwrap_or(0.5),
            },
            other => return Err(bad(format!("unknown model {other:?}"))),
        };
        let weights = match num::<f64>("weight", take("weight"))? {
            Some(w) => WeightSpec::Constant(w),
            None => WeightSpec::Uniform,
        };
        let diag = match (
            num::<f64>("diag", take("diag"))?,
            num::<f64>("diag_lo", take("diag_lo"))?,
            num::<f64>("diag_hi", take("diag_hi"))?,
        ) {
            (Some(c), None, None) => DiagSpec::Constant(c),
            (None, Some(lo), Some(hi)) => DiagSpec::Uniform(lo, hi),
            (None, None, None) => DiagSpec::Constant(1.0),
            _ => return Err(bad("use either diag or both diag_lo and diag_hi".into())),
        };
        let seed = num("seed", take("seed"))?.unwrap_or(0);
        if let Some(k) = kv.keys().next() {
            return Err(bad(format!("unknown key {k:?}")));
        }
        let spec = GeneratorSpec { model, weights, diag, seed };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.model {
            Model::ErdosRenyi { n, density } => write!(f, "erdos-renyi:n={n},density={density}")?,
            Model::Complete { n } => write!(f, "complete:n={n}")?,
            Model::Path { n } => write!(f, "path:n={n}")?,
            Model::Grid { rows, cols } => write!(f, "grid:rows={rows},cols={cols}")?,
            Model::Equicorrelation { n, rho } => write!(f, "equicorrelation:n={n},rho={rho}")?,
        }
        if let WeightSpec::Constant(w) = self.weights {
            write!(f, ",weight={w}")?;
        }
        match self.diag {
            DiagSpec::Constant(c) => write!(f, ",diag={c}")?,
            DiagSpec::Uniform(lo, hi) => write!(f, ",diag_lo={lo},diag_hi={hi}")?,
        }
        write!(f, ",seed={}", self.seed)
    }
}

/// Builds the matrix described by `spec`. Edges are visited in `(i, j)`
/// order and the diagonal is drawn last, so output is a pure function of
/// the spec.
pub fn generate_odn(spec: &GeneratorSpec) -> Result<OdnMatrix> {
    spec.validate()?;
    let mut rng = seeded(spec.seed);
    let n = spec.model.n();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut fixed_weight = None;
    match spec.model {
        Model::ErdosRenyi { density, .. } => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random::<f64>() < density {
                        pairs.push((i, j));
                    }
                }
            }
        }
        Model::Complete { .. } => {
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
        }
        Model::Path { .. } => pairs.extend((1..n).map(|i| (i - 1, i))),
        Model::Grid { rows, cols } => {
            let id = |r: usize, c: usize| r * cols + c;
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        pairs.push((id(r, c), id(r, c + 1)));
                    }
                    if r + 1 < rows {
                        pairs.push((id(r, c), id(r + 1, c)));
                    }
                }
            }
            pairs.sort_unstable();
        }
        Model::Equicorrelation { rho, .. } => {
            fixed_weight = Some(rho);
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
        }
    }

    let mut triples = Vec::with_capacity(pairs.len());
    for (i, j) in pairs {
        let w = match (fixed_weight, spec.weights) {
            (Some(w), _) | (None, WeightSpec::Constant(w)) => w,
            // (0, 1]
            (None, WeightSpec::Uniform) => 1.0 - rng.random::<f64>(),
        };
        triples.push((i, j, w));
    }
    let diag = match spec.diag {
        DiagSpec::Constant(c) => vec![c; n],
        DiagSpec::Uniform(lo, hi) => (0..n).map(|_| rng.random_range(lo..hi)).collect(),
    };
    OdnMatrix::new(Adjacency::new(n, triples)?, diag)
}
