//! validate → decompose → center → sparsify → reconstruct → verify → compare.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::error::Result;
use crate::matrix::{center_diagonal, decompose, reconstruct, LaplacianDecomposition, OdnMatrix};
use crate::sparsifier::{sparsify, verify_sparsifier_with, SparsifierOptions, SparsifierResult, SparsifierVerification};
use crate::spectra::{lemma1_check, spectral_report, validate_epsilon, Lemma1Check, SpectralReport};

/// Seed offset for verification probes, so they are independent of the
/// sampling stream.
const VERIFY_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub sparsifier: SparsifierOptions,
    pub probes: usize,
}

impl PipelineConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        Self { sparsifier: SparsifierOptions::new(epsilon, seed), probes: 1000 }
    }

    pub fn verify_seed(&self) -> u64 {
        self.sparsifier.seed.wrapping_add(VERIFY_SEED_OFFSET)
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub decomposition: LaplacianDecomposition,
    pub centered: OdnMatrix,
    pub sparsifier: SparsifierResult,
    pub m_hat: OdnMatrix,
    pub verification: SparsifierVerification,
    /// Dense comparison of `M` and `M̂`; `None` above the dense limit.
    pub spectral: Option<SpectralReport>,
    /// `None` above the dense limit.
    pub lemma1: Option<Lemma1Check>,
    /// Seconds per stage.
    pub timings: BTreeMap<String, f64>,
}

impl PipelineOutput {
    pub fn hypothesis_met(&self) -> bool {
        self.verification.pass
    }
}

/// Runs the full sparsification pipeline on an already validated `M`.
///
/// Bound checks are reported relative to the sparsifier verification: when
/// the sampled Laplacian fails the ε-sandwich, violated bounds are marked
/// hypothesis-unmet rather than failed.
pub fn run_pipeline(m: &OdnMatrix, config: &PipelineConfig) -> Result<PipelineOutput> {
    let opts = &config.sparsifier;
    validate_epsilon(opts.epsilon)?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    let decomposition = decompose(m);
    let centered = center_diagonal(m);
    lap("decompose", &mut timings);

    let sparsifier = sparsify(decomposition.laplacian(), opts)?;
    lap("sparsify", &mut timings);

    let m_hat = reconstruct(sparsifier.a_hat(), decomposition.d)?;
    lap("reconstruct", &mut timings);

    let verification = verify_sparsifier_with(
        decomposition.laplacian(),
        &sparsifier.l_hat,
        opts.epsilon,
        config.probes,
        config.verify_seed(),
        opts.dense_limit,
    )?;
    lap("verify", &mut timings);

    let (spectral, lemma1) = if m.n() <= opts.dense_limit {
        let report = spectral_report(m, &m_hat, opts.epsilon)?.with_hypothesis(verification.pass);
        let lemma1 = lemma1_check(decomposition.laplacian(), &sparsifier.l_hat, opts.epsilon, verification.pass)?;
        (Some(report), Some(lemma1))
    } else {
        (None, None)
    };
    lap("spectral", &mut timings);

    Ok(PipelineOutput { decomposition, centered, sparsifier, m_hat, verification, spectral, lemma1, timings })
}
