//! The JSON run report shared by every CLI command, and flat CSV exports.
//!
//! Wall-clock measurements live only in [`RunReport::timings`]; everything
//! else is a deterministic function of the inputs and parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::applications::{PcaComparison, QuadformReport};
use crate::error::Result;
use crate::sparsifier::{
    sample_budget, ResistanceChoice, ResistanceMode, SparsifierResult, SparsifierVerification,
};
use crate::spectra::{Lemma1Check, Lemma2Check, SpectralReport, Theorem1Bound, Verdict, WeylCheck};

/// Bumped on any change to the serialized shape of [`RunReport`].
pub const SCHEMA_VERSION: u32 = 1;

/// Draft-07 JSON schema for [`RunReport`].
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Label for the edge budget actually guaranteed by resistance sampling.
pub const BUDGET_LABEL: &str = "O(n log n / eps^2)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    /// File path, if read from disk.
    pub path: Option<String>,
    /// Generator spec, if synthesized.
    pub generator: Option<String>,
    pub n: usize,
    /// Nonzero off-diagonal entries, counting both triangles.
    pub nnz_offdiag: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub epsilon: f64,
    pub constant: f64,
    pub seed: u64,
    pub probes: usize,
    pub dense_limit: usize,
    pub resistances: ResistanceChoice,
    pub components: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifierSummary {
    /// Draws `q = ceil(C n ln n / ε²)`.
    pub samples_drawn: usize,
    pub distinct_edges: usize,
    pub nnz_before: usize,
    pub nnz_after: usize,
    /// `2 q + n`, the largest possible `nnz(M̂)`.
    pub nnz_budget: usize,
    pub budget_label: String,
    pub resistance_mode: Option<ResistanceMode>,
    /// `Σ w_e R_e`; equals `n - components` for exact resistances.
    pub foster_sum: f64,
    pub outside_theorem_regime: bool,
}

impl SparsifierSummary {
    pub fn new(result: &SparsifierResult, nnz_before: usize) -> Self {
        let n = result.l_hat.n();
        let q = sample_budget(n, result.epsilon, result.oversample_constant);
        SparsifierSummary {
            samples_drawn: result.samples_drawn,
            distinct_edges: result.distinct_edges,
            nnz_before,
            nnz_after: 2 * result.distinct_edges + n,
            nnz_budget: 2 * q + n,
            budget_label: BUDGET_LABEL.to_string(),
            resistance_mode: result.resistance_mode,
            foster_sum: result.foster_sum(),
            outside_theorem_regime: result.outside_theorem_regime,
        }
    }
}

/// What `bounds` prints: the predicted deviation without sampling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub n: usize,
    /// Stored off-diagonal pairs `m`.
    pub m: usize,
    pub theorem1: Theorem1Bound,
    pub samples_budget: usize,
    pub nnz_budget: usize,
    pub budget_label: String,
}

impl BoundsSummary {
    pub fn new(n: usize, m: usize, theorem1: Theorem1Bound, epsilon: f64, constant: f64) -> Self {
        let q = sample_budget(n, epsilon, constant);
        BoundsSummary {
            n,
            m,
            theorem1,
            samples_budget: q,
            nnz_budget: 2 * q + n,
            budget_label: BUDGET_LABEL.to_string(),
        }
    }
}

/// Named verdicts plus the overall status.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub verdicts: BTreeMap<String, Verdict>,
}

impl CheckSummary {
    pub fn record(&mut self, name: &str, verdict: Verdict) {
        self.verdicts.insert(name.to_string(), verdict);
    }

    pub fn record_bool(&mut self, name: &str, pass: bool) {
        self.record(name, Verdict::from_bool(pass));
    }

    pub fn has_violation(&self) -> bool {
        self.verdicts.values().any(|v| v.is_violation())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Violation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub inputs: Vec<InputDescriptor>,
    pub parameters: Parameters,
    pub warnings: Vec<String>,
    pub sparsifier: Option<SparsifierSummary>,
    /// The ε-sandwich check on the Laplacian pair.
    pub verification: Option<SparsifierVerification>,
    pub lemma1: Option<Lemma1Check>,
    pub lemma2: Option<Lemma2Check>,
    pub weyl: Option<WeylCheck>,
    pub spectral: Option<SpectralReport>,
    pub pca: Option<PcaComparison>,
    pub quadform: Option<QuadformReport>,
    pub bounds: Option<BoundsSummary>,
    pub checks: CheckSummary,
    pub status: Status,
    /// Seconds per stage. The only nondeterministic part of the report.
    pub timings: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, parameters: Parameters) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            parameters,
            warnings: Vec::new(),
            sparsifier: None,
            verification: None,
            lemma1: None,
            lemma2: None,
            weyl: None,
            spectral: None,
            pca: None,
            quadform: None,
            bounds: None,
            checks: CheckSummary::default(),
            status: Status::Pass,
            timings: BTreeMap::new(),
        }
    }

    /// Sets `status` from the recorded checks.
    pub fn finalize(&mut self) {
        self.status = if self.checks.has_violation() { Status::Violation } else { Status::Pass };
    }

    pub fn has_violation(&self) -> bool {
        self.status == Status::Violation
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// The report with `timings` emptied, for reproducibility comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.timings.clear();
        if let Some(pca) = &mut r.pca {
            pca.solver_timings = Default::default();
        }
        r
    }
}

/// `i,lambda,lambda_hat,deviation,sin_theta,dk_bound`, one row per
/// eigenvalue. An undefined bound is written as `undefined`.
pub fn spectra_csv(report: &SpectralReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "lambda", "lambda_hat", "deviation", "sin_theta", "dk_bound"])?;
    for (p, a) in report.pairs.iter().zip(&report.angles) {
        let bound = a.bound.map_or_else(|| "undefined".to_string(), |b| b.to_string());
        w.write_record([
            p.index.to_string(),
            p.lambda.to_string(),
            p.lambda_hat.to_string(),
            p.deviation.to_string(),
            a.sin_theta.to_string(),
            bound,
        ])?;
    }
    into_string(w)
}

/// `i,variance,variance_hat,gap,bound,verdict`, one row per component.
pub fn pca_csv(pca: &PcaComparison) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["i", "variance", "variance_hat", "gap", "bound", "verdict"])?;
    let bound = pca.per_component_bound + pca.slack_term;
    for v in &pca.variances {
        w.write_record([
            v.index.to_string(),
            v.variance.to_string(),
            v.variance_hat.to_string(),
            v.gap.to_string(),
            bound.to_string(),
            serde_json::to_value(v.verdict)?.as_str().unwrap_or_default().to_string(),
        ])?;
    }
    into_string(w)
}

fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::OdnMatrix;
    use crate::spectra::spectral_report;
    use nalgebra::dmatrix;

    fn params() -> Parameters {
        Parameters {
            epsilon: 0.25,
            constant: 9.0,
            seed: 0,
            probes: 10,
            dense_limit: 4096,
            resistances: ResistanceChoice::Auto,
            components: None,
        }
    }

    #[test]
    fn spectra_csv_marks_undefined_bounds() {
        let m = OdnMatrix::from_dense(&dmatrix![1.0, 0.0; 0.0, 1.0]).unwrap();
        let r = spectral_report(&m, &m, 0.1).unwrap();
        let csv = spectra_csv(&r).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "i,lambda,lambda_hat,deviation,sin_theta,dk_bound");
        assert_eq!(lines.len(), 3);
        // repeated eigenvalue: zero gap
        assert!(lines[1].ends_with(",undefined"));
    }

    #[test]
    fn status_follows_checks() {
        let mut r = RunReport::new("test", params());
        r.checks.record("a", Verdict::Pass);
        r.checks.record("b", Verdict::HypothesisUnmet);
        r.finalize();
        assert_eq!(r.status, Status::Pass);
        r.checks.record_bool("c", false);
        r.finalize();
        assert!(r.has_violation());
    }

    #[test]
    fn timings_are_separable() {
        let mut r = RunReport::new("test", params());
        r.timings.insert("total".into(), 0.5);
        let json = r.without_timings().to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["timings"], serde_json::json!({}));
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
    }
}
