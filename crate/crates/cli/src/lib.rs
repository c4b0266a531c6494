//! Command-line front end: argument types and the four commands.
//!
//! Every command returns an exit code: 0 when all checks pass, 1 on a usage
//! or input error and 2 when a bound is violated.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use odn_sparsify::applications::{correlation_from_data, pca_compare_with, quadform_gap, random_probes};
use odn_sparsify::io::{
    generate_odn, pca_csv, read_csv_data, read_matrix_market, spectra_csv, write_matrix_market_file,
    BoundsSummary, GeneratorSpec, InputDescriptor, Parameters, RunReport, SparsifierSummary,
};
use odn_sparsify::sparsifier::{
    verify_sparsifier_with, ResistanceChoice, ResistanceMode, SparsifierOptions, THEOREM_EPSILON_LIMIT,
};
use odn_sparsify::spectra::{theorem1_terms, Verdict, DEFAULT_DENSE_LIMIT};
use odn_sparsify::{
    decompose, lemma1_check, lemma2_check, run_pipeline, spectral_report, weyl_check, Error, OdnMatrix,
    PipelineConfig, Result,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "ODN_SPARSIFY_THREADS";

/// Probe vectors used for the quadratic-form summary in `sparsify`.
const QUADFORM_PROBES: usize = 4;

#[derive(Debug, Parser)]
#[command(name = "odn-sparsify", version, about = "Spectral sparsification of ODN symmetric matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print stage timings to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    /// Suppress warnings and the summary.
    #[arg(short, long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sparsify a matrix and compare the spectra.
    Sparsify(SparsifyArgs),
    /// Check a candidate sparsified matrix against the original.
    Verify(VerifyArgs),
    /// Approximate PCA on a sparsified correlation matrix.
    PcaDemo(PcaArgs),
    /// Print the predicted deviation bound and edge budget.
    Bounds(BoundsArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sparsify(_) => "sparsify",
            Command::Verify(_) => "verify",
            Command::PcaDemo(_) => "pca-demo",
            Command::Bounds(_) => "bounds",
        }
    }
}

#[derive(Clone, Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Matrix Market file (CSV data for pca-demo).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Synthetic matrix, e.g. `erdos-renyi:n=200,density=0.2,seed=1`.
    #[arg(long = "gen", value_name = "MODEL:PARAMS")]
    pub generator: Option<GeneratorSpec>,
}

#[derive(Clone, Debug, Args)]
pub struct Sampling {
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Oversampling constant C in q = C n ln n / eps^2.
    #[arg(long, default_value_t = 9.0)]
    pub constant: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random probes for the quadratic-form sandwich check.
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub probes: u64,
    /// Largest n handled with dense linear algebra.
    #[arg(long, default_value_t = DEFAULT_DENSE_LIMIT)]
    pub dense_limit: usize,
    #[arg(long, value_enum, default_value_t = ResistanceArg::Auto)]
    pub resistances: ResistanceArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ResistanceArg {
    Auto,
    Exact,
    Approximate,
}

impl From<ResistanceArg> for ResistanceChoice {
    fn from(r: ResistanceArg) -> Self {
        match r {
            ResistanceArg::Auto => ResistanceChoice::Auto,
            ResistanceArg::Exact => ResistanceChoice::Exact,
            ResistanceArg::Approximate => ResistanceChoice::Approximate,
        }
    }
}

impl Sampling {
    pub fn options(&self) -> SparsifierOptions {
        SparsifierOptions {
            epsilon: self.epsilon,
            seed: self.seed,
            constant: self.constant,
            resistances: self.resistances.into(),
            dense_limit: self.dense_limit,
        }
    }

    fn parameters(&self, components: Option<usize>) -> Parameters {
        Parameters {
            epsilon: self.epsilon,
            constant: self.constant,
            seed: self.seed,
            probes: self.probes as usize,
            dense_limit: self.dense_limit,
            resistances: self.resistances.into(),
            components,
        }
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct Outputs {
    /// JSON run report; `-` for stdout.
    #[arg(long)]
    pub out_report: Option<PathBuf>,
    /// Matrix Market file for the sparsified matrix.
    #[arg(long)]
    pub out_matrix: Option<PathBuf>,
    /// Per-index CSV (spectra for sparsify/verify, variances for pca-demo).
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SparsifyArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    /// Original matrix, then candidate: `--input M.mtx --input M_hat.mtx`.
    #[arg(long, num_args = 1, required = true)]
    pub input: Vec<PathBuf>,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Args)]
pub struct PcaArgs {
    #[command(flatten)]
    pub source: Source,
    /// Number of leading components.
    #[arg(long = "components", short = 'p', default_value_t = 3)]
    pub components: usize,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub sampling: Sampling,
    #[command(flatten)]
    pub outputs: Outputs,
}

/// Diagnostic output settings shared by all commands.
#[derive(Clone, Copy, Debug, Default)]
pub struct Verbosity {
    pub verbose: u8,
    pub quiet: bool,
}

/// Parses `ODN_SPARSIFY_THREADS` and sizes the global pool. Invalid values
/// are ignored with a warning.
pub fn configure_threads() {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return };
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // fails only if a pool already exists, which is harmless
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => eprintln!("warning: ignoring {THREADS_ENV}={raw:?}"),
    }
}

pub fn run(cli: &Cli) -> i32 {
    let v = Verbosity { verbose: cli.verbose, quiet: cli.quiet };
    match &cli.command {
        Command::Sparsify(args) => cmd_sparsify(args, v),
        Command::Verify(args) => cmd_verify(args, v),
        Command::PcaDemo(args) => cmd_pca_demo(args, v),
        Command::Bounds(args) => cmd_bounds(args, v),
    }
}

pub fn cmd_sparsify(args: &SparsifyArgs, v: Verbosity) -> i32 {
    finish(sparsify_report(args), &args.outputs, v)
}

pub fn cmd_verify(args: &VerifyArgs, v: Verbosity) -> i32 {
    finish(verify_report(args), &args.outputs, v)
}

pub fn cmd_pca_demo(args: &PcaArgs, v: Verbosity) -> i32 {
    finish(pca_report(args), &args.outputs, v)
}

pub fn cmd_bounds(args: &BoundsArgs, v: Verbosity) -> i32 {
    finish(bounds_report(args), &args.outputs, v)
}

fn finish(result: Result<RunReport>, outputs: &Outputs, v: Verbosity) -> i32 {
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_ERROR;
        }
    };
    if let Err(e) = write_report(&report, outputs) {
        eprintln!("error: {e}");
        return EXIT_ERROR;
    }
    if !v.quiet {
        for w in &report.warnings {
            eprintln!("warning: {w}");
        }
    }
    if v.verbose > 0 {
        for (stage, secs) in &report.timings {
            eprintln!("{stage:>20}: {secs:.6}s");
        }
    }
    // keep stdout parseable when the report goes there
    if !v.quiet {
        if outputs.out_report.as_deref() == Some(Path::new("-")) {
            eprint!("{}", summary(&report));
        } else {
            print!("{}", summary(&report));
        }
    }
    if report.has_violation() {
        EXIT_VIOLATION
    } else {
        EXIT_PASS
    }
}

fn write_report(report: &RunReport, outputs: &Outputs) -> Result<()> {
    match outputs.out_report.as_deref() {
        Some(p) if p == Path::new("-") => print!("{}", report.to_json()?),
        Some(p) => fs::write(p, report.to_json()?)?,
        None => {}
    }
    Ok(())
}

/// Human-readable digest of a report.
pub fn summary(report: &RunReport) -> String {
    let mut lines = Vec::new();
    if let Some(b) = &report.bounds {
        lines.push(format!("n                {}", b.n));
        lines.push(format!("m                {}", b.m));
        lines.push(format!("delta_max        {}", b.theorem1.delta_max));
        lines.push(format!("delta_min        {}", b.theorem1.delta_min));
        lines.push(format!("rho(L_M)         {}", b.theorem1.rho_laplacian));
        lines.push(format!("theorem1_bound   {}", b.theorem1.value));
        lines.push(format!("samples q        {}", b.samples_budget));
        lines.push(format!("nnz budget       {} ({})", b.nnz_budget, b.budget_label));
    }
    if let Some(s) = &report.sparsifier {
        lines.push(format!("nnz              {} -> {} (budget {})", s.nnz_before, s.nnz_after, s.nnz_budget));
    }
    if let Some(s) = &report.spectral {
        lines.push(format!("max |l - l_hat|  {} (bound {})", s.max_deviation, s.bound.value));
    }
    if let Some(p) = &report.pca {
        for var in &p.variances {
            lines.push(format!("component {:<6} {} vs {} (gap {})", var.index, var.variance, var.variance_hat, var.gap));
        }
    }
    for (name, verdict) in &report.checks.verdicts {
        lines.push(format!("check {name:<26} {}", verdict_str(*verdict)));
    }
    lines.push(format!("status           {}", if report.has_violation() { "violation" } else { "pass" }));
    lines.push(String::new());
    lines.join("\n")
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::HypothesisUnmet => "hypothesis-unmet",
    }
}

fn load_matrix(source: &Source) -> Result<(OdnMatrix, InputDescriptor)> {
    let (m, path, generator) = match (&source.input, &source.generator) {
        (Some(path), _) => (read_matrix_market(path)?, Some(path.display().to_string()), None),
        (None, Some(spec)) => (generate_odn(spec)?, None, Some(spec.to_string())),
        (None, None) => return Err(Error::InvalidArgument("one of --input or --gen is required".into())),
    };
    let input = InputDescriptor { path, generator, n: m.n(), nnz_offdiag: m.nnz_offdiag() };
    Ok((m, input))
}

fn regime_warning(report: &mut RunReport, epsilon: f64) {
    if epsilon > THEOREM_EPSILON_LIMIT {
        report.warnings.push(format!(
            "epsilon = {epsilon} exceeds 1/120; the deviation bound is checked but its stated hypothesis does not cover this regime"
        ));
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

pub fn sparsify_report(args: &SparsifyArgs) -> Result<RunReport> {
    let started = Instant::now();
    let s = &args.sampling;
    check_epsilon(s.epsilon)?;
    let (m, input) = load_matrix(&args.source)?;
    let mut report = RunReport::new("sparsify", s.parameters(None));
    report.inputs.push(input);
    regime_warning(&mut report, s.epsilon);

    let config = PipelineConfig { sparsifier: s.options(), probes: s.probes as usize };
    let out = run_pipeline(&m, &config)?;
    report.timings.extend(out.timings.clone());

    let summary = SparsifierSummary::new(&out.sparsifier, m.nnz());
    let checks = &mut report.checks;
    checks.record_bool("sparsifier", out.verification.pass);
    checks.record_bool("edge_budget", summary.nnz_after <= summary.nnz_budget);
    if summary.resistance_mode == Some(ResistanceMode::Exact) {
        let expected = (m.n() - out.decomposition.adjacency().components().count) as f64;
        checks.record_bool("foster", (summary.foster_sum - expected).abs() <= 1e-8);
    }
    if let Some(l1) = &out.lemma1 {
        checks.record("lemma1", l1.verdict);
    }
    if let Some(spec) = &out.spectral {
        checks.record("theorem1", spec.checks.theorem1);
        checks.record("davis_kahan", spec.checks.davis_kahan);
        checks.record_bool("weyl", spec.checks.weyl);
        checks.record_bool("centering_stage", spec.stages.centering_pass);
        checks.record(
            "sparsification_stage",
            Verdict::from_bool(spec.stages.sparsification_pass).under_hypothesis(out.verification.pass),
        );
    } else {
        report.warnings.push(format!(
            "n = {} exceeds the dense limit {}; spectral comparison skipped",
            m.n(),
            s.dense_limit
        ));
    }

    if m.n() <= s.dense_limit {
        let clock = Instant::now();
        let probes = random_probes(m.n(), QUADFORM_PROBES, config.verify_seed().wrapping_add(1));
        let q = quadform_gap(&m, &out.m_hat, &probes)?;
        report.checks.record_bool("quadform", q.all_pass());
        report.quadform = Some(q);
        report.timings.insert("quadform".into(), clock.elapsed().as_secs_f64());
    }

    if let Some(path) = &args.outputs.out_matrix {
        write_matrix_market_file(&out.m_hat, path)?;
    }
    if let (Some(path), Some(spec)) = (&args.outputs.out_csv, &out.spectral) {
        fs::write(path, spectra_csv(spec)?)?;
    }

    report.sparsifier = Some(summary);
    report.verification = Some(out.verification);
    report.lemma1 = out.lemma1;
    report.spectral = out.spectral;
    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    report.finalize();
    Ok(report)
}

pub fn verify_report(args: &VerifyArgs) -> Result<RunReport> {
    let started = Instant::now();
    let s = &args.sampling;
    check_epsilon(s.epsilon)?;
    let [original, candidate] = args.input.as_slice() else {
        return Err(Error::InvalidArgument(format!(
            "verify needs exactly two --input paths, got {}",
            args.input.len()
        )));
    };
    let mut report = RunReport::new("verify", s.parameters(None));
    let mut load = |path: &PathBuf| -> Result<OdnMatrix> {
        let m = read_matrix_market(path)?;
        report.inputs.push(InputDescriptor {
            path: Some(path.display().to_string()),
            generator: None,
            n: m.n(),
            nnz_offdiag: m.nnz_offdiag(),
        });
        Ok(m)
    };
    let m = load(original)?;
    let m_hat = load(candidate)?;
    if m.n() != m_hat.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), found: m_hat.n() });
    }
    regime_warning(&mut report, s.epsilon);

    let l = decompose(&m).laplacian().clone();
    let l_hat = decompose(&m_hat).laplacian().clone();
    let clock = Instant::now();
    let verification =
        verify_sparsifier_with(&l, &l_hat, s.epsilon, s.probes as usize, s.seed, s.dense_limit)?;
    report.timings.insert("verify".into(), clock.elapsed().as_secs_f64());
    let hypothesis = verification.pass;
    report.checks.record_bool("sparsifier", hypothesis);

    if m.n() <= s.dense_limit {
        let clock = Instant::now();
        let lemma1 = lemma1_check(&l, &l_hat, s.epsilon, hypothesis)?;
        let lemma2 = lemma2_check(&l, &l_hat)?;
        let weyl = weyl_check(&m, &m_hat)?;
        let spec = spectral_report(&m, &m_hat, s.epsilon)?.with_hypothesis(hypothesis);
        report.timings.insert("spectral".into(), clock.elapsed().as_secs_f64());

        let checks = &mut report.checks;
        checks.record("lemma1", lemma1.verdict);
        checks.record_bool("lemma2", lemma2.pass);
        checks.record_bool("weyl", weyl.pass);
        checks.record("theorem1", spec.checks.theorem1);
        checks.record("davis_kahan", spec.checks.davis_kahan);
        if let Some(path) = &args.outputs.out_csv {
            fs::write(path, spectra_csv(&spec)?)?;
        }
        report.lemma1 = Some(lemma1);
        report.lemma2 = Some(lemma2);
        report.weyl = Some(weyl);
        report.spectral = Some(spec);
    } else {
        report.warnings.push(format!(
            "n = {} exceeds the dense limit {}; only the sandwich check ran",
            m.n(),
            s.dense_limit
        ));
    }
    if let Some(path) = &args.outputs.out_matrix {
        write_matrix_market_file(&m_hat, path)?;
    }
    report.verification = Some(verification);
    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    report.finalize();
    Ok(report)
}

pub fn pca_report(args: &PcaArgs) -> Result<RunReport> {
    let started = Instant::now();
    let s = &args.sampling;
    check_epsilon(s.epsilon)?;
    let mut report = RunReport::new("pca-demo", s.parameters(Some(args.components)));
    let m = match (&args.source.input, &args.source.generator) {
        (Some(path), _) => {
            let table = read_csv_data(path)?;
            if table.values.ncols() < 2 {
                return Err(Error::InvalidArgument("need at least 2 data columns".into()));
            }
            match correlation_from_data(&table.values) {
                Ok(m) => {
                    report.inputs.push(InputDescriptor {
                        path: Some(path.display().to_string()),
                        generator: None,
                        n: m.n(),
                        nnz_offdiag: m.nnz_offdiag(),
                    });
                    m
                }
                Err(Error::NotOdn(pairs)) => {
                    // a violation, not an input error: the matrix is outside
                    // the class the bounds cover
                    report.inputs.push(InputDescriptor {
                        path: Some(path.display().to_string()),
                        generator: None,
                        n: table.values.ncols(),
                        nnz_offdiag: 0,
                    });
                    for (i, j, r) in &pairs {
                        let name = |k: usize| table.columns.get(k).cloned().unwrap_or_else(|| k.to_string());
                        report.warnings.push(format!(
                            "negative correlation {r:.6} between columns {} and {}",
                            name(*i),
                            name(*j)
                        ));
                    }
                    report.checks.record_bool("odn_input", false);
                    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
                    report.finalize();
                    return Ok(report);
                }
                Err(e) => return Err(e),
            }
        }
        _ => {
            let (m, input) = load_matrix(&args.source)?;
            report.inputs.push(input);
            m
        }
    };
    regime_warning(&mut report, s.epsilon);
    report.checks.record_bool("odn_input", true);

    let pca = pca_compare_with(&m, args.components, &s.options(), s.probes as usize)?;
    report.checks.record_bool("sparsifier", pca.sparsifier_verified);
    let worst = pca.variances.iter().map(|v| v.verdict).fold(Verdict::Pass, |acc, v| match (acc, v) {
        (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
        (Verdict::HypothesisUnmet, _) | (_, Verdict::HypothesisUnmet) => Verdict::HypothesisUnmet,
        _ => Verdict::Pass,
    });
    report.checks.record("pca_components", worst);
    report.checks.record("pca_cumulative", pca.cumulative.verdict);
    if !pca.sparse_converged {
        report.warnings.push("iterative eigensolver did not converge on every component".into());
    }
    if let Some(path) = &args.outputs.out_csv {
        fs::write(path, pca_csv(&pca)?)?;
    }
    report.timings.insert("pca_dense_solve".into(), pca.solver_timings.dense_seconds);
    report.timings.insert("pca_sparse_solve".into(), pca.solver_timings.sparse_seconds);
    report.pca = Some(pca);
    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    report.finalize();
    Ok(report)
}

pub fn bounds_report(args: &BoundsArgs) -> Result<RunReport> {
    let started = Instant::now();
    let s = &args.sampling;
    check_epsilon(s.epsilon)?;
    if !(s.constant.is_finite() && s.constant > 0.0) {
        return Err(Error::InvalidConstant(s.constant));
    }
    let (m, input) = load_matrix(&args.source)?;
    let mut report = RunReport::new("bounds", s.parameters(None));
    report.inputs.push(input);
    regime_warning(&mut report, s.epsilon);
    let terms = theorem1_terms(&m, s.epsilon, s.dense_limit)?;
    report.bounds = Some(BoundsSummary::new(m.n(), m.stored_pairs(), terms, s.epsilon, s.constant));
    report.timings.insert("total".into(), started.elapsed().as_secs_f64());
    report.finalize();
    Ok(report)
}
