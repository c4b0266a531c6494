#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use odn_sparsify::applications::random_probes;
use odn_sparsify::io::REPORT_SCHEMA;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_odn-sparsify"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn assert_schema_valid(value: &serde_json::Value) {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

/// One-factor data `x_j = l_j f + sqrt(1 - l_j²) e_j` with loadings in
/// `[0.6, 0.9]`, so every population correlation `l_i l_j` is at least 0.36.
pub fn positive_factor_csv(dir: &Path, columns: usize, samples: usize, seed: u64) -> PathBuf {
    let draws = random_probes(columns + 1, samples, seed);
    let loadings: Vec<f64> = (0..columns).map(|j| 0.6 + 0.3 * j as f64 / (columns.max(2) - 1) as f64).collect();
    let mut text: String = (0..columns).map(|j| format!("x{j}")).collect::<Vec<_>>().join(",");
    text.push('\n');
    for row in &draws {
        let f = row[columns];
        let line: Vec<String> = loadings
            .iter()
            .enumerate()
            .map(|(j, l)| (l * f + (1.0 - l * l).sqrt() * row[j]).to_string())
            .collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    let path = dir.join(format!("factor_{columns}_{seed}.csv"));
    std::fs::write(&path, text).unwrap();
    path
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

/// Drops the `timings` subtree, the only part of a report allowed to vary
/// between identical runs.
pub fn strip_timings(text: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    serde_json::to_string_pretty(&v).unwrap()
}
