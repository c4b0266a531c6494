//! File formats, synthetic matrix generators and run reports.

mod data;
mod generate;
mod mtx;
mod report;

pub use data::{parse_csv_data, read_csv_data, DataTable};
pub use generate::{generate_odn, DiagSpec, GeneratorSpec, Model, WeightSpec};
pub use mtx::{parse_matrix_market, read_matrix_market, write_matrix_market, write_matrix_market_file};
pub use report::{
    pca_csv, spectra_csv, BoundsSummary, CheckSummary, InputDescriptor, Parameters, RunReport,
    SparsifierSummary, Status, BUDGET_LABEL, REPORT_SCHEMA, SCHEMA_VERSION,
};
