use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Numeric CSV table: one sample per row, named columns.
#[derive(Clone, Debug, PartialEq)]
pub struct DataTable {
    pub columns: Vec<String>,
    /// `samples x columns`
    pub values: DMatrix<f64>,
}

pub fn read_csv_data<P: AsRef<Path>>(path: P) -> Result<DataTable> {
    parse_csv_data(std::fs::File::open(path)?)
}

/// Parses a CSV with a header row. Every field must parse as `f64`.
pub fn parse_csv_data<R: Read>(reader: R) -> Result<DataTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let columns: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut values = Vec::new();
    let mut rows = 0;
    for record in rdr.records() {
        let record = record?;
        // header is line 1
        let line = record.position().map_or(rows + 2, |p| p.line() as usize);
        if record.len() != columns.len() {
            return Err(Error::Parse { line, reason: format!("expected {} fields", columns.len()) });
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse { line, reason: format!("not a number: {field:?}") })?;
            values.push(v);
        }
        rows += 1;
    }
    Ok(DataTable { values: DMatrix::from_row_slice(rows, columns.len(), &values), columns })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rows_as_samples() {
        let t = parse_csv_data("a,b\n1,2\n3, 4.5\n".as_bytes()).unwrap();
        assert_eq!(t.columns, vec!["a", "b"]);
        assert_eq!(t.values.shape(), (2, 2));
        assert_eq!(t.values[(1, 1)], 4.5);
    }

    #[test]
    fn rejects_non_numeric() {
        let err = parse_csv_data("a,b\n1,2\n3,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }
}
