//! Matrix Market `coordinate real` reader and writer.
//!
//! The writer always emits the `symmetric` flavor: the lower triangle
//! (diagonal included, zero diagonal entries omitted), sorted by column and
//! then row, 1-based, with 17 significant digits so that values round-trip
//! exactly.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::{validate_odn, CooMatrix, OdnMatrix};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    General,
}

pub fn read_matrix_market<P: AsRef<Path>>(path: P) -> Result<OdnMatrix> {
    parse_matrix_market(BufReader::new(File::open(path)?))
}

pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<OdnMatrix> {
    let mut lines = reader.lines().enumerate().map(|(k, l)| (k + 1, l));
    let parse_err = |line: usize, reason: &str| Error::Parse { line, reason: reason.to_string() };

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix coordinate real <symmetry>'"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, "only the coordinate format is supported"));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, "field must be real or integer"));
    }
    let symmetry = match tokens[4].as_str() {
        "symmetric" => Symmetry::Symmetric,
        "general" => Symmetry::General,
        _ => return Err(parse_err(1, "symmetry must be symmetric or general")),
    };

    let mut data_lines = lines.filter_map(|(k, l)| match l {
        Ok(s) if s.trim().is_empty() || s.trim_start().starts_with('%') => None,
        other => Some((k, other)),
    });

    let (size_line, size) = data_lines.next().ok_or_else(|| parse_err(2, "missing size line"))?;
    let size = size?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(size_line, "size line must hold three integers"))?;
    if dims.len() != 3 {
        return Err(parse_err(size_line, "size line must hold three integers"));
    }
    let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
    if rows != cols {
        return Err(parse_err(size_line, "matrix must be square"));
    }

    let mut coo = CooMatrix::new(rows);
    let mut seen = HashSet::new();
    let mut count = 0;
    for (line, text) in data_lines {
        let text = text?;
        if count == nnz {
            return Err(parse_err(line, "more entries than declared"));
        }
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(parse_err(line, "entry must be 'row col value'"));
        }
        let i: usize = fields[0].parse().map_err(|_| parse_err(line, "bad row index"))?;
        let j: usize = fields[1].parse().map_err(|_| parse_err(line, "bad column index"))?;
        let v: f64 = fields[2].parse().map_err(|_| parse_err(line, "bad value"))?;
        if i == 0 || j == 0 || i > rows || j > cols {
            return Err(parse_err(line, "index out of range"));
        }
        let (i, j) = (i - 1, j - 1);
        let key = match symmetry {
            Symmetry::Symmetric => (i.max(j), i.min(j)),
            Symmetry::General => (i, j),
        };
        if !seen.insert(key) {
            return Err(Error::DuplicateEntry { i, j });
        }
        coo.push(i, j, v);
        if symmetry == Symmetry::Symmetric && i != j {
            coo.push(j, i, v);
        }
        count += 1;
    }
    if count < nnz {
        return Err(parse_err(size_line, "fewer entries than declared"));
    }
    validate_odn(&coo)
}

pub fn write_matrix_market<W: Write>(m: &OdnMatrix, mut out: W) -> Result<()> {
    let n = m.n();
    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(m.stored_pairs() + n);
    for (i, &v) in m.diag().iter().enumerate() {
        if v != 0.0 {
            entries.push((i, i, v));
        }
    }
    // stored as i < j, written as row j, column i
    entries.extend(m.offdiag().edges().iter().map(|e| (e.j, e.i, e.weight)));
    entries.sort_by_key(|&(row, col, _)| (col, row));

    writeln!(out, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(out, "{n} {n} {}", entries.len())?;
    for (row, col, v) in entries {
        writeln!(out, "{} {} {:.16e}", row + 1, col + 1, v)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_matrix_market_file<P: AsRef<Path>>(m: &OdnMatrix, path: P) -> Result<()> {
    write_matrix_market(m, BufWriter::new(File::create(path)?))
}
