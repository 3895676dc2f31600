//! Matrix Market coordinate files for Hermitian operators.
//!
//! Reads `real` or `complex` fields with `general`, `symmetric` or
//! `hermitian` symmetry. Writes `complex hermitian` (lower triangle).

use std::io::{BufRead, BufReader, Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;

#[derive(Clone, Copy, PartialEq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

pub fn read_matrix_market<R: Read>(reader: R) -> Result<HermitianOperator> {
    let mut lines = BufReader::new(reader).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let header = header?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" || words[2] != "coordinate" {
        return Err(parse_err(1, "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'"));
    }
    let complex = match words[3].as_str() {
        "real" | "integer" => false,
        "complex" => true,
        other => return Err(parse_err(1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(1, format!("unsupported symmetry '{other}'"))),
    };

    let mut size: Option<(usize, usize)> = None;
    let mut trip = Vec::new();
    let mut expected = 0usize;
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let num = |k: usize| -> Result<f64> {
            fields
                .get(k)
                .ok_or_else(|| parse_err(lineno, "missing field"))?
                .parse::<f64>()
                .map_err(|e| parse_err(lineno, e))
        };
        let index = |k: usize| -> Result<usize> {
            fields
                .get(k)
                .ok_or_else(|| parse_err(lineno, "missing field"))?
                .parse::<usize>()
                .map_err(|e| parse_err(lineno, e))
        };
        let Some((rows, _)) = size else {
            let (r, c, nnz) = (index(0)?, index(1)?, index(2)?);
            if r != c {
                return Err(Error::InvalidOperator(format!("matrix is {r}x{c}, not square")));
            }
            size = Some((r, c));
            expected = nnz;
            trip.try_reserve(2 * nnz).map_err(|_| Error::OutOfMemory { size: nnz })?;
            continue;
        };
        let (r, c) = (index(0)?, index(1)?);
        if r == 0 || c == 0 || r > rows || c > rows {
            return Err(Error::IndexOutOfRange {
                row: r.wrapping_sub(1),
                col: c.wrapping_sub(1),
                dim: rows,
            });
        }
        let v = Complex64::new(num(2)?, if complex { num(3)? } else { 0.0 });
        let (r, c) = (r - 1, c - 1);
        trip.push((r, c, v));
        if r != c {
            match symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => trip.push((c, r, v)),
                Symmetry::Hermitian => trip.push((c, r, v.conj())),
            }
        }
    }
    let (dim, _) = size.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let entries = trip.len();
    if symmetry == Symmetry::General && entries != expected {
        return Err(Error::Parse(format!("header announces {expected} entries, found {entries}")));
    }
    HermitianOperator::from_triplets(dim, trip)
}

/// Writes the lower triangle as `complex hermitian`.
pub fn write_matrix_market<W: Write>(op: &HermitianOperator, mut w: W) -> Result<()> {
    let mut lower = Vec::new();
    op.for_each_entry(|r, c, v| {
        if r >= c {
            lower.push((r, c, v));
        }
    });
    lower.sort_by_key(|&(r, c, _)| (c, r));
    writeln!(w, "%%MatrixMarket matrix coordinate complex hermitian")?;
    writeln!(w, "{} {} {}", op.dim(), op.dim(), lower.len())?;
    for (r, c, v) in lower {
        writeln!(w, "{} {} {:e} {:e}", r + 1, c + 1, v.re, v.im)?;
    }
    Ok(())
}
