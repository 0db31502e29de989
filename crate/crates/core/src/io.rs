//! Matrix Market (coordinate, real, general) for pattern matrices.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::realize::PatternMatrix;

const HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes the nonzero entries of `x`, 1-indexed, row-major. Power-sum
/// entries carry 17 significant digits; the superdiagonal is written as
/// integers.
pub fn write_mtx<W: Write>(x: &PatternMatrix, mut w: W) -> std::io::Result<()> {
    let n = x.dim();
    let mut lines = Vec::new();
    for i in 1..=n {
        for j in 1..=i {
            let v = x.x()[i - j];
            if v != 0.0 {
                lines.push(format!("{i} {j} {v:.16e}"));
            }
        }
        if i < n {
            lines.push(format!("{} {} {}", i, i + 1, i));
        }
    }
    writeln!(w, "{HEADER}")?;
    writeln!(w, "% lower Toeplitz in x_1..x_{n}, superdiagonal 1..{}", n.saturating_sub(1))?;
    writeln!(w, "{n} {n} {}", lines.len())?;
    for l in lines {
        writeln!(w, "{l}")?;
    }
    w.flush()
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        pos: line,
        msg: msg.into(),
    }
}

/// Reads a matrix written by [`write_mtx`] and checks that it has the
/// pattern shape. Error positions are 1-based line numbers.
pub fn read_mtx<R: BufRead>(r: R) -> Result<PatternMatrix> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header.map_err(|e| parse_err(1, e.to_string()))?;
    if !header
        .to_ascii_lowercase()
        .starts_with("%%matrixmarket matrix coordinate real general")
    {
        return Err(parse_err(1, "expected a coordinate real general Matrix Market header"));
    }

    let mut size: Option<(usize, usize)> = None;
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for (no, line) in lines {
        let line = line.map_err(|e| parse_err(no, e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let [r, c, nnz] = fields[..] else {
                    return Err(parse_err(no, "size line needs rows, columns, entries"));
                };
                let r: usize = r.parse().map_err(|_| parse_err(no, "bad row count"))?;
                let c: usize = c.parse().map_err(|_| parse_err(no, "bad column count"))?;
                let nnz: usize = nnz.parse().map_err(|_| parse_err(no, "bad entry count"))?;
                if r != c || r == 0 {
                    return Err(parse_err(no, "matrix must be square and nonempty"));
                }
                size = Some((r, nnz));
                entries.reserve(nnz);
            }
            Some((n, _)) => {
                let [i, j, v] = fields[..] else {
                    return Err(parse_err(no, "entry line needs row, column, value"));
                };
                let i: usize = i.parse().map_err(|_| parse_err(no, "bad row index"))?;
                let j: usize = j.parse().map_err(|_| parse_err(no, "bad column index"))?;
                let v: f64 = v.parse().map_err(|_| parse_err(no, "bad value"))?;
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(parse_err(no, format!("index ({i}, {j}) out of range")));
                }
                entries.push((i, j, v));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(
            0,
            format!("expected {nnz} entries, found {}", entries.len()),
        ));
    }

    let mut dense = vec![0.0; n * n];
    for &(i, j, v) in &entries {
        dense[(i - 1) * n + (j - 1)] = v;
    }
    let x: Vec<f64> = (0..n).map(|i| dense[i * n]).collect();
    let m = PatternMatrix::from_raw(x);
    for i in 1..=n {
        for j in 1..=n {
            if dense[(i - 1) * n + (j - 1)] != m.get(i, j) {
                return Err(parse_err(
                    0,
                    format!("entry ({i}, {j}) does not follow the pattern"),
                ));
            }
        }
    }
    Ok(m)
}
