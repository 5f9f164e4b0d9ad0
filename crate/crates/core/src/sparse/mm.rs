//! Matrix Market coordinate format.
//!
//! Accepts `real`/`double`/`integer` fields with `general`, `symmetric` or
//! `skew-symmetric` storage. Symmetric storage is expanded to full,
//! duplicate entries are summed, and explicit zeros are kept.

use std::io::{BufRead, Write};

use super::CsrMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<Symmetry> {
    let tokens: Vec<String> = line
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(perr(
            lineno,
            "expected '%%MatrixMarket matrix coordinate <field> <symmetry>'",
        ));
    }
    if tokens[1] != "matrix" {
        return Err(perr(lineno, format!("unsupported object '{}'", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(perr(lineno, format!("unsupported format '{}'", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "double" | "integer" => {}
        "pattern" => return Err(perr(lineno, "pattern-only files carry no values")),
        other => return Err(perr(lineno, format!("unsupported field '{other}'"))),
    }
    match tokens[4].as_str() {
        "general" => Ok(Symmetry::General),
        "symmetric" => Ok(Symmetry::Symmetric),
        "skew-symmetric" => Ok(Symmetry::SkewSymmetric),
        other => Err(perr(lineno, format!("unsupported symmetry '{other}'"))),
    }
}

/// Parses a Matrix Market coordinate stream into CSR.
pub fn parse_matrix_market<R: BufRead>(reader: R) -> Result<CsrMatrix> {
    let mut lines = reader.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (lineno, header) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let symmetry = parse_header(&header?, lineno)?;

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    let mut seen = 0usize;
    let mut last_line = lineno;
    for (lineno, line) in lines {
        last_line = lineno;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut fields = t.split_whitespace();
        let Some((rows, _, nnz)) = size else {
            let mut next = || -> Result<usize> {
                fields
                    .next()
                    .ok_or_else(|| perr(lineno, "size line needs 'rows cols entries'"))?
                    .parse::<usize>()
                    .map_err(|e| perr(lineno, format!("bad size: {e}")))
            };
            let (r, c, z) = (next()?, next()?, next()?);
            if r != c {
                return Err(Error::NotSquare { rows: r, cols: c });
            }
            size = Some((r, c, z));
            triplets.reserve(if symmetry == Symmetry::General {
                z
            } else {
                2 * z
            });
            continue;
        };
        seen += 1;
        if seen > nnz {
            return Err(perr(
                lineno,
                format!("more than the declared {nnz} entries"),
            ));
        }
        let i = fields
            .next()
            .ok_or_else(|| perr(lineno, "missing row index"))?;
        let j = fields
            .next()
            .ok_or_else(|| perr(lineno, "missing column index"))?;
        let v = fields.next().ok_or_else(|| perr(lineno, "missing value"))?;
        let i: usize = i
            .parse()
            .map_err(|e| perr(lineno, format!("bad row index: {e}")))?;
        let j: usize = j
            .parse()
            .map_err(|e| perr(lineno, format!("bad column index: {e}")))?;
        let v: f64 = v
            .parse()
            .map_err(|e| perr(lineno, format!("bad value: {e}")))?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(perr(
                lineno,
                format!("index ({i}, {j}) out of range for {rows}x{rows}"),
            ));
        }
        let (i, j) = (i - 1, j - 1);
        match symmetry {
            Symmetry::General => triplets.push((i, j, v)),
            Symmetry::Symmetric => {
                triplets.push((i, j, v));
                if i != j {
                    triplets.push((j, i, v));
                }
            }
            Symmetry::SkewSymmetric => {
                if i == j {
                    return Err(perr(lineno, "skew-symmetric file stores a diagonal entry"));
                }
                triplets.push((i, j, v));
                triplets.push((j, i, -v));
            }
        }
    }
    let (n, _, nnz) = size.ok_or_else(|| perr(last_line, "missing size line"))?;
    if seen != nnz {
        return Err(perr(
            last_line,
            format!("expected {nnz} entries, found {seen}"),
        ));
    }
    CsrMatrix::from_triplets(n, &triplets)
}

/// Writes `a` as a general real coordinate file with 1-based indices.
pub fn write_matrix_market<W: Write>(a: &CsrMatrix, mut w: W) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), a.nnz())?;
    for i in 0..a.n() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<CsrMatrix> {
        parse_matrix_market(s.as_bytes())
    }

    #[test]
    fn general_two_by_two() {
        let a = parse(
            "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 4\n1 1 4\n2 1 1\n1 2 2\n2 2 3\n",
        )
        .unwrap();
        assert_eq!(a.n(), 2);
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.row(0).1, &[4.0, 2.0]);
        assert_eq!(a.row(1).1, &[1.0, 3.0]);
    }

    #[test]
    fn symmetric_expansion_without_diagonal() {
        let a = parse("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n2 1 1\n")
            .unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.row(0), (&[0usize, 1][..], &[2.0, 1.0][..]));
        assert_eq!(a.row(1), (&[0usize][..], &[1.0][..]));
    }

    #[test]
    fn skew_symmetric_negates_mirror() {
        let a = parse("%%MatrixMarket matrix coordinate integer skew-symmetric\n2 2 1\n2 1 3\n")
            .unwrap();
        assert_eq!(a.get(1, 0), Some(3.0));
        assert_eq!(a.get(0, 1), Some(-3.0));
    }

    #[test]
    fn duplicates_are_summed() {
        let a =
            parse("%%MatrixMarket matrix coordinate real general\n1 1 2\n1 1 1\n1 1 1\n").unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.values(), &[2.0]);
    }

    #[test]
    fn explicit_zero_is_kept() {
        let a =
            parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 0\n2 2 1\n").unwrap();
        assert_eq!(a.nnz(), 2);
        assert_eq!(a.get(0, 0), Some(0.0));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(parse("hello\n1 1 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 3 0\n"),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate pattern general\n1 1 1\n1 1\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n"),
            Err(Error::Parse { .. })
        ));
        assert!(parse("%%MatrixMarket matrix array real general\n1 1\n1\n").is_err());
    }

    #[test]
    fn identity_is_written_with_three_entries() {
        let mut buf = Vec::new();
        write_matrix_market(&CsrMatrix::identity(3), &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = s.lines().collect();
        assert_eq!(lines[1], "3 3 3");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[2], "1 1 1e0");
    }
}
