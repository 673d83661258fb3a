//! Text formats: MacKay alist and the single-grid base-matrix format.
//!
//! The base format is a header line `J L p` followed by `J` lines of `L`
//! integers, where `-1` marks a masked (zero) block and any value in
//! `[0, p)` is a circulant shift.

use std::io::{BufRead, BufReader, Read, Write};

use super::{BaseMatrix, MaskMatrix};
use crate::error::{Error, Result};
use crate::matrix::ParityCheckMatrix;

/// Non-empty lines with their 1-based line numbers.
fn content_lines(reader: impl Read) -> Result<Vec<(usize, Vec<String>)>> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let tokens: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if !tokens.is_empty() {
            out.push((idx + 1, tokens));
        }
    }
    Ok(out)
}

fn parse_num<T: std::str::FromStr>(line: usize, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected an integer, found {tok:?}")))
}

fn parse_line<T: std::str::FromStr>(line: usize, tokens: &[String]) -> Result<Vec<T>> {
    tokens.iter().map(|t| parse_num(line, t)).collect()
}

/// Reads a MacKay alist. Zero padding in the position lists is accepted.
pub fn read_alist(reader: impl Read) -> Result<ParityCheckMatrix> {
    let lines = content_lines(reader)?;
    let mut it = lines.iter().peekable();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| Error::parse(0, format!("unexpected end of file reading {what}")))
    };

    let (ln, header) = next("header")?;
    let header: Vec<usize> = parse_line(*ln, header)?;
    let [n, r] = header[..] else {
        return Err(Error::parse(*ln, "header must be `n r`"));
    };
    let (ln, maxes) = next("maximum degrees")?;
    let maxes: Vec<usize> = parse_line(*ln, maxes)?;
    let [max_col, max_row] = maxes[..] else {
        return Err(Error::parse(*ln, "expected `max_col_degree max_row_degree`"));
    };
    let (ln, col_deg) = next("column degrees")?;
    let col_deg: Vec<usize> = parse_line(*ln, col_deg)?;
    if col_deg.len() != n {
        return Err(Error::parse(
            *ln,
            format!("expected {n} column degrees, found {}", col_deg.len()),
        ));
    }
    let (ln, row_deg) = next("row degrees")?;
    let row_deg: Vec<usize> = parse_line(*ln, row_deg)?;
    if row_deg.len() != r {
        return Err(Error::parse(
            *ln,
            format!("expected {r} row degrees, found {}", row_deg.len()),
        ));
    }

    if let Some(c) = col_deg.iter().position(|&d| d == 0) {
        return Err(Error::parse(*ln, format!("column {} is empty", c + 1)));
    }
    drop(next);

    let mut col_entries = Vec::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        let (ln, toks) = list_line(&mut it, deg, "column positions")?;
        let pos = positions(ln, toks, deg, max_col, r)?;
        col_entries.extend(pos.into_iter().map(|row| (row, c)));
    }
    let mut row_entries = Vec::new();
    for (row, &deg) in row_deg.iter().enumerate() {
        let (ln, toks) = list_line(&mut it, deg, "row positions")?;
        let pos = positions(ln, toks, deg, max_row, n)?;
        row_entries.extend(pos.into_iter().map(|c| (row, c)));
    }

    col_entries.sort_unstable();
    row_entries.sort_unstable();
    if col_entries != row_entries {
        return Err(Error::parse(
            0,
            "column and row position lists describe different matrices",
        ));
    }
    ParityCheckMatrix::from_entries(r, n, col_entries)
}

type LineIter<'a> = std::iter::Peekable<std::slice::Iter<'a, (usize, Vec<String>)>>;

/// Next position list. Empty lists are written as blank lines (which are
/// skipped) or as a line of zero padding, so for degree 0 a line is consumed
/// only if it is all zeros.
fn list_line<'a>(
    it: &mut LineIter<'a>,
    degree: usize,
    what: &str,
) -> Result<(usize, &'a [String])> {
    const EMPTY: &[String] = &[];
    if degree == 0 {
        return match it.peek() {
            Some((ln, toks)) if toks.iter().all(|t| t == "0") => {
                it.next();
                Ok((*ln, EMPTY))
            }
            _ => Ok((0, EMPTY)),
        };
    }
    it.next()
        .map(|(ln, toks)| (*ln, toks.as_slice()))
        .ok_or_else(|| Error::parse(0, format!("unexpected end of file reading {what}")))
}

fn positions(
    line: usize,
    toks: &[String],
    degree: usize,
    max_degree: usize,
    bound: usize,
) -> Result<Vec<usize>> {
    if degree > max_degree {
        return Err(Error::parse(
            line,
            format!("degree {degree} exceeds declared maximum {max_degree}"),
        ));
    }
    let raw: Vec<usize> = parse_line(line, toks)?;
    let pos: Vec<usize> = raw.into_iter().filter(|&v| v != 0).collect();
    if pos.len() != degree {
        return Err(Error::parse(
            line,
            format!("expected {degree} positions, found {}", pos.len()),
        ));
    }
    if let Some(&bad) = pos.iter().find(|&&v| v > bound) {
        return Err(Error::parse(
            line,
            format!("position {bad} out of range 1..={bound}"),
        ));
    }
    Ok(pos.into_iter().map(|v| v - 1).collect())
}

/// Writes a MacKay alist without zero padding.
pub fn write_alist(h: &ParityCheckMatrix, mut w: impl Write) -> Result<()> {
    let max_col = h.cols().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = h.rows().iter().map(Vec::len).max().unwrap_or(0);
    writeln!(w, "{} {}", h.n(), h.r())?;
    writeln!(w, "{max_col} {max_row}")?;
    writeln!(w, "{}", join(h.cols().iter().map(Vec::len)))?;
    writeln!(w, "{}", join(h.rows().iter().map(Vec::len)))?;
    for list in h.cols().iter().chain(h.rows()) {
        writeln!(w, "{}", join(list.iter().map(|v| v + 1)))?;
    }
    Ok(())
}

fn join(it: impl Iterator<Item = usize>) -> String {
    it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Reads the `-1`-sentinel base format into `(base, mask, p)`.
pub fn read_base(reader: impl Read) -> Result<(BaseMatrix, MaskMatrix, usize)> {
    let lines = content_lines(reader)?;
    let Some((ln, header)) = lines.first() else {
        return Err(Error::parse(0, "empty base-matrix file"));
    };
    let header: Vec<usize> = parse_line(*ln, header)?;
    let [rows, cols, p] = header[..] else {
        return Err(Error::parse(*ln, "header must be `J L p`"));
    };
    if p == 0 {
        return Err(Error::parse(*ln, "lifting size p must be positive"));
    }
    if lines.len() != rows + 1 {
        return Err(Error::parse(
            *ln,
            format!("expected {rows} grid rows, found {}", lines.len() - 1),
        ));
    }
    let mut shifts = Vec::with_capacity(rows);
    let mut bits = Vec::with_capacity(rows);
    for (ln, toks) in &lines[1..] {
        let vals: Vec<i64> = parse_line(*ln, toks)?;
        if vals.len() != cols {
            return Err(Error::parse(
                *ln,
                format!("expected {cols} entries, found {}", vals.len()),
            ));
        }
        let mut srow = Vec::with_capacity(cols);
        let mut brow = Vec::with_capacity(cols);
        for v in vals {
            if v < -1 || v >= p as i64 {
                return Err(Error::parse(
                    *ln,
                    format!("entry {v} outside -1..{p}"),
                ));
            }
            srow.push(v.max(0) as usize);
            brow.push(v >= 0);
        }
        shifts.push(srow);
        bits.push(brow);
    }
    let base = BaseMatrix::new(shifts).map_err(|e| Error::parse(*ln, e.to_string()))?;
    let mask = MaskMatrix::new(bits).map_err(|e| Error::parse(*ln, e.to_string()))?;
    Ok((base, mask, p))
}

/// Writes the `-1`-sentinel base format.
pub fn write_base(base: &BaseMatrix, mask: &MaskMatrix, p: usize, mut w: impl Write) -> Result<()> {
    if base.rows() != mask.rows() || base.cols() != mask.cols() {
        return Err(Error::Dimension("base and mask dimensions differ".into()));
    }
    base.validate_for(p)?;
    writeln!(w, "{} {} {}", base.rows(), base.cols(), p)?;
    for j in 0..base.rows() {
        let line: Vec<String> = (0..base.cols())
            .map(|l| {
                if mask.get(j, l) {
                    base.shift(j, l).to_string()
                } else {
                    "-1".to_string()
                }
            })
            .collect();
        writeln!(w, "{}", line.join(" "))?;
    }
    Ok(())
}
