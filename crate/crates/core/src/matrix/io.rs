//! Plain-text formats for decompositions and dense matrices.
//!
//! Decomposition: first line `n k`, then `k` lines `r1 r2 c1 c2`
//! (1-based, inclusive). Dense matrix: first line `n`, then `n` lines of
//! `0`/`1` characters.

use std::fmt::Write as _;

use super::{BinaryMatrix, Rect, RectangleDecomposition};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn numbers(line_no: usize, line: &str, expected: usize) -> Result<Vec<usize>> {
    let nums: Vec<usize> = line
        .split_whitespace()
        .map(|tok| tok.parse::<usize>().map_err(|e| parse_err(line_no, format!("{tok:?}: {e}"))))
        .collect::<Result<_>>()?;
    if nums.len() != expected {
        return Err(parse_err(line_no, format!("expected {expected} integers, found {}", nums.len())));
    }
    Ok(nums)
}

/// Non-empty lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(k, l)| (k + 1, l.trim())).filter(|(_, l)| !l.is_empty())
}

pub fn parse_decomposition(text: &str) -> Result<RectangleDecomposition> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n k`"))?;
    let h = numbers(ln, header, 2)?;
    let (n, k) = (h[0], h[1]);
    let mut rects = Vec::with_capacity(k);
    for idx in 0..k {
        let (ln, line) = lines.next().ok_or_else(|| parse_err(ln + idx + 1, format!("expected {k} rectangles, found {idx}")))?;
        let v = numbers(ln, line, 4)?;
        let r = Rect::new(v[0], v[1], v[2], v[3]);
        r.check(n).map_err(|e| parse_err(ln, e.to_string()))?;
        rects.push(r);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after the declared rectangles"));
    }
    RectangleDecomposition::new(n, rects)
}

pub fn format_decomposition(dec: &RectangleDecomposition) -> String {
    let mut out = format!("{} {}\n", dec.n(), dec.len());
    for r in dec.rects() {
        writeln!(out, "{} {} {} {}", r.r1, r.r2, r.c1, r.c2).unwrap();
    }
    out
}

pub fn parse_matrix(text: &str) -> Result<BinaryMatrix> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "missing header `n`"))?;
    let n = numbers(ln, header, 1)?[0];
    if n == 0 {
        return Err(parse_err(ln, "matrix order must be positive"));
    }
    let mut m = BinaryMatrix::zeros(n);
    for i in 1..=n {
        let (ln, row) = lines.next().ok_or_else(|| parse_err(ln + i, format!("expected {n} rows")))?;
        if row.len() != n {
            return Err(parse_err(ln, format!("row has {} entries, expected {n}", row.len())));
        }
        for (j, ch) in row.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => m.set(i, j + 1, true),
                _ => return Err(parse_err(ln, format!("unexpected byte {:?}", ch as char))),
            }
        }
    }
    Ok(m)
}

pub fn format_matrix(m: &BinaryMatrix) -> String {
    let n = m.n();
    let mut out = String::with_capacity((n + 1) * n + 16);
    writeln!(out, "{n}").unwrap();
    for i in 1..=n {
        out.extend((1..=n).map(|j| if m.get(i, j) { '1' } else { '0' }));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposition_round_trip() {
        let dec = RectangleDecomposition::new(5, vec![Rect::new(1, 2, 3, 5), Rect::new(4, 4, 1, 1)]).unwrap();
        let text = format_decomposition(&dec);
        assert_eq!(text, "5 2\n1 2 3 5\n4 4 1 1\n");
        assert_eq!(parse_decomposition(&text).unwrap(), dec);
    }

    #[test]
    fn decomposition_errors_carry_line_numbers() {
        match parse_decomposition("4 2\n1 1 1 1\n1 x 2 2\n") {
            Err(Error::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_decomposition("4 1\n1 5 1 1\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_decomposition("4 2\n1 2 1 2\n2 3 2 3\n"), Err(Error::Overlap(..))));
        assert!(matches!(parse_decomposition("4 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_decomposition("4 0\n1 1 1 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn matrix_round_trip() {
        let m = BinaryMatrix::from_literal("011;100;001").unwrap();
        let text = format_matrix(&m);
        assert_eq!(text, "3\n011\n100\n001\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
        assert!(parse_matrix("2\n01\n2 \n").is_err());
    }
}
