//! Text formats.
//!
//! A square is n lines of n space-separated decimal symbols; a blank line
//! ends it. Files may hold several squares separated by blank lines, and
//! lines starting with '#' are comments. An orthogonal array file has a
//! header line "n width" followed by n^2 symbol rows.

use crate::latin::{LatinError, LatinSquare};
use crate::mols::{MolsError, MolsList, OrthogonalArray};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected a number, found {token:?}")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: expected {expected} entries, found {found}")]
    WrongLength {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {source}")]
    InvalidSquare { line: usize, source: LatinError },
    #[error("square {index} (line {line}): {source}")]
    InvalidMols {
        index: usize,
        line: usize,
        source: MolsError,
    },
    #[error("no squares in input")]
    Empty,
    #[error("line {line}: bad header, expected \"n width\"")]
    BadHeader { line: usize },
    #[error("line {line}: {source}")]
    InvalidArray { line: usize, source: MolsError },
}

fn parse_row(line: &str, line_no: usize) -> Result<Vec<u8>, ParseError> {
    line.split_whitespace()
        .map(|token| {
            token.parse::<u8>().map_err(|_| ParseError::BadNumber {
                line: line_no,
                token: token.to_string(),
            })
        })
        .collect()
}

/// Parses every square in the text, keeping the starting line of each for
/// error reports.
pub fn parse_squares(text: &str) -> Result<Vec<LatinSquare>, ParseError> {
    let mut squares = Vec::new();
    let mut rows: Vec<Vec<u8>> = Vec::new();
    let mut start_line = 0usize;

    let mut flush = |rows: &mut Vec<Vec<u8>>, start_line: usize| -> Result<(), ParseError> {
        if rows.is_empty() {
            return Ok(());
        }
        let n = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(ParseError::WrongLength {
                    line: start_line + i,
                    expected: n,
                    found: row.len(),
                });
            }
        }
        if rows.len() != n {
            return Err(ParseError::WrongLength {
                line: start_line,
                expected: n,
                found: rows.len(),
            });
        }
        let square = LatinSquare::from_rows(rows).map_err(|source| ParseError::InvalidSquare {
            line: start_line,
            source,
        })?;
        squares.push(square);
        rows.clear();
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            flush(&mut rows, start_line)?;
            continue;
        }
        if rows.is_empty() {
            start_line = line_no;
        }
        rows.push(parse_row(line, line_no)?);
    }
    flush(&mut rows, start_line)?;
    if squares.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(squares)
}

/// Parses a single square; trailing squares are an error.
pub fn parse_square(text: &str) -> Result<LatinSquare, ParseError> {
    let squares = parse_squares(text)?;
    if squares.len() != 1 {
        return Err(ParseError::WrongLength {
            line: 1,
            expected: 1,
            found: squares.len(),
        });
    }
    Ok(squares.into_iter().next().expect("checked length"))
}

/// Parses a MOLS file: all squares must share an order and be pairwise
/// orthogonal.
pub fn parse_mols(text: &str) -> Result<MolsList, ParseError> {
    let squares = parse_squares(text)?;
    MolsList::new(squares).map_err(|source| ParseError::InvalidMols {
        index: 0,
        line: 1,
        source,
    })
}

pub fn format_square(square: &LatinSquare) -> String {
    let n = square.order();
    let mut out = String::new();
    for r in 0..n {
        for c in 0..n {
            if c > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", square.get(r, c));
        }
        out.push('\n');
    }
    out
}

pub fn format_squares(squares: &[LatinSquare]) -> String {
    squares
        .iter()
        .map(format_square)
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn format_mols(mols: &MolsList) -> String {
    format_squares(mols.squares())
}

/// Parses an orthogonal array file with its "n width" header.
pub fn parse_oa(text: &str) -> Result<OrthogonalArray, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_line, header) = lines.next().ok_or(ParseError::BadHeader { line: 1 })?;
    let header_nums = parse_row(header, header_line)?;
    if header_nums.len() != 2 {
        return Err(ParseError::BadHeader { line: header_line });
    }
    let (n, width) = (header_nums[0] as usize, header_nums[1] as usize);
    let mut rows = Vec::new();
    let mut last_line = header_line;
    for (line_no, line) in lines {
        last_line = line_no;
        let row = parse_row(line, line_no)?;
        if row.len() != width {
            return Err(ParseError::WrongLength {
                line: line_no,
                expected: width,
                found: row.len(),
            });
        }
        rows.extend(row);
    }
    if n > 0 && rows.len() != n * n * width {
        return Err(ParseError::WrongLength {
            line: last_line,
            expected: n * n,
            found: rows.len() / width.max(1),
        });
    }
    OrthogonalArray::new(n, width, rows).map_err(|source| ParseError::InvalidArray {
        line: header_line,
        source,
    })
}

pub fn format_oa(oa: &OrthogonalArray) -> String {
    let mut out = format!("{} {}\n", oa.order(), oa.width());
    for row in 0..oa.order() * oa.order() {
        let fields: Vec<String> = (0..oa.width())
            .map(|c| oa.get(row, c).to_string())
            .collect();
        out.push_str(&fields.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_latin_square, SplitMix64};

    #[test]
    fn parse_simple_square() {
        let l = parse_square("0 1 2\n1 2 0\n2 0 1\n").unwrap();
        assert_eq!(l, LatinSquare::cyclic(3));
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "# cyclic of order 2\n0 1\n1 0\n\n\n# another\n0 1\n1 0\n";
        let squares = parse_squares(text).unwrap();
        assert_eq!(squares.len(), 2);
    }

    #[test]
    fn error_lines_are_reported() {
        let err = parse_squares("0 1\n1 x\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::BadNumber {
                line: 2,
                token: "x".into()
            }
        );
        let err = parse_squares("0 1\n1 0 0\n").unwrap_err();
        assert!(matches!(err, ParseError::WrongLength { line: 2, .. }));
        let err = parse_squares("0 1\n0 1\n").unwrap_err();
        assert!(matches!(err, ParseError::InvalidSquare { line: 1, .. }));
    }

    #[test]
    fn mols_files_validate_orthogonality() {
        let z3 = format_square(&LatinSquare::cyclic(3));
        let two_copies = format!("{z3}\n{z3}");
        assert!(parse_mols(&two_copies).is_err());
    }

    #[test]
    fn square_round_trip() {
        let mut rng = SplitMix64::new(61);
        for n in [1, 2, 5, 9] {
            let l = random_latin_square(n, &mut rng);
            assert_eq!(parse_square(&format_square(&l)).unwrap(), l);
        }
    }

    #[test]
    fn oa_round_trip() {
        let m = MolsList::single(LatinSquare::cyclic(4));
        let oa = m.to_oa();
        assert_eq!(parse_oa(&format_oa(&oa)).unwrap(), oa);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert_eq!(parse_squares("# nothing\n"), Err(ParseError::Empty));
    }
}
