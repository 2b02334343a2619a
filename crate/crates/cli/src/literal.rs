//! Text grammars for command-line inputs.
//!
//! Set literals are comma or whitespace separated items, each one of `n`,
//! `a..b` (inclusive) or `pow2(n)` for `{1, 2, ..., 2^(n-1)}`.

use idealforge::NatSet;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {position}: {message}")]
pub struct ParseError {
    /// Byte offset into the input (or `line:column` for files).
    pub position: String,
    pub message: String,
}

impl ParseError {
    pub fn at(offset: usize, message: impl Into<String>) -> Self {
        ParseError { position: offset.to_string(), message: message.into() }
    }

    pub fn on_line(line: usize, message: impl Into<String>) -> Self {
        ParseError { position: format!("line {line}"), message: message.into() }
    }
}

/// Splits on commas and whitespace, keeping byte offsets.
fn tokens(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut depth = 0u32;
    for (i, ch) in text.char_indices() {
        let sep = depth == 0 && (ch == ',' || ch.is_whitespace());
        match (sep, start) {
            (true, Some(s)) => {
                out.push((s, &text[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &text[s..]));
    }
    out.into_iter()
}

pub fn parse_u64(text: &str, offset: usize) -> Result<u64, ParseError> {
    let t = text.trim();
    if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::at(offset, format!("expected a natural number, found '{text}'")));
    }
    t.parse().map_err(|_| ParseError::at(offset, format!("'{text}' does not fit in 64 bits")))
}

pub fn parse_set_literal(text: &str) -> Result<NatSet, ParseError> {
    let mut out = Vec::new();
    for (pos, tok) in tokens(text) {
        if let Some(inner) = tok.strip_prefix("pow2(") {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| ParseError::at(pos + tok.len(), "missing ')' after pow2("))?;
            let n = parse_u64(inner, pos + 5)?;
            if n > 64 {
                return Err(ParseError::at(pos + 5, "pow2(n) needs n <= 64"));
            }
            out.extend((0..n).map(|i| 1u64 << i));
        } else if let Some((a, b)) = tok.split_once("..") {
            let lo = parse_u64(a, pos)?;
            let hi = parse_u64(b, pos + a.len() + 2)?;
            if lo > hi {
                return Err(ParseError::at(pos, format!("empty range {lo}..{hi}")));
            }
            if hi - lo >= 1 << 24 {
                return Err(ParseError::at(pos, "range longer than 2^24 elements"));
            }
            out.extend(lo..=hi);
        } else {
            out.push(parse_u64(tok, pos)?);
        }
    }
    Ok(out.into_iter().collect())
}

/// Edge list literal: `i-j` items, for example `"0-1 1-2 0-2"`.
pub fn parse_edge_literal(text: &str) -> Result<Vec<(u64, u64)>, ParseError> {
    tokens(text)
        .map(|(pos, tok)| {
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| ParseError::at(pos, format!("expected 'i-j', found '{tok}'")))?;
            Ok((parse_u64(a, pos)?, parse_u64(b, pos + a.len() + 1)?))
        })
        .collect()
}

/// Grid literal: `column:index` items, for example `"0:0 0:1 2:5"`.
pub fn parse_grid_literal(text: &str) -> Result<Vec<(u64, u64)>, ParseError> {
    tokens(text)
        .map(|(pos, tok)| {
            let (a, b) = tok
                .split_once(':')
                .ok_or_else(|| ParseError::at(pos, format!("expected 'column:index', found '{tok}'")))?;
            Ok((parse_u64(a, pos)?, parse_u64(b, pos + a.len() + 1)?))
        })
        .collect()
}

/// Rational `p/q` or integer `p`.
pub fn parse_ratio(text: &str) -> Result<num_rational::BigRational, ParseError> {
    idealforge::rational::parse(text).map_err(|e| ParseError::at(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[u64]) -> NatSet {
        v.iter().copied().collect()
    }

    #[test]
    fn examples() {
        assert_eq!(parse_set_literal("1,3,9").unwrap(), set(&[1, 3, 9]));
        assert_eq!(parse_set_literal("0..4").unwrap(), set(&[0, 1, 2, 3, 4]));
        assert_eq!(parse_set_literal("pow2(3)").unwrap(), set(&[1, 2, 4]));
        assert_eq!(parse_set_literal("5 1, 1\t0..2 pow2(2)").unwrap(), set(&[0, 1, 2, 5]));
        assert!(parse_set_literal("").unwrap().is_empty());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse_set_literal("1,x").unwrap_err().position, "2");
        assert_eq!(parse_set_literal("1, 3..y").unwrap_err().position, "6");
        assert_eq!(parse_set_literal("pow2(3").unwrap_err().position, "6");
        assert!(parse_set_literal("4..2").is_err());
        assert!(parse_set_literal("-1").is_err());
        assert!(parse_set_literal("99999999999999999999").is_err());
    }

    #[test]
    fn edges_and_grid() {
        assert_eq!(parse_edge_literal("0-1, 2-1").unwrap(), vec![(0, 1), (2, 1)]);
        assert_eq!(parse_grid_literal("0:3 1:0").unwrap(), vec![(0, 3), (1, 0)]);
        assert_eq!(parse_edge_literal("0-1 2").unwrap_err().position, "4");
    }
}
