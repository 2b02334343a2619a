//! Coloring ingestion: builtin names or whitespace separated tables.

use std::collections::BTreeMap;

use idealforge::adversary::GammaMap;
use idealforge::canonical::{NatColoring, NatRule, PairColoring, PairRule};
use idealforge::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::CliError;
use crate::literal::{parse_u64, ParseError};

/// Largest random nat table and pair ground we are willing to tabulate.
const RANDOM_NAT_CAP: u64 = 1 << 20;
const RANDOM_PAIR_CAP: u64 = 2048;
/// Missing points listed in an `Incomplete` error before eliding.
const MISSING_SHOWN: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Nat,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coloring {
    Nat(NatColoring),
    Pair(PairColoring),
}

#[derive(Debug, Clone, Copy)]
pub struct Domain {
    /// Explicit `--window`, if any.
    pub window: Option<u64>,
    /// Window used by builtins when none is given.
    pub fallback: u64,
    pub seed: u64,
}

pub fn load_coloring(spec: &str, kind: Kind, dom: Domain) -> Result<Coloring, CliError> {
    if let Some(c) = builtin(spec, kind, dom)? {
        return Ok(c);
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Io { path: spec.into(), message: e.to_string() })?;
    parse_table(&text, kind, dom.window)
}

fn builtin(spec: &str, kind: Kind, dom: Domain) -> Result<Option<Coloring>, CliError> {
    let n = dom.window.unwrap_or(dom.fallback);
    let (name, arg) = match spec.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (spec, None),
    };
    let arg_value = || -> Result<u64, CliError> {
        let a = arg.ok_or_else(|| CliError::Usage(format!("builtin '{name}' needs a value, as in '{name}:7'")))?;
        Ok(parse_u64(a, name.len() + 1)?)
    };
    let nat = |rule| NatColoring::new(n, rule).map(Coloring::Nat);
    let pair = |rule| PairColoring::new(n, rule).map(Coloring::Pair);
    let c = match (name, kind) {
        ("const", Kind::Nat) => nat(NatRule::Const(arg_value()?))?,
        ("const", Kind::Pair) => pair(PairRule::Const(arg_value()?))?,
        ("identity", Kind::Nat) => nat(NatRule::Identity)?,
        ("square", Kind::Nat) => nat(NatRule::Square)?,
        ("min-alpha", Kind::Nat) => nat(NatRule::MinAlpha)?,
        ("max-alpha", Kind::Nat) => nat(NatRule::MaxAlpha)?,
        ("minmax-alpha", Kind::Nat) => nat(NatRule::MinMaxAlpha)?,
        ("min", Kind::Pair) => pair(PairRule::Min)?,
        ("max", Kind::Pair) => pair(PairRule::Max)?,
        ("pairing", Kind::Pair) => pair(PairRule::Pairing)?,
        ("random", _) => {
            let top = arg_value()?;
            let window = dom
                .window
                .ok_or_else(|| CliError::Usage("random colorings need an explicit --window".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(dom.seed);
            match kind {
                Kind::Nat => {
                    if window > RANDOM_NAT_CAP {
                        return Err(too_large("random nat table", window, RANDOM_NAT_CAP));
                    }
                    let table = (0..window).map(|_| rng.gen_range(0..=top)).collect();
                    nat(NatRule::Table(table))?
                }
                Kind::Pair => {
                    if window > RANDOM_PAIR_CAP {
                        return Err(too_large("random pair ground", window, RANDOM_PAIR_CAP));
                    }
                    let table = (0..window * window.saturating_sub(1) / 2).map(|_| rng.gen_range(0..=top)).collect();
                    pair(PairRule::Table(table))?
                }
            }
        }
        ("identity" | "square" | "min-alpha" | "max-alpha" | "minmax-alpha", Kind::Pair)
        | ("min" | "max" | "pairing", Kind::Nat) => {
            let want = if kind == Kind::Nat { "a coloring of naturals" } else { "a coloring of pairs" };
            return Err(CliError::Usage(format!("builtin '{name}' is not {want}")));
        }
        _ => return Ok(None),
    };
    Ok(Some(c))
}

fn too_large(what: &'static str, size: u64, cap: u64) -> CliError {
    CliError::Core(Error::TooLarge { what, size: size as usize, cap: cap as usize })
}

/// Non-empty, comment-stripped lines with their 1-based numbers.
fn table_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = body.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn field(line: usize, s: &str) -> Result<u64, ParseError> {
    parse_u64(s, 0).map_err(|e| ParseError::on_line(line, e.message))
}

fn incomplete(missing: Vec<String>) -> CliError {
    let total = missing.len();
    let mut shown: Vec<String> = missing.into_iter().take(MISSING_SHOWN).collect();
    if total > MISSING_SHOWN {
        shown.push(format!("and {} more", total - MISSING_SHOWN));
    }
    CliError::Core(Error::Incomplete(format!("missing {total} point(s): {}", shown.join(", "))))
}

pub fn parse_table(text: &str, kind: Kind, window: Option<u64>) -> Result<Coloring, CliError> {
    let width = match kind {
        Kind::Nat => 2,
        Kind::Pair => 3,
    };
    let mut entries: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    let mut top = None::<u64>;
    for (line, fields) in table_lines(text) {
        if fields.len() != width {
            let shape = if kind == Kind::Nat { "'x value'" } else { "'i j value'" };
            return Err(ParseError::on_line(line, format!("expected {shape}, found {} fields", fields.len())).into());
        }
        let nums = fields.iter().map(|f| field(line, f)).collect::<Result<Vec<_>, _>>()?;
        let (key, value) = match kind {
            Kind::Nat => ((0, nums[0]), nums[1]),
            Kind::Pair => {
                if nums[0] == nums[1] {
                    return Err(ParseError::on_line(line, format!("pair {{{0}, {0}}} has equal endpoints", nums[0])).into());
                }
                ((nums[0].min(nums[1]), nums[0].max(nums[1])), nums[2])
            }
        };
        if let Some(old) = entries.insert(key, value) {
            if old != value {
                return Err(ParseError::on_line(line, "conflicting value for a point listed twice").into());
            }
        }
        top = top.max(Some(key.1));
    }
    let n = match window {
        Some(w) => {
            if let Some(t) = top.filter(|&t| t >= w) {
                return Err(CliError::Core(Error::OutsideWindow { value: t, window: w }));
            }
            w
        }
        None => top.map_or(0, |t| t + 1),
    };
    match kind {
        Kind::Nat => {
            if n > RANDOM_NAT_CAP {
                return Err(too_large("nat table", n, RANDOM_NAT_CAP));
            }
            let mut missing = Vec::new();
            let table: Vec<u64> = (0..n)
                .map(|x| {
                    entries.get(&(0, x)).copied().unwrap_or_else(|| {
                        missing.push(x.to_string());
                        0
                    })
                })
                .collect();
            if !missing.is_empty() {
                return Err(incomplete(missing));
            }
            Ok(Coloring::Nat(NatColoring::new(n, NatRule::Table(table))?))
        }
        Kind::Pair => {
            if n > RANDOM_PAIR_CAP {
                return Err(too_large("pair table ground", n, RANDOM_PAIR_CAP));
            }
            let mut missing = Vec::new();
            let mut table = Vec::with_capacity((n * n.saturating_sub(1) / 2) as usize);
            for j in 0..n {
                for i in 0..j {
                    match entries.get(&(i, j)) {
                        Some(&v) => table.push(v),
                        None => {
                            missing.push(format!("{i} {j}"));
                            table.push(0);
                        }
                    }
                }
            }
            if !missing.is_empty() {
                return Err(incomplete(missing));
            }
            Ok(Coloring::Pair(PairColoring::new(n, PairRule::Table(table))?))
        }
    }
}

/// Lines `y z0 z1` with `z0 > z1`.
pub fn parse_gamma_table(text: &str) -> Result<GammaMap, CliError> {
    let mut table = BTreeMap::new();
    for (line, fields) in table_lines(text) {
        if fields.len() != 3 {
            return Err(ParseError::on_line(line, format!("expected 'y z0 z1', found {} fields", fields.len())).into());
        }
        let nums = fields.iter().map(|f| field(line, f)).collect::<Result<Vec<_>, _>>()?;
        if table.insert(nums[0], (nums[1], nums[2])).is_some() {
            return Err(ParseError::on_line(line, format!("{} listed twice", nums[0])).into());
        }
    }
    Ok(GammaMap::new(table)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dom(window: Option<u64>) -> Domain {
        Domain { window, fallback: 1 << 20, seed: 7 }
    }

    #[test]
    fn nat_table_identity() {
        let c = parse_table("0 0\n1 1\n2 2\n", Kind::Nat, Some(3)).unwrap();
        let Coloring::Nat(phi) = c else { panic!() };
        assert_eq!(phi.window(), 3);
        assert!((0..3).all(|x| phi.eval(x).unwrap() == x));
    }

    #[test]
    fn builtin_const_pair() {
        let Coloring::Pair(phi) = load_coloring("const:7", Kind::Pair, dom(Some(10))).unwrap() else { panic!() };
        assert_eq!(phi.eval(2, 9).unwrap(), 7);
    }

    #[test]
    fn missing_pair_is_incomplete() {
        let mut text = String::from("# all pairs of [0,6) but one\n");
        for j in 0..6 {
            for i in 0..j {
                if (i, j) != (2, 5) {
                    text.push_str(&format!("{i} {j} {}\n", i + j));
                }
            }
        }
        let err = parse_table(&text, Kind::Pair, Some(6)).unwrap_err();
        assert_eq!(err.code(), "Incomplete");
        assert!(err.to_string().contains("2 5"), "{err}");
    }

    #[test]
    fn table_errors() {
        assert_eq!(parse_table("0 1 2\n", Kind::Nat, None).unwrap_err().code(), "ParseError");
        assert_eq!(parse_table("0 1\n0 2\n", Kind::Nat, None).unwrap_err().code(), "ParseError");
        assert_eq!(parse_table("3 3 1\n", Kind::Pair, None).unwrap_err().code(), "ParseError");
        assert_eq!(parse_table("5 1\n", Kind::Nat, Some(3)).unwrap_err().code(), "OutsideWindow");
        assert_eq!(load_coloring("min", Kind::Nat, dom(None)).unwrap_err().code(), "Usage");
    }

    #[test]
    fn random_is_seeded() {
        let a = load_coloring("random:9", Kind::Pair, dom(Some(12))).unwrap();
        let b = load_coloring("random:9", Kind::Pair, dom(Some(12))).unwrap();
        assert_eq!(a, b);
        let c = load_coloring("random:9", Kind::Pair, Domain { seed: 8, ..dom(Some(12)) }).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn gamma_table() {
        let g = parse_gamma_table("1 2 1\n3 5 0 # comment\n").unwrap();
        assert_eq!(g.get(3), Some((5, 0)));
        assert!(parse_gamma_table("1 1 2\n").is_err());
    }
}
