//! Finite canonical Ramsey (pairs) and canonical Hindman (finite sums over
//! the base `E = {2ⁿ}`) classification.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::{edge, NatSet};
use crate::sparse;

/// Cantor pairing of `(i, j)`, saturating on overflow.
pub fn cantor(i: u64, j: u64) -> u64 {
    let s = i.saturating_add(j);
    let t = (s as u128) * (s as u128 + 1) / 2 + j as u128;
    u64::try_from(t).unwrap_or(u64::MAX)
}

fn triangular_index(i: u64, j: u64) -> usize {
    (j * (j - 1) / 2 + i) as usize
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairRule {
    /// Values indexed by `j(j-1)/2 + i` for `i < j`.
    Table(Vec<u64>),
    Const(u64),
    Min,
    Max,
    /// Cantor pairing of `(min, max)`.
    Pairing,
}

/// `φ: [n]² → ω`, total on pairs below the ground size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairColoring {
    n: u64,
    rule: PairRule,
}

impl PairColoring {
    pub fn new(n: u64, rule: PairRule) -> Result<Self> {
        if let PairRule::Table(t) = &rule {
            let want = n.saturating_mul(n.saturating_sub(1)) / 2;
            if t.len() as u64 != want {
                return Err(Error::Incomplete(format!(
                    "pair table has {} entries, ground size {n} needs {want}",
                    t.len()
                )));
            }
        }
        Ok(PairColoring { n, rule })
    }

    pub fn constant(n: u64, v: u64) -> Self {
        PairColoring { n, rule: PairRule::Const(v) }
    }

    pub fn min(n: u64) -> Self {
        PairColoring { n, rule: PairRule::Min }
    }

    pub fn max(n: u64) -> Self {
        PairColoring { n, rule: PairRule::Max }
    }

    pub fn pairing(n: u64) -> Self {
        PairColoring { n, rule: PairRule::Pairing }
    }

    /// Tabulates `f(i, j)` for all `i < j < n`.
    pub fn from_fn(n: u64, f: impl Fn(u64, u64) -> u64) -> Self {
        let mut t = Vec::with_capacity((n * n.saturating_sub(1) / 2) as usize);
        for j in 0..n {
            for i in 0..j {
                t.push(f(i, j));
            }
        }
        PairColoring { n, rule: PairRule::Table(t) }
    }

    pub fn ground(&self) -> u64 {
        self.n
    }

    pub fn rule(&self) -> &PairRule {
        &self.rule
    }

    pub fn eval(&self, a: u64, b: u64) -> Result<u64> {
        let (i, j) = edge(a, b)?;
        if j >= self.n {
            return Err(Error::OutsideWindow { value: j, window: self.n });
        }
        Ok(match &self.rule {
            PairRule::Table(t) => t[triangular_index(i, j)],
            PairRule::Const(v) => *v,
            PairRule::Min => i,
            PairRule::Max => j,
            PairRule::Pairing => cantor(i, j),
        })
    }
}

/// Largest window accepted by the squaring builtin.
pub const SQUARE_WINDOW: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NatRule {
    Table(Vec<u64>),
    Identity,
    Const(u64),
    Square,
    /// `min α(x)` as the power of two `x & -x`.
    MinAlpha,
    /// `max α(x)` as the highest power of two below or at `x`.
    MaxAlpha,
    /// `min α(x) | max α(x)`, injective in the pair `(min α, max α)`.
    MinMaxAlpha,
}

/// `φ: [0, N) → ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NatColoring {
    window: u64,
    rule: NatRule,
}

pub fn low_bit(x: u64) -> u64 {
    x & x.wrapping_neg()
}

pub fn high_bit(x: u64) -> u64 {
    if x == 0 {
        0
    } else {
        1 << (63 - x.leading_zeros())
    }
}

impl NatColoring {
    pub fn new(window: u64, rule: NatRule) -> Result<Self> {
        match &rule {
            NatRule::Table(t) if t.len() as u64 != window => {
                return Err(Error::Incomplete(format!(
                    "table has {} entries for window {window}",
                    t.len()
                )))
            }
            NatRule::Square if window > SQUARE_WINDOW => {
                return Err(Error::InvalidParams(format!(
                    "square coloring supports windows up to {SQUARE_WINDOW}"
                )))
            }
            _ => {}
        }
        Ok(NatColoring { window, rule })
    }

    pub fn identity(window: u64) -> Self {
        NatColoring { window, rule: NatRule::Identity }
    }

    pub fn constant(window: u64, v: u64) -> Self {
        NatColoring { window, rule: NatRule::Const(v) }
    }

    pub fn from_fn(window: u64, f: impl Fn(u64) -> u64) -> Self {
        NatColoring {
            window,
            rule: NatRule::Table((0..window).map(f).collect()),
        }
    }

    pub fn window(&self) -> u64 {
        self.window
    }

    pub fn rule(&self) -> &NatRule {
        &self.rule
    }

    pub fn eval(&self, x: u64) -> Result<u64> {
        if x >= self.window {
            return Err(Error::WindowExceeded { point: x, window: self.window });
        }
        Ok(match &self.rule {
            NatRule::Table(t) => t[x as usize],
            NatRule::Identity => x,
            NatRule::Const(v) => *v,
            NatRule::Square => x * x,
            NatRule::MinAlpha => low_bit(x),
            NatRule::MaxAlpha => high_bit(x),
            NatRule::MinMaxAlpha => low_bit(x) | high_bit(x),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CanonicalCase {
    Const,
    Min,
    Max,
    MinMax,
    Inj,
}

impl CanonicalCase {
    pub const PAIR_CASES: [CanonicalCase; 4] = [Self::Const, Self::Min, Self::Max, Self::Inj];
    pub const FS_CASES: [CanonicalCase; 5] =
        [Self::Const, Self::Min, Self::Max, Self::MinMax, Self::Inj];

    pub fn name(self) -> &'static str {
        match self {
            Self::Const => "CONST",
            Self::Min => "MIN",
            Self::Max => "MAX",
            Self::MinMax => "MINMAX",
            Self::Inj => "INJ",
        }
    }
}

impl fmt::Display for CanonicalCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CanonicalCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::FS_CASES
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown canonical case '{s}'")))
    }
}

/// `c₀ < c₁ < …` with `max α(cᵢ) < min α(cᵢ₊₁)` over the base `{2ⁿ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct BlockBasis(Vec<u64>);

impl BlockBasis {
    pub fn new(elements: Vec<u64>) -> Result<Self> {
        if elements.contains(&0) {
            return Err(Error::InvalidParams("blocks must be positive".into()));
        }
        if let Some(w) = elements.windows(2).find(|w| high_bit(w[0]) >= low_bit(w[1])) {
            return Err(Error::InvalidParams(format!(
                "{} and {} violate the block condition",
                w[0], w[1]
            )));
        }
        Ok(BlockBasis(elements))
    }

    /// `{2⁰, …, 2^{k-1}}`.
    pub fn powers_of_two(k: u32) -> Self {
        BlockBasis((0..k).map(|i| 1u64 << i).collect())
    }

    pub fn elements(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_natset(&self) -> NatSet {
        NatSet::from_sorted(self.0.clone())
    }

    pub fn fs(&self) -> Result<NatSet> {
        sparse::fs(&self.to_natset())
    }
}

impl TryFrom<Vec<u64>> for BlockBasis {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        BlockBasis::new(v)
    }
}

impl From<BlockBasis> for Vec<u64> {
    fn from(b: BlockBasis) -> Self {
        b.0
    }
}

/// Whether `value(x) = value(y) ⟺ key(x) = key(y)` over all entries.
fn same_partition<K: Eq + Hash + Copy>(entries: &[(K, u64)]) -> bool {
    let mut by_key: HashMap<K, u64> = HashMap::with_capacity(entries.len());
    let mut by_value: HashMap<u64, K> = HashMap::with_capacity(entries.len());
    for &(k, v) in entries {
        if *by_key.entry(k).or_insert(v) != v || *by_value.entry(v).or_insert(k) != k {
            return false;
        }
    }
    true
}

fn pair_case(values: &[((u64, u64), u64)]) -> Option<CanonicalCase> {
    let keyed = |key: fn((u64, u64)) -> (u64, u64)| -> Vec<((u64, u64), u64)> {
        values.iter().map(|&(p, v)| (key(p), v)).collect()
    };
    CanonicalCase::PAIR_CASES.into_iter().find(|case| {
        let entries = match case {
            CanonicalCase::Const => keyed(|_| (0, 0)),
            CanonicalCase::Min => keyed(|(i, _)| (i, 0)),
            CanonicalCase::Max => keyed(|(_, j)| (j, 0)),
            _ => keyed(|p| p),
        };
        same_partition(&entries)
    })
}

fn pair_values(phi: &PairColoring, t: &[u64]) -> Result<Vec<((u64, u64), u64)>> {
    let mut out = Vec::with_capacity(t.len() * t.len().saturating_sub(1) / 2);
    for (idx, &j) in t.iter().enumerate() {
        for &i in &t[..idx] {
            out.push(((i, j), phi.eval(i, j)?));
        }
    }
    Ok(out)
}

/// The unique pair case whose biconditional holds exactly on `[T]²`.
pub fn classify_pairs_on(phi: &PairColoring, t: &NatSet) -> Result<Option<CanonicalCase>> {
    if t.len() < 3 {
        return Err(Error::TooSmall { got: t.len(), min: 3 });
    }
    Ok(pair_case(&pair_values(phi, t.as_slice())?))
}

/// Lexicographically least `T ⊆ [0, n)` of size `m` on which `φ` is canonical.
pub fn find_canonical_subset(phi: &PairColoring, m: usize) -> Option<(NatSet, CanonicalCase)> {
    let n = phi.ground();
    if m < 3 || m as u64 > n {
        return None;
    }
    (0..n).into_par_iter().find_map_first(|first| {
        let mut chosen = vec![first];
        extend_pairs(phi, m, &mut chosen)
    })
}

fn extend_pairs(phi: &PairColoring, m: usize, chosen: &mut Vec<u64>) -> Option<(NatSet, CanonicalCase)> {
    let case = if chosen.len() >= 3 {
        // every 3-subset of a canonical set is canonical with the same case
        Some(pair_case(&pair_values(phi, chosen).ok()?)?)
    } else {
        None
    };
    if chosen.len() == m {
        return Some((NatSet::from_sorted(chosen.clone()), case?));
    }
    let last = *chosen.last()?;
    let need = (m - chosen.len()) as u64;
    for next in last + 1..=phi.ground() - need {
        chosen.push(next);
        let found = extend_pairs(phi, m, chosen);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

fn fs_case(values: &[(u64, u64)]) -> Option<CanonicalCase> {
    let keyed = |key: fn(u64) -> (u64, u64)| -> Vec<((u64, u64), u64)> {
        values.iter().map(|&(x, v)| (key(x), v)).collect()
    };
    CanonicalCase::FS_CASES.into_iter().find(|case| {
        let entries = match case {
            CanonicalCase::Const => keyed(|_| (0, 0)),
            CanonicalCase::Min => keyed(|x| (low_bit(x), 0)),
            CanonicalCase::Max => keyed(|x| (high_bit(x), 0)),
            CanonicalCase::MinMax => keyed(|x| (low_bit(x), high_bit(x))),
            CanonicalCase::Inj => keyed(|x| (x, 0)),
        };
        same_partition(&entries)
    })
}

fn fs_values(phi: &NatColoring, c: &[u64]) -> Result<Vec<(u64, u64)>> {
    sparse::fs(&NatSet::from_sorted(c.to_vec()))?
        .iter()
        .map(|x| Ok((x, phi.eval(x)?)))
        .collect()
}

/// The unique finite-sums case whose biconditional holds exactly on `FS(C)`.
pub fn classify_fs_on(phi: &NatColoring, c: &BlockBasis) -> Result<Option<CanonicalCase>> {
    if c.len() < 3 {
        return Err(Error::TooSmall { got: c.len(), min: 3 });
    }
    Ok(fs_case(&fs_values(phi, c.elements())?))
}

/// Lexicographically least sub-basis of `pool` of size `m` on which `φ` is
/// canonical. Best effort: absence only means this pool was exhausted.
pub fn find_block_basis(
    phi: &NatColoring,
    pool: &BlockBasis,
    m: usize,
) -> Option<(BlockBasis, CanonicalCase)> {
    if m < 3 || m > pool.len() || m > sparse::FS_CAP {
        return None;
    }
    let mut chosen = Vec::with_capacity(m);
    extend_blocks(phi, pool.elements(), m, 0, &mut chosen)
}

fn extend_blocks(
    phi: &NatColoring,
    pool: &[u64],
    m: usize,
    from: usize,
    chosen: &mut Vec<u64>,
) -> Option<(BlockBasis, CanonicalCase)> {
    let case = if chosen.len() >= 3 {
        Some(fs_case(&fs_values(phi, chosen).ok()?)?)
    } else {
        None
    };
    if chosen.len() == m {
        return Some((BlockBasis(chosen.clone()), case?));
    }
    let need = m - chosen.len();
    for idx in from..=pool.len() - need {
        chosen.push(pool[idx]);
        let found = extend_blocks(phi, pool, m, idx + 1, chosen);
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}
