//! Finite carriers: sets of naturals, sets of unordered pairs, and sets of
//! grid points in ω².

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of naturals kept in ascending order without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct NatSet(Vec<u64>);

impl NatSet {
    pub fn new() -> Self {
        NatSet(Vec::new())
    }

    /// Builds a set from an already strictly ascending vector.
    ///
    /// Callers that cannot guarantee the order should use `from_iter`.
    pub fn from_sorted(elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        NatSet(elements)
    }

    /// `{start, ..., end - 1}`.
    pub fn range(start: u64, end: u64) -> Self {
        NatSet((start..end).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u64> + ExactSizeIterator + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u64> {
        self.0
    }

    pub fn first(&self) -> Option<u64> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<u64> {
        self.0.last().copied()
    }

    pub fn is_subset(&self, other: &NatSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        self.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &NatSet) -> NatSet {
        self.iter().chain(other.iter()).collect()
    }

    pub fn intersection(&self, other: &NatSet) -> NatSet {
        NatSet(self.iter().filter(|&x| other.contains(x)).collect())
    }

    pub fn difference(&self, other: &NatSet) -> NatSet {
        NatSet(self.iter().filter(|&x| !other.contains(x)).collect())
    }

    pub fn is_disjoint(&self, other: &NatSet) -> bool {
        self.iter().all(|x| !other.contains(x))
    }

    /// `A + n`.
    pub fn shift_up(&self, n: u64) -> NatSet {
        NatSet(self.iter().map(|a| a + n).collect())
    }

    /// `A - n = {a - n : a ∈ A, a ≥ n}`.
    pub fn shift_down(&self, n: u64) -> NatSet {
        NatSet(self.iter().filter(|&a| a >= n).map(|a| a - n).collect())
    }

    pub fn insert(&mut self, x: u64) -> bool {
        match self.0.binary_search(&x) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, x);
                true
            }
        }
    }
}

impl FromIterator<u64> for NatSet {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        let mut v: Vec<u64> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        NatSet(v)
    }
}

impl From<Vec<u64>> for NatSet {
    fn from(v: Vec<u64>) -> Self {
        v.into_iter().collect()
    }
}

impl From<NatSet> for Vec<u64> {
    fn from(s: NatSet) -> Self {
        s.0
    }
}

impl<const N: usize> From<[u64; N]> for NatSet {
    fn from(a: [u64; N]) -> Self {
        a.into_iter().collect()
    }
}

impl fmt::Display for NatSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Direction of a shift `A ± n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shift {
    Up,
    Down,
}

pub fn shift(a: &NatSet, n: u64, direction: Shift) -> NatSet {
    match direction {
        Shift::Up => a.shift_up(n),
        Shift::Down => a.shift_down(n),
    }
}

/// Unordered pair `{i, j}` stored as `(min, max)`.
pub type Edge = (u64, u64);

pub fn edge(a: u64, b: u64) -> Result<Edge> {
    match a.cmp(&b) {
        std::cmp::Ordering::Less => Ok((a, b)),
        std::cmp::Ordering::Greater => Ok((b, a)),
        std::cmp::Ordering::Equal => Err(Error::DegeneratePair(a)),
    }
}

/// A set of unordered pairs over the vertex set `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSet {
    n: u64,
    edges: BTreeSet<Edge>,
}

impl EdgeSet {
    pub fn new(n: u64) -> Self {
        EdgeSet {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: u64, edges: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut set = EdgeSet::new(n);
        for (a, b) in edges {
            set.insert(a, b)?;
        }
        Ok(set)
    }

    /// All pairs of `[0, n)`.
    pub fn complete(n: u64) -> Self {
        let edges = (0..n)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .collect();
        EdgeSet { n, edges }
    }

    /// `[B]²` over the ground `[0, n)`.
    pub fn square_of(n: u64, vertices: &NatSet) -> Result<Self> {
        let v = vertices.as_slice();
        let mut set = EdgeSet::new(n);
        for (idx, &a) in v.iter().enumerate() {
            for &b in &v[idx + 1..] {
                set.insert(a, b)?;
            }
        }
        Ok(set)
    }

    pub fn insert(&mut self, a: u64, b: u64) -> Result<bool> {
        let e = edge(a, b)?;
        if e.1 >= self.n {
            return Err(Error::OutsideWindow {
                value: e.1,
                window: self.n,
            });
        }
        Ok(self.edges.insert(e))
    }

    pub fn ground(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, a: u64, b: u64) -> bool {
        match edge(a, b) {
            Ok(e) => self.edges.contains(&e),
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.edges.is_subset(&other.edges)
    }

    /// The ordered view `{(max, min)}` as a subset of Γ = {(z₀, z₁) : z₀ > z₁}.
    pub fn to_gamma(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<_> = self.iter().map(|(a, b)| (b, a)).collect();
        v.sort_unstable();
        v
    }

    pub fn from_gamma(n: u64, points: impl IntoIterator<Item = (u64, u64)>) -> Result<Self> {
        let mut set = EdgeSet::new(n);
        for (z0, z1) in points {
            if z0 <= z1 {
                return Err(Error::InvalidParams(format!(
                    "({z0}, {z1}) is not in Γ: first coordinate must exceed the second"
                )));
            }
            set.insert(z1, z0)?;
        }
        Ok(set)
    }
}

/// A finite set of grid points `(column, index)` in ω², the carrier of Fin².
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSet(BTreeSet<(u64, u64)>);

impl GridSet {
    pub fn new() -> Self {
        GridSet(BTreeSet::new())
    }

    pub fn insert(&mut self, column: u64, index: u64) -> bool {
        self.0.insert((column, index))
    }

    pub fn contains(&self, column: u64, index: u64) -> bool {
        self.0.contains(&(column, index))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.0.iter().copied()
    }

    pub fn is_subset(&self, other: &GridSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<(u64, u64)> for GridSet {
    fn from_iter<I: IntoIterator<Item = (u64, u64)>>(iter: I) -> Self {
        GridSet(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let s: NatSet = vec![5, 1, 3, 1, 5].into();
        assert_eq!(s.as_slice(), &[1, 3, 5]);
        assert!(s.contains(3));
        assert!(!s.contains(4));
    }

    #[test]
    fn shifts() {
        assert_eq!(NatSet::from([3, 5]).shift_down(4), NatSet::from([1]));
        assert_eq!(NatSet::from([0, 1]).shift_up(2), NatSet::from([2, 3]));
        assert!(NatSet::new().shift_up(7).is_empty());
        assert!(NatSet::new().shift_down(7).is_empty());
        assert_eq!(shift(&NatSet::from([4, 9]), 4, Shift::Down), NatSet::from([0, 5]));
    }

    #[test]
    fn edges_reject_bad_pairs() {
        let mut g = EdgeSet::new(4);
        assert_eq!(g.insert(2, 2), Err(Error::DegeneratePair(2)));
        assert!(g.insert(1, 4).is_err());
        assert!(g.insert(3, 1).unwrap());
        assert!(g.contains(1, 3));
        assert_eq!(g.to_gamma(), vec![(3, 1)]);
    }

    #[test]
    fn gamma_round_trip() {
        let g = EdgeSet::complete(5);
        let back = EdgeSet::from_gamma(5, g.to_gamma()).unwrap();
        assert_eq!(g, back);
        assert!(EdgeSet::from_gamma(5, [(1, 3)]).is_err());
    }
}
