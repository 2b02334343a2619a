//! Finite-scale positivity oracles for the van der Waerden, Hindman, Ramsey,
//! summable, Fin and Fin² ideals.
//!
//! Every ideal here is defined through infinite witnesses. At desk scale each
//! one is replaced by a parameterized proxy: a set is *positive* when it holds
//! a witness of the configured size (an AP of length `ap_len`, a clique of
//! size `clique_size`, an FS-set of a basis of size `fs_size`, a reciprocal sum
//! of at least `tau`, or a column with `fs_size` points). All proxies are
//! upward closed.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, reciprocal_shifted};
use crate::sets::{EdgeSet, GridSet, NatSet};
use crate::sparse;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub ap_len: usize,
    pub clique_size: usize,
    pub fs_size: usize,
    #[serde(with = "rational::text")]
    pub tau: BigRational,
    pub window: u64,
}

impl Default for ScaleParams {
    fn default() -> Self {
        ScaleParams {
            ap_len: 5,
            clique_size: 4,
            fs_size: 3,
            tau: rational::from_u64(2),
            window: 64,
        }
    }
}

impl ScaleParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.ap_len < 3 {
            return bad("ap_len must be at least 3");
        }
        if self.clique_size < 3 {
            return bad("clique_size must be at least 3");
        }
        if self.fs_size < 2 {
            return bad("fs_size must be at least 2");
        }
        if self.tau <= BigRational::zero() {
            return bad("tau must be positive");
        }
        if self.window == 0 {
            return bad("window must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IdealId {
    Vdw,
    Hindman,
    Ramsey,
    Summable,
    Fin,
    Fin2,
}

impl IdealId {
    pub const ALL: [IdealId; 6] = [
        IdealId::Vdw,
        IdealId::Hindman,
        IdealId::Ramsey,
        IdealId::Summable,
        IdealId::Fin,
        IdealId::Fin2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdealId::Vdw => "VDW",
            IdealId::Hindman => "HINDMAN",
            IdealId::Ramsey => "RAMSEY",
            IdealId::Summable => "SUMMABLE",
            IdealId::Fin => "FIN",
            IdealId::Fin2 => "FIN2",
        }
    }
}

impl fmt::Display for IdealId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdealId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IdealId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown ideal '{s}'")))
    }
}

/// Borrowed view of the set handed to an oracle.
#[derive(Debug, Clone, Copy)]
pub enum Carrier<'a> {
    Nat(&'a NatSet),
    Edges(&'a EdgeSet),
    Grid(&'a GridSet),
}

impl Carrier<'_> {
    fn kind(&self) -> &'static str {
        match self {
            Carrier::Nat(_) => "set of naturals",
            Carrier::Edges(_) => "set of pairs",
            Carrier::Grid(_) => "set of grid points",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Carrier::Nat(a) => a.len(),
            Carrier::Edges(g) => g.len(),
            Carrier::Grid(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Owned counterpart of [`Carrier`], returned by [`tall_witness`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CarrierSet {
    Nat(NatSet),
    Edges(EdgeSet),
    Grid(GridSet),
}

impl CarrierSet {
    pub fn as_carrier(&self) -> Carrier<'_> {
        match self {
            CarrierSet::Nat(a) => Carrier::Nat(a),
            CarrierSet::Edges(g) => Carrier::Edges(g),
            CarrierSet::Grid(c) => Carrier::Grid(c),
        }
    }
}

/// Length of the longest arithmetic progression inside `a`.
pub fn longest_ap(a: &NatSet) -> usize {
    let v = a.as_slice();
    match v.len() {
        0 => return 0,
        1 => return 1,
        _ => {}
    }
    let mut best = 2;
    for (i, &start) in v.iter().enumerate() {
        for &next in &v[i + 1..] {
            let d = next - start;
            // only scan from the first term of a maximal progression
            if start >= d && a.contains(start - d) {
                continue;
            }
            let mut len = 2;
            let mut term = next;
            while let Some(t) = term.checked_add(d) {
                if !a.contains(t) {
                    break;
                }
                len += 1;
                term = t;
            }
            best = best.max(len);
        }
    }
    best
}

/// First `k`-term progression `(start, difference)` in `a`, smallest start
/// first, then smallest difference. For `k = 1` the difference is reported
/// as 1.
pub fn find_ap(a: &NatSet, k: usize) -> Option<(u64, u64)> {
    let v = a.as_slice();
    if k <= 1 {
        return v.first().map(|&x| (x, 1));
    }
    for (i, &start) in v.iter().enumerate() {
        for &next in &v[i + 1..] {
            let d = next - start;
            let hit = (2..k as u64).all(|t| {
                d.checked_mul(t)
                    .and_then(|s| s.checked_add(start))
                    .is_some_and(|x| a.contains(x))
            });
            if hit {
                return Some((start, d));
            }
        }
    }
    None
}

/// `Σ_{n ∈ A} 1/(n+1)`, exactly.
pub fn reciprocal_sum(a: &NatSet) -> BigRational {
    a.iter()
        .fold(BigRational::zero(), |acc, n| acc + reciprocal_shifted(n))
}

/// Lexicographically least `k`-clique of `g`, by backtracking over bitset
/// neighbourhoods with degree pruning.
pub fn find_clique(g: &EdgeSet, k: usize) -> Option<NatSet> {
    match k {
        0 => return Some(NatSet::new()),
        1 => return (g.ground() > 0).then(|| NatSet::from([0])),
        _ => {}
    }
    // Isolated vertices never sit in a clique of size >= 2, so relabel the
    // touched vertices in ascending order (this keeps lexicographic order).
    let labels: Vec<u64> = g
        .iter()
        .flat_map(|(a, b)| [a, b])
        .collect::<NatSet>()
        .into_vec();
    let n = labels.len();
    if n < k {
        return None;
    }
    let index = |x: u64| labels.binary_search(&x).unwrap();
    let mut adj = vec![Bits::empty(n); n];
    for (a, b) in g.iter() {
        let (ia, ib) = (index(a), index(b));
        adj[ia].set(ib);
        adj[ib].set(ia);
    }

    let mut alive = Bits::full(n);
    loop {
        let mut changed = false;
        for v in alive.ones().collect::<Vec<_>>() {
            if adj[v].and(&alive).count() + 1 < k {
                alive.clear(v);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut clique = Vec::with_capacity(k);
    if extend_clique(&adj, &mut clique, &alive, k) {
        Some(clique.into_iter().map(|i| labels[i]).collect())
    } else {
        None
    }
}

fn extend_clique(adj: &[Bits], clique: &mut Vec<usize>, cand: &Bits, k: usize) -> bool {
    if clique.len() == k {
        return true;
    }
    let need = k - clique.len();
    let mut remaining = cand.count();
    for v in cand.ones() {
        if remaining < need {
            return false;
        }
        remaining -= 1;
        let mut next = cand.and(&adj[v]);
        next.clear_through(v);
        if next.count() + 1 >= need {
            clique.push(v);
            if extend_clique(adj, clique, &next, k) {
                return true;
            }
            clique.pop();
        }
    }
    false
}

#[derive(Debug, Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    /// Clears every bit at positions `<= i`.
    fn clear_through(&mut self, i: usize) {
        let w = i / 64;
        for word in &mut self.0[..w] {
            *word = 0;
        }
        let keep = if i % 64 == 63 { 0 } else { !0u64 << (i % 64 + 1) };
        self.0[w] &= keep;
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }
}

/// Columns `n` with at least `t` points `(n, k)` in `c`.
pub fn heavy_columns(c: &GridSet, t: usize) -> NatSet {
    let mut out = Vec::new();
    let mut current: Option<(u64, usize)> = None;
    for (col, _) in c.iter() {
        current = match current {
            Some((c0, cnt)) if c0 == col => Some((c0, cnt + 1)),
            Some((c0, cnt)) => {
                if cnt >= t {
                    out.push(c0);
                }
                Some((col, 1))
            }
            None => Some((col, 1)),
        };
    }
    if let Some((c0, cnt)) = current {
        if cnt >= t {
            out.push(c0);
        }
    }
    NatSet::from_sorted(out)
}

fn check_window(a: Carrier<'_>, window: u64) -> Result<()> {
    let top = match a {
        Carrier::Nat(s) => s.last(),
        Carrier::Edges(g) => g.iter().map(|(_, b)| b).max(),
        Carrier::Grid(c) => c.iter().map(|(n, k)| n.max(k)).max(),
    };
    match top {
        Some(value) if value >= window => Err(Error::OutsideWindow { value, window }),
        _ => Ok(()),
    }
}

fn mismatch(id: IdealId, a: Carrier<'_>) -> Error {
    Error::CarrierMismatch {
        ideal: id.name(),
        carrier: a.kind(),
    }
}

/// Positivity of `a` for ideal `id` at scale `p`.
pub fn is_positive(a: Carrier<'_>, id: IdealId, p: &ScaleParams) -> Result<bool> {
    check_window(a, p.window)?;
    match (id, a) {
        (IdealId::Vdw, Carrier::Nat(s)) => Ok(longest_ap(s) >= p.ap_len),
        (IdealId::Hindman, Carrier::Nat(s)) => Ok(sparse::find_fs_subset(s, p.fs_size).is_some()),
        (IdealId::Summable, Carrier::Nat(s)) => Ok(reciprocal_sum(s) >= p.tau),
        (IdealId::Fin, Carrier::Nat(s)) => Ok(2 * s.len() as u64 >= p.window),
        (IdealId::Ramsey, Carrier::Edges(g)) => Ok(find_clique(g, p.clique_size).is_some()),
        (IdealId::Fin2, Carrier::Grid(c)) => Ok(!heavy_columns(c, p.fs_size).is_empty()),
        _ => Err(mismatch(id, a)),
    }
}

/// A subset of `a` with at least `target` elements that is not positive.
pub fn tall_witness(
    a: Carrier<'_>,
    id: IdealId,
    p: &ScaleParams,
    target: usize,
) -> Result<CarrierSet> {
    p.validate()?;
    if a.len() < target {
        return Err(Error::TooSmall {
            got: a.len(),
            min: target,
        });
    }
    let cannot = || Error::CannotAvoid { target };
    let witness = match (id, a) {
        (IdealId::Vdw, Carrier::Nat(s)) => {
            let mut chosen = NatSet::new();
            for x in s.iter() {
                if chosen.len() == target {
                    break;
                }
                // x is the largest so far: a new 3-AP must end at x
                let closes_ap = chosen
                    .iter()
                    .any(|m| 2 * m >= x && chosen.contains(2 * m - x) && 2 * m - x != m);
                if !closes_ap {
                    chosen.insert(x);
                }
            }
            CarrierSet::Nat(chosen)
        }
        (IdealId::Hindman, Carrier::Nat(s)) => {
            let mut chosen = NatSet::new();
            for x in s.iter().rev().filter(|&x| x > 0) {
                if chosen.len() == target {
                    break;
                }
                if chosen.iter().all(|u| !chosen.contains(u + x)) {
                    chosen.insert(x);
                }
            }
            CarrierSet::Nat(chosen)
        }
        (IdealId::Summable, Carrier::Nat(s)) => {
            CarrierSet::Nat(s.iter().rev().take(target).collect())
        }
        (IdealId::Fin, Carrier::Nat(s)) => CarrierSet::Nat(s.iter().take(target).collect()),
        (IdealId::Ramsey, Carrier::Edges(g)) => {
            let mut used = NatSet::new();
            let mut m = EdgeSet::new(g.ground());
            for (x, y) in g.iter() {
                if m.len() == target {
                    break;
                }
                if !used.contains(x) && !used.contains(y) {
                    used.insert(x);
                    used.insert(y);
                    m.insert(x, y)?;
                }
            }
            CarrierSet::Edges(m)
        }
        (IdealId::Fin2, Carrier::Grid(c)) => {
            let mut out = GridSet::new();
            let mut col: Option<(u64, usize)> = None;
            for (n, k) in c.iter() {
                if out.len() == target {
                    break;
                }
                let used = match col {
                    Some((c0, cnt)) if c0 == n => cnt,
                    _ => 0,
                };
                if used + 1 < p.fs_size {
                    out.insert(n, k);
                    col = Some((n, used + 1));
                }
            }
            CarrierSet::Grid(out)
        }
        _ => return Err(mismatch(id, a)),
    };
    if witness.as_carrier().len() < target || is_positive(witness.as_carrier(), id, p)? {
        return Err(cannot());
    }
    Ok(witness)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn brute_longest_ap(a: &NatSet) -> usize {
        let v = a.as_slice();
        if v.len() <= 1 {
            return v.len();
        }
        let top = *v.last().unwrap();
        let mut best = 1;
        for &s in v {
            for d in 1..=top {
                let mut len = 0;
                while a.contains(s + len * d) {
                    len += 1;
                }
                best = best.max(len as usize);
            }
        }
        best
    }

    fn params() -> ScaleParams {
        ScaleParams {
            window: 1 << 12,
            ..ScaleParams::default()
        }
    }

    #[test]
    fn longest_ap_examples() {
        assert_eq!(longest_ap(&NatSet::new()), 0);
        assert_eq!(longest_ap(&NatSet::from([7])), 1);
        assert_eq!(longest_ap(&NatSet::from([0, 2, 4, 6])), 4);
        assert_eq!(longest_ap(&NatSet::from([1, 2, 3, 5, 8])), 3);
        for s in [NatSet::from([0, 2, 4, 6]), NatSet::from([1, 2, 3, 5, 8])] {
            assert_eq!(longest_ap(&s), brute_longest_ap(&s));
        }
    }

    #[test]
    fn find_ap_examples() {
        assert_eq!(find_ap(&NatSet::from([3, 5, 7]), 3), Some((3, 2)));
        assert_eq!(find_ap(&NatSet::from([4]), 1), Some((4, 1)));
        assert_eq!(find_ap(&NatSet::from([1, 2, 4, 8]), 3), None);
        assert_eq!(find_ap(&NatSet::from([1, 2, 3, 5, 7, 9]), 3), Some((1, 1)));
        assert_eq!(find_ap(&NatSet::from([1, 3, 5, 7, 9]), 5), Some((1, 2)));
    }

    #[test]
    fn reciprocal_sum_examples() {
        assert_eq!(reciprocal_sum(&NatSet::from([0, 1, 3])), ratio(7, 4));
        assert_eq!(reciprocal_sum(&NatSet::new()), BigRational::zero());
        let s: NatSet = (1..=10).map(|i| (1u64 << i) - 1).collect();
        assert_eq!(reciprocal_sum(&s), ratio(1023, 1024));
    }

    #[test]
    fn clique_examples() {
        let tri = EdgeSet::from_edges(3, [(0, 1), (0, 2), (1, 2)]).unwrap();
        assert_eq!(find_clique(&tri, 3), Some(NatSet::from([0, 1, 2])));
        let star = EdgeSet::from_edges(6, (1..=5).map(|i| (0, i))).unwrap();
        assert_eq!(find_clique(&star, 3), None);
        assert_eq!(find_clique(&star, 2), Some(NatSet::from([0, 1])));
        assert_eq!(find_clique(&star, 1), Some(NatSet::from([0])));
    }

    #[test]
    fn clique_is_lexicographically_least() {
        // K4 on {2,3,5,7} and a triangle on {0,1,9}
        let mut g = EdgeSet::new(10);
        for (a, b) in [(2, 3), (2, 5), (2, 7), (3, 5), (3, 7), (5, 7), (0, 1), (0, 9), (1, 9)] {
            g.insert(a, b).unwrap();
        }
        assert_eq!(find_clique(&g, 3), Some(NatSet::from([0, 1, 9])));
        assert_eq!(find_clique(&g, 4), Some(NatSet::from([2, 3, 5, 7])));
        assert_eq!(find_clique(&g, 5), None);
    }

    #[test]
    fn heavy_column_examples() {
        let c: GridSet = [(0, 0), (0, 1), (1, 5)].into_iter().collect();
        assert_eq!(heavy_columns(&c, 2), NatSet::from([0]));
        assert!(heavy_columns(&GridSet::new(), 1).is_empty());
        let c: GridSet = (0..10).map(|k| (3, k)).collect();
        assert_eq!(heavy_columns(&c, 10), NatSet::from([3]));
    }

    #[test]
    fn positivity_examples() {
        let p = ScaleParams {
            ap_len: 5,
            ..params()
        };
        assert!(is_positive(Carrier::Nat(&NatSet::range(0, 10)), IdealId::Vdw, &p).unwrap());
        let p1 = ScaleParams {
            tau: ratio(1, 1),
            ..params()
        };
        assert!(!is_positive(Carrier::Nat(&NatSet::new()), IdealId::Summable, &p1).unwrap());
        let p3 = ScaleParams {
            ap_len: 3,
            ..params()
        };
        let pow2: NatSet = (0..12).map(|i| 1u64 << i).collect();
        assert!(!is_positive(Carrier::Nat(&pow2), IdealId::Vdw, &p3).unwrap());
    }

    #[test]
    fn carrier_mismatch_and_window() {
        let p = params();
        let g = EdgeSet::complete(4);
        assert!(matches!(
            is_positive(Carrier::Edges(&g), IdealId::Vdw, &p),
            Err(Error::CarrierMismatch { .. })
        ));
        assert!(matches!(
            is_positive(Carrier::Nat(&NatSet::new()), IdealId::Fin2, &p),
            Err(Error::CarrierMismatch { .. })
        ));
        assert!(matches!(
            is_positive(Carrier::Nat(&NatSet::from([1 << 20])), IdealId::Vdw, &p),
            Err(Error::OutsideWindow { .. })
        ));
    }

    #[test]
    fn fin_proxy_is_half_window() {
        let p = ScaleParams {
            window: 10,
            ..ScaleParams::default()
        };
        assert!(!is_positive(Carrier::Nat(&NatSet::range(0, 4)), IdealId::Fin, &p).unwrap());
        assert!(is_positive(Carrier::Nat(&NatSet::range(0, 5)), IdealId::Fin, &p).unwrap());
    }

    #[test]
    fn tall_witness_examples() {
        let p = ScaleParams {
            fs_size: 2,
            ..params()
        };
        let a = NatSet::range(1, 21);
        let CarrierSet::Nat(b) = tall_witness(Carrier::Nat(&a), IdealId::Hindman, &p, 7).unwrap()
        else {
            panic!("expected a set of naturals");
        };
        assert_eq!(b.len(), 7);
        assert!(b.is_subset(&a));
        for u in b.iter() {
            for v in b.iter().filter(|&v| v != u) {
                assert!(!b.contains(u + v));
            }
        }

        let p = ScaleParams {
            clique_size: 3,
            ..params()
        };
        let k5 = EdgeSet::complete(5);
        let CarrierSet::Edges(m) = tall_witness(Carrier::Edges(&k5), IdealId::Ramsey, &p, 2).unwrap()
        else {
            panic!("expected edges");
        };
        assert_eq!(m.len(), 2);
        assert!(m.is_subset(&k5));
        assert_eq!(find_clique(&m, 3), None);

        let p = ScaleParams {
            ap_len: 3,
            ..params()
        };
        let two = NatSet::from([0, 1]);
        assert_eq!(
            tall_witness(Carrier::Nat(&two), IdealId::Vdw, &p, 2).unwrap(),
            CarrierSet::Nat(two)
        );
    }

    #[test]
    fn tall_witness_summable_can_fail() {
        let p = ScaleParams {
            tau: ratio(1, 1),
            ..params()
        };
        let a = NatSet::from([0, 1, 2]);
        assert_eq!(
            tall_witness(Carrier::Nat(&a), IdealId::Summable, &p, 3),
            Err(Error::CannotAvoid { target: 3 })
        );
        let CarrierSet::Nat(b) = tall_witness(Carrier::Nat(&a), IdealId::Summable, &p, 2).unwrap()
        else {
            panic!("expected naturals");
        };
        assert_eq!(b, NatSet::from([1, 2]));
    }
}
