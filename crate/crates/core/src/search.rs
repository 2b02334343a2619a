//! Exhaustive micro-scale search for Katětov reductions between finite
//! truncations of the ideals.
//!
//! A map `f: dst → src` is accepted when `f[B]` is src-positive for every
//! inclusion-minimal dst-positive `B`. Since every proxy is upward closed,
//! checking minimal sets is enough.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideal::{is_positive, Carrier, IdealId, ScaleParams};
use crate::report::Report;
use crate::sets::{EdgeSet, GridSet, NatSet};
use crate::sparse;

/// Cap on natural-number carriers enumerated by `positive_family`.
pub const NAT_CAP: usize = 20;
/// Cap on vertices of a pair grid enumerated by `positive_family`.
pub const VERTEX_CAP: u64 = 8;
/// Cap on either side of `search_reduction`.
pub const SEARCH_CAP: usize = 10;

pub const CAVEAT: &str = "finite-scale evidence only: the outcome concerns these truncations and proxies, not the ideals themselves";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Ground {
    /// `[start, end)`.
    Segment { start: u64, end: u64 },
    /// All pairs of `[0, n)`.
    PairGrid { n: u64 },
    /// Points `(column, index)` with `column < columns`, `index < rows`.
    Grid { columns: u64, rows: u64 },
    /// `FS(basis)`.
    FsFragment { basis: Vec<u64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elem {
    Nat(u64),
    Pair(u64, u64),
    Cell(u64, u64),
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Nat(x) => write!(f, "{x}"),
            Elem::Pair(i, j) => write!(f, "{{{i},{j}}}"),
            Elem::Cell(c, i) => write!(f, "({c},{i})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteIdealSpec {
    pub id: IdealId,
    pub params: ScaleParams,
    pub ground: Ground,
}

impl FiniteIdealSpec {
    pub fn new(id: IdealId, params: ScaleParams, ground: Ground) -> Result<Self> {
        params.validate()?;
        let nat_ideal = matches!(id, IdealId::Vdw | IdealId::Hindman | IdealId::Summable | IdealId::Fin);
        let ok = match &ground {
            Ground::Segment { .. } | Ground::FsFragment { .. } => nat_ideal,
            Ground::PairGrid { .. } => id == IdealId::Ramsey,
            Ground::Grid { .. } => id == IdealId::Fin2,
        };
        if !ok {
            return Err(Error::CarrierMismatch {
                ideal: id.name(),
                carrier: match ground {
                    Ground::Segment { .. } => "segment",
                    Ground::PairGrid { .. } => "pair grid",
                    Ground::Grid { .. } => "grid",
                    Ground::FsFragment { .. } => "FS fragment",
                },
            });
        }
        let spec = FiniteIdealSpec { id, params, ground };
        let top = match &spec.ground {
            Ground::Segment { start, end } => (end > start).then(|| end - 1),
            Ground::PairGrid { n } => n.checked_sub(1),
            Ground::Grid { columns, rows } => (*columns > 0 && *rows > 0).then(|| (columns - 1).max(rows - 1)),
            Ground::FsFragment { basis } => {
                if basis.len() > NAT_CAP {
                    return Err(Error::TooLarge { what: "FS fragment basis", size: basis.len(), cap: NAT_CAP });
                }
                sparse::fs(&basis.iter().copied().collect::<NatSet>())?.as_slice().last().copied()
            }
        };
        if let Some(value) = top.filter(|&t| t >= spec.params.window) {
            return Err(Error::OutsideWindow { value, window: spec.params.window });
        }
        Ok(spec)
    }

    /// Carrier elements in their canonical order.
    pub fn elements(&self) -> Result<Vec<Elem>> {
        let cap_nat = |n: usize| {
            if n > NAT_CAP {
                Err(Error::TooLarge { what: "carrier", size: n, cap: NAT_CAP })
            } else {
                Ok(())
            }
        };
        Ok(match &self.ground {
            Ground::Segment { start, end } => {
                cap_nat(end.saturating_sub(*start) as usize)?;
                (*start..*end).map(Elem::Nat).collect()
            }
            Ground::FsFragment { basis } => {
                let fs = sparse::fs(&basis.iter().copied().collect::<NatSet>())?;
                cap_nat(fs.len())?;
                fs.iter().map(Elem::Nat).collect()
            }
            Ground::PairGrid { n } => {
                if *n > VERTEX_CAP {
                    return Err(Error::TooLarge { what: "pair grid vertices", size: *n as usize, cap: VERTEX_CAP as usize });
                }
                (0..*n).flat_map(|j| (0..j).map(move |i| Elem::Pair(i, j))).collect()
            }
            Ground::Grid { columns, rows } => {
                cap_nat((columns * rows) as usize)?;
                (0..*columns).flat_map(|c| (0..*rows).map(move |i| Elem::Cell(c, i))).collect()
            }
        })
    }

    /// Positivity of the set of carrier elements at `idx`.
    pub fn is_positive_at(&self, elems: &[Elem], idx: impl IntoIterator<Item = usize>) -> Result<bool> {
        match &self.ground {
            Ground::Segment { .. } | Ground::FsFragment { .. } => {
                let s: NatSet = idx
                    .into_iter()
                    .map(|i| match elems[i] {
                        Elem::Nat(x) => x,
                        _ => unreachable!("natural carrier"),
                    })
                    .collect();
                is_positive(Carrier::Nat(&s), self.id, &self.params)
            }
            Ground::PairGrid { n } => {
                let g = EdgeSet::from_edges(
                    *n,
                    idx.into_iter().map(|i| match elems[i] {
                        Elem::Pair(a, b) => (a, b),
                        _ => unreachable!("pair carrier"),
                    }),
                )?;
                is_positive(Carrier::Edges(&g), self.id, &self.params)
            }
            Ground::Grid { .. } => {
                let g: GridSet = idx
                    .into_iter()
                    .map(|i| match elems[i] {
                        Elem::Cell(c, k) => (c, k),
                        _ => unreachable!("grid carrier"),
                    })
                    .collect();
                is_positive(Carrier::Grid(&g), self.id, &self.params)
            }
        }
    }

    /// Whether `x ↦ σ(x)` symmetries let the first image be fixed to `i`.
    fn orbit_minimal(&self, elems: &[Elem], i: usize) -> bool {
        match (&self.ground, self.id) {
            (_, IdealId::Fin) | (Ground::PairGrid { .. }, _) | (Ground::Grid { .. }, _) => i == 0,
            (Ground::Segment { .. }, IdealId::Vdw) => {
                // reflection x ↦ start + end - 1 - x maps progressions to progressions
                let mirror = elems.len() - 1 - i;
                i <= mirror
            }
            _ => true,
        }
    }
}

/// Inclusion-minimal positive sets, as sorted index lists into `elements`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositiveFamily {
    pub elements: Vec<Elem>,
    pub sets: Vec<Vec<usize>>,
}

impl PositiveFamily {
    pub fn set_elements(&self, k: usize) -> Vec<Elem> {
        self.sets[k].iter().map(|&i| self.elements[i]).collect()
    }
}

fn combinations(n: usize, m: usize, mut visit: impl FnMut(&[usize])) {
    fn go(n: usize, m: usize, start: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == m {
            visit(cur);
            return;
        }
        for x in start..=n.saturating_sub(m - cur.len()) {
            if x >= n {
                break;
            }
            cur.push(x);
            go(n, m, x + 1, cur, visit);
            cur.pop();
        }
    }
    if m <= n {
        go(n, m, 0, &mut Vec::with_capacity(m), &mut visit);
    }
}

pub fn positive_family(spec: &FiniteIdealSpec) -> Result<PositiveFamily> {
    let elements = spec.elements()?;
    let n = elements.len();
    let values: Vec<u64> = elements
        .iter()
        .map(|e| match e {
            Elem::Nat(x) => *x,
            _ => 0,
        })
        .collect();
    let index_of = |x: u64| values.binary_search(&x).ok();
    let p = &spec.params;
    let mut sets: Vec<Vec<usize>> = Vec::new();
    match spec.id {
        IdealId::Vdw => {
            let k = p.ap_len as u64;
            for (ia, &a) in values.iter().enumerate() {
                let top = *values.last().unwrap_or(&0);
                let mut d = 1;
                while a + (k - 1) * d <= top {
                    let idx: Option<Vec<usize>> = (0..k).map(|t| index_of(a + t * d)).collect();
                    if let Some(idx) = idx {
                        debug_assert_eq!(idx[0], ia);
                        sets.push(idx);
                    }
                    d += 1;
                }
            }
        }
        IdealId::Ramsey => {
            let Ground::PairGrid { n: v } = spec.ground else { unreachable!() };
            let edge_index = |i: u64, j: u64| (j * (j - 1) / 2 + i) as usize;
            combinations(v as usize, p.clique_size, |verts| {
                let mut idx = Vec::new();
                for (b, &j) in verts.iter().enumerate() {
                    for &i in &verts[..b] {
                        idx.push(edge_index(i as u64, j as u64));
                    }
                }
                idx.sort_unstable();
                sets.push(idx);
            });
        }
        IdealId::Hindman => {
            let positive: Vec<usize> = (0..n).filter(|&i| values[i] > 0).collect();
            combinations(positive.len(), p.fs_size, |pick| {
                let basis: NatSet = pick.iter().map(|&q| values[positive[q]]).collect();
                if let Ok(fs) = sparse::fs(&basis) {
                    let idx: Option<Vec<usize>> = fs.iter().map(index_of).collect();
                    if let Some(idx) = idx {
                        sets.push(idx);
                    }
                }
            });
            sets.sort();
            sets.dedup();
            let all = sets.clone();
            sets.retain(|s| {
                !all.iter().any(|t| t.len() < s.len() && t.iter().all(|x| s.binary_search(x).is_ok()))
            });
        }
        IdealId::Summable => {
            let recips: Vec<_> = values.iter().map(|&x| crate::rational::reciprocal_shifted(x)).collect();
            let mut suffix = vec![num_traits::Zero::zero(); n + 1];
            for i in (0..n).rev() {
                suffix[i] = &suffix[i + 1] + &recips[i];
            }
            let mut cur = Vec::new();
            summable_dfs(&recips, &suffix, &p.tau, 0, &num_traits::Zero::zero(), &mut cur, &mut sets);
        }
        IdealId::Fin => {
            let m = p.window.div_ceil(2) as usize;
            combinations(n, m, |pick| sets.push(pick.to_vec()));
        }
        IdealId::Fin2 => {
            let Ground::Grid { columns, rows } = spec.ground else { unreachable!() };
            for c in 0..columns as usize {
                combinations(rows as usize, p.fs_size, |pick| {
                    sets.push(pick.iter().map(|&i| c * rows as usize + i).collect());
                });
            }
        }
    }
    sets.sort();
    sets.dedup();
    Ok(PositiveFamily { elements, sets })
}

fn summable_dfs(
    recips: &[num_rational::BigRational],
    suffix: &[num_rational::BigRational],
    tau: &num_rational::BigRational,
    from: usize,
    sum: &num_rational::BigRational,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    for i in from..recips.len() {
        if &(sum + &suffix[i]) < tau {
            return;
        }
        let next = sum + &recips[i];
        cur.push(i);
        if &next >= tau {
            // elements are added in ascending order, so the last one has the
            // smallest reciprocal; the set is minimal iff dropping it falls short
            if &(&next - &recips[i]) < tau {
                out.push(cur.clone());
            }
        } else {
            summable_dfs(recips, suffix, tau, i + 1, &next, cur, out);
        }
        cur.pop();
    }
}

/// `f: dst → src` given by src indices, one per dst element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionCandidate {
    pub map: Vec<usize>,
}

impl ReductionCandidate {
    /// Builds a candidate from explicit `(dst element, src element)` pairs.
    pub fn from_pairs(src: &[Elem], dst: &[Elem], pairs: &[(Elem, Elem)]) -> Result<Self> {
        let mut map = vec![usize::MAX; dst.len()];
        for (d, s) in pairs {
            let di = dst.iter().position(|e| e == d).ok_or_else(|| Error::InvalidParams(format!("{d} is not a dst element")))?;
            let si = src.iter().position(|e| e == s).ok_or_else(|| Error::InvalidParams(format!("{s} is not a src element")))?;
            map[di] = si;
        }
        if let Some(i) = map.iter().position(|&m| m == usize::MAX) {
            return Err(Error::Incomplete(format!("no image for {}", dst[i])));
        }
        Ok(ReductionCandidate { map })
    }

    pub fn pairs(&self, src: &[Elem], dst: &[Elem]) -> Vec<(Elem, Elem)> {
        self.map.iter().enumerate().map(|(d, &s)| (dst[d], src[s])).collect()
    }
}

/// Checks that `f[B]` is src-positive for every minimal dst-positive `B`.
pub fn verify_reduction(f: &ReductionCandidate, src: &FiniteIdealSpec, dst: &FiniteIdealSpec) -> Result<Report> {
    let src_elems = src.elements()?;
    let family = positive_family(dst)?;
    let mut report = Report::new("verify-reduction").with_caveat(CAVEAT);
    let total = f.map.len() == family.elements.len() && f.map.iter().all(|&s| s < src_elems.len());
    report.push(
        "total",
        total,
        format!("{} images for {} dst elements", f.map.len(), family.elements.len()),
    );
    if !total {
        return Ok(report);
    }
    for (k, b) in family.sets.iter().enumerate() {
        let mut image: Vec<usize> = b.iter().map(|&i| f.map[i]).collect();
        image.sort_unstable();
        image.dedup();
        if !src.is_positive_at(&src_elems, image.iter().copied())? {
            let show = |v: Vec<Elem>| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
            report.push(
                "contrapositive",
                false,
                format!(
                    "B = {{{}}} is dst-positive but f[B] = {{{}}} is not src-positive",
                    show(family.set_elements(k)),
                    show(image.iter().map(|&i| src_elems[i]).collect())
                ),
            );
            return Ok(report);
        }
    }
    report.push(
        "contrapositive",
        true,
        format!("{} minimal dst-positive sets have src-positive images", family.sets.len()),
    );
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found { map: ReductionCandidate },
    Exhausted { nodes: u64 },
    /// Some branch ran out of nodes before a least witness could be certified.
    BudgetExceeded { branch: usize, node_limit: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    /// Node budget per top-level branch.
    pub node_limit: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { node_limit: 50_000_000 }
    }
}

struct Searcher<'a> {
    /// For each dst index, the minimal positive sets containing it.
    touching: Vec<Vec<&'a [usize]>>,
    /// Fewest src points to add to a mask before it becomes positive.
    min_add: Vec<u8>,
    src_len: usize,
    node_limit: u64,
}

enum Branch {
    Found(Vec<usize>),
    Exhausted(u64),
    Exceeded,
}

impl Searcher<'_> {
    fn feasible(&self, map: &[usize], i: usize) -> bool {
        self.touching[i].iter().all(|b| {
            let mut mask = 0usize;
            let mut open = 0u8;
            for &e in b.iter() {
                if e <= i {
                    mask |= 1 << map[e];
                } else {
                    open += 1;
                }
            }
            self.min_add[mask] <= open
        })
    }

    fn run(&self, first: usize, dst_len: usize) -> Branch {
        let mut map = vec![0usize; dst_len];
        map[0] = first;
        let mut nodes = 1u64;
        if !self.feasible(&map, 0) {
            return Branch::Exhausted(nodes);
        }
        if dst_len == 1 {
            return Branch::Found(map);
        }
        // iterative DFS over positions 1..dst_len; next[i] is the next value to try
        let mut pos = 1usize;
        let mut next = vec![0usize; dst_len];
        loop {
            if next[pos] == self.src_len {
                next[pos] = 0;
                pos -= 1;
                if pos == 0 {
                    return Branch::Exhausted(nodes);
                }
                continue;
            }
            map[pos] = next[pos];
            next[pos] += 1;
            nodes += 1;
            if nodes > self.node_limit {
                return Branch::Exceeded;
            }
            if self.feasible(&map, pos) {
                if pos + 1 == dst_len {
                    return Branch::Found(map);
                }
                pos += 1;
            }
        }
    }
}

/// Lexicographically least reduction `dst → src`, or exhaustion.
pub fn search_reduction(src: &FiniteIdealSpec, dst: &FiniteIdealSpec, limits: &SearchLimits) -> Result<SearchOutcome> {
    let src_elems = src.elements()?;
    let family = positive_family(dst)?;
    let (s, d) = (src_elems.len(), family.elements.len());
    for (what, size) in [("src carrier", s), ("dst carrier", d)] {
        if size > SEARCH_CAP {
            return Err(Error::TooLarge { what, size, cap: SEARCH_CAP });
        }
    }
    if d == 0 {
        return Ok(SearchOutcome::Found { map: ReductionCandidate { map: Vec::new() } });
    }
    if s == 0 {
        return Ok(SearchOutcome::Exhausted { nodes: 0 });
    }
    let full = 1usize << s;
    let mut positive = vec![false; full];
    for (mask, slot) in positive.iter_mut().enumerate() {
        *slot = src.is_positive_at(&src_elems, (0..s).filter(|b| mask >> b & 1 == 1))?;
    }
    let mut min_add = vec![u8::MAX; full];
    for mask in (0..full).rev() {
        min_add[mask] = if positive[mask] {
            0
        } else {
            (0..s)
                .filter(|b| mask >> b & 1 == 0)
                .map(|b| min_add[mask | 1 << b].saturating_add(1))
                .min()
                .unwrap_or(u8::MAX)
        };
    }
    let mut touching: Vec<Vec<&[usize]>> = vec![Vec::new(); d];
    for b in &family.sets {
        for &e in b {
            touching[e].push(b.as_slice());
        }
    }
    let searcher = Searcher { touching, min_add, src_len: s, node_limit: limits.node_limit };
    let firsts: Vec<usize> = (0..s).filter(|&i| src.orbit_minimal(&src_elems, i)).collect();
    let decided = firsts
        .par_iter()
        .enumerate()
        .map(|(k, &first)| (k, searcher.run(first, d)))
        .find_map_first(|(k, r)| match r {
            Branch::Exhausted(_) => None,
            other => Some((k, other)),
        });
    Ok(match decided {
        Some((_, Branch::Found(map))) => SearchOutcome::Found { map: ReductionCandidate { map } },
        Some((k, _)) => SearchOutcome::BudgetExceeded { branch: k, node_limit: limits.node_limit },
        None => {
            // every branch was exhausted; recount sequentially for a stable total
            let nodes = firsts
                .iter()
                .map(|&first| match searcher.run(first, d) {
                    Branch::Exhausted(n) => n,
                    _ => 0,
                })
                .sum();
            SearchOutcome::Exhausted { nodes }
        }
    })
}
