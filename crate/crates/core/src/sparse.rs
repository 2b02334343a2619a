//! Finite-sums sets, sparse and very sparse bases, and decomposition
//! (`α_D`) machinery.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sets::NatSet;

/// Largest basis whose finite sums are enumerated explicitly.
pub const FS_CAP: usize = 24;
/// Largest basis checked pairwise for very-sparseness.
pub const VERY_SPARSE_CAP: usize = 16;
/// Largest non-super-increasing basis backed by a lookup table.
pub const TABLE_CAP: usize = 20;

fn too_large(what: &'static str, size: usize, cap: usize) -> Error {
    Error::TooLarge { what, size, cap }
}

/// All nonempty subset sums paired with their index masks, in subset order.
fn subset_sums(elements: &[u64]) -> Result<Vec<(u64, u64)>> {
    let mut out: Vec<(u64, u64)> = Vec::with_capacity((1usize << elements.len()) - 1);
    for (i, &e) in elements.iter().enumerate() {
        let bit = 1u64 << i;
        let len = out.len();
        out.push((e, bit));
        for j in 0..len {
            let (s, m) = out[j];
            let t = s
                .checked_add(e)
                .ok_or_else(|| Error::InvalidParams("finite sum overflows u64".into()))?;
            out.push((t, m | bit));
        }
    }
    Ok(out)
}

/// `FS(B)`: sums of nonempty subsets of `b`.
pub fn fs(b: &NatSet) -> Result<NatSet> {
    if b.len() > FS_CAP {
        return Err(too_large("FS basis", b.len(), FS_CAP));
    }
    Ok(subset_sums(b.as_slice())?.into_iter().map(|(s, _)| s).collect())
}

/// Whether all nonempty subset sums of `d` are pairwise distinct.
pub fn is_sparse(d: &NatSet) -> Result<bool> {
    if d.len() > FS_CAP {
        return Err(too_large("sparse candidate", d.len(), FS_CAP));
    }
    let mut sums: Vec<u64> = subset_sums(d.as_slice())?.into_iter().map(|(s, _)| s).collect();
    sums.sort_unstable();
    Ok(sums.windows(2).all(|w| w[0] != w[1]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Decoder {
    /// Every element is a power of two; `α` is the binary expansion.
    Binary { mask: u64 },
    /// Each element exceeds the sum of all smaller ones.
    SuperIncreasing,
    /// Sorted `(sum, index mask)` pairs.
    Table(Vec<(u64, u64)>),
}

/// A validated sparse set `D`: every element of `FS(D)` has exactly one
/// decomposition `α_D(x) ⊆ D`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct SparseBasis {
    elements: Vec<u64>,
    decoder: Decoder,
}

impl SparseBasis {
    pub fn new(d: &NatSet) -> Result<Self> {
        let elements = d.as_slice().to_vec();
        if elements.len() > 64 {
            return Err(too_large("sparse basis", elements.len(), 64));
        }
        if elements.iter().try_fold(0u64, |acc, &e| acc.checked_add(e)).is_none() {
            return Err(Error::InvalidParams("basis sum overflows u64".into()));
        }
        if !elements.is_empty() && elements.iter().all(|e| e.is_power_of_two()) {
            let mask = elements.iter().fold(0, |m, e| m | e);
            return Ok(SparseBasis {
                elements,
                decoder: Decoder::Binary { mask },
            });
        }
        let mut running = 0u64;
        let super_increasing = elements.iter().all(|&e| {
            let ok = e > running;
            running += e;
            ok
        });
        if super_increasing {
            return Ok(SparseBasis {
                elements,
                decoder: Decoder::SuperIncreasing,
            });
        }
        if elements.len() > TABLE_CAP {
            return Err(too_large("sparse basis", elements.len(), TABLE_CAP));
        }
        let mut table = subset_sums(&elements)?;
        table.sort_unstable();
        if let Some(w) = table.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::NotSparse(w[0].0));
        }
        Ok(SparseBasis {
            elements,
            decoder: Decoder::Table(table),
        })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_natset(&self) -> NatSet {
        NatSet::from_sorted(self.elements.clone())
    }

    /// Index mask of `α_D(x)`, or `None` when `x ∉ FS(D)`.
    pub fn alpha_mask(&self, x: u64) -> Option<u64> {
        if x == 0 {
            return None;
        }
        match &self.decoder {
            Decoder::Binary { mask } => {
                if x & !mask != 0 {
                    return None;
                }
                let mut m = 0;
                for (i, e) in self.elements.iter().enumerate() {
                    if x & e != 0 {
                        m |= 1 << i;
                    }
                }
                Some(m)
            }
            Decoder::SuperIncreasing => {
                let mut rest = x;
                let mut m = 0;
                for (i, &e) in self.elements.iter().enumerate().rev() {
                    if e <= rest {
                        rest -= e;
                        m |= 1 << i;
                    }
                }
                (rest == 0).then_some(m)
            }
            Decoder::Table(t) => t
                .binary_search_by_key(&x, |&(s, _)| s)
                .ok()
                .map(|i| t[i].1),
        }
    }

    pub fn contains_fs(&self, x: u64) -> bool {
        self.alpha_mask(x).is_some()
    }

    pub fn mask_to_set(&self, mask: u64) -> NatSet {
        NatSet::from_sorted(
            self.elements
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect(),
        )
    }

    pub fn mask_sum(&self, mask: u64) -> u64 {
        self.elements
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .sum()
    }

    /// `(x, mask of α_D(x))` for every `x ∈ FS(D)`, ascending in `x`.
    pub fn fs_with_masks(&self) -> Result<Vec<(u64, u64)>> {
        if self.len() > FS_CAP {
            return Err(too_large("FS basis", self.len(), FS_CAP));
        }
        let mut v = subset_sums(&self.elements)?;
        v.sort_unstable();
        Ok(v)
    }

    pub fn fs(&self) -> Result<NatSet> {
        Ok(NatSet::from_sorted(
            self.fs_with_masks()?.into_iter().map(|(s, _)| s).collect(),
        ))
    }
}

impl TryFrom<Vec<u64>> for SparseBasis {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        SparseBasis::new(&NatSet::from(v))
    }
}

impl From<SparseBasis> for Vec<u64> {
    fn from(b: SparseBasis) -> Self {
        b.elements
    }
}

/// `α_D(x)`.
pub fn alpha(d: &SparseBasis, x: u64) -> Result<NatSet> {
    d.alpha_mask(x)
        .map(|m| d.mask_to_set(m))
        .ok_or(Error::NotInFs(x))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerySparseFlag {
    pub verified: bool,
    pub counterexample: Option<(u64, u64)>,
}

/// Checks `α_D(x) ∩ α_D(y) ≠ ∅ ⟹ x + y ∉ FS(D)` over all `x ≤ y` in `FS(D)`
/// and reports the lexicographically first violation.
pub fn is_very_sparse(d: &NatSet) -> Result<VerySparseFlag> {
    if d.len() > VERY_SPARSE_CAP {
        return Err(too_large("very sparse candidate", d.len(), VERY_SPARSE_CAP));
    }
    let basis = match SparseBasis::new(d) {
        Ok(b) => b,
        Err(Error::NotSparse(x)) => return Err(Error::NotSparse(x)),
        Err(e) => return Err(e),
    };
    very_sparse_scan(&basis)
}

fn very_sparse_scan(basis: &SparseBasis) -> Result<VerySparseFlag> {
    let table = basis.fs_with_masks()?;
    let members: HashSet<u64> = table.iter().map(|&(s, _)| s).collect();
    let top = table.last().map_or(0, |&(s, _)| s);
    for (i, &(x, mx)) in table.iter().enumerate() {
        for &(y, my) in &table[i..] {
            if x + y > top {
                break;
            }
            if mx & my != 0 && members.contains(&(x + y)) {
                return Ok(VerySparseFlag {
                    verified: false,
                    counterexample: Some((x, y)),
                });
            }
        }
    }
    Ok(VerySparseFlag {
        verified: true,
        counterexample: None,
    })
}

/// Greedy very sparse subset of `pool` of size `k`: scan upward and take an
/// element whenever it exceeds twice the sum chosen so far.
pub fn very_sparse_subset(pool: &NatSet, k: usize) -> Result<SparseBasis> {
    if k > 64 {
        return Err(too_large("very sparse subset", k, 64));
    }
    let mut chosen = Vec::with_capacity(k);
    let mut sum: u64 = 0;
    for x in pool.iter() {
        if chosen.len() == k {
            break;
        }
        if sum.checked_mul(2).is_some_and(|bound| x > bound) {
            chosen.push(x);
            sum = match sum.checked_add(x) {
                Some(s) => s,
                None => break,
            };
        }
    }
    if chosen.len() < k {
        return Err(Error::PoolExhausted {
            found: chosen.len(),
            wanted: k,
        });
    }
    let basis = SparseBasis::new(&NatSet::from_sorted(chosen))?;
    if basis.len() <= VERY_SPARSE_CAP {
        let flag = very_sparse_scan(&basis)?;
        assert!(
            flag.verified,
            "growth rule produced a set that is not very sparse: {:?}",
            flag.counterexample
        );
    }
    Ok(basis)
}

/// Lexicographically least `B ⊆ A ∖ {0}` with `|B| = k` and `FS(B) ⊆ A`.
///
/// Zero is never used: adding it to a basis only adds `0` to `FS(B)`.
pub fn find_fs_subset(a: &NatSet, k: usize) -> Option<NatSet> {
    if k == 0 {
        return Some(NatSet::new());
    }
    let top = a.last()?;
    let mut chosen = Vec::with_capacity(k);
    let mut sums = Vec::new();
    if extend_fs(a, top, k, 0, &mut chosen, &mut sums) {
        Some(NatSet::from_sorted(chosen))
    } else {
        None
    }
}

fn extend_fs(
    a: &NatSet,
    top: u64,
    k: usize,
    from: usize,
    chosen: &mut Vec<u64>,
    sums: &mut Vec<u64>,
) -> bool {
    if chosen.len() == k {
        return true;
    }
    let after = (k - chosen.len() - 1) as u64;
    let base: u64 = chosen.iter().sum();
    let v = a.as_slice();
    for (idx, &c) in v.iter().enumerate().skip(from) {
        if v.len() - idx < k - chosen.len() {
            return false;
        }
        // the completed basis sums to at least base + c + (c+1) + ... + (c+after)
        let least_total = base as u128 + c as u128 * (after as u128 + 1) + (after * (after + 1) / 2) as u128;
        if least_total > top as u128 {
            return false;
        }
        if c == 0 || !sums.iter().all(|&s| a.contains(s + c)) {
            continue;
        }
        let mark = sums.len();
        for i in 0..mark {
            let s = sums[i] + c;
            sums.push(s);
        }
        sums.push(c);
        chosen.push(c);
        if extend_fs(a, top, k, idx + 1, chosen, sums) {
            return true;
        }
        chosen.pop();
        sums.truncate(mark);
    }
    false
}

/// `{x ∈ FS(D) : α_D(x) ∩ α_D(y) ≠ ∅}`.
pub fn conflict_set(d: &SparseBasis, y: u64) -> Result<NatSet> {
    let my = d.alpha_mask(y).ok_or(Error::NotInFs(y))?;
    Ok(NatSet::from_sorted(
        d.fs_with_masks()?
            .into_iter()
            .filter(|&(_, m)| m & my != 0)
            .map(|(s, _)| s)
            .collect(),
    ))
}
