//! Checker for the two condition systems of the construction against
//! `f: FS(X) → Γ`, where `Γ = {(z₀, z₁) : z₀ > z₁}` and row `n` of `Γ` is
//! `(ω × {n}) ∩ Γ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::Report;
use crate::sets::NatSet;
use crate::sparse::{self, SparseBasis};

/// A finite map `FS(X) → Γ`. Points outside the table lie in no preimage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GammaMap(BTreeMap<u64, (u64, u64)>);

impl GammaMap {
    pub fn new(table: BTreeMap<u64, (u64, u64)>) -> Result<Self> {
        if let Some((y, p)) = table.iter().find(|(_, p)| p.0 <= p.1) {
            return Err(Error::InvalidParams(format!(
                "f({y}) = ({}, {}) is not in Γ",
                p.0, p.1
            )));
        }
        Ok(GammaMap(table))
    }

    /// Tabulates `f` over `FS(X)`.
    pub fn from_fn(x: &SparseBasis, f: impl Fn(u64) -> (u64, u64)) -> Result<Self> {
        GammaMap::new(x.fs()?.iter().map(|y| (y, f(y))).collect())
    }

    pub fn get(&self, y: u64) -> Option<(u64, u64)> {
        self.0.get(&y).copied()
    }

    pub fn row(&self, y: u64) -> Option<u64> {
        self.get(y).map(|p| p.1)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, (u64, u64))> + '_ {
        self.0.iter().map(|(&y, &p)| (y, p))
    }
}

/// Finite data for the first case: `k`, the very sparse `D = D₋₁`, points
/// `x₀, …, x_N` and sets `D₀, …, D_N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case1Bundle {
    pub k: u64,
    pub d: Vec<u64>,
    pub xs: Vec<u64>,
    pub ds: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case2Step {
    pub n: u64,
    pub j: u8,
    pub x: u64,
    pub d: Vec<u64>,
    pub k: i64,
    pub f_set: Vec<u64>,
}

/// Finite data for the second case; `D₋₁ = X`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Case2Bundle {
    pub steps: Vec<Case2Step>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case")]
pub enum RnhBundle {
    #[serde(rename = "1")]
    Case1(Case1Bundle),
    #[serde(rename = "2")]
    Case2(Case2Bundle),
}

/// First failure per item, in a fixed item order.
struct Items {
    order: Vec<&'static str>,
    failures: BTreeMap<&'static str, String>,
}

impl Items {
    fn new(order: &[&'static str]) -> Self {
        Items {
            order: order.to_vec(),
            failures: BTreeMap::new(),
        }
    }

    fn check(&mut self, name: &'static str, ok: bool, detail: impl FnOnce() -> String) {
        debug_assert!(self.order.contains(&name));
        if !ok && !self.failures.contains_key(name) {
            self.failures.insert(name, detail());
        }
    }

    fn into_report(self, kind: &str) -> Report {
        let mut r = Report::new(kind);
        for name in self.order {
            match self.failures.get(name) {
                Some(d) => r.push(name, false, d.clone()),
                None => r.push(name, true, "ok"),
            }
        }
        r
    }
}

/// A set `Dᵢ` with its finite sums and, when sparse, its decomposition.
struct Level {
    elements: NatSet,
    fs: NatSet,
    basis: Option<SparseBasis>,
}

impl Level {
    fn new(v: &[u64]) -> Result<Self> {
        let elements: NatSet = v.iter().copied().collect();
        Ok(Level {
            fs: sparse::fs(&elements)?,
            basis: SparseBasis::new(&elements).ok(),
            elements,
        })
    }

    fn very_sparse(&self) -> std::result::Result<(), String> {
        match sparse::is_very_sparse(&self.elements) {
            Ok(f) if f.verified => Ok(()),
            Ok(f) => Err(format!("{} fails at {:?}", self.elements, f.counterexample)),
            Err(e) => Err(format!("{}: {e}", self.elements)),
        }
    }

    /// `{y ∈ FS(Dₜ) : α(y) ∩ α(x) ≠ ∅}`, empty when `x ∉ FS(Dₜ)`.
    fn conflicts(&self, x: u64) -> NatSet {
        match &self.basis {
            Some(b) => sparse::conflict_set(b, x).unwrap_or_default(),
            None => NatSet::new(),
        }
    }
}

fn subsets(idx: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (1u64..1 << idx.len()).map(move |m| {
        idx.iter()
            .enumerate()
            .filter(|(b, _)| m >> b & 1 == 1)
            .map(|(_, &i)| i)
            .collect()
    })
}

/// Itemized verification of the supplied finite fragment against `f` and `X`.
pub fn check_rnh_conditions(bundle: &RnhBundle, f: &GammaMap, x: &SparseBasis) -> Result<Report> {
    match bundle {
        RnhBundle::Case1(b) => check_case1(b, f, x),
        RnhBundle::Case2(b) => check_case2(b, f, x),
    }
}

fn check_case1(b: &Case1Bundle, f: &GammaMap, x: &SparseBasis) -> Result<Report> {
    if b.xs.len() != b.ds.len() {
        return Err(Error::MalformedBundle(format!(
            "{} points but {} sets",
            b.xs.len(),
            b.ds.len()
        )));
    }
    let fs_x = x.fs()?;
    let base = Level::new(&b.d)?;
    let levels: Vec<Level> = b.ds.iter().map(|d| Level::new(d)).collect::<Result<_>>()?;
    let prev = |n: usize| if n == 0 { &base } else { &levels[n - 1] };
    let mut it = Items::new(&["a", "b", "c", "d", "e", "f"]);
    let k = b.k;
    let bad_row = |y: u64, n: usize| f.row(y).is_some_and(|r| r > k && r <= k + n as u64 + 1);

    if let Err(e) = base.very_sparse() {
        it.check("b", false, || format!("D: {e}"));
    }
    it.check("d", base.fs.is_subset(&fs_x), || "FS(D) ⊄ FS(X)".into());

    for n in 0..b.xs.len() {
        let xn = b.xs[n];
        let level = &levels[n];
        it.check("a", prev(n).fs.contains(xn), || format!("x_{n} = {xn} is not in FS(D_{})", n as i64 - 1));
        it.check("a", !b.xs[..n].contains(&xn), || format!("x_{n} = {xn} repeats an earlier point"));
        for i in 0..n {
            for (j, lj) in levels.iter().enumerate().take(n) {
                if lj.fs.contains(b.xs[i]) {
                    it.check("a", !lj.conflicts(b.xs[i]).contains(xn), || {
                        format!("x_{n} = {xn} shares a summand of D_{j} with x_{i} = {}", b.xs[i])
                    });
                }
            }
        }
        if let Err(e) = level.very_sparse() {
            it.check("b", false, || format!("D_{n}: {e}"));
        }
        let xs_fs = sparse::fs(&b.xs[..=n].iter().copied().collect())?;
        it.check("c", xs_fs.is_subset(&base.fs), || format!("FS(x_0..x_{n}) ⊄ FS(D)"));
        it.check("d", level.fs.is_subset(&prev(n).fs), || {
            format!("FS(D_{n}) ⊄ FS(D_{})", n as i64 - 1)
        });
        for z in level.fs.iter() {
            it.check("f", !bad_row(z, n), || {
                format!("f({z}) lies in row {} for z ∈ FS(D_{n})", f.row(z).unwrap_or(0))
            });
            for s in xs_fs.iter() {
                it.check("e", !bad_row(s + z, n), || {
                    format!("f({s} + {z}) lies in row {} (step {n})", f.row(s + z).unwrap_or(0))
                });
            }
        }
    }
    Ok(it.into_report("rnh-case1"))
}

const CASE2_ITEMS: [&str; 19] = [
    "a1", "a2", "b1", "b2", "c1", "c2", "c3", "c4", "d1", "d2", "d3a", "d3b", "d4", "e1", "e2", "e3",
    "f", "g1", "g2",
];

fn check_case2(b: &Case2Bundle, f: &GammaMap, x: &SparseBasis) -> Result<Report> {
    let steps = &b.steps;
    if steps.is_empty() {
        return Err(Error::MalformedBundle("no steps".into()));
    }
    for (i, s) in steps.iter().enumerate() {
        let bad = if s.j > 1 {
            Some(format!("j_{i} = {} is not 0 or 1", s.j))
        } else if s.k < -1 || s.k >= i as i64 {
            Some(format!("k_{i} = {} is outside [-1, {i})", s.k))
        } else if s.j == 1 && s.k < 0 {
            Some(format!("j_{i} = 1 needs k_{i} ≥ 0"))
        } else {
            s.f_set
                .iter()
                .find(|&&q| q >= i as u64)
                .map(|q| format!("F_{i} contains {q} ≥ {i}"))
        };
        if let Some(msg) = bad {
            return Err(Error::MalformedBundle(msg));
        }
    }

    let fs_x = x.fs()?;
    let x_level = Level::new(x.elements())?;
    let levels: Vec<Level> = steps.iter().map(|s| Level::new(&s.d)).collect::<Result<_>>()?;
    // D_t for t ≥ -1
    let level = |t: i64| if t < 0 { &x_level } else { &levels[t as usize] };
    let xs: Vec<u64> = steps.iter().map(|s| s.x).collect();
    let ns: Vec<u64> = steps.iter().map(|s| s.n).collect();
    let mut it = Items::new(&CASE2_ITEMS);

    for (i, s) in steps.iter().enumerate() {
        let di = &levels[i];
        let prev = level(i as i64 - 1);
        let xi = s.x;
        let ii = i as i64;

        // (a)
        it.check("a1", i == 0 || s.n > ns[i - 1], || format!("n_{i} = {} is not above n_{}", s.n, i - 1));
        let earlier = sparse::fs(&xs[..i].iter().copied().collect())?;
        let mut bound = 0u64;
        for y in earlier.iter() {
            match f.get(y) {
                Some((z0, z1)) => bound = bound.max(z0).max(z1),
                None => it.check("a2", false, || format!("f is undefined at {y}")),
            }
        }
        it.check("a2", s.n > bound, || format!("n_{i} = {} is not above {bound}", s.n));

        // (b)
        it.check("b1", di.fs.is_subset(&prev.fs) && di.fs.is_subset(&fs_x), || {
            format!("FS(D_{i}) ⊄ FS(D_{})", i as i64 - 1)
        });
        if let Err(e) = di.very_sparse() {
            it.check("b2", false, || format!("D_{i}: {e}"));
        }

        let used_before: Vec<u64> = steps[..i].iter().flat_map(|q| q.f_set.iter().copied()).collect();
        let used_through: Vec<u64> = steps[..=i].iter().flat_map(|q| q.f_set.iter().copied()).collect();

        if s.j == 0 {
            it.check("c1", s.k == -1, || format!("k_{i} = {} but j_{i} = 0", s.k));
            it.check("c2", s.f_set.is_empty(), || format!("F_{i} is nonempty but j_{i} = 0"));
            it.check("c3", prev.fs.contains(xi) && f.row(xi) == Some(s.n), || {
                format!("x_{i} = {xi} with f = {:?} is not in FS(D_{}) ∩ row {}", f.get(xi), ii - 1, s.n)
            });
            for z in di.fs.iter() {
                it.check("c4", f.row(xi + z) == Some(s.n), || {
                    format!("f({xi} + {z}) = {:?} is off row {}", f.get(xi + z), s.n)
                });
            }
        } else {
            let k = s.k as usize;
            let target = (s.n, ns[k]);
            it.check("d1", steps[k].j == 0 && !used_before.contains(&(k as u64)), || {
                format!("k_{i} = {k} is not an unused j = 0 index")
            });
            let expected: Vec<u64> = (k as u64..i as u64).collect();
            let mut got = s.f_set.clone();
            got.sort_unstable();
            got.dedup();
            it.check("d2", got == expected, || format!("F_{i} = {:?}, expected {:?}", s.f_set, expected));
            it.check("d3a", f.get(xi) == Some(target), || {
                format!("f(x_{i}) = {:?}, expected {:?}", f.get(xi), target)
            });
            let free: NatSet = (k + 1..i)
                .filter(|r| !used_before.contains(&(*r as u64)))
                .map(|r| xs[r])
                .collect();
            let mut middles = sparse::fs(&free)?.into_vec();
            middles.push(0);
            let ok = xi >= xs[k]
                && middles
                    .iter()
                    .any(|&m| xi >= xs[k] + m && prev.fs.contains(xi - xs[k] - m));
            it.check("d3b", ok, || format!("x_{i} = {xi} is not in x_{k} + ({{0}} ∪ FS(..)) + FS(D_{})", ii - 1));
            for z in di.fs.iter() {
                it.check("d4", f.get(xi + z) == Some(target), || {
                    format!("f({xi} + {z}) = {:?}, expected {:?}", f.get(xi + z), target)
                });
            }
        }

        // (e)
        let free_idx: Vec<usize> = (0..i).filter(|t| !used_through.contains(&(*t as u64))).collect();
        for sub in subsets(&free_idx) {
            let sum: u64 = sub.iter().map(|&t| xs[t]).sum();
            let point = (s.n, ns[sub[0]]);
            let target = Some(point);
            it.check("e3", f.get(sum + xi) != target, || format!("f({sum} + x_{i}) = {point:?}"));
            for z in di.fs.iter() {
                it.check("e1", f.get(sum + xi + z) != target, || format!("f({sum} + x_{i} + {z}) = {point:?}"));
                it.check("e2", f.get(sum + z) != target, || format!("f({sum} + {z}) = {point:?}"));
            }
        }

        // (f)
        for t in -1..ii {
            let lt = level(t);
            for (u, &xu) in xs.iter().enumerate().take(i + 1) {
                if lt.fs.contains(xu) {
                    let hit = di.fs.intersection(&lt.conflicts(xu));
                    it.check("f", hit.is_empty(), || {
                        format!("FS(D_{i}) meets the D_{t}-conflict set of x_{u} at {hit}")
                    });
                }
            }
        }

        // (g)
        let kept: Vec<usize> = (0..=i).filter(|t| !used_through.contains(&(*t as u64))).collect();
        let kept_fs = sparse::fs(&kept.iter().map(|&t| xs[t]).collect())?;
        it.check("g1", kept_fs.is_subset(&fs_x), || format!("FS(kept x's through {i}) ⊄ FS(X)"));
        for sub in subsets(&kept).filter(|s| s.len() > 1) {
            let t0 = sub[0];
            let rest: u64 = sub[1..].iter().map(|&t| xs[t]).sum();
            it.check("g2", levels[t0].fs.contains(rest), || {
                format!("sum over {:?} is not in x_{t0} + FS(D_{t0})", sub)
            });
        }
    }
    Ok(it.into_report("rnh-case2"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn powers_of_three(k: u32) -> SparseBasis {
        SparseBasis::new(&(0..k).map(|i| 3u64.pow(i)).collect()).unwrap()
    }

    fn case1_map(x: &SparseBasis) -> GammaMap {
        GammaMap::from_fn(x, |y| {
            let alpha = x.alpha_mask(y).unwrap();
            if y == 6561 {
                (y + 1, 3)
            } else if alpha & 0b10 != 0 {
                (y + 1, 1)
            } else {
                (y + 1, 0)
            }
        })
        .unwrap()
    }

    fn case1_valid() -> Case1Bundle {
        Case1Bundle {
            k: 0,
            d: (0..10).map(|i| 3u64.pow(i)).collect(),
            xs: vec![1, 27, 243],
            ds: vec![
                vec![27, 81, 243, 729, 2187, 6561],
                vec![243, 729, 2187, 6561],
                vec![729, 2187],
            ],
        }
    }

    #[test]
    fn case1_valid_and_violations() {
        let x = powers_of_three(10);
        let f = case1_map(&x);
        let r = check_rnh_conditions(&RnhBundle::Case1(case1_valid()), &f, &x).unwrap();
        assert!(r.passed(), "{r:?}");

        let mut b = case1_valid();
        b.xs[2] = 81;
        let r = check_rnh_conditions(&RnhBundle::Case1(b), &f, &x).unwrap();
        assert_eq!(r.failed(), vec!["a"]);

        let mut b = case1_valid();
        b.ds[2] = vec![729, 6561];
        let r = check_rnh_conditions(&RnhBundle::Case1(b), &f, &x).unwrap();
        assert_eq!(r.failed(), vec!["f"]);

        let mut b = case1_valid();
        b.ds.pop();
        assert!(matches!(
            check_rnh_conditions(&RnhBundle::Case1(b), &f, &x),
            Err(Error::MalformedBundle(_))
        ));
    }

    #[test]
    fn gamma_map_rejects_points_off_gamma() {
        let x = powers_of_three(2);
        assert!(GammaMap::from_fn(&x, |y| (y, y)).is_err());
    }
}
