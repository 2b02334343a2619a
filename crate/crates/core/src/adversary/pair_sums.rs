//! The nested-set construction against `f: [ω]² → FS(D)` for a very sparse
//! `D`, its condition checker, and the replay of the final contradiction.

use std::collections::BTreeSet;

use super::{SearchBudget, Step, Strategy, Transcript, Witness};
use crate::canonical::PairColoring;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::sets::NatSet;
use crate::sparse::{self, SparseBasis};

fn pair_name(i: u64, j: u64) -> String {
    format!("{{{i},{j}}}")
}

/// `f({i, j})` together with the index mask of its decomposition over `D`.
fn value(f: &PairColoring, d: &SparseBasis, i: u64, j: u64) -> Result<(u64, u64)> {
    let v = f.eval(i, j)?;
    let mask = d.alpha_mask(v).ok_or_else(|| Error::ValueOutsideFs {
        point: pair_name(i, j),
        value: v,
    })?;
    Ok((v, mask))
}

fn prefix_image(f: &PairColoring, d: &SparseBasis, b: &[u64]) -> Result<BTreeSet<(u64, u64)>> {
    let mut out = BTreeSet::new();
    for (idx, &j) in b.iter().enumerate() {
        for &i in &b[..idx] {
            out.insert(value(f, d, i, j)?);
        }
    }
    Ok(out)
}

/// Builds `b₀ = 0 < b₁ < … < b_depth` with `depth = budget.n_max` and nested
/// finite sets `B₀ ⊇ B₁ ⊇ …` satisfying the finite forms of items (a)–(d).
///
/// `B₀` is the window; `Bₙ` is grown greedily from the elements of `Bₙ₋₁`
/// above `bₙ₋₁` until it holds `candidate_cap + depth − n` elements, and
/// `bₙ = min Bₙ`. Condition (d) uses `fs_size` as the basis size that a
/// shifted image set must not contain.
pub fn defeat_r_hindman(
    f: &PairColoring,
    d: &SparseBasis,
    fs_size: usize,
    budget: &SearchBudget,
) -> Result<Transcript> {
    budget.validate()?;
    let flag = sparse::is_very_sparse(&d.to_natset())?;
    if !flag.verified {
        return Err(Error::InvalidParams(format!(
            "D is not very sparse: {:?}",
            flag.counterexample
        )));
    }
    let depth = budget.n_max;
    let window = f.ground().min(budget.max_element);
    let mut b = vec![0u64];
    let mut sets = vec![NatSet::range(0, window)];
    let mut steps = vec![Step {
        index: 0,
        chosen: vec![0],
        threshold: None,
        window,
        checks: Vec::new(),
    }];

    for n in 1..=depth {
        let target = budget.candidate_cap + depth - n;
        let ys = prefix_image(f, d, &b)?;
        let forbidden = ys.iter().fold(0u64, |m, &(_, mask)| m | mask);
        // shifted image sets f[{b_i, b} : b ∈ Bₙ] − y, one per (i, y)
        let mut shifted: Vec<(usize, u64, NatSet)> = (0..n)
            .flat_map(|i| ys.iter().map(move |&(y, _)| (i, y, NatSet::new())))
            .collect();
        let mut accepted: Vec<u64> = Vec::with_capacity(target);
        let (mut rejected_c, mut rejected_d) = (0usize, 0usize);
        let last = b[n - 1];
        for cand in sets[n - 1].iter().filter(|&x| x > last) {
            let mut ok = true;
            for &a in &accepted {
                if value(f, d, a, cand)?.1 & forbidden != 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                rejected_c += 1;
                continue;
            }
            let mut grown = Vec::with_capacity(shifted.len());
            for (idx, (i, y, s)) in shifted.iter().enumerate() {
                let (v, _) = value(f, d, b[*i], cand)?;
                if v > *y && !s.contains(v - y) {
                    let mut t = s.clone();
                    t.insert(v - y);
                    if sparse::find_fs_subset(&t, fs_size).is_some() {
                        ok = false;
                        break;
                    }
                    grown.push((idx, t));
                }
            }
            if !ok {
                rejected_d += 1;
                continue;
            }
            for (idx, t) in grown {
                shifted[idx].2 = t;
            }
            accepted.push(cand);
            if accepted.len() == target {
                break;
            }
        }
        if accepted.len() < target {
            return Err(Error::SearchExhausted {
                step: n,
                window,
                detail: format!(
                    "B_{n} reached {} of {target} elements; condition (c) rejected {rejected_c}, condition (d) rejected {rejected_d}",
                    accepted.len()
                ),
            });
        }
        b.push(accepted[0]);
        sets.push(NatSet::from_sorted(accepted));
        steps.push(Step {
            index: n,
            chosen: vec![b[n]],
            threshold: None,
            window,
            checks: Vec::new(),
        });
    }

    Ok(Transcript {
        strategy: Strategy::RHindman,
        case: None,
        steps,
        witness: Witness::Nested { b, sets },
        certificate: None,
    })
}

/// Itemized check of (a)–(d) on supplied finite data.
pub fn check_hnr_conditions(
    b: &[u64],
    sets: &[NatSet],
    f: &PairColoring,
    d: &SparseBasis,
    fs_size: usize,
) -> Report {
    let mut report = Report::new("hnr-conditions");
    if b.is_empty() || b.len() != sets.len() {
        report.push(
            "shape",
            false,
            format!("{} points against {} sets", b.len(), sets.len()),
        );
        return report;
    }

    report.record("a", {
        let missing = (0..b.len()).find(|&n| !sets[n].contains(b[n]));
        let unordered = b.windows(2).position(|w| w[0] >= w[1]);
        match (missing, unordered) {
            (Some(n), _) => Err(format!("b_{n} = {} is not in B_{n}", b[n])),
            (_, Some(n)) => Err(format!("b_{} = {} is not above b_{n} = {}", n + 1, b[n + 1], b[n])),
            _ => Ok(()),
        }
    });

    report.record(
        "b",
        match (1..sets.len()).find(|&n| !sets[n].is_subset(&sets[n - 1])) {
            Some(n) => Err(format!("B_{n} is not contained in B_{}", n - 1)),
            None => Ok(()),
        },
    );

    let eval = |i: u64, j: u64| -> std::result::Result<u64, String> {
        f.eval(i, j).map_err(|e| format!("f{}: {e}", pair_name(i, j)))
    };
    let prefix_values = |n: usize| -> std::result::Result<NatSet, String> {
        let mut out = Vec::new();
        for j in 0..n {
            for i in 0..j {
                out.push(eval(b[i], b[j])?);
            }
        }
        Ok(out.into_iter().collect())
    };

    report.record("c", (|| {
        for (n, bn) in sets.iter().enumerate().take(b.len()).skip(1) {
            let ys = prefix_values(n)?;
            let mut conflicts = NatSet::new();
            for y in ys.iter() {
                let cs = sparse::conflict_set(d, y).map_err(|e| format!("y = {y}: {e}"))?;
                conflicts = conflicts.union(&cs);
            }
            let bn = bn.as_slice();
            for (idx, &j) in bn.iter().enumerate() {
                for &i in &bn[..idx] {
                    let v = eval(i, j)?;
                    if conflicts.contains(v) {
                        return Err(format!(
                            "f{} = {v} shares a summand with f[[b_<{n}]²] (step {n})",
                            pair_name(i, j)
                        ));
                    }
                }
            }
        }
        Ok(())
    })());

    report.record("d", (|| {
        for (n, bn) in sets.iter().enumerate().take(b.len()).skip(1) {
            let ys = prefix_values(n)?;
            for (i, &bi) in b.iter().enumerate().take(n) {
                for y in ys.iter() {
                    let mut s = Vec::new();
                    for x in bn.iter().filter(|&x| x != bi) {
                        let v = eval(bi, x)?;
                        if v > y {
                            s.push(v - y);
                        }
                    }
                    let s: NatSet = s.into_iter().collect();
                    if let Some(basis) = sparse::find_fs_subset(&s, fs_size) {
                        return Err(format!(
                            "f[{{b_{i}, b}} : b in B_{n}] - {y} contains FS({basis})"
                        ));
                    }
                }
            }
        }
        Ok(())
    })());

    report
}

/// Replays the closing argument on a finished transcript: with `c = min C`
/// and `c = f({b_j, b_n})`, `[B]²` splits into `X`, `Y`, `Z` and
/// `FS(C ∖ {c})` misses `f[Z] − c`.
pub fn replay_final_contradiction(
    transcript: &Transcript,
    f: &PairColoring,
    d: &SparseBasis,
    c: &NatSet,
) -> Result<Report> {
    let Witness::Nested { b, .. } = &transcript.witness else {
        return Err(Error::InvalidParams("transcript carries no nested witness".into()));
    };
    if c.len() < 2 {
        return Err(Error::NoSuchC(format!("|C| = {} is below 2", c.len())));
    }
    let mut pairs = Vec::new();
    for k in 0..b.len() {
        for i in 0..k {
            pairs.push((i, k, f.eval(b[i], b[k])?));
        }
    }
    let image: NatSet = pairs.iter().map(|p| p.2).collect();
    let fs_c = sparse::fs(c)?;
    if let Some(x) = fs_c.iter().find(|&x| !image.contains(x)) {
        return Err(Error::NoSuchC(format!("{x} ∈ FS(C) is not in f[[B]²]")));
    }
    let c0 = c.first().expect("nonempty");
    let &(j, n, _) = pairs
        .iter()
        .filter(|p| p.2 == c0)
        .min_by_key(|p| (p.1, p.0))
        .expect("c lies in the image");

    let mut report = Report::new("final-contradiction")
        .with_caveat("finite replay: checks the closing partition argument on the constructed prefix only");
    let (mut x, mut y, mut z) = (Vec::new(), Vec::new(), Vec::new());
    for &(i, k, v) in &pairs {
        if k <= n {
            x.push(v);
        } else if i <= n {
            y.push(v);
        } else {
            z.push(v);
        }
    }
    let total = b.len() * (b.len() - 1) / 2;
    report.push(
        "partition",
        x.len() + y.len() + z.len() == total,
        format!(
            "c = {c0} = f({{b_{j}, b_{n}}}); |X| = {}, |Y| = {}, |Z| = {}, |[B]²| = {total}",
            x.len(),
            y.len(),
            z.len()
        ),
    );

    let shift = |vals: &[u64]| -> NatSet { vals.iter().filter(|&&v| v > c0).map(|&v| v - c0).collect() };
    let rest = sparse::fs(&c.difference(&NatSet::from([c0])))?;
    let fz = shift(&z);
    let hit = rest.intersection(&fz);
    report.push(
        "z_disjoint",
        hit.is_empty(),
        if hit.is_empty() {
            format!("FS(C∖{{c}}) ({} values) misses f[Z] − c", rest.len())
        } else {
            format!("FS(C∖{{c}}) meets f[Z] − c at {hit}")
        },
    );
    let xy = shift(&x).union(&shift(&y));
    let uncovered = rest.difference(&xy);
    report.push(
        "covered_by_xy",
        uncovered.is_empty(),
        if uncovered.is_empty() {
            "FS(C∖{c}) ⊆ (f[X] − c) ∪ (f[Y] − c)".to_string()
        } else {
            format!("not covered: {uncovered}")
        },
    );
    let mc = d.alpha_mask(c0);
    let mut broken = Vec::new();
    let mut checked = 0;
    for a in rest.iter() {
        if let (Some(ma), Some(mc), Some(ms)) = (d.alpha_mask(a), mc, d.alpha_mask(a + c0)) {
            checked += 1;
            if ma & mc != 0 || ms != ma | mc {
                broken.push(a);
            }
        }
    }
    report.push(
        "additivity",
        broken.is_empty(),
        if broken.is_empty() {
            format!("α(a + c) = α(a) ∪ α(c) on {checked} sums")
        } else {
            format!("fails for a in {:?}", broken)
        },
    );
    Ok(report)
}
