//! Constructions defeating candidate witnesses of the summable ideal lying
//! below W, H and R.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Certificate, Inequality, Point, SearchBudget, Step, Strategy, Transcript, Witness};
use crate::canonical::{classify_fs_on, classify_pairs_on, BlockBasis, CanonicalCase, NatColoring, PairColoring};
use crate::error::{Error, Result};
use crate::ideal::reciprocal_sum;
use crate::rational::Rational;
use crate::sets::NatSet;
use crate::sparse;

fn frac(num: u64, den: u64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn sum_of(terms: impl Iterator<Item = Rational>) -> Rational {
    terms.fold(Rational::zero(), |acc, t| acc + t)
}

/// `Σ_{n=1}^{N} n/(n2ⁿ+1)`.
pub fn w_majorant(n_max: usize) -> Rational {
    sum_of((1..=n_max as u64).map(|n| frac(n, (n << n) + 1)))
}

/// Majorant of the finite-sums image sum for each case, over `n < N`.
pub fn h_majorant(case: CanonicalCase, n_max: usize, const_value: u64) -> Rational {
    let ns = 0..n_max as u64;
    match case {
        CanonicalCase::Const => frac(1, const_value + 1),
        CanonicalCase::Min | CanonicalCase::Max => sum_of(ns.map(|n| frac(1, (1 << n) + 1))),
        CanonicalCase::MinMax => sum_of(ns.map(|n| frac(n + 1, (n << n) + 1))),
        CanonicalCase::Inj => sum_of(ns.map(|n| frac(1 << n, (1 << (2 * n)) + 1))),
    }
}

/// `Σ_{n<N} 1/2ⁿ` for the non-constant pair cases.
pub fn r_majorant(case: CanonicalCase, n_max: usize, const_value: u64) -> Rational {
    match case {
        CanonicalCase::Const => frac(1, const_value + 1),
        _ => sum_of((0..n_max as u64).map(|n| frac(1, 1 << n))),
    }
}

fn certificate(image: NatSet, majorant: Rational, label: String) -> Certificate {
    Certificate {
        sum: reciprocal_sum(&image),
        image,
        majorant,
        label,
    }
}

fn case_check(expected: CanonicalCase, found: Option<CanonicalCase>) -> Result<()> {
    if found == Some(expected) {
        Ok(())
    } else {
        Err(Error::CaseMismatch {
            expected: expected.name().into(),
            found: found.map_or("none", CanonicalCase::name).into(),
        })
    }
}

/// For `n = 1..=n_max` finds the first `n`-term progression (least start,
/// then least difference) on which `φ ≥ n·2ⁿ`.
pub fn defeat_w_summable(phi: &NatColoring, budget: &SearchBudget) -> Result<Transcript> {
    budget.validate()?;
    let end = budget.max_element.min(phi.window());
    let values: Vec<u64> = (0..end).map(|x| phi.eval(x)).collect::<Result<_>>()?;
    let mut steps = Vec::with_capacity(budget.n_max);
    let mut union = NatSet::new();
    for n in 1..=budget.n_max {
        let threshold = (n as u64) << n;
        let good = |x: u64| values[x as usize] >= threshold;
        let progression = first_progression(end, n as u64, good).ok_or_else(|| Error::SearchExhausted {
            step: n,
            window: end,
            detail: format!("no {n}-term progression in [0, {end}) with φ ≥ {threshold}"),
        })?;
        let checks = progression
            .iter()
            .map(|&x| Inequality {
                point: Point::Nat(x),
                value: values[x as usize],
                bound: threshold,
                strict: false,
            })
            .collect();
        for &x in &progression {
            union.insert(x);
        }
        steps.push(Step {
            index: n,
            chosen: progression,
            threshold: Some(threshold),
            window: end,
            checks,
        });
    }
    let image: NatSet = union.iter().map(|x| values[x as usize]).collect();
    Ok(Transcript {
        strategy: Strategy::WSummable,
        case: None,
        steps,
        certificate: Some(certificate(
            image,
            w_majorant(budget.n_max),
            format!("sum_{{n=1}}^{{{}}} n/(n2^n+1)", budget.n_max),
        )),
        witness: Witness::Set(union),
    })
}

fn first_progression(end: u64, len: u64, good: impl Fn(u64) -> bool) -> Option<Vec<u64>> {
    for a in 0..end {
        if !good(a) {
            continue;
        }
        if len == 1 {
            return Some(vec![a]);
        }
        let mut d = 1;
        while a + (len - 1) * d < end {
            if (1..len).all(|i| good(a + i * d)) {
                return Some((0..len).map(|i| a + i * d).collect());
            }
            d += 1;
        }
    }
    None
}

/// Selects `D = {c_{k_n} : n < n_max}` from a canonical block basis so that
/// `φ[FS(D)]` has a small reciprocal sum.
pub fn defeat_h_summable(
    phi: &NatColoring,
    c: &BlockBasis,
    case: CanonicalCase,
    budget: &SearchBudget,
) -> Result<Transcript> {
    budget.validate()?;
    case_check(case, classify_fs_on(phi, c)?)?;
    let blocks = c.elements();
    let n_max = budget.n_max;
    let window = phi.window();
    let exhausted = |step: usize, detail: String| Error::SearchExhausted { step, window, detail };

    let mut steps = Vec::with_capacity(n_max);
    let mut chosen: Vec<usize> = Vec::with_capacity(n_max);
    // FS(C) values, only needed for the injective case
    let fs_values: Vec<(u64, u64)> = if case == CanonicalCase::Inj {
        c.fs()?.iter().map(|x| Ok((x, phi.eval(x)?))).collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    for n in 0..n_max {
        let from = chosen.last().map_or(0, |&k| k + 1);
        let picked: Option<(usize, u64, Vec<Inequality>)> = match case {
            CanonicalCase::Const => (from < blocks.len()).then(|| (from, 0, Vec::new())),
            CanonicalCase::Min | CanonicalCase::Max => {
                let bound = 1u64 << n;
                (from..blocks.len()).find_map(|k| {
                    let v = phi.eval(blocks[k]).ok()?;
                    (v > bound).then(|| {
                        (k, bound, vec![Inequality { point: Point::Nat(blocks[k]), value: v, bound, strict: true }])
                    })
                })
            }
            CanonicalCase::MinMax => {
                let bound = (n as u64) << n;
                (from..blocks.len()).find_map(|k| {
                    let mut checks = Vec::with_capacity(n + 1);
                    for x in std::iter::once(blocks[k]).chain(chosen.iter().map(|&i| blocks[k] + blocks[i])) {
                        let v = phi.eval(x).ok()?;
                        if v <= bound {
                            return None;
                        }
                        checks.push(Inequality { point: Point::Nat(x), value: v, bound, strict: true });
                    }
                    Some((k, bound, checks))
                })
            }
            CanonicalCase::Inj => {
                let bound = 1u64 << (2 * n);
                let prev = sparse::fs(&chosen.iter().map(|&i| blocks[i]).collect())?;
                let mut m = bound;
                for x in prev.iter() {
                    m = m.max(phi.eval(x)?);
                }
                let m = m + 1;
                // F = φ⁻¹[{0, …, m}] inside FS(C), finite because φ is injective there
                let max_f = fs_values.iter().filter(|&&(_, v)| v <= m).map(|&(x, _)| x).max();
                match (from..blocks.len()).find(|&k| max_f.is_none_or(|f| blocks[k] > f)) {
                    None => None,
                    Some(k) => {
                        let mut checks = Vec::with_capacity(prev.len() + 1);
                        for x in std::iter::once(blocks[k]).chain(prev.iter().map(|p| blocks[k] + p)) {
                            let v = phi.eval(x)?;
                            checks.push(Inequality { point: Point::Nat(x), value: v, bound, strict: true });
                        }
                        Some((k, bound, checks))
                    }
                }
            }
        };
        let (k, bound, checks) = picked.ok_or_else(|| {
            exhausted(n, format!("no block c_k with k >= {from} meets the {case} threshold among {} blocks", blocks.len()))
        })?;
        if let Some(bad) = checks.iter().find(|ch| !ch.holds()) {
            return Err(exhausted(n, format!("φ({}) = {} does not exceed {}", bad.point, bad.value, bad.bound)));
        }
        chosen.push(k);
        steps.push(Step {
            index: n,
            chosen: vec![blocks[k]],
            threshold: (case != CanonicalCase::Const).then_some(bound),
            window,
            checks,
        });
    }

    let d: NatSet = chosen.iter().map(|&k| blocks[k]).collect();
    let image: NatSet = sparse::fs(&d)?.iter().map(|x| phi.eval(x)).collect::<Result<_>>()?;
    let const_value = phi.eval(blocks[0])?;
    let label = match case {
        CanonicalCase::Const => "1/(v+1)".to_string(),
        CanonicalCase::Min | CanonicalCase::Max => format!("sum_{{n<{n_max}}} 1/(2^n+1)"),
        CanonicalCase::MinMax => format!("sum_{{n<{n_max}}} (n+1)/(n2^n+1)"),
        CanonicalCase::Inj => format!("sum_{{n<{n_max}}} 2^n/(2^(2n)+1)"),
    };
    Ok(Transcript {
        strategy: Strategy::HSummable,
        case: Some(case),
        steps,
        certificate: Some(certificate(image, h_majorant(case, n_max, const_value), label)),
        witness: Witness::Set(d),
    })
}

/// Builds `H = {t_n : n < n_max} ⊆ T` for a canonical pair coloring so that
/// `φ[[H]²]` has a small reciprocal sum.
pub fn defeat_r_summable(
    phi: &PairColoring,
    t: &NatSet,
    case: CanonicalCase,
    budget: &SearchBudget,
) -> Result<Transcript> {
    budget.validate()?;
    if case == CanonicalCase::MinMax {
        return Err(Error::InvalidParams("MINMAX is not a pair case".into()));
    }
    case_check(case, classify_pairs_on(phi, t)?)?;
    let ts = t.as_slice();
    let n_max = budget.n_max;
    let window = phi.ground();
    let mut used = vec![false; ts.len()];
    let mut picked: Vec<usize> = Vec::with_capacity(n_max);
    let mut steps = Vec::with_capacity(n_max);

    for n in 0..n_max {
        let candidate = |idx: usize| -> Result<Option<(u64, Vec<Inequality>)>> {
            let pair_check = |a: u64, b: u64, bound: u64| -> Result<Inequality> {
                let (i, j) = if a < b { (a, b) } else { (b, a) };
                Ok(Inequality { point: Point::Pair(i, j), value: phi.eval(i, j)?, bound, strict: true })
            };
            Ok(match case {
                CanonicalCase::Const => Some((0, Vec::new())),
                CanonicalCase::Min => {
                    // k_t is read off the pair {t, s} with s the successor of t in T
                    let bound = 1u64 << n;
                    if idx + 1 == ts.len() {
                        return Ok(None);
                    }
                    let ch = pair_check(ts[idx], ts[idx + 1], bound)?;
                    ch.holds().then(|| (bound, vec![ch]))
                }
                CanonicalCase::Max => {
                    let bound = 1u64 << n;
                    if idx == 0 {
                        return Ok(None);
                    }
                    let ch = pair_check(ts[idx - 1], ts[idx], bound)?;
                    ch.holds().then(|| (bound, vec![ch]))
                }
                _ => {
                    let bound = (n as u64) << n;
                    let mut checks = Vec::with_capacity(picked.len());
                    for &p in &picked {
                        let ch = pair_check(ts[p], ts[idx], bound)?;
                        if !ch.holds() {
                            return Ok(None);
                        }
                        checks.push(ch);
                    }
                    Some((bound, checks))
                }
            })
        };
        let mut found = None;
        for idx in (0..ts.len()).filter(|&i| !used[i]) {
            if let Some(hit) = candidate(idx)? {
                found = Some((idx, hit));
                break;
            }
        }
        let (idx, (bound, checks)) = found.ok_or_else(|| Error::SearchExhausted {
            step: n,
            window,
            detail: format!("no unused t in T (|T| = {}) meets the {case} threshold", ts.len()),
        })?;
        used[idx] = true;
        picked.push(idx);
        steps.push(Step {
            index: n,
            chosen: vec![ts[idx]],
            threshold: (case != CanonicalCase::Const).then_some(bound),
            window,
            checks,
        });
    }

    let h: NatSet = picked.iter().map(|&i| ts[i]).collect();
    let hv = h.as_slice();
    let mut image = Vec::new();
    for (a, &j) in hv.iter().enumerate() {
        for &i in &hv[..a] {
            image.push(phi.eval(i, j)?);
        }
    }
    let const_value = phi.eval(ts[0], ts[1])?;
    let label = match case {
        CanonicalCase::Const => "1/(v+1)".to_string(),
        _ => format!("sum_{{n<{n_max}}} 1/2^n"),
    };
    Ok(Transcript {
        strategy: Strategy::RSummable,
        case: Some(case),
        steps,
        certificate: Some(certificate(image.into_iter().collect(), r_majorant(case, n_max, const_value), label)),
        witness: Witness::Set(h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::NatRule;

    fn nat_eval(phi: &NatColoring) -> impl Fn(Point) -> Result<u64> + '_ {
        move |p| match p {
            Point::Nat(x) => phi.eval(x),
            Point::Pair(..) => Err(Error::InvalidParams("pair point".into())),
        }
    }

    fn pair_eval(phi: &PairColoring) -> impl Fn(Point) -> Result<u64> + '_ {
        move |p| match p {
            Point::Pair(i, j) => phi.eval(i, j),
            Point::Nat(_) => Err(Error::InvalidParams("nat point".into())),
        }
    }

    fn budget(n_max: usize) -> SearchBudget {
        SearchBudget::new(1 << 20, n_max, 8).unwrap()
    }

    #[test]
    fn w_identity_three_steps() {
        let phi = NatColoring::identity(1 << 12);
        let tr = defeat_w_summable(&phi, &budget(3)).unwrap();
        let sets: Vec<&[u64]> = tr.steps.iter().map(|s| s.chosen.as_slice()).collect();
        assert_eq!(sets, vec![&[2u64][..], &[8, 9], &[24, 25, 26]]);
        let cert = tr.certificate.as_ref().unwrap();
        // 1/3 + 1/9 + 1/10 + 1/25 + 1/26 + 1/27
        let by_hand = [3u64, 9, 10, 25, 26, 27].iter().map(|&d| frac(1, d)).fold(Rational::zero(), |a, b| a + b);
        assert_eq!(cert.sum, by_hand);
        assert_eq!(cert.majorant, frac(1, 3) + frac(2, 9) + frac(3, 25));
        assert!(tr.reverify(&nat_eval(&phi)).passed());
    }

    #[test]
    fn w_constant_zero_exhausts() {
        let phi = NatColoring::constant(1000, 0);
        match defeat_w_summable(&phi, &budget(3)) {
            Err(Error::SearchExhausted { step, window, .. }) => assert_eq!((step, window), (1, 1000)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn w_square() {
        let phi = NatColoring::new(1 << 16, NatRule::Square).unwrap();
        let tr = defeat_w_summable(&phi, &budget(4)).unwrap();
        for step in &tr.steps {
            let n = step.index as u64;
            assert_eq!(step.chosen.len() as u64, n);
            assert!(step.chosen.iter().all(|&x| x * x >= n << n));
        }
        let cert = tr.certificate.as_ref().unwrap();
        assert!(cert.sum <= w_majorant(4));
        assert!(tr.reverify(&nat_eval(&phi)).passed());
    }

    #[test]
    fn h_cases() {
        let c16 = BlockBasis::powers_of_two(16);
        let cases = [
            (NatColoring::constant(1 << 16, 7), CanonicalCase::Const),
            (NatColoring::new(1 << 16, NatRule::MinAlpha).unwrap(), CanonicalCase::Min),
            (NatColoring::new(1 << 16, NatRule::MaxAlpha).unwrap(), CanonicalCase::Max),
            (NatColoring::new(1 << 16, NatRule::MinMaxAlpha).unwrap(), CanonicalCase::MinMax),
        ];
        for (phi, case) in &cases {
            let tr = defeat_h_summable(phi, &c16, *case, &budget(10)).unwrap();
            assert_eq!(tr.steps.len(), 10);
            let report = tr.reverify(&nat_eval(phi));
            assert!(report.passed(), "{case}: {report:?}");
            let cert = tr.certificate.as_ref().unwrap();
            assert!(cert.sum <= cert.majorant);
        }
        let tr = defeat_h_summable(&cases[0].0, &c16, CanonicalCase::Const, &budget(10)).unwrap();
        assert_eq!(tr.certificate.unwrap().sum, frac(1, 8));
    }

    #[test]
    fn h_injective_uses_finite_preimage() {
        let c = BlockBasis::powers_of_two(20);
        let phi = NatColoring::identity(1 << 20);
        let tr = defeat_h_summable(&phi, &c, CanonicalCase::Inj, &budget(10)).unwrap();
        let chosen: Vec<u64> = tr.steps.iter().map(|s| s.chosen[0]).collect();
        assert_eq!(chosen, vec![4, 8, 32, 128, 512, 2048, 8192, 32768, 131072, 524288]);
        assert!(tr.reverify(&nat_eval(&phi)).passed());
        let cert = tr.certificate.unwrap();
        assert!(cert.sum <= h_majorant(CanonicalCase::Inj, 10, 0));
    }

    #[test]
    fn h_case_mismatch() {
        let c = BlockBasis::powers_of_two(4);
        let phi = NatColoring::identity(16);
        assert_eq!(
            defeat_h_summable(&phi, &c, CanonicalCase::Min, &budget(2)),
            Err(Error::CaseMismatch { expected: "MIN".into(), found: "INJ".into() })
        );
    }

    #[test]
    fn r_cases() {
        let t = NatSet::range(0, 600);
        for (phi, case) in [
            (PairColoring::constant(600, 3), CanonicalCase::Const),
            (PairColoring::min(600), CanonicalCase::Min),
            (PairColoring::max(600), CanonicalCase::Max),
        ] {
            let tr = defeat_r_summable(&phi, &t, case, &budget(10)).unwrap();
            assert!(tr.reverify(&pair_eval(&phi)).passed());
            let cert = tr.certificate.unwrap();
            assert!(cert.sum <= cert.majorant);
        }
        let phi = PairColoring::min(600);
        let tr = defeat_r_summable(&phi, &t, CanonicalCase::Min, &budget(10)).unwrap();
        let chosen: Vec<u64> = tr.steps.iter().map(|s| s.chosen[0]).collect();
        assert_eq!(chosen, vec![2, 3, 5, 9, 17, 33, 65, 129, 257, 513]);
    }

    #[test]
    fn r_pairing_brute_force() {
        let t = NatSet::range(0, 200);
        let phi = PairColoring::pairing(200);
        let tr = defeat_r_summable(&phi, &t, CanonicalCase::Inj, &budget(10)).unwrap();
        let h: Vec<u64> = tr.steps.iter().map(|s| s.chosen[0]).collect();
        for n in 0..h.len() {
            for i in 0..n {
                let v = phi.eval(h[i], h[n]).unwrap();
                assert!(v > (n as u64) << n);
            }
        }
        let cert = tr.certificate.unwrap();
        assert!(cert.sum < frac(2, 1));
    }
}
