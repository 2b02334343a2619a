use idealforge::rational::ratio;
use idealforge::search::{
    positive_family, search_reduction, verify_reduction, FiniteIdealSpec, Ground, ReductionCandidate, SearchLimits,
    SearchOutcome,
};
use idealforge::{IdealId, ScaleParams};
use proptest::prelude::*;

fn spec_strategy() -> impl Strategy<Value = FiniteIdealSpec> {
    let p = |tau: (i64, i64), window: u64| ScaleParams {
        ap_len: 3,
        clique_size: 3,
        fs_size: 2,
        tau: ratio(tau.0, tau.1),
        window,
    };
    prop_oneof![
        (0u64..3, 3u64..6).prop_map(move |(s, len)| FiniteIdealSpec::new(
            IdealId::Vdw,
            p((2, 1), 64),
            Ground::Segment { start: s, end: s + len }
        )
        .unwrap()),
        (1u64..3, 3u64..5).prop_map(move |(s, len)| FiniteIdealSpec::new(
            IdealId::Hindman,
            p((2, 1), 64),
            Ground::Segment { start: s, end: s + len }
        )
        .unwrap()),
        (0u64..3, 2u64..5, 1i64..4).prop_map(move |(s, len, t)| FiniteIdealSpec::new(
            IdealId::Summable,
            p((t, 2), 64),
            Ground::Segment { start: s, end: s + len }
        )
        .unwrap()),
        (3u64..6).prop_map(move |w| FiniteIdealSpec::new(IdealId::Fin, p((2, 1), w), Ground::Segment { start: 0, end: w })
            .unwrap()),
        Just(FiniteIdealSpec::new(IdealId::Ramsey, p((2, 1), 64), Ground::PairGrid { n: 3 }).unwrap()),
        (1u64..3).prop_map(move |c| FiniteIdealSpec::new(IdealId::Fin2, p((2, 1), 64), Ground::Grid { columns: c, rows: 2 })
            .unwrap()),
    ]
}

/// Lexicographically least map passing `verify_reduction`, by brute force.
fn naive(src: &FiniteIdealSpec, dst: &FiniteIdealSpec) -> Option<Vec<usize>> {
    let s = src.elements().unwrap().len();
    let d = dst.elements().unwrap().len();
    let mut map = vec![0usize; d];
    loop {
        let f = ReductionCandidate { map: map.clone() };
        if verify_reduction(&f, src, dst).unwrap().passed() {
            return Some(map);
        }
        let mut i = d;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            map[i] += 1;
            if map[i] < s {
                break;
            }
            map[i] = 0;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn search_agrees_with_brute_force(src in spec_strategy(), dst in spec_strategy()) {
        let got = search_reduction(&src, &dst, &SearchLimits::default()).unwrap();
        match (got, naive(&src, &dst)) {
            (SearchOutcome::Found { map }, Some(expected)) => prop_assert_eq!(map.map, expected),
            (SearchOutcome::Exhausted { .. }, None) => {}
            (got, expected) => prop_assert!(false, "search {:?} vs brute force {:?}", got, expected),
        }
    }

    #[test]
    fn family_sets_are_positive(spec in spec_strategy()) {
        let fam = positive_family(&spec).unwrap();
        for b in &fam.sets {
            prop_assert!(spec.is_positive_at(&fam.elements, b.iter().copied()).unwrap());
        }
    }
}

#[test]
fn identity_reduces_each_ideal_to_itself() {
    let p = ScaleParams { ap_len: 3, clique_size: 3, fs_size: 2, tau: ratio(3, 2), window: 6 };
    let specs = [
        FiniteIdealSpec::new(IdealId::Vdw, p.clone(), Ground::Segment { start: 0, end: 6 }).unwrap(),
        FiniteIdealSpec::new(IdealId::Hindman, p.clone(), Ground::FsFragment { basis: vec![1, 4] }).unwrap(),
        FiniteIdealSpec::new(IdealId::Summable, p.clone(), Ground::Segment { start: 0, end: 6 }).unwrap(),
        FiniteIdealSpec::new(IdealId::Fin, p.clone(), Ground::Segment { start: 0, end: 6 }).unwrap(),
        FiniteIdealSpec::new(IdealId::Ramsey, p.clone(), Ground::PairGrid { n: 4 }).unwrap(),
        FiniteIdealSpec::new(IdealId::Fin2, p, Ground::Grid { columns: 2, rows: 3 }).unwrap(),
    ];
    for spec in &specs {
        let n = spec.elements().unwrap().len();
        let id = ReductionCandidate { map: (0..n).collect() };
        assert!(verify_reduction(&id, spec, spec).unwrap().passed(), "{:?}", spec.id);
        assert!(matches!(
            search_reduction(spec, spec, &SearchLimits::default()).unwrap(),
            SearchOutcome::Found { .. }
        ));
    }
}

#[test]
fn fin2_to_h_map_reduces_on_a_window() {
    use idealforge::adversary::fin2_to_h_map;
    use idealforge::search::Elem;
    let p = ScaleParams { ap_len: 3, clique_size: 3, fs_size: 2, tau: ratio(2, 1), window: 64 };
    let dst = FiniteIdealSpec::new(IdealId::Hindman, p.clone(), Ground::Segment { start: 1, end: 8 }).unwrap();
    let src = FiniteIdealSpec::new(IdealId::Fin2, p, Ground::Grid { columns: 3, rows: 4 }).unwrap();
    let pairs: Vec<(Elem, Elem)> = (1..8u64)
        .map(|x| {
            let (k, n) = fin2_to_h_map(x).unwrap();
            (Elem::Nat(x), Elem::Cell(k, n))
        })
        .collect();
    let f = ReductionCandidate::from_pairs(&src.elements().unwrap(), &dst.elements().unwrap(), &pairs).unwrap();
    let report = verify_reduction(&f, &src, &dst).unwrap();
    assert!(report.passed(), "{report:?}");
}
