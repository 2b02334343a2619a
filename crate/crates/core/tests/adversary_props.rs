use idealforge::adversary::{defeat_r_summable, defeat_w_summable, Point, SearchBudget, Transcript, Witness};
use idealforge::canonical::{CanonicalCase, NatColoring, PairColoring};
use idealforge::ideal::longest_ap;
use idealforge::rational::ratio;
use idealforge::{NatSet, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn nat_eval(phi: &NatColoring) -> impl Fn(Point) -> Result<u64> + '_ {
    move |p| match p {
        Point::Nat(x) => phi.eval(x),
        Point::Pair(..) => unreachable!(),
    }
}

fn pair_eval(phi: &PairColoring) -> impl Fn(Point) -> Result<u64> + '_ {
    move |p| match p {
        Point::Pair(a, b) => phi.eval(a, b),
        Point::Nat(_) => unreachable!(),
    }
}

fn exact_sum(values: impl IntoIterator<Item = u64>) -> BigRational {
    let mut seen = std::collections::BTreeSet::new();
    let mut total = BigRational::from_integer(BigInt::from(0));
    for v in values {
        if seen.insert(v) {
            total += BigRational::new(BigInt::from(1), BigInt::from(v) + 1);
        }
    }
    total
}

fn set_of(tr: &Transcript) -> NatSet {
    match &tr.witness {
        Witness::Set(s) => s.clone(),
        Witness::Nested { .. } => panic!("flat witness expected"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn w_strategy_on_quadratics(a in 1u64..4, b in 0u64..5, c in 0u64..7, n_max in 1usize..6) {
        let phi = NatColoring::from_fn(1500, |x| a * x * x + b * x + c);
        let tr = defeat_w_summable(&phi, &SearchBudget::new(1500, n_max, 8).unwrap()).unwrap();
        prop_assert_eq!(tr.steps.len(), n_max);
        for (n, step) in (1..).zip(&tr.steps) {
            let s: NatSet = step.chosen.iter().copied().collect();
            prop_assert_eq!(s.len(), n);
            prop_assert_eq!(longest_ap(&s), n);
            for &x in &step.chosen {
                prop_assert!(phi.eval(x).unwrap() >= (n as u64) << n);
            }
        }
        let a_set = set_of(&tr);
        let cert = tr.certificate.clone().unwrap();
        prop_assert_eq!(&cert.sum, &exact_sum(a_set.iter().map(|x| phi.eval(x).unwrap())));
        prop_assert!(cert.sum <= cert.majorant);
        prop_assert!(cert.sum < ratio(1, 1));
        prop_assert!(tr.reverify(&nat_eval(&phi)).passed());

        // changing φ on one chosen point is caught
        let victim = tr.steps.last().unwrap().chosen[0];
        let tampered = NatColoring::from_fn(1500, |x| if x == victim { 0 } else { a * x * x + b * x + c });
        prop_assert!(!tr.reverify(&nat_eval(&tampered)).passed());
    }

    #[test]
    fn r_strategy_on_min_colorings(slope in 1u64..5, offset in 0u64..9) {
        let phi = PairColoring::from_fn(300, |i, _| slope * i + offset);
        let t = NatSet::range(0, 300);
        let tr = defeat_r_summable(&phi, &t, CanonicalCase::Min, &SearchBudget::new(300, 6, 8).unwrap()).unwrap();
        let h = set_of(&tr);
        let hv: Vec<u64> = h.iter().collect();
        let mut image = Vec::new();
        for j in 0..hv.len() {
            for i in 0..j {
                image.push(phi.eval(hv[i], hv[j]).unwrap());
            }
        }
        let cert = tr.certificate.clone().unwrap();
        prop_assert_eq!(&cert.sum, &exact_sum(image));
        prop_assert!(cert.sum <= cert.majorant);
        prop_assert!(tr.reverify(&pair_eval(&phi)).passed());
    }
}
