use idealforge::adversary::{check_rnh_conditions, Case2Bundle, Case2Step, GammaMap, RnhBundle};
use idealforge::{Error, SparseBasis};

fn powers_of_three(k: u32) -> SparseBasis {
    SparseBasis::new(&(0..k).map(|i| 3u64.pow(i)).collect()).unwrap()
}

// f(y) lands in row 2 when 1 ∈ α(y), in row 4 or 5 when 9 ∈ α(y), else row y + 1.
fn case2_map(x: &SparseBasis) -> GammaMap {
    GammaMap::from_fn(x, |y| {
        let alpha = x.alpha_mask(y).unwrap();
        if alpha & 1 != 0 {
            (2, 1)
        } else if alpha & 0b100 != 0 {
            if y == 9 || y == 252 {
                (4, 3)
            } else {
                (5, 3)
            }
        } else {
            (y + 1, 0)
        }
    })
    .unwrap()
}

fn step(n: u64, j: u8, k: i64, f_set: Vec<u64>, x: u64, d: Vec<u64>) -> Case2Step {
    Case2Step { n, j, x, d, k, f_set }
}

fn valid() -> Case2Bundle {
    Case2Bundle {
        steps: vec![
            step(1, 0, -1, vec![], 1, vec![9, 27, 81, 243, 729, 2187]),
            step(3, 0, -1, vec![], 9, vec![81, 243, 729, 2187]),
            step(5, 1, 1, vec![1], 90, vec![243, 729, 2187]),
        ],
    }
}

fn failed(b: Case2Bundle) -> Vec<String> {
    let x = powers_of_three(10);
    let f = case2_map(&x);
    let r = check_rnh_conditions(&RnhBundle::Case2(b), &f, &x).unwrap();
    r.failed().into_iter().map(String::from).collect()
}

#[test]
fn case2_valid_bundle_passes() {
    assert!(failed(valid()).is_empty(), "{:?}", failed(valid()));
}

#[test]
fn case2_wrong_row_fails_d3a_only() {
    let mut b = valid();
    b.steps[2].x = 252;
    b.steps[2].d = vec![729, 2187];
    assert_eq!(failed(b), vec!["d3a"]);
}

#[test]
fn case2_non_nested_d_fails_b1_only() {
    let mut b = valid();
    b.steps[2].d = vec![243, 729, 6561];
    assert_eq!(failed(b), vec!["b1"]);
}

#[test]
fn case2_bad_f_fails_d2_only() {
    let mut b = valid();
    b.steps[2].f_set = vec![0, 1];
    assert_eq!(failed(b), vec!["d2"]);
}

#[test]
fn case2_malformed() {
    let x = powers_of_three(10);
    let f = case2_map(&x);
    let mut b = valid();
    b.steps[1].j = 2;
    assert!(matches!(
        check_rnh_conditions(&RnhBundle::Case2(b), &f, &x),
        Err(Error::MalformedBundle(_))
    ));
    assert!(matches!(
        check_rnh_conditions(&RnhBundle::Case2(Case2Bundle { steps: vec![] }), &f, &x),
        Err(Error::MalformedBundle(_))
    ));
}

#[test]
fn bundle_json_round_trip() {
    let b = RnhBundle::Case2(valid());
    let text = serde_json::to_string(&b).unwrap();
    assert!(text.contains("\"case\":\"2\""));
    let back: RnhBundle = serde_json::from_str(&text).unwrap();
    assert_eq!(back, b);
}
