//! Replayable counterexample constructions against candidate reductions,
//! with exact-rational certificates, and checkers for the finite fragments of
//! the pair/finite-sums condition systems.

mod pair_sums;
mod sums_pair;
mod summable;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canonical::CanonicalCase;
use crate::error::{Error, Result};
use crate::ideal::reciprocal_sum;
use crate::rational::{self, Rational};
use crate::report::Report;
use crate::sets::{edge, NatSet};
use crate::sparse;

pub use pair_sums::{check_hnr_conditions, defeat_r_hindman, replay_final_contradiction};
pub use sums_pair::{
    check_rnh_conditions, Case1Bundle, Case2Bundle, Case2Step, GammaMap, RnhBundle,
};
pub use summable::{defeat_h_summable, defeat_r_summable, defeat_w_summable};

/// `x = 2ᵏ(2n+1) ↦ (k, n)`: sends `A_k = {2ᵏ(2n+1) : n ∈ ω}` onto column `k`.
pub fn fin2_to_h_map(x: u64) -> Result<(u64, u64)> {
    if x == 0 {
        return Err(Error::ZeroInput);
    }
    let k = x.trailing_zeros();
    Ok((u64::from(k), (x >> k) / 2))
}

/// `{k, i} ↦ (k, i − k − 1)` for `k < i`: row `k` receives the star at `k`.
pub fn fin2_to_r_map(a: u64, b: u64) -> Result<(u64, u64)> {
    let (k, i) = edge(a, b)?;
    Ok((k, i - k - 1))
}

/// `A_k ∩ [0, window)`.
pub fn column_set(k: u32, window: u64) -> NatSet {
    if k >= 64 {
        return NatSet::new();
    }
    let step = 1u64 << k;
    let mut out = Vec::new();
    let mut x = step;
    while x < window {
        out.push(x);
        match x.checked_add(2 * step) {
            Some(next) if k < 63 => x = next,
            _ => break,
        }
    }
    NatSet::from_sorted(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Exclusive bound on elements the construction may use.
    pub max_element: u64,
    pub n_max: usize,
    /// Size of each finite set standing in for an infinite one.
    pub candidate_cap: usize,
}

/// Thresholds `n·2ⁿ` and `2²ⁿ` stay inside `u64` below this many steps.
pub const MAX_STEPS: usize = 30;

impl SearchBudget {
    pub fn new(max_element: u64, n_max: usize, candidate_cap: usize) -> Result<Self> {
        let b = SearchBudget {
            max_element,
            n_max,
            candidate_cap,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_element == 0 || self.n_max == 0 || self.candidate_cap == 0 {
            return Err(Error::InvalidParams("budget fields must be positive".into()));
        }
        if self.n_max > MAX_STEPS {
            return Err(Error::InvalidParams(format!(
                "n_max {} exceeds {MAX_STEPS}",
                self.n_max
            )));
        }
        Ok(())
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_element: 1 << 20,
            n_max: 10,
            candidate_cap: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    Nat(u64),
    Pair(u64, u64),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(x) => write!(f, "{x}"),
            Point::Pair(i, j) => write!(f, "{{{i},{j}}}"),
        }
    }
}

/// `φ(point) > bound`, or `≥` when not strict, with the value observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inequality {
    pub point: Point,
    pub value: u64,
    pub bound: u64,
    pub strict: bool,
}

impl Inequality {
    pub fn holds(&self) -> bool {
        if self.strict {
            self.value > self.bound
        } else {
            self.value >= self.bound
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub index: usize,
    pub chosen: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<u64>,
    pub window: u64,
    pub checks: Vec<Inequality>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Witness {
    Set(NatSet),
    Nested { b: Vec<u64>, sets: Vec<NatSet> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub image: NatSet,
    #[serde(with = "rational::text")]
    pub sum: Rational,
    #[serde(with = "rational::text")]
    pub majorant: Rational,
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Progressions inside the superlevel sets of `φ: ω → ω`.
    WSummable,
    /// Threshold subsequences of a canonical block basis.
    HSummable,
    /// Threshold subsequences of a canonical pair-coloring set.
    RSummable,
    /// Nested sets `B₀ ⊇ B₁ ⊇ …` against `f: [ω]² → FS(D)`.
    RHindman,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub strategy: Strategy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub case: Option<CanonicalCase>,
    pub steps: Vec<Step>,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub certificate: Option<Certificate>,
}

impl Transcript {
    /// Points whose images make up the certified set.
    fn image_points(&self) -> Result<Vec<Point>> {
        let Witness::Set(w) = &self.witness else {
            return Ok(Vec::new());
        };
        Ok(match self.strategy {
            Strategy::WSummable => w.iter().map(Point::Nat).collect(),
            Strategy::HSummable => sparse::fs(w)?.iter().map(Point::Nat).collect(),
            Strategy::RSummable => {
                let v = w.as_slice();
                v.iter()
                    .enumerate()
                    .flat_map(|(a, &j)| v[..a].iter().map(move |&i| Point::Pair(i, j)))
                    .collect()
            }
            Strategy::RHindman => Vec::new(),
        })
    }

    /// Re-queries every recorded inequality and recomputes the certificate.
    pub fn reverify(&self, eval: &dyn Fn(Point) -> Result<u64>) -> Report {
        let mut report = Report::new("transcript-reverify");
        let mut failures = Vec::new();
        let mut count = 0;
        for step in &self.steps {
            for check in &step.checks {
                count += 1;
                let fresh = Inequality {
                    value: match eval(check.point) {
                        Ok(v) => v,
                        Err(e) => {
                            failures.push(format!("step {}: {} ({e})", step.index, check.point));
                            continue;
                        }
                    },
                    ..check.clone()
                };
                if fresh.value != check.value || !fresh.holds() {
                    failures.push(format!(
                        "step {}: φ({}) = {}, recorded {}, bound {}",
                        step.index, check.point, fresh.value, check.value, check.bound
                    ));
                }
            }
        }
        report.push(
            "inequalities",
            failures.is_empty(),
            if failures.is_empty() {
                format!("{count} inequalities re-verified")
            } else {
                failures.join("; ")
            },
        );
        if let Some(cert) = &self.certificate {
            let image: Result<NatSet> = self
                .image_points()
                .and_then(|pts| pts.into_iter().map(eval).collect());
            match image {
                Ok(image) => {
                    let sum = reciprocal_sum(&image);
                    report.push(
                        "certificate_image",
                        image == cert.image,
                        format!("{} values recomputed", image.len()),
                    );
                    report.push(
                        "certificate_sum",
                        sum == cert.sum,
                        format!("recomputed {}", rational::to_text(&sum)),
                    );
                    report.push(
                        "certificate_majorant",
                        cert.sum <= cert.majorant,
                        format!(
                            "{} <= {}",
                            rational::to_text(&cert.sum),
                            rational::to_text(&cert.majorant)
                        ),
                    );
                }
                Err(e) => report.push("certificate_image", false, e.to_string()),
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fin2_maps() {
        assert_eq!(fin2_to_h_map(12), Ok((2, 1)));
        assert_eq!(fin2_to_h_map(7), Ok((0, 3)));
        assert_eq!(fin2_to_h_map(16), Ok((4, 0)));
        assert_eq!(fin2_to_h_map(0), Err(Error::ZeroInput));
        assert_eq!(fin2_to_r_map(0, 1), Ok((0, 0)));
        assert_eq!(fin2_to_r_map(3, 10), Ok((3, 6)));
        assert_eq!(fin2_to_r_map(6, 5), Ok((5, 0)));
        assert_eq!(fin2_to_r_map(4, 4), Err(Error::DegeneratePair(4)));
    }

    #[test]
    fn h_map_inverts() {
        for x in 1..5000u64 {
            let (k, n) = fin2_to_h_map(x).unwrap();
            assert_eq!((1u64 << k) * (2 * n + 1), x);
            assert!(column_set(k as u32, 5000).contains(x));
        }
    }

    #[test]
    fn columns() {
        assert_eq!(column_set(0, 8), NatSet::from([1, 3, 5, 7]));
        assert_eq!(column_set(2, 30), NatSet::from([4, 12, 20, 28]));
        assert!(column_set(5, 32).is_empty());
    }

    #[test]
    fn budget_validation() {
        assert!(SearchBudget::new(0, 1, 1).is_err());
        assert!(SearchBudget::new(10, 31, 1).is_err());
        assert!(SearchBudget::new(10, 3, 2).is_ok());
    }
}
