//! Finite-scale oracles for Ramsey-type ideals on ω: positivity proxies,
//! sparse finite-sums bases, canonical coloring classifiers, replayable
//! adversary strategies and a bounded Katětov reduction search.

pub mod adversary;
pub mod canonical;
pub mod error;
pub mod ideal;
pub mod rational;
pub mod report;
pub mod search;
pub mod sets;
pub mod sparse;

pub use error::{Error, Result};
pub use canonical::{BlockBasis, CanonicalCase, NatColoring, PairColoring};
pub use ideal::{Carrier, CarrierSet, IdealId, ScaleParams};
pub use report::Report;
pub use sets::{EdgeSet, GridSet, NatSet};
pub use sparse::SparseBasis;
