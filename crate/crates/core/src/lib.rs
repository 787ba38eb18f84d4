//! Deterministic relative-error approximation of the total variation distance
//! between two product distributions over `[q]^n`, and between two `n`-step
//! Markov chains.
//!
//! Everything is driven by likelihood-ratio distributions ([`RatioDist`]): the
//! law of `P(X)/Q(X)` under `X ~ Q`, kept as an explicit sorted table. The TV
//! distance is a linear functional of that table. Building the table exactly
//! takes exponential space, so the estimators keep it small by repeatedly
//! merging nearby values ([`sparsify`]). The result is a lower bound `Δ̂` with
//! `(1 - ε)·Δ_TV ≤ Δ̂ ≤ Δ_TV`.
//!
//! ```
//! use tvd_core::{estimate_product_tv, DiscreteDist, ProductPair};
//!
//! let p = DiscreteDist::new(vec![0.75, 0.25]).unwrap();
//! let q = DiscreteDist::new(vec![0.25, 0.75]).unwrap();
//! let pair = ProductPair::new(vec![p; 2], vec![q; 2]).unwrap();
//! let report = estimate_product_tv(&pair, 0.1).unwrap();
//! assert!(report.estimate >= 0.45 && report.estimate <= 0.5);
//! ```
//!
//! The [`oracle`] module holds exact (exponential-time) references.

pub mod dist;
pub mod error;
pub mod generate;
pub mod markov;
mod merge;
pub mod oracle;
pub mod product;
pub mod ratio;
pub mod region;
pub mod report;
pub mod sparsify;

pub use dist::{tv_discrete, DiscreteDist};
pub use error::{Result, TvError};
pub use markov::{
    concatenate, estimate_markov_ratio, estimate_markov_tv, kernel_conditional_ratio,
    markov_lower_bound, ConditionalRatio, Kernel, MarkovPair,
};
pub use product::{estimate_product_ratio, estimate_product_tv, product_lower_bound, ProductPair};
pub use ratio::{
    alternative_ratio, expectation, indp_product, ratio_of, tv_of_ratio, ExtendedRatioDist,
    MassPoint, RatioDist,
};
pub use region::{np_boundary, NPBoundary};
pub use report::EstimateReport;
pub use sparsify::{
    build_partition, locate_interval, sparsify, sparsify_wrt_intervals, IntervalIndex,
    IntervalPartition,
};

/// Tolerance for invariant checks on sums of masses and expectations.
pub const VALIDITY_TOL: f64 = 1e-9;
