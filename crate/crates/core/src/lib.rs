//! Estimation of the k-disc type distribution of a bounded-degree graph from
//! a single pass over a uniformly random-order edge stream.
//!
//! The pipeline: collect partial ("observed") discs around sampled roots with
//! [`stream::observe_multi`], catalog their canonical types
//! ([`canon`], [`catalog`]), compute the conditional observation
//! probabilities λ(Δ_i|Δ_j) ([`lambda`]), and invert the observation process
//! with the triangular correction recurrence ([`estimator`]). On top of the
//! estimated distribution sit property testers and a greedy-matching size
//! estimator ([`apps`]). Everything is checkable against brute-force
//! references in [`oracle`].

pub mod apps;
pub mod canon;
pub mod catalog;
pub mod disc;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod lambda;
pub mod oracle;
pub mod report;
pub mod stream;

pub use error::{Error, Result};
