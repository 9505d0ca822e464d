//! Sparsification toolkit for LP-based correlation clustering.
//!
//! The crate covers the whole pipeline on complete signed weighted graphs:
//! synthetic instance generation, weight-proportional edge coresets, a
//! cutting-plane solver for the triangle-inequality LP, pivot rounding from
//! full or sparsely observed LP marginals, combinatorial baselines, and an
//! experiment harness that emits tidy CSV.

pub mod baselines;
pub mod clustering;
pub mod coreset;
pub mod error;
pub mod experiments;
pub mod instance;
pub mod lp;
pub mod pivot;
pub mod seeding;

pub use clustering::{Clustering, CostReport};
pub use error::{Error, Result};
pub use instance::{CCInstance, Sign};
pub use lp::LpSolution;
pub use pivot::SampleSet;
