//! Recovering classical weight enumerators from a degenerate decoder.

pub mod classical;
pub mod constraints;
pub mod crossing;
pub mod instance;
pub mod pipeline;

pub use classical::ClassicalCode;
pub use crossing::{find_crossing, CrossingPoint};
pub use instance::{Answer, ClassOracle, CountingOracle, ExactDqmld, ReductionInstance};
pub use pipeline::{run_reduction, run_reduction_with, Mode, Perturbation, Reduction, ReductionConfig, Transcript};
