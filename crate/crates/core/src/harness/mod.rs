//! Seeded, replayable verification suites and the partition regression.

pub mod partition;
pub mod random;
pub mod suite;

pub use partition::{compute_partition_regression, PartitionRegression, RegressionOutcome};
pub use suite::{run_suite, Outcome, SuiteConfig, SuiteReport, SuiteTag};
