//! Benchmark harness for k-groups clustering: CSV and dataset ingestion,
//! replicated simulation experiments, and result emission.

pub mod dermatology;
pub mod error;
pub mod experiment;
pub mod input;
pub mod output;

pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, Algorithm, Design, ExperimentOutput, ExperimentSpec, ResultTable, RunOptions};
