//! Library side of the `forge` command: random benchmark instances, batch
//! benchmarking, scaling fits, subprocess oracles and error classification.

pub mod bench;
pub mod error;
pub mod instance;
pub mod oracle;
pub mod scaling;

pub use bench::{
    bench_run, BenchConfig, BenchRow, BenchSolver, BenchTable, GraphSpec, InstanceRecord,
};
pub use error::{CliError, Result};
pub use instance::{random_instance, DEFAULT_COEFFICIENTS};
pub use oracle::SubprocessOracle;
pub use scaling::{scaling_fit, scaling_fit_points, ExponentialFit, LinearFit, ScalingFit};
