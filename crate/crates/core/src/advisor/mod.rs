//! End-to-end training time model for choosing between data-parallel-only
//! and hybrid data + model parallel training.
//!
//! Training time is step time × steps per epoch × epochs. With `N`
//! data-parallel workers of mini-batch `B` the global batch is `N·B`, so
//! relative to one device:
//!
//! * DP-only speedup is `SE(N) · N · E(B) / E(N·B)`;
//! * giving each worker `M`-way model parallelism multiplies that by the
//!   per-step speedup `SU(M)` while leaving the global batch unchanged;
//! * hybrid `N×M` beats DP-only on `N·M` devices exactly when
//!   `SU(M) > M · SE(N·M)/SE(N) · E(N·B)/E(N·M·B)`.

mod curve;
mod report;
mod scenario;

pub use curve::{EpochCurve, ScalingEfficiency};
pub use report::{sweep_csv, ReportRow, RowValues, StrategyReport, SweepRow, REPORT_HEADER, SWEEP_HEADER};
pub use scenario::{MpSpeedupTable, TrainScenario};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdvisorError {
    #[error("global batch {batch} outside measured range [{min}, {max}]")]
    OutOfRange { batch: f64, min: f64, max: f64 },
    #[error("no scaling efficiency known for {workers} workers")]
    EfficiencyOutOfRange { workers: u64 },
    #[error("no model-parallel speedup known for M={0}")]
    UnknownMp(u32),
    #[error("no feasible factorization of {0} devices")]
    NoFeasibleFactorization(u64),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// `ceil(dataset_size / global_batch)`.
pub fn steps_per_epoch(dataset_size: u64, global_batch: u64) -> u64 {
    assert!(global_batch > 0, "global batch must be positive");
    dataset_size.div_ceil(global_batch)
}

/// Outcome of comparing hybrid `N×M` against DP-only on `N·M` devices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossover {
    pub hybrid_better: bool,
    /// `SU(M)` minus the break-even speedup; positive favours hybrid.
    pub margin: f64,
}

/// One parallelization choice: `n` data-parallel workers, each `m`-way
/// model parallel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strategy {
    pub n: u64,
    pub m: u32,
    pub speedup: f64,
}
