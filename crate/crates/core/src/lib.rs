//! Planning toolkit for multi-device deep-learning training.
//!
//! Two halves share this crate:
//!
//! * placement: [`placer`] searches vertex-to-device assignments of a compute
//!   dataflow graph ([`graph::ComputeGraph`]) over a hardware graph
//!   ([`graph::HardwareGraph`]) to minimize per-step makespan, using the
//!   routing and scheduling machinery in [`schedule`];
//! * strategy: [`advisor`] combines model-parallel per-step speedups with
//!   epoch-vs-batch curves and scaling-efficiency models to pick between
//!   data-parallel-only and hybrid training for each device count.
//!
//! Units are fixed across the crate: microseconds for time, bytes for data
//! and memory, bytes per microsecond for bandwidth.

pub mod advisor;
pub mod cli;
pub mod gen;
pub mod graph;
pub mod placer;
pub mod schedule;

/// Absolute tolerance (µs) for feasibility and makespan comparisons.
pub const TIME_EPS: f64 = 1e-6;
