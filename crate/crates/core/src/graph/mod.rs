//! Compute dataflow graphs, hardware graphs and their file formats.

mod compute;
mod hardware;

pub use compute::{ComputeGraph, DepEdge, OpVertex};
pub use hardware::{DeviceNode, HardwareGraph, LinkSpec, Route, RouterNode};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("cycle detected: [{}]", join_ids(.0))]
    Cycle(Vec<u32>),
    #[error("edge {src}->{dst} references unknown vertex {missing}")]
    DanglingEdge { src: u32, dst: u32, missing: u32 },
    #[error("self loop on vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate id {0}")]
    DuplicateId(u32),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("hardware graph has no devices")]
    NoDevices,
    #[error("disconnected: device {0} unreachable from device {1}")]
    Disconnected(u32, u32),
    #[error("nonpositive bandwidth {bandwidth} on link {a}-{b}")]
    NonPositiveBandwidth { a: u32, b: u32, bandwidth: f64 },
    #[error("link {a}-{b} references unknown node {missing}")]
    UnknownNode { a: u32, b: u32, missing: u32 },
    #[error("unknown device {0}")]
    UnknownDevice(u32),
}

fn join_ids(ids: &[u32]) -> String {
    ids.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}
