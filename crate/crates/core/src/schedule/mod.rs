//! Routing, scheduling and feasibility checking for a fixed placement.

mod exact;
mod export;
mod list;
mod validate;

pub use exact::{exact_schedule, DEFAULT_EXACT_LIMIT};
pub use export::{load_solution, AssignEntry, RouteEntry, SolutionError, SolutionFile, StartEntry};
pub use list::list_schedule;
pub use validate::{validate_solution, Violation};

pub(crate) use exact::exact_schedule_delays;
pub(crate) use list::list_schedule_delays;

use thiserror::Error;

use crate::graph::{ComputeGraph, HardwareGraph, Route};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("instance too large for exact scheduling: {vertices} vertices exceeds limit {limit}")]
    TooLarge { vertices: usize, limit: usize },
}

/// Vertex-to-device assignment, both as dense indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Placement {
    pub assign: Vec<usize>,
}

impl Placement {
    pub fn new(assign: Vec<usize>) -> Self {
        Placement { assign }
    }

    /// Everything on device index `device`.
    pub fn uniform(vertices: usize, device: usize) -> Self {
        Placement { assign: vec![device; vertices] }
    }

    pub fn device_of(&self, v: usize) -> usize {
        self.assign[v]
    }

    pub fn memory_per_device(&self, g: &ComputeGraph, devices: usize) -> Vec<u64> {
        let mut used = vec![0u64; devices];
        for (v, &d) in self.assign.iter().enumerate() {
            if d < devices {
                used[d] = used[d].saturating_add(g.vertex(v).mem);
            }
        }
        used
    }

    pub fn fits_memory(&self, g: &ComputeGraph, hw: &HardwareGraph) -> bool {
        self.memory_per_device(g, hw.device_count())
            .iter()
            .zip(hw.devices())
            .all(|(&used, d)| used <= d.mem_capacity)
    }
}

/// Per-edge link paths and communication delays.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RoutingTable {
    pub routes: Vec<Route>,
}

impl RoutingTable {
    pub fn delays(&self) -> Vec<f64> {
        self.routes.iter().map(|r| r.delay).collect()
    }
}

/// Start time (µs) per dense vertex index, plus the resulting makespan.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Schedule {
    pub start: Vec<f64>,
    pub makespan: f64,
}

impl Schedule {
    pub fn from_starts(g: &ComputeGraph, start: Vec<f64>) -> Self {
        let makespan = makespan(&start, g);
        Schedule { start, makespan }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementSolution {
    pub placement: Placement,
    pub routing: RoutingTable,
    pub schedule: Schedule,
}

/// Latest completion time over all vertices; zero for an empty graph.
pub fn makespan(start: &[f64], g: &ComputeGraph) -> f64 {
    start
        .iter()
        .enumerate()
        .map(|(v, &s)| s + g.cost(v))
        .fold(0.0, f64::max)
}

/// Routes every cross-device edge on its delay-shortest path.
pub fn build_routing(g: &ComputeGraph, hw: &HardwareGraph, p: &Placement) -> RoutingTable {
    let routes = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            let (s, d) = g.endpoints(e);
            hw.route_between(p.device_of(s), p.device_of(d), edge.bytes)
        })
        .collect();
    RoutingTable { routes }
}

/// Routes, then list-schedules, a placement.
pub fn solve_placement(g: &ComputeGraph, hw: &HardwareGraph, p: Placement) -> PlacementSolution {
    let routing = build_routing(g, hw, &p);
    let schedule = list_schedule(g, &p, &routing);
    PlacementSolution {
        placement: p,
        routing,
        schedule,
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use crate::graph::{ComputeGraph, DepEdge, DeviceNode, HardwareGraph, LinkSpec, OpVertex};

    pub fn vertex(id: u32, cost: f64, mem: u64) -> OpVertex {
        OpVertex { id, label: None, cost, mem }
    }

    pub fn edge(src: u32, dst: u32, bytes: u64) -> DepEdge {
        DepEdge { src, dst, bytes }
    }

    /// 0(2) -> {1(8), 2(8)} -> 3(2), one byte per edge.
    pub fn diamond() -> ComputeGraph {
        ComputeGraph::new(
            vec![vertex(0, 2.0, 1), vertex(1, 8.0, 1), vertex(2, 8.0, 1), vertex(3, 2.0, 1)],
            vec![edge(0, 1, 1), edge(0, 2, 1), edge(1, 3, 1), edge(2, 3, 1)],
        )
        .unwrap()
    }

    /// Two devices joined by a link that moves one byte in exactly 1 µs.
    pub fn unit_pair() -> HardwareGraph {
        HardwareGraph::new(
            vec![
                DeviceNode { id: 0, mem_capacity: 1 << 20 },
                DeviceNode { id: 1, mem_capacity: 1 << 20 },
            ],
            vec![],
            vec![LinkSpec { a: 0, b: 1, bandwidth: 1.0, latency: 0.0 }],
        )
        .unwrap()
    }
}
