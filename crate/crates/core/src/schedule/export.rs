use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Placement, PlacementSolution, RoutingTable, Schedule};
use crate::graph::{ComputeGraph, HardwareGraph, Route};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignEntry {
    pub vertex: u32,
    pub device: u32,
}

/// Route for the edge at the same position in the compute graph file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteEntry {
    pub src: u32,
    pub dst: u32,
    pub links: Vec<usize>,
    pub delay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartEntry {
    pub vertex: u32,
    pub time: f64,
}

/// On-disk solution, keyed by original ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub placement: Vec<AssignEntry>,
    pub routes: Vec<RouteEntry>,
    pub start: Vec<StartEntry>,
    pub makespan: f64,
}

impl SolutionFile {
    pub fn from_solution(g: &ComputeGraph, hw: &HardwareGraph, sol: &PlacementSolution) -> Self {
        let placement = sol
            .placement
            .assign
            .iter()
            .enumerate()
            .map(|(v, &d)| AssignEntry {
                vertex: g.vertex(v).id,
                device: hw.devices()[d].id,
            })
            .collect();
        let routes = g
            .edges()
            .iter()
            .zip(&sol.routing.routes)
            .map(|(e, r)| RouteEntry {
                src: e.src,
                dst: e.dst,
                links: r.links.clone(),
                delay: r.delay,
            })
            .collect();
        let start = sol
            .schedule
            .start
            .iter()
            .enumerate()
            .map(|(v, &t)| StartEntry {
                vertex: g.vertex(v).id,
                time: t,
            })
            .collect();
        SolutionFile {
            placement,
            routes,
            start,
            makespan: sol.schedule.makespan,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }

    /// Resolves ids against the graphs. Structural mismatches (wrong
    /// counts, unknown or repeated ids) are errors; constraint breaches
    /// are left for [`super::validate_solution`].
    pub fn resolve(
        &self,
        g: &ComputeGraph,
        hw: &HardwareGraph,
    ) -> Result<PlacementSolution, SolutionError> {
        let n = g.len();
        if self.placement.len() != n {
            return Err(SolutionError::Mismatch(format!(
                "graph has {} vertices, placement lists {}",
                n,
                self.placement.len()
            )));
        }
        if self.start.len() != n {
            return Err(SolutionError::Mismatch(format!(
                "graph has {} vertices, schedule lists {}",
                n,
                self.start.len()
            )));
        }
        if self.routes.len() != g.edges().len() {
            return Err(SolutionError::Mismatch(format!(
                "graph has {} edges, solution routes {}",
                g.edges().len(),
                self.routes.len()
            )));
        }

        let vertex = |id: u32| {
            g.index_of(id)
                .ok_or_else(|| SolutionError::Mismatch(format!("unknown vertex {}", id)))
        };
        let mut assign = vec![None; n];
        for a in &self.placement {
            let v = vertex(a.vertex)?;
            let d = hw
                .device_index(a.device)
                .ok_or_else(|| SolutionError::Mismatch(format!("unknown device {}", a.device)))?;
            if assign[v].replace(d).is_some() {
                return Err(SolutionError::Mismatch(format!(
                    "vertex {} placed more than once",
                    a.vertex
                )));
            }
        }
        let mut start = vec![None; n];
        for s in &self.start {
            let v = vertex(s.vertex)?;
            if start[v].replace(s.time).is_some() {
                return Err(SolutionError::Mismatch(format!(
                    "vertex {} scheduled more than once",
                    s.vertex
                )));
            }
        }
        let mut routes = Vec::with_capacity(self.routes.len());
        for (r, e) in self.routes.iter().zip(g.edges()) {
            if (r.src, r.dst) != (e.src, e.dst) {
                return Err(SolutionError::Mismatch(format!(
                    "route ({},{}) does not match edge ({},{})",
                    r.src, r.dst, e.src, e.dst
                )));
            }
            routes.push(Route {
                links: r.links.clone(),
                delay: r.delay,
            });
        }

        // counts match and no id repeats, so every slot is filled
        Ok(PlacementSolution {
            placement: Placement::new(assign.into_iter().map(Option::unwrap).collect()),
            routing: RoutingTable { routes },
            schedule: Schedule {
                start: start.into_iter().map(Option::unwrap).collect(),
                makespan: self.makespan,
            },
        })
    }
}

/// Parses and resolves a solution file against its graphs.
pub fn load_solution(
    text: &str,
    g: &ComputeGraph,
    hw: &HardwareGraph,
) -> Result<PlacementSolution, SolutionError> {
    let file: SolutionFile =
        serde_json::from_str(text).map_err(|e| SolutionError::Schema(e.to_string()))?;
    file.resolve(g, hw)
}
