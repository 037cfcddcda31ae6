//! Placement search: minimize per-step makespan over vertex-to-device maps.
//!
//! Three strategies share one result type:
//!
//! * [`brute_force_place`] enumerates every assignment and schedules each
//!   one exactly; it is the reference the others are tested against.
//! * [`bnb_place`] is a branch-and-bound over the same space with lower
//!   bounds and symmetry breaking, returning the same canonical optimum.
//! * [`heuristic_place`] is an earliest-finish-time greedy for graphs too
//!   large for exact search.
//!
//! Exact modes break makespan ties by the lexicographically smallest
//! assignment vector (dense vertex order, dense device order), so every
//! exact search returns the same solution for the same instance.

mod bnb;
mod brute;
mod heuristic;

pub use bnb::bnb_place;
pub use brute::brute_force_place;
pub use heuristic::heuristic_place;

use std::collections::HashMap;
use std::time::Duration;

use thiserror::Error;

use crate::graph::{ComputeGraph, HardwareGraph, Route};
use crate::schedule::{
    exact_schedule_delays, Placement, PlacementSolution, RoutingTable, ScheduleError,
};
use crate::TIME_EPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacerMode {
    Exact,
    BruteForce,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacerConfig {
    pub mode: PlacerMode,
    pub exact_vertex_cap: usize,
    pub exact_device_cap: usize,
    /// Wall-clock cutoff; `None` runs exact search to completion.
    pub time_budget: Option<Duration>,
}

impl Default for PlacerConfig {
    fn default() -> Self {
        PlacerConfig {
            mode: PlacerMode::Exact,
            exact_vertex_cap: 12,
            exact_device_cap: 4,
            time_budget: None,
        }
    }
}

impl PlacerConfig {
    pub fn with_mode(mode: PlacerMode) -> Self {
        PlacerConfig {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacerResult {
    pub solution: PlacementSolution,
    /// True only when an exact search ran to completion.
    pub optimal: bool,
    pub nodes_explored: u64,
    /// Single-device makespan over this solution's makespan.
    pub mp_speedup: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlaceError {
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("no memory-feasible placement: {0}")]
    Infeasible(String),
    #[error("time budget exhausted before any feasible placement was found")]
    OutOfBudget,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// Runs the search selected by `cfg.mode`.
pub fn place(g: &ComputeGraph, hw: &HardwareGraph, cfg: &PlacerConfig) -> Result<PlacerResult, PlaceError> {
    match cfg.mode {
        PlacerMode::Exact => bnb_place(g, hw, cfg),
        PlacerMode::BruteForce => brute_force_place(g, hw, cfg),
        PlacerMode::Heuristic => heuristic_place(g, hw, cfg),
    }
}

/// Per-step speedup of the best placement found over one device.
///
/// With every vertex on one device there is no communication and the
/// device never idles, so the single-device makespan is the total cost.
pub fn mp_speedup(g: &ComputeGraph, hw: &HardwareGraph, cfg: &PlacerConfig) -> Result<f64, PlaceError> {
    Ok(place(g, hw, cfg)?.mp_speedup)
}

pub(crate) fn speedup_over_single(g: &ComputeGraph, makespan: f64) -> f64 {
    let serial = g.total_cost();
    if makespan <= 0.0 {
        1.0
    } else {
        serial / makespan
    }
}

/// Routes for every edge between every device pair, computed once.
pub(crate) struct DelayTable {
    devices: usize,
    // per edge, row-major over (from, to)
    routes: Vec<Vec<Route>>,
}

impl DelayTable {
    pub fn new(g: &ComputeGraph, hw: &HardwareGraph) -> Self {
        let nd = hw.device_count();
        let mut by_payload: HashMap<u64, Vec<Route>> = HashMap::new();
        let routes = g
            .edges()
            .iter()
            .map(|e| {
                by_payload
                    .entry(e.bytes)
                    .or_insert_with(|| {
                        (0..nd * nd)
                            .map(|k| hw.route_between(k / nd, k % nd, e.bytes))
                            .collect()
                    })
                    .clone()
            })
            .collect();
        DelayTable { devices: nd, routes }
    }

    pub fn delay(&self, e: usize, from: usize, to: usize) -> f64 {
        self.routes[e][from * self.devices + to].delay
    }

    pub fn delays_for(&self, g: &ComputeGraph, assign: &[usize]) -> Vec<f64> {
        (0..g.edges().len())
            .map(|e| {
                let (s, d) = g.endpoints(e);
                self.delay(e, assign[s], assign[d])
            })
            .collect()
    }

    pub fn routing_for(&self, g: &ComputeGraph, assign: &[usize]) -> RoutingTable {
        let routes = (0..g.edges().len())
            .map(|e| {
                let (s, d) = g.endpoints(e);
                self.routes[e][assign[s] * self.devices + assign[d]].clone()
            })
            .collect();
        RoutingTable { routes }
    }
}

/// Near-optimal assignments seen so far; resolves to the canonical one.
#[derive(Default)]
pub(crate) struct Incumbent {
    best: Option<f64>,
    pool: Vec<(f64, Vec<usize>)>,
}

impl Incumbent {
    pub fn bound(&self) -> f64 {
        self.best.unwrap_or(f64::INFINITY)
    }

    pub fn offer(&mut self, makespan: f64, assign: &[usize]) {
        let best = self.bound();
        if makespan > best + TIME_EPS {
            return;
        }
        if makespan < best {
            self.best = Some(makespan);
            self.pool.retain(|(m, _)| *m <= makespan + TIME_EPS);
        }
        // one entry per distinct makespan keeps the pool small and the
        // final choice independent of offer order
        match self.pool.iter_mut().find(|(m, _)| *m == makespan) {
            Some((_, kept)) if assign < kept.as_slice() => *kept = assign.to_vec(),
            Some(_) => {}
            None => self.pool.push((makespan, assign.to_vec())),
        }
    }

    /// Lexicographically smallest assignment within tolerance of the best.
    pub fn into_canonical(self) -> Option<Vec<usize>> {
        let best = self.best?;
        self.pool
            .into_iter()
            .filter(|(m, _)| *m <= best + TIME_EPS)
            .map(|(_, a)| a)
            .min()
    }
}

/// Exact-schedules `assign` and packages the full solution.
pub(crate) fn finish_exact(
    g: &ComputeGraph,
    table: &DelayTable,
    assign: Vec<usize>,
    limit: usize,
) -> Result<PlacementSolution, PlaceError> {
    let routing = table.routing_for(g, &assign);
    let schedule = exact_schedule_delays(g, &assign, &routing.delays(), limit)?;
    Ok(PlacementSolution {
        placement: Placement::new(assign),
        routing,
        schedule,
    })
}

pub(crate) fn fits(g: &ComputeGraph, hw: &HardwareGraph, assign: &[usize]) -> bool {
    let mut used = vec![0u64; hw.device_count()];
    for (v, &d) in assign.iter().enumerate() {
        used[d] = used[d].saturating_add(g.vertex(v).mem);
        if used[d] > hw.devices()[d].mem_capacity {
            return false;
        }
    }
    true
}
