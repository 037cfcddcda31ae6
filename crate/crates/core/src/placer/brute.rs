use super::{
    finish_exact, fits, speedup_over_single, DelayTable, Incumbent, PlaceError, PlacerConfig,
    PlacerResult,
};
use crate::graph::{ComputeGraph, HardwareGraph};
use crate::schedule::exact_schedule_delays;

const MAX_PLACEMENTS: f64 = 1e6;

/// Exhaustive reference search: every memory-feasible assignment, each
/// scheduled exactly.
pub fn brute_force_place(
    g: &ComputeGraph,
    hw: &HardwareGraph,
    cfg: &PlacerConfig,
) -> Result<PlacerResult, PlaceError> {
    let n = g.len();
    let nd = hw.device_count();
    let space = (nd as f64).powi(n as i32);
    if n > cfg.exact_vertex_cap || space > MAX_PLACEMENTS {
        return Err(PlaceError::TooLarge(format!(
            "{} vertices on {} devices ({} placements; caps: {} vertices, {} placements)",
            n, nd, space, cfg.exact_vertex_cap, MAX_PLACEMENTS
        )));
    }

    let table = DelayTable::new(g, hw);
    let mut incumbent = Incumbent::default();
    let mut assign = vec![0usize; n];
    let mut evaluated = 0u64;
    loop {
        if fits(g, hw, &assign) {
            let delays = table.delays_for(g, &assign);
            let schedule = exact_schedule_delays(g, &assign, &delays, cfg.exact_vertex_cap)?;
            incumbent.offer(schedule.makespan, &assign);
            evaluated += 1;
        }
        // odometer, last vertex fastest: lexicographic order
        let Some(pos) = (0..n).rev().find(|&i| assign[i] + 1 < nd) else {
            break;
        };
        assign[pos] += 1;
        assign[pos + 1..].fill(0);
    }

    let best = incumbent
        .into_canonical()
        .ok_or_else(|| PlaceError::Infeasible("every assignment exceeds some device's memory".into()))?;
    let solution = finish_exact(g, &table, best, cfg.exact_vertex_cap)?;
    let mp_speedup = speedup_over_single(g, solution.schedule.makespan);
    Ok(PlacerResult {
        solution,
        optimal: true,
        nodes_explored: evaluated,
        mp_speedup,
    })
}
