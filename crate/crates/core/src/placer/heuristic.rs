use super::{speedup_over_single, DelayTable, PlaceError, PlacerConfig, PlacerResult};
use crate::graph::{ComputeGraph, HardwareGraph};
use crate::schedule::{list_schedule_delays, Placement, PlacementSolution};

/// Earliest-finish-time greedy placement, scheduled with the list scheduler.
pub fn heuristic_place(
    g: &ComputeGraph,
    hw: &HardwareGraph,
    _cfg: &PlacerConfig,
) -> Result<PlacerResult, PlaceError> {
    let table = DelayTable::new(g, hw);
    let assign = greedy_assign(g, hw, &table)?;
    let routing = table.routing_for(g, &assign);
    let schedule = list_schedule_delays(g, &assign, &routing.delays());
    let mp_speedup = speedup_over_single(g, schedule.makespan);
    Ok(PlacerResult {
        solution: PlacementSolution {
            placement: Placement::new(assign),
            routing,
            schedule,
        },
        optimal: false,
        nodes_explored: g.len() as u64,
        mp_speedup,
    })
}

/// Walks the topological order, putting each vertex on the device where it
/// would finish first (ties to the lower device index) among those with
/// memory left.
pub(crate) fn greedy_assign(
    g: &ComputeGraph,
    hw: &HardwareGraph,
    table: &DelayTable,
) -> Result<Vec<usize>, PlaceError> {
    let nd = hw.device_count();
    let mut assign = vec![0usize; g.len()];
    let mut finish = vec![0.0f64; g.len()];
    let mut device_free = vec![0.0f64; nd];
    let mut mem_used = vec![0u64; nd];

    for &v in g.topo_indices() {
        let vertex = g.vertex(v);
        let mut best: Option<(f64, usize)> = None;
        for d in 0..nd {
            if mem_used[d].saturating_add(vertex.mem) > hw.devices()[d].mem_capacity {
                continue;
            }
            let ready = g
                .in_edges(v)
                .iter()
                .map(|&e| {
                    let s = g.endpoints(e).0;
                    finish[s] + table.delay(e, assign[s], d)
                })
                .fold(device_free[d], f64::max);
            let done = ready + vertex.cost;
            if best.is_none_or(|(t, _)| done < t) {
                best = Some((done, d));
            }
        }
        let Some((done, d)) = best else {
            return Err(PlaceError::Infeasible(format!(
                "greedy order leaves no device with {} bytes free for vertex {}",
                vertex.mem, vertex.id
            )));
        };
        assign[v] = d;
        finish[v] = done;
        device_free[d] = done;
        mem_used[d] += vertex.mem;
    }
    Ok(assign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{random_dag, random_hardware, DagSpec, HardwareSpec};
    use crate::placer::fixtures::*;
    use crate::placer::PlacerMode;
    use crate::schedule::validate_solution;
    use std::time::{Duration, Instant};

    fn cfg() -> PlacerConfig {
        PlacerConfig::with_mode(PlacerMode::Heuristic)
    }

    #[test]
    fn single_device_is_exact() {
        let r = heuristic_place(&diamond(), &single(100), &cfg()).unwrap();
        assert_eq!(r.solution.placement.assign, vec![0; 4]);
        assert_eq!(r.solution.schedule.makespan, 20.0);
        assert!(!r.optimal);
    }

    #[test]
    fn diamond_within_serial_and_optimal() {
        let r = heuristic_place(&diamond(), &unit_pair(), &cfg()).unwrap();
        let m = r.solution.schedule.makespan;
        assert!((13.0..=20.0).contains(&m), "{m}");
    }

    #[test]
    fn reports_memory_dead_end() {
        let g = ComputeGraph::new(vec![vertex(0, 1.0, 8), vertex(1, 1.0, 8)], vec![]).unwrap();
        assert!(matches!(
            heuristic_place(&g, &single(10), &cfg()),
            Err(PlaceError::Infeasible(_))
        ));
    }

    #[test]
    fn large_random_dag() {
        let spec = DagSpec {
            vertices: 200,
            edge_probability: 0.05,
            ..DagSpec::default()
        };
        let g = random_dag(&spec, 7);
        let hw = random_hardware(&HardwareSpec { devices: 4, ..HardwareSpec::default() }, 7);
        let t = Instant::now();
        let r = heuristic_place(&g, &hw, &cfg()).unwrap();
        assert!(t.elapsed() < Duration::from_secs(5));
        assert!(validate_solution(&g, &hw, &r.solution).is_empty());
        assert!(r.mp_speedup > 0.0);
    }
}
