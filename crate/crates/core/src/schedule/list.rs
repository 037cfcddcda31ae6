use super::{Placement, RoutingTable, Schedule};
use crate::graph::ComputeGraph;

/// Deterministic earliest-ready list scheduling.
///
/// Repeatedly starts the ready vertex with the smallest feasible start time
/// on its device (ties to the smaller id). Devices run their vertices
/// back-to-back in the order they are picked; transfers overlap compute and
/// links carry any number of transfers at once.
pub fn list_schedule(g: &ComputeGraph, p: &Placement, routing: &RoutingTable) -> Schedule {
    list_schedule_delays(g, &p.assign, &routing.delays())
}

pub(crate) fn list_schedule_delays(g: &ComputeGraph, assign: &[usize], delays: &[f64]) -> Schedule {
    let n = g.len();
    let devices = assign.iter().map(|&d| d + 1).max().unwrap_or(0);
    let mut device_free = vec![0.0f64; devices];
    let mut preds_left: Vec<usize> = (0..n).map(|v| g.in_edges(v).len()).collect();
    // latest data arrival from already-finished predecessors
    let mut arrival = vec![0.0f64; n];
    let mut ready: Vec<usize> = (0..n).filter(|&v| preds_left[v] == 0).collect();
    let mut start = vec![0.0f64; n];

    while !ready.is_empty() {
        let (slot, v, at) = ready
            .iter()
            .enumerate()
            .map(|(slot, &v)| (slot, v, arrival[v].max(device_free[assign[v]])))
            .min_by(|a, b| a.2.total_cmp(&b.2).then(a.1.cmp(&b.1)))
            .expect("non-empty ready set");
        ready.swap_remove(slot);
        start[v] = at;
        let finish = at + g.cost(v);
        device_free[assign[v]] = finish;
        for &e in g.out_edges(v) {
            let (_, d) = g.endpoints(e);
            arrival[d] = arrival[d].max(finish + delays[e]);
            preds_left[d] -= 1;
            if preds_left[d] == 0 {
                ready.push(d);
            }
        }
    }
    Schedule::from_starts(g, start)
}
