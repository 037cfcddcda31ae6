use super::{list_schedule_delays, Placement, RoutingTable, Schedule, ScheduleError};
use crate::graph::ComputeGraph;
use crate::TIME_EPS;

pub const DEFAULT_EXACT_LIMIT: usize = 12;

/// Minimum-makespan schedule over every per-device execution order.
///
/// Among optimal schedules the lexicographically smallest start vector is
/// returned, so the result never depends on search order. The list
/// schedule seeds the incumbent, hence the result is never worse than it.
pub fn exact_schedule(
    g: &ComputeGraph,
    p: &Placement,
    routing: &RoutingTable,
    limit: usize,
) -> Result<Schedule, ScheduleError> {
    exact_schedule_delays(g, &p.assign, &routing.delays(), limit)
}

pub(crate) fn exact_schedule_delays(
    g: &ComputeGraph,
    assign: &[usize],
    delays: &[f64],
    limit: usize,
) -> Result<Schedule, ScheduleError> {
    if g.len() > limit {
        return Err(ScheduleError::TooLarge {
            vertices: g.len(),
            limit,
        });
    }
    let seed = list_schedule_delays(g, assign, delays);
    let mut search = Search::new(g, assign, delays, seed);
    search.dfs();
    Ok(Schedule::from_starts(g, search.best_start))
}

/// Depth-first enumeration of semi-active schedules.
///
/// Vertices are appended in non-decreasing start order: every semi-active
/// schedule is reachable this way, and restricting to it removes most
/// interleavings that would otherwise yield identical schedules.
struct Search<'a> {
    g: &'a ComputeGraph,
    assign: &'a [usize],
    delays: &'a [f64],
    tail: Vec<f64>,

    done: Vec<bool>,
    placed: usize,
    start: Vec<f64>,
    preds_left: Vec<usize>,
    arrival: Vec<f64>,
    device_free: Vec<f64>,
    work_left: Vec<f64>,
    last_start: f64,
    span: f64,

    best: f64,
    best_start: Vec<f64>,
}

impl<'a> Search<'a> {
    fn new(g: &'a ComputeGraph, assign: &'a [usize], delays: &'a [f64], seed: Schedule) -> Self {
        let n = g.len();
        let devices = assign.iter().map(|&d| d + 1).max().unwrap_or(0);

        // longest remaining path from each vertex, including its own cost
        let mut tail = vec![0.0f64; n];
        for &v in g.topo_indices().iter().rev() {
            let after = g
                .out_edges(v)
                .iter()
                .map(|&e| delays[e] + tail[g.endpoints(e).1])
                .fold(0.0, f64::max);
            tail[v] = g.cost(v) + after;
        }

        let mut work_left = vec![0.0f64; devices];
        for v in 0..n {
            work_left[assign[v]] += g.cost(v);
        }

        Search {
            g,
            assign,
            delays,
            tail,
            done: vec![false; n],
            placed: 0,
            start: vec![0.0; n],
            preds_left: (0..n).map(|v| g.in_edges(v).len()).collect(),
            arrival: vec![0.0; n],
            device_free: vec![0.0; devices],
            work_left,
            last_start: 0.0,
            span: 0.0,
            best: seed.makespan,
            best_start: seed.start,
        }
    }

    fn lower_bound(&self) -> f64 {
        let mut lb = self.span;
        for (free, work) in self.device_free.iter().zip(&self.work_left) {
            lb = lb.max(free + work);
        }
        for v in (0..self.g.len()).filter(|&v| !self.done[v]) {
            let head = self
                .last_start
                .max(self.arrival[v])
                .max(self.device_free[self.assign[v]]);
            lb = lb.max(head + self.tail[v]);
        }
        lb
    }

    fn dfs(&mut self) {
        let n = self.g.len();
        if self.placed == n {
            self.offer();
            return;
        }
        if self.lower_bound() > self.best + TIME_EPS {
            return;
        }

        let mut candidates: Vec<(f64, usize)> = (0..n)
            .filter(|&v| !self.done[v] && self.preds_left[v] == 0)
            .map(|v| (self.arrival[v].max(self.device_free[self.assign[v]]), v))
            .filter(|&(at, _)| at >= self.last_start - TIME_EPS)
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (at, v) in candidates {
            let d = self.assign[v];
            let finish = at + self.g.cost(v);
            let saved = (self.device_free[d], self.last_start, self.span);
            let mut touched = Vec::with_capacity(self.g.out_edges(v).len());

            self.done[v] = true;
            self.placed += 1;
            self.start[v] = at;
            self.device_free[d] = finish;
            self.work_left[d] -= self.g.cost(v);
            self.last_start = self.last_start.max(at);
            self.span = self.span.max(finish);
            for &e in self.g.out_edges(v) {
                let s = self.g.endpoints(e).1;
                touched.push((s, self.arrival[s]));
                self.arrival[s] = self.arrival[s].max(finish + self.delays[e]);
                self.preds_left[s] -= 1;
            }

            self.dfs();

            for (s, old) in touched.into_iter().rev() {
                self.arrival[s] = old;
                self.preds_left[s] += 1;
            }
            (self.device_free[d], self.last_start, self.span) = saved;
            self.work_left[d] += self.g.cost(v);
            self.placed -= 1;
            self.done[v] = false;
        }
    }

    fn offer(&mut self) {
        let span = self.span;
        if span < self.best - TIME_EPS
            || (span <= self.best + TIME_EPS && lex_less(&self.start, &self.best_start))
        {
            self.best = self.best.min(span);
            self.best_start.clone_from(&self.start);
        }
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if *x < y - TIME_EPS {
            return true;
        }
        if *x > y + TIME_EPS {
            return false;
        }
    }
    false
}
