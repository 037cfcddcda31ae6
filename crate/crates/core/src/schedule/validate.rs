use std::fmt;

use super::PlacementSolution;
use crate::graph::{ComputeGraph, HardwareGraph};
use crate::TIME_EPS;

/// One broken constraint. Ids in messages are the original vertex, device
/// and node ids; links are named by their index in the hardware file.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Placement(String),
    Routing(String),
    Contiguity(String),
    Dependency(String),
    NonOverlap(String),
    Memory(String),
}

impl Violation {
    pub fn family(&self) -> &'static str {
        match self {
            Violation::Placement(_) => "placement",
            Violation::Routing(_) => "routing",
            Violation::Contiguity(_) => "contiguity",
            Violation::Dependency(_) => "dependency",
            Violation::NonOverlap(_) => "non-overlap",
            Violation::Memory(_) => "memory",
        }
    }

    fn detail(&self) -> &str {
        match self {
            Violation::Placement(s)
            | Violation::Routing(s)
            | Violation::Contiguity(s)
            | Violation::Dependency(s)
            | Violation::NonOverlap(s)
            | Violation::Memory(s) => s,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // the family name already leads the message
            Violation::NonOverlap(s) => f.write_str(s),
            other => write!(f, "{}: {}", other.family(), other.detail()),
        }
    }
}

/// Checks a candidate solution against every placement, routing,
/// contiguity, dependency, non-overlap and memory constraint.
pub fn validate_solution(
    g: &ComputeGraph,
    hw: &HardwareGraph,
    sol: &PlacementSolution,
) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = g.len();
    let assign = &sol.placement.assign;
    let start = &sol.schedule.start;

    if assign.len() != n {
        out.push(Violation::Placement(format!(
            "{} vertices but {} assignments",
            n,
            assign.len()
        )));
        return out;
    }
    let mut placed_ok = true;
    for (v, &d) in assign.iter().enumerate() {
        if d >= hw.device_count() {
            out.push(Violation::Placement(format!(
                "vertex {} mapped to a non-device node",
                g.vertex(v).id
            )));
            placed_ok = false;
        }
    }
    if !placed_ok {
        return out;
    }
    if start.len() != n {
        out.push(Violation::Dependency(format!(
            "{} vertices but {} start times",
            n,
            start.len()
        )));
        return out;
    }
    for (v, &s) in start.iter().enumerate() {
        if !(s.is_finite() && s >= -TIME_EPS) {
            out.push(Violation::Dependency(format!(
                "vertex {} has invalid start time {}",
                g.vertex(v).id,
                s
            )));
        }
    }

    let routes = &sol.routing.routes;
    if routes.len() != g.edges().len() {
        out.push(Violation::Routing(format!(
            "{} edges but {} routes",
            g.edges().len(),
            routes.len()
        )));
        return out;
    }

    for (e, edge) in g.edges().iter().enumerate() {
        let (s, t) = g.endpoints(e);
        let route = &routes[e];
        let name = format!("({},{})", edge.src, edge.dst);
        let (from, to) = (assign[s], assign[t]);

        // delay the dependency check charges for this edge
        let mut charged = route.delay;
        if from == to {
            if !route.links.is_empty() || route.delay.abs() > TIME_EPS {
                out.push(Violation::Routing(format!(
                    "edge {} is co-located but routed over links {:?} with delay {}",
                    name, route.links, route.delay
                )));
            }
        } else if route.links.is_empty() {
            out.push(Violation::Routing(format!(
                "edge {} crosses devices {} -> {} without a route",
                name,
                hw.devices()[from].id,
                hw.devices()[to].id
            )));
        } else if let Some(bad) = route.links.iter().find(|&&l| l >= hw.links().len()) {
            out.push(Violation::Routing(format!("edge {} uses unknown link {}", name, bad)));
        } else {
            let first = hw.link_ends(route.links[0]);
            let last = hw.link_ends(*route.links.last().unwrap());
            if first.0 != from && first.1 != from {
                out.push(Violation::Routing(format!(
                    "edge {} route does not start at device {}",
                    name,
                    hw.devices()[from].id
                )));
            } else if last.0 != to && last.1 != to {
                out.push(Violation::Routing(format!(
                    "edge {} route does not end at device {}",
                    name,
                    hw.devices()[to].id
                )));
            } else if let Err(msg) = walk(hw, from, to, &route.links) {
                out.push(Violation::Contiguity(format!("edge {} {}", name, msg)));
            } else {
                let expected: f64 = route
                    .links
                    .iter()
                    .map(|&l| hw.links()[l].delay(edge.bytes))
                    .sum();
                if (route.delay - expected).abs() > 1e-9 * expected.abs().max(1.0) {
                    out.push(Violation::Routing(format!(
                        "edge {} delay {} differs from path delay {}",
                        name, route.delay, expected
                    )));
                }
                charged = expected;
            }
        }

        let arrival = start[s] + g.cost(s) + charged;
        if start[t] < arrival - TIME_EPS {
            out.push(Violation::Dependency(format!(
                "vertex {} before arrival of edge {} at {}",
                edge.dst, name, arrival
            )));
        }
    }

    for a in 0..n {
        for b in (a + 1)..n {
            if assign[a] != assign[b] || g.adjacent(a, b) {
                continue;
            }
            let (sa, sb) = (start[a], start[b]);
            if sa < sb + g.cost(b) - TIME_EPS && sb < sa + g.cost(a) - TIME_EPS {
                out.push(Violation::NonOverlap(format!(
                    "non-overlap on device {}: vertices {} and {}",
                    hw.devices()[assign[a]].id,
                    g.vertex(a).id,
                    g.vertex(b).id
                )));
            }
        }
    }

    let used = sol.placement.memory_per_device(g, hw.device_count());
    for (d, dev) in hw.devices().iter().enumerate() {
        if used[d] > dev.mem_capacity {
            out.push(Violation::Memory(format!(
                "device {} holds {} bytes, capacity {}",
                dev.id, used[d], dev.mem_capacity
            )));
        }
    }
    out
}

/// Follows `links` from `from`; every hop must leave the current node and
/// no node may repeat.
fn walk(hw: &HardwareGraph, from: usize, to: usize, links: &[usize]) -> Result<(), String> {
    let mut at = from;
    let mut visited = vec![from];
    for &l in links {
        let (a, b) = hw.link_ends(l);
        at = if a == at {
            b
        } else if b == at {
            a
        } else {
            return Err(format!("breaks at link {} (not incident to node {})", l, hw.node_id(at)));
        };
        if visited.contains(&at) {
            return Err(format!("revisits node {}", hw.node_id(at)));
        }
        visited.push(at);
    }
    if at != to {
        return Err(format!("ends at node {} instead of {}", hw.node_id(at), hw.node_id(to)));
    }
    Ok(())
}
