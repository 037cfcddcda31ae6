use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::GraphError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceNode {
    pub id: u32,
    pub mem_capacity: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouterNode {
    pub id: u32,
}

/// Bidirectional physical link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub a: u32,
    pub b: u32,
    /// Bytes per µs.
    pub bandwidth: f64,
    /// Per-traversal latency in µs.
    pub latency: f64,
}

impl LinkSpec {
    /// Time to push `payload` bytes across this link.
    pub fn delay(&self, payload: u64) -> f64 {
        payload as f64 / self.bandwidth + self.latency
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HardwareGraphFile {
    devices: Vec<DeviceNode>,
    #[serde(default)]
    routers: Vec<RouterNode>,
    links: Vec<LinkSpec>,
}

/// A path through the hardware graph, as link indices, and its delay.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Route {
    pub links: Vec<usize>,
    pub delay: f64,
}

/// Validated, immutable hardware graph.
///
/// Nodes are densely indexed: devices first (sorted by id), then routers
/// (sorted by id). Links are indexed by their input position.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareGraph {
    devices: Vec<DeviceNode>,
    routers: Vec<RouterNode>,
    links: Vec<LinkSpec>,
    node_index: HashMap<u32, usize>,
    link_ends: Vec<(usize, usize)>,
    // (link, neighbour) per node
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl HardwareGraph {
    pub fn new(
        mut devices: Vec<DeviceNode>,
        mut routers: Vec<RouterNode>,
        links: Vec<LinkSpec>,
    ) -> Result<Self, GraphError> {
        if devices.is_empty() {
            return Err(GraphError::NoDevices);
        }
        devices.sort_by_key(|d| d.id);
        routers.sort_by_key(|r| r.id);

        let mut node_index = HashMap::new();
        let ids = devices.iter().map(|d| d.id).chain(routers.iter().map(|r| r.id));
        for (i, id) in ids.enumerate() {
            if node_index.insert(id, i).is_some() {
                return Err(GraphError::DuplicateId(id));
            }
        }
        if let Some(d) = devices.iter().find(|d| d.mem_capacity == 0) {
            return Err(GraphError::InvalidValue(format!(
                "device {} mem_capacity must be > 0",
                d.id
            )));
        }

        let mut adjacency = vec![Vec::new(); node_index.len()];
        let mut link_ends = Vec::with_capacity(links.len());
        for (li, l) in links.iter().enumerate() {
            // NaN fails this test too
            if l.bandwidth <= 0.0 || !l.bandwidth.is_finite() {
                return Err(GraphError::NonPositiveBandwidth {
                    a: l.a,
                    b: l.b,
                    bandwidth: l.bandwidth,
                });
            }
            if !(l.latency.is_finite() && l.latency >= 0.0) {
                return Err(GraphError::InvalidValue(format!(
                    "link {}-{} latency {} must be finite and >= 0",
                    l.a, l.b, l.latency
                )));
            }
            let lookup = |id: u32| {
                node_index.get(&id).copied().ok_or(GraphError::UnknownNode {
                    a: l.a,
                    b: l.b,
                    missing: id,
                })
            };
            let (a, b) = (lookup(l.a)?, lookup(l.b)?);
            if a == b {
                return Err(GraphError::InvalidValue(format!("link {}-{} is a self loop", l.a, l.b)));
            }
            link_ends.push((a, b));
            adjacency[a].push((li, b));
            adjacency[b].push((li, a));
        }

        let hw = HardwareGraph {
            devices,
            routers,
            links,
            node_index,
            link_ends,
            adjacency,
        };
        hw.check_connected()?;
        Ok(hw)
    }

    fn check_connected(&self) -> Result<(), GraphError> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &(_, w) in &self.adjacency[u] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        match (0..self.devices.len()).find(|&d| !seen[d]) {
            Some(d) => Err(GraphError::Disconnected(self.devices[d].id, self.devices[0].id)),
            None => Ok(()),
        }
    }

    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let file: HardwareGraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Schema(e.to_string()))?;
        Self::new(file.devices, file.routers, file.links)
    }

    pub fn to_json(&self) -> String {
        let file = HardwareGraphFile {
            devices: self.devices.clone(),
            routers: self.routers.clone(),
            links: self.links.clone(),
        };
        serde_json::to_string_pretty(&file).expect("hardware serializes")
    }

    pub fn devices(&self) -> &[DeviceNode] {
        &self.devices
    }

    pub fn routers(&self) -> &[RouterNode] {
        &self.routers
    }

    pub fn links(&self) -> &[LinkSpec] {
        &self.links
    }

    pub fn device_count(&self) -> usize {
        self.devices.len()
    }

    pub fn node_count(&self) -> usize {
        self.devices.len() + self.routers.len()
    }

    /// Dense node index of a device or router id.
    pub fn node_index(&self, id: u32) -> Option<usize> {
        self.node_index.get(&id).copied()
    }

    /// Dense device index of a device id (routers yield `None`).
    pub fn device_index(&self, id: u32) -> Option<usize> {
        self.node_index(id).filter(|&i| i < self.devices.len())
    }

    pub fn node_id(&self, idx: usize) -> u32 {
        match idx.checked_sub(self.devices.len()) {
            None => self.devices[idx].id,
            Some(r) => self.routers[r].id,
        }
    }

    /// Dense node indices of link `l`'s endpoints.
    pub fn link_ends(&self, l: usize) -> (usize, usize) {
        self.link_ends[l]
    }

    /// Delay-shortest route between two device ids for a payload.
    pub fn shortest_route(
        &self,
        from_device: u32,
        to_device: u32,
        payload_bytes: u64,
    ) -> Result<Route, GraphError> {
        let from = self
            .device_index(from_device)
            .ok_or(GraphError::UnknownDevice(from_device))?;
        let to = self
            .device_index(to_device)
            .ok_or(GraphError::UnknownDevice(to_device))?;
        Ok(self.route_between(from, to, payload_bytes))
    }

    /// Delay-shortest route between dense node indices.
    ///
    /// Among minimum-delay paths the one with fewest hops wins, then the
    /// lexicographically smallest sequence of node ids; parallel links
    /// between the same pair resolve to the faster one, then the lower index.
    pub fn route_between(&self, from: usize, to: usize, payload: u64) -> Route {
        if from == to {
            return Route::default();
        }
        let n = self.node_count();
        let dist = self.dijkstra_to(to, payload);

        let tight = |u: usize, l: usize, w: usize| {
            let d = self.links[l].delay(payload) + dist[w];
            d <= dist[u] + 1e-9 * dist[u].abs().max(1.0)
        };

        // hop counts to `to` over tight links only
        let mut hops = vec![usize::MAX; n];
        hops[to] = 0;
        let mut queue = VecDeque::from([to]);
        while let Some(w) = queue.pop_front() {
            for &(l, u) in &self.adjacency[w] {
                if hops[u] == usize::MAX && tight(u, l, w) {
                    hops[u] = hops[w] + 1;
                    queue.push_back(u);
                }
            }
        }

        let mut route = Route::default();
        let mut u = from;
        while u != to {
            let (l, w) = self.adjacency[u]
                .iter()
                .copied()
                .filter(|&(l, w)| hops[w] != usize::MAX && hops[w] + 1 == hops[u] && tight(u, l, w))
                .min_by(|&(l1, w1), &(l2, w2)| {
                    self.node_id(w1)
                        .cmp(&self.node_id(w2))
                        .then(self.links[l1].delay(payload).total_cmp(&self.links[l2].delay(payload)))
                        .then(l1.cmp(&l2))
                })
                .expect("connected hardware graph");
            route.links.push(l);
            route.delay += self.links[l].delay(payload);
            u = w;
        }
        route
    }

    fn dijkstra_to(&self, target: usize, payload: u64) -> Vec<f64> {
        let n = self.node_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut done = vec![false; n];
        dist[target] = 0.0;
        // node counts are small; a linear scan beats heap bookkeeping here
        for _ in 0..n {
            let Some(u) = (0..n)
                .filter(|&u| !done[u] && dist[u].is_finite())
                .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            else {
                break;
            };
            done[u] = true;
            for &(l, w) in &self.adjacency[u] {
                let d = dist[u] + self.links[l].delay(payload);
                if d < dist[w] {
                    dist[w] = d;
                }
            }
        }
        dist
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dev(id: u32) -> DeviceNode {
        DeviceNode { id, mem_capacity: 1 << 30 }
    }

    fn link(a: u32, b: u32, bandwidth: f64, latency: f64) -> LinkSpec {
        LinkSpec { a, b, bandwidth, latency }
    }

    #[test]
    fn two_devices_one_link() {
        let hw = HardwareGraph::parse(
            r#"{"devices":[{"id":0,"mem_capacity":8},{"id":1,"mem_capacity":8}],
                "routers":[],
                "links":[{"a":0,"b":1,"bandwidth":1,"latency":0}]}"#,
        )
        .unwrap();
        assert_eq!(hw.device_count(), 2);
        assert_eq!(hw.links().len(), 1);
    }

    #[test]
    fn no_links_is_disconnected() {
        let err = HardwareGraph::new(vec![dev(0), dev(1)], vec![], vec![]).unwrap_err();
        assert!(matches!(err, GraphError::Disconnected(1, 0)));
        assert!(err.to_string().starts_with("disconnected"));
    }

    #[test]
    fn router_path_has_two_links() {
        let hw = HardwareGraph::new(
            vec![dev(0), dev(1)],
            vec![RouterNode { id: 9 }],
            vec![link(0, 9, 2.0, 0.5), link(9, 1, 2.0, 0.5)],
        )
        .unwrap();
        let r = hw.shortest_route(0, 1, 8).unwrap();
        assert_eq!(r.links, vec![0, 1]);
        assert_eq!(r.delay, 9.0);
    }

    #[test]
    fn direct_link_delay() {
        let hw = HardwareGraph::new(vec![dev(0), dev(1)], vec![], vec![link(0, 1, 1.0, 1.0)]).unwrap();
        let r = hw.shortest_route(0, 1, 8).unwrap();
        assert_eq!(r.links, vec![0]);
        assert_eq!(r.delay, 9.0);
        assert_eq!(hw.shortest_route(0, 0, 1234).unwrap(), Route::default());
    }

    #[test]
    fn payload_changes_best_path() {
        // direct link: high latency, fat pipe; via router: low latency, thin pipes
        let hw = HardwareGraph::new(
            vec![dev(0), dev(1)],
            vec![RouterNode { id: 5 }],
            vec![link(0, 1, 100.0, 10.0), link(0, 5, 1.0, 0.0), link(5, 1, 1.0, 0.0)],
        )
        .unwrap();
        let small = hw.shortest_route(0, 1, 2).unwrap();
        assert_eq!(small.links, vec![1, 2]);
        assert_eq!(small.delay, 4.0);
        let big = hw.shortest_route(0, 1, 1000).unwrap();
        assert_eq!(big.links, vec![0]);
        assert_eq!(big.delay, 20.0);
    }

    #[test]
    fn equal_delay_prefers_smaller_node_ids() {
        // 0 -> {7, 3} -> 1, both two-hop routes cost the same
        let hw = HardwareGraph::new(
            vec![dev(0), dev(1)],
            vec![RouterNode { id: 7 }, RouterNode { id: 3 }],
            vec![
                link(0, 7, 1.0, 0.0),
                link(7, 1, 1.0, 0.0),
                link(0, 3, 1.0, 0.0),
                link(3, 1, 1.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(hw.shortest_route(0, 1, 4).unwrap().links, vec![2, 3]);
    }

    #[test]
    fn zero_weight_links_terminate() {
        let hw = HardwareGraph::new(
            vec![dev(0), dev(1), dev(2)],
            vec![],
            vec![link(0, 1, 1.0, 0.0), link(1, 2, 1.0, 0.0), link(0, 2, 1.0, 0.0)],
        )
        .unwrap();
        let r = hw.shortest_route(0, 2, 0).unwrap();
        assert_eq!(r.links, vec![2]);
        assert_eq!(r.delay, 0.0);
    }

    #[test]
    fn rejects_bad_hardware() {
        assert!(matches!(
            HardwareGraph::new(vec![dev(0), dev(1)], vec![], vec![link(0, 1, 0.0, 0.0)]).unwrap_err(),
            GraphError::NonPositiveBandwidth { .. }
        ));
        assert_eq!(
            HardwareGraph::new(vec![dev(0)], vec![RouterNode { id: 0 }], vec![]).unwrap_err(),
            GraphError::DuplicateId(0)
        );
        assert!(matches!(
            HardwareGraph::new(vec![dev(0)], vec![], vec![link(0, 3, 1.0, 0.0)]).unwrap_err(),
            GraphError::UnknownNode { missing: 3, .. }
        ));
        assert_eq!(HardwareGraph::new(vec![], vec![], vec![]).unwrap_err(), GraphError::NoDevices);
        assert!(HardwareGraph::parse(r#"{"devices":[{"id":0,"mem_capacity":1,"speed":2}],"links":[]}"#)
            .is_err());
    }
}
