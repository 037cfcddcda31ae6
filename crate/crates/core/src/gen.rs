//! Seeded random instance generation.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, so a
//! seed yields the same instance on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{ComputeGraph, DepEdge, DeviceNode, HardwareGraph, LinkSpec, OpVertex, RouterNode};

/// Shape of a random compute DAG. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct DagSpec {
    pub vertices: usize,
    pub edge_probability: f64,
    /// Whole microseconds.
    pub cost: (u64, u64),
    pub bytes: (u64, u64),
    pub mem: (u64, u64),
}

impl Default for DagSpec {
    fn default() -> Self {
        DagSpec {
            vertices: 7,
            edge_probability: 0.3,
            cost: (1, 20),
            bytes: (0, 64),
            mem: (1, 100),
        }
    }
}

impl DagSpec {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.edge_probability) {
            return Err(format!("edge probability {} outside [0,1]", self.edge_probability));
        }
        for (name, (lo, hi)) in [("cost", self.cost), ("bytes", self.bytes), ("mem", self.mem)] {
            if lo > hi {
                return Err(format!("empty {} range {}..={}", name, lo, hi));
            }
        }
        Ok(())
    }
}

/// Shape of a random hardware graph. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareSpec {
    pub devices: usize,
    pub routers: usize,
    /// Chance of each extra link on top of a random spanning tree.
    pub extra_link_probability: f64,
    /// Whole bytes per µs.
    pub bandwidth: (u64, u64),
    /// Whole microseconds.
    pub latency: (u64, u64),
    pub mem: (u64, u64),
}

impl Default for HardwareSpec {
    fn default() -> Self {
        HardwareSpec {
            devices: 2,
            routers: 0,
            extra_link_probability: 0.3,
            bandwidth: (1, 16),
            latency: (0, 4),
            mem: (1 << 20, 1 << 20),
        }
    }
}

impl HardwareSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.devices == 0 {
            return Err("at least one device required".into());
        }
        if !(0.0..=1.0).contains(&self.extra_link_probability) {
            return Err(format!(
                "link probability {} outside [0,1]",
                self.extra_link_probability
            ));
        }
        if self.bandwidth.0 == 0 {
            return Err("bandwidth must be positive".into());
        }
        if self.mem.0 == 0 {
            return Err("device memory must be positive".into());
        }
        for (name, (lo, hi)) in [
            ("bandwidth", self.bandwidth),
            ("latency", self.latency),
            ("mem", self.mem),
        ] {
            if lo > hi {
                return Err(format!("empty {} range {}..={}", name, lo, hi));
            }
        }
        Ok(())
    }
}

/// Random DAG whose edges all point forward in a shuffled vertex order, so
/// ids and topological positions are unrelated.
///
/// Panics if `spec` fails [`DagSpec::validate`].
pub fn random_dag(spec: &DagSpec, seed: u64) -> ComputeGraph {
    spec.validate().expect("valid DAG spec");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices: Vec<OpVertex> = (0..spec.vertices as u32)
        .map(|id| OpVertex {
            id,
            label: None,
            cost: rng.gen_range(spec.cost.0..=spec.cost.1) as f64,
            mem: rng.gen_range(spec.mem.0..=spec.mem.1),
        })
        .collect();
    let mut order: Vec<u32> = (0..spec.vertices as u32).collect();
    order.shuffle(&mut rng);

    let mut edges = Vec::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            if rng.gen_bool(spec.edge_probability) {
                edges.push(DepEdge {
                    src: order[i],
                    dst: order[j],
                    bytes: rng.gen_range(spec.bytes.0..=spec.bytes.1),
                });
            }
        }
    }
    ComputeGraph::new(vertices, edges).expect("forward edges form a DAG")
}

/// Random connected hardware graph: devices take ids `0..devices`, routers
/// the ids after them.
///
/// Panics if `spec` fails [`HardwareSpec::validate`].
pub fn random_hardware(spec: &HardwareSpec, seed: u64) -> HardwareGraph {
    spec.validate().expect("valid hardware spec");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = (spec.devices + spec.routers) as u32;
    let devices = (0..spec.devices as u32)
        .map(|id| DeviceNode {
            id,
            mem_capacity: rng.gen_range(spec.mem.0..=spec.mem.1),
        })
        .collect();
    let routers = (spec.devices as u32..total).map(|id| RouterNode { id }).collect();

    let link = |rng: &mut ChaCha8Rng, a: u32, b: u32| LinkSpec {
        a,
        b,
        bandwidth: rng.gen_range(spec.bandwidth.0..=spec.bandwidth.1) as f64,
        latency: rng.gen_range(spec.latency.0..=spec.latency.1) as f64,
    };
    let mut nodes: Vec<u32> = (0..total).collect();
    nodes.shuffle(&mut rng);
    let mut links = Vec::new();
    for i in 1..nodes.len() {
        let parent = nodes[rng.gen_range(0..i)];
        links.push(link(&mut rng, parent, nodes[i]));
    }
    for a in 0..total {
        for b in (a + 1)..total {
            if rng.gen_bool(spec.extra_link_probability) {
                links.push(link(&mut rng, a, b));
            }
        }
    }
    HardwareGraph::new(devices, routers, links).expect("spanning tree keeps devices connected")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_files() {
        let spec = DagSpec::default();
        assert_eq!(random_dag(&spec, 42).to_json(), random_dag(&spec, 42).to_json());
        let hw = HardwareSpec { devices: 3, routers: 2, ..HardwareSpec::default() };
        assert_eq!(random_hardware(&hw, 42).to_json(), random_hardware(&hw, 42).to_json());
        assert_ne!(random_dag(&spec, 42).to_json(), random_dag(&spec, 43).to_json());
    }

    #[test]
    fn zero_probability_has_no_edges() {
        let g = random_dag(&DagSpec { edge_probability: 0.0, ..DagSpec::default() }, 1);
        assert!(g.edges().is_empty());
        assert_eq!(g.len(), 7);
    }

    #[test]
    fn ranges_are_respected() {
        let spec = DagSpec {
            vertices: 30,
            edge_probability: 0.5,
            cost: (3, 5),
            bytes: (10, 10),
            mem: (0, 2),
        };
        let g = random_dag(&spec, 9);
        assert!(g.vertices().iter().all(|v| (3.0..=5.0).contains(&v.cost) && v.mem <= 2));
        assert!(g.edges().iter().all(|e| e.bytes == 10));
    }

    #[test]
    fn bad_specs() {
        assert!(DagSpec { edge_probability: 1.5, ..DagSpec::default() }.validate().is_err());
        assert!(DagSpec { cost: (5, 1), ..DagSpec::default() }.validate().is_err());
        assert!(HardwareSpec { devices: 0, ..HardwareSpec::default() }.validate().is_err());
        assert!(HardwareSpec { bandwidth: (0, 3), ..HardwareSpec::default() }.validate().is_err());
    }
}
