use hybridplan::gen::{random_dag, random_hardware, DagSpec, HardwareSpec};
use hybridplan::graph::{ComputeGraph, DeviceNode, HardwareGraph, LinkSpec};
use hybridplan::placer::{place, PlacerConfig, PlacerMode};
use hybridplan::schedule::validate_solution;
use proptest::prelude::*;

fn instance(vertices: usize, p: f64, devices: usize, routers: usize, seed: u64) -> (ComputeGraph, HardwareGraph) {
    let g = random_dag(
        &DagSpec {
            vertices,
            edge_probability: p,
            ..DagSpec::default()
        },
        seed,
    );
    let hw = random_hardware(
        &HardwareSpec {
            devices,
            routers,
            ..HardwareSpec::default()
        },
        seed,
    );
    (g, hw)
}

fn mode() -> impl Strategy<Value = PlacerMode> {
    prop_oneof![
        Just(PlacerMode::Exact),
        Just(PlacerMode::BruteForce),
        Just(PlacerMode::Heuristic)
    ]
}

/// `hw` plus one more device hanging off node `attach`.
fn with_extra_device(hw: &HardwareGraph, attach: usize, bandwidth: f64, latency: f64) -> HardwareGraph {
    let mut devices = hw.devices().to_vec();
    let id = devices
        .iter()
        .map(|d| d.id)
        .chain(hw.routers().iter().map(|r| r.id))
        .max()
        .unwrap()
        + 1;
    devices.push(DeviceNode {
        id,
        mem_capacity: devices[0].mem_capacity,
    });
    let mut links = hw.links().to_vec();
    links.push(LinkSpec {
        a: hw.node_id(attach % hw.node_count()),
        b: id,
        bandwidth,
        latency,
    });
    HardwareGraph::new(devices, hw.routers().to_vec(), links).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn placements_validate(
        vertices in 0usize..7,
        p in 0.0f64..0.7,
        devices in 1usize..4,
        routers in 0usize..2,
        seed: u64,
        mode in mode(),
    ) {
        let (g, hw) = instance(vertices, p, devices, routers, seed);
        let r = place(&g, &hw, &PlacerConfig::with_mode(mode)).unwrap();
        let violations = validate_solution(&g, &hw, &r.solution);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn exact_speedup_bounded_by_device_count(
        vertices in 1usize..7,
        p in 0.0f64..0.7,
        devices in 1usize..4,
        seed: u64,
    ) {
        let (g, hw) = instance(vertices, p, devices, 0, seed);
        let r = place(&g, &hw, &PlacerConfig::default()).unwrap();
        prop_assert!(r.optimal);
        prop_assert!(r.mp_speedup >= 1.0 - 1e-12, "{}", r.mp_speedup);
        prop_assert!(r.mp_speedup <= devices as f64 + 1e-12, "{}", r.mp_speedup);
    }

    #[test]
    fn extra_device_never_hurts(
        vertices in 1usize..6,
        p in 0.0f64..0.7,
        devices in 1usize..3,
        seed: u64,
        attach in 0usize..4,
        bandwidth in 1u32..16,
        latency in 0u32..4,
    ) {
        let (g, hw) = instance(vertices, p, devices, 0, seed);
        let bigger = with_extra_device(&hw, attach, bandwidth as f64, latency as f64);
        let cfg = PlacerConfig::default();
        let before = place(&g, &hw, &cfg).unwrap().solution.schedule.makespan;
        let after = place(&g, &bigger, &cfg).unwrap().solution.schedule.makespan;
        prop_assert!(after <= before + hybridplan::TIME_EPS, "{} -> {}", before, after);
    }

    #[test]
    fn deterministic(
        vertices in 0usize..7,
        p in 0.0f64..0.7,
        devices in 1usize..4,
        seed: u64,
        mode in mode(),
    ) {
        let (g, hw) = instance(vertices, p, devices, 1, seed);
        let cfg = PlacerConfig::with_mode(mode);
        prop_assert_eq!(place(&g, &hw, &cfg).unwrap(), place(&g, &hw, &cfg).unwrap());
    }
}
