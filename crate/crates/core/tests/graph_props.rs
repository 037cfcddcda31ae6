use hybridplan::gen::{random_dag, random_hardware, DagSpec, HardwareSpec};
use hybridplan::graph::{ComputeGraph, HardwareGraph};
use proptest::prelude::*;

fn dag_spec() -> impl Strategy<Value = DagSpec> {
    (0usize..40, 0.0f64..=1.0).prop_map(|(vertices, edge_probability)| DagSpec {
        vertices,
        edge_probability,
        ..DagSpec::default()
    })
}

fn hw_spec() -> impl Strategy<Value = HardwareSpec> {
    (1usize..6, 0usize..4, 0.0f64..=1.0).prop_map(|(devices, routers, p)| HardwareSpec {
        devices,
        routers,
        extra_link_probability: p,
        ..HardwareSpec::default()
    })
}

proptest! {
    #[test]
    fn compute_round_trip(spec in dag_spec(), seed: u64) {
        let g = random_dag(&spec, seed);
        let back = ComputeGraph::parse(&g.to_json()).unwrap();
        prop_assert_eq!(back.vertices(), g.vertices());
        prop_assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn hardware_round_trip(spec in hw_spec(), seed: u64) {
        let hw = random_hardware(&spec, seed);
        let back = HardwareGraph::parse(&hw.to_json()).unwrap();
        prop_assert_eq!(back.devices(), hw.devices());
        prop_assert_eq!(back.routers(), hw.routers());
        prop_assert_eq!(back.links(), hw.links());
    }

    #[test]
    fn topological_order_respects_edges(spec in dag_spec(), seed: u64) {
        let g = random_dag(&spec, seed);
        let order = g.topological_order();
        prop_assert_eq!(order.len(), g.len());
        let pos = |id: u32| order.iter().position(|&x| x == id).unwrap();
        for e in g.edges() {
            prop_assert!(pos(e.src) < pos(e.dst));
        }
    }

    #[test]
    fn route_delay_monotone_in_payload(
        spec in hw_spec(),
        seed: u64,
        a in 0usize..6,
        b in 0usize..6,
        p1 in 0u64..10_000,
        extra in 0u64..10_000,
    ) {
        let hw = random_hardware(&spec, seed);
        let n = hw.device_count();
        let (from, to) = (hw.devices()[a % n].id, hw.devices()[b % n].id);
        let small = hw.shortest_route(from, to, p1).unwrap();
        let large = hw.shortest_route(from, to, p1 + extra).unwrap();
        prop_assert!(small.delay <= large.delay + 1e-9 * large.delay.max(1.0));
    }

    #[test]
    fn route_is_contiguous(spec in hw_spec(), seed: u64, a in 0usize..6, b in 0usize..6, payload in 0u64..5000) {
        let hw = random_hardware(&spec, seed);
        let n = hw.device_count();
        let (from, to) = (hw.devices()[a % n].id, hw.devices()[b % n].id);
        let route = hw.shortest_route(from, to, payload).unwrap();
        let mut at = hw.node_index(from).unwrap();
        let mut seen = vec![at];
        let mut delay = 0.0;
        for &l in &route.links {
            let (x, y) = hw.link_ends(l);
            at = if x == at { y } else if y == at { x } else {
                return Err(TestCaseError::fail(format!("link {l} does not touch node {at}")));
            };
            prop_assert!(!seen.contains(&at));
            seen.push(at);
            delay += hw.links()[l].delay(payload);
        }
        prop_assert_eq!(at, hw.node_index(to).unwrap());
        prop_assert!((delay - route.delay).abs() <= 1e-9 * delay.max(1.0));
        if from == to {
            prop_assert!(route.links.is_empty());
        }
    }
}
