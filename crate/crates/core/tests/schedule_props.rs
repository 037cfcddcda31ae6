use hybridplan::gen::{random_dag, random_hardware, DagSpec, HardwareSpec};
use hybridplan::graph::{ComputeGraph, HardwareGraph};
use hybridplan::schedule::{
    build_routing, exact_schedule, list_schedule, validate_solution, Placement, PlacementSolution,
};
use proptest::prelude::*;

fn instance(
    vertices: usize,
    p: f64,
    devices: usize,
    routers: usize,
    seed: u64,
    picks: &[usize],
) -> (ComputeGraph, HardwareGraph, Placement) {
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
    let assign = (0..g.len()).map(|v| picks[v % picks.len()] % devices).collect();
    (g, hw, Placement::new(assign))
}

fn solution(g: &ComputeGraph, hw: &HardwareGraph, p: Placement, exact: bool) -> PlacementSolution {
    let routing = build_routing(g, hw, &p);
    let schedule = if exact {
        exact_schedule(g, &p, &routing, 12).unwrap()
    } else {
        list_schedule(g, &p, &routing)
    };
    PlacementSolution {
        placement: p,
        routing,
        schedule,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn list_schedule_is_feasible(
        vertices in 0usize..30,
        p in 0.0f64..0.8,
        devices in 1usize..5,
        routers in 0usize..3,
        seed: u64,
        picks in prop::collection::vec(0usize..8, 1..8),
    ) {
        let (g, hw, placement) = instance(vertices, p, devices, routers, seed, &picks);
        let sol = solution(&g, &hw, placement, false);
        let violations = validate_solution(&g, &hw, &sol);
        prop_assert!(violations.is_empty(), "{:?}", violations);
    }

    #[test]
    fn exact_never_worse_and_feasible(
        vertices in 0usize..8,
        p in 0.0f64..0.8,
        devices in 1usize..4,
        seed: u64,
        picks in prop::collection::vec(0usize..8, 1..8),
    ) {
        let (g, hw, placement) = instance(vertices, p, devices, 0, seed, &picks);
        let list = solution(&g, &hw, placement.clone(), false);
        let exact = solution(&g, &hw, placement, true);
        prop_assert!(validate_solution(&g, &hw, &exact).is_empty());
        prop_assert!(exact.schedule.makespan <= list.schedule.makespan + hybridplan::TIME_EPS);
    }

    #[test]
    fn single_device_makespan_is_total_cost(vertices in 0usize..30, p in 0.0f64..0.8, seed: u64) {
        let (g, hw, _) = instance(vertices, p, 1, 0, seed, &[0]);
        let sol = solution(&g, &hw, Placement::uniform(g.len(), 0), false);
        prop_assert_eq!(sol.schedule.makespan, g.total_cost());
    }

    #[test]
    fn edge_delays_decompose_over_links(
        vertices in 1usize..20,
        p in 0.0f64..0.8,
        devices in 1usize..5,
        routers in 0usize..3,
        seed: u64,
        picks in prop::collection::vec(0usize..8, 1..8),
    ) {
        let (g, hw, placement) = instance(vertices, p, devices, routers, seed, &picks);
        let routing = build_routing(&g, &hw, &placement);
        for (e, route) in routing.routes.iter().enumerate() {
            let bytes = g.edges()[e].bytes;
            let sum: f64 = route.links.iter().map(|&l| hw.links()[l].delay(bytes)).sum();
            prop_assert!((sum - route.delay).abs() <= 1e-9 * sum.max(1.0));
        }
    }
}
