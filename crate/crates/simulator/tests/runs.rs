use graph_core::{
    validate_arborescence_set, Arborescence, ArborescenceSet, Arc, FailureSet, MultiGraph,
    VertexId,
};
use routing_schemes::{Circular, CompiledScheme, DfAlgo, VertexCircular};
use simulator::{
    explore_randomized_branches, run_deterministic, run_duplication, run_randomized,
    run_randomized_with_budget, Outcome, SimError,
};

fn toy_gadget() -> (MultiGraph, ArborescenceSet, VertexId, FailureSet) {
    let mut b = MultiGraph::builder();
    let a = b.vertex("a");
    let bb = b.vertex("b");
    let d = b.vertex("d");
    let e_ab_a = b.edge(a, bb).unwrap();
    let e_ab_f = b.edge(a, bb).unwrap();
    let e_ad_a = b.edge(a, d).unwrap();
    let e_ad_f = b.edge(a, d).unwrap();
    let e_bd_a = b.edge(bb, d).unwrap();
    let e_bd_f = b.edge(bb, d).unwrap();
    let g = b.build(d).unwrap();
    let n = g.vertex_count();
    let mut trees = vec![Arborescence::new(d, n); 4];
    trees[0].set_out(Arc::new(e_ad_f, a, d));
    trees[0].set_out(Arc::new(e_ab_a, bb, a));
    trees[1].set_out(Arc::new(e_ab_f, a, bb));
    trees[1].set_out(Arc::new(e_bd_a, bb, d));
    trees[2].set_out(Arc::new(e_ab_a, a, bb));
    trees[2].set_out(Arc::new(e_bd_f, bb, d));
    trees[3].set_out(Arc::new(e_ab_f, bb, a));
    trees[3].set_out(Arc::new(e_ad_a, a, d));
    let set = ArborescenceSet::new(&g, trees, false);
    assert!(validate_arborescence_set(&g, &set).is_empty());
    let failures = FailureSet::from_edges(g.edge_count(), [e_ad_f, e_ab_f, e_bd_f]);
    (g, set, a, failures)
}

fn circular_scheme(order: Vec<usize>, k: usize, n: usize) -> CompiledScheme {
    CompiledScheme::Circular(Circular::new(k, order, vec![0; n], Default::default()).unwrap())
}

fn doubled_triangle() -> (MultiGraph, ArborescenceSet) {
    let mut b = MultiGraph::builder();
    let a = b.vertex("a");
    let v = b.vertex("b");
    let d = b.vertex("d");
    for (x, y) in [(a, v), (a, d), (v, d)] {
        b.edge(x, y).unwrap();
        b.edge(x, y).unwrap();
    }
    let g = b.build(d).unwrap();
    let set = decomposition::decompose_general(&g, 4).unwrap();
    (g, set)
}

fn k4_with_trees() -> (MultiGraph, ArborescenceSet) {
    let mut b = MultiGraph::builder();
    let vs: Vec<_> = ["d", "u", "v", "w"].iter().map(|l| b.vertex(*l)).collect();
    for i in 0..4 {
        for j in i + 1..4 {
            b.edge(vs[i], vs[j]).unwrap();
        }
    }
    let g = b.build(vs[0]).unwrap();
    let set = decomposition::decompose_general(&g, 3).unwrap();
    (g, set)
}

#[test]
fn source_at_destination_is_a_zero_hop_delivery() {
    let (g, set, _, failures) = toy_gadget();
    let scheme = circular_scheme(vec![0, 1, 2, 3], 4, g.vertex_count());
    let trace = run_deterministic(&g, &set, &scheme, &failures, g.destination()).unwrap();
    assert_eq!(trace.outcome, Outcome::Delivered);
    assert_eq!(trace.hops, 0);
    assert_eq!(trace.switches, 0);
}

#[test]
fn orderings_separate_loop_from_delivery() {
    let (g, set, a, failures) = toy_gadget();
    let n = g.vertex_count();
    let bad = circular_scheme(vec![0, 1, 2, 3], 4, n);
    let trace = run_deterministic(&g, &set, &bad, &failures, a).unwrap();
    assert_eq!(trace.outcome, Outcome::Loop);
    assert!(trace.switches > 0);
    let good = circular_scheme(vec![0, 3, 1, 2], 4, n);
    let trace = run_deterministic(&g, &set, &good, &failures, a).unwrap();
    assert_eq!(trace.outcome, Outcome::Delivered);
    assert_eq!(trace.hops, 1);
    assert_eq!(trace.switches, 0);
}

#[test]
fn k4_circular_survives_any_two_failures() {
    let (g, set) = k4_with_trees();
    let scheme = circular_scheme(vec![0, 1, 2], 3, g.vertex_count());
    let edges: Vec<_> = g.edges().collect();
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let f = FailureSet::from_edges(g.edge_count(), [edges[i], edges[j]]);
            for source in g.vertices() {
                let trace = run_deterministic(&g, &set, &scheme, &f, source).unwrap();
                assert_eq!(trace.outcome, Outcome::Delivered);
            }
        }
    }
}

#[test]
fn port_cycle_loop_is_detected_by_the_engine() {
    let topo = decomposition::build_topology(&decomposition::TopologySpec::CubeGadget).unwrap();
    let g = &topo.graph;
    let cycles: &[(&str, [&str; 3])] = &[
        ("o", ["x", "z", "y"]),
        ("y", ["c", "a", "o"]),
        ("a", ["d", "z", "y"]),
        ("z", ["b", "o", "a"]),
        ("b", ["x", "d", "z"]),
        ("c", ["y", "d", "x"]),
        ("x", ["o", "c", "b"]),
        ("d", ["a", "b", "c"]),
    ];
    let mut orders = vec![Vec::new(); g.vertex_count()];
    for (label, cycle) in cycles {
        let v = g.vertex_by_label(label).unwrap();
        orders[v.index()] = cycle
            .iter()
            .map(|n| g.edge_between(v, g.vertex_by_label(n).unwrap()).unwrap())
            .collect();
    }
    let mut origin = vec![None; g.vertex_count()];
    let o = g.vertex_by_label("o").unwrap();
    let y = g.vertex_by_label("y").unwrap();
    origin[o.index()] = Some(g.edge_between(o, y).unwrap());
    let scheme =
        CompiledScheme::VertexCircular(VertexCircular::new(g, orders, origin).unwrap());
    let e = |p: &str, q: &str| {
        g.edge_between(g.vertex_by_label(p).unwrap(), g.vertex_by_label(q).unwrap())
            .unwrap()
    };
    let f = FailureSet::from_edges(g.edge_count(), [e("c", "d"), e("b", "d")]);
    let trace = run_deterministic(g, &topo.set, &scheme, &f, o).unwrap();
    assert_eq!(trace.outcome, Outcome::Loop);
    let none = FailureSet::for_graph(g);
    let trace = run_deterministic(g, &topo.set, &scheme, &none, o).unwrap();
    assert_eq!(trace.outcome, Outcome::Delivered);
}

#[test]
fn header_scheme_delivers_under_the_engine() {
    let (g, set) = doubled_triangle();
    let scheme = CompiledScheme::DfAlgo(DfAlgo::new(&set));
    let edges: Vec<_> = g.edges().collect();
    for mask in 0u32..1 << edges.len() {
        if mask.count_ones() > 3 {
            continue;
        }
        let f = FailureSet::from_edges(
            g.edge_count(),
            edges.iter().copied().filter(|e| mask >> e.index() & 1 == 1),
        );
        for source in g.vertices() {
            let trace = run_deterministic(&g, &set, &scheme, &f, source).unwrap();
            assert_eq!(trace.outcome, Outcome::Delivered);
        }
    }
}

#[test]
fn failure_free_randomized_runs_never_switch() {
    let (g, set) = doubled_triangle();
    let none = FailureSet::for_graph(&g);
    let a = g.vertex_by_label("a").unwrap();
    let stats = run_randomized(&g, &set, 0.5, false, &none, a, 200, 11).unwrap();
    assert_eq!(stats.delivery_rate, 1.0);
    assert_eq!(stats.mean_switches, 0.0);
    assert_eq!(stats.std_error, 0.0);
}

#[test]
fn randomized_statistics_are_reproducible_per_seed() {
    let (g, set, a, _) = toy_gadget();
    // Block the third tree at b so packets that ride it out of a must switch
    // there; how often that happens depends on the random tree choices.
    let b = g.vertex_by_label("b").unwrap();
    let blocked = set.member(2).out_arc(b).unwrap();
    let f = FailureSet::from_edges(g.edge_count(), [blocked.edge]);
    let s1 = run_randomized(&g, &set, 0.3, false, &f, a, 500, 42).unwrap();
    let s2 = run_randomized(&g, &set, 0.3, false, &f, a, 500, 42).unwrap();
    assert_eq!(s1.delivery_rate, s2.delivery_rate);
    assert_eq!(s1.mean_switches, s2.mean_switches);
    assert_eq!(s1.std_error, s2.std_error);
    let s3 = run_randomized(&g, &set, 0.3, false, &f, a, 500, 43).unwrap();
    assert!(s1.mean_switches != s3.mean_switches || s1.delivery_rate != s3.delivery_rate);
}

#[test]
fn starving_budget_counts_as_non_delivery() {
    let (g, set) = doubled_triangle();
    let none = FailureSet::for_graph(&g);
    let a = g.vertex_by_label("a").unwrap();
    let stats = run_randomized_with_budget(&g, &set, 0.5, false, &none, a, 50, 7, 0).unwrap();
    assert_eq!(stats.delivery_rate, 0.0);
}

#[test]
fn branch_exploration_matches_connectivity() {
    let (g, set) = doubled_triangle();
    let a = g.vertex_by_label("a").unwrap();
    let none = FailureSet::for_graph(&g);
    assert!(explore_randomized_branches(&g, &set, &none, a));
    let edges: Vec<_> = g.edges().collect();
    // Every failure pattern one short of the connectivity keeps a live route.
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            for l in j + 1..edges.len() {
                let f =
                    FailureSet::from_edges(g.edge_count(), [edges[i], edges[j], edges[l]]);
                for source in g.vertices() {
                    assert!(explore_randomized_branches(&g, &set, &f, source));
                }
            }
        }
    }
    // Cutting all four edges at the source disconnects it.
    let at_a: Vec<_> = g.incident(a).to_vec();
    let f = FailureSet::from_edges(g.edge_count(), at_a);
    assert!(!explore_randomized_branches(&g, &set, &f, a));
    assert!(explore_randomized_branches(&g, &set, &f, g.destination()));
}

fn mader_adbed() -> (MultiGraph, ArborescenceSet) {
    let ops = [decomposition::MaderOp::PinchCeil { edges: vec![0, 1] }];
    decomposition::mader_build(4, &ops).unwrap()
}

#[test]
fn duplication_without_failures_spawns_no_copies() {
    let (g, set) = mader_adbed();
    let scheme = CompiledScheme::DupEven { s: 2 };
    let none = FailureSet::for_graph(&g);
    for source in g.vertices() {
        let trace = run_duplication(&g, &set, &scheme, &none, source).unwrap();
        assert_eq!(trace.outcome, Outcome::Delivered);
        assert_eq!(trace.copies, 0);
    }
}

#[test]
fn duplication_copy_count_respects_failure_count() {
    let (g, set) = mader_adbed();
    let scheme = CompiledScheme::DupEven { s: 2 };
    let edges: Vec<_> = g.edges().collect();
    for &e in &edges {
        let f = FailureSet::from_edges(g.edge_count(), [e]);
        for source in g.vertices() {
            let trace = run_duplication(&g, &set, &scheme, &f, source).unwrap();
            assert_eq!(trace.outcome, Outcome::Delivered);
            assert!(trace.copies <= 1, "one failure spawned {} copies", trace.copies);
        }
    }
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            for l in j + 1..edges.len() {
                let f =
                    FailureSet::from_edges(g.edge_count(), [edges[i], edges[j], edges[l]]);
                for source in g.vertices() {
                    let trace = run_duplication(&g, &set, &scheme, &f, source).unwrap();
                    assert_eq!(trace.outcome, Outcome::Delivered);
                    assert!(trace.copies <= 3);
                }
            }
        }
    }
}

#[test]
fn engine_mismatches_are_rejected() {
    let (g, set, a, failures) = toy_gadget();
    let circ = circular_scheme(vec![0, 1, 2, 3], 4, g.vertex_count());
    assert!(matches!(
        run_duplication(&g, &set, &circ, &failures, a),
        Err(SimError::NotDuplicating)
    ));
    let (g, set) = mader_adbed();
    let dup = CompiledScheme::DupEven { s: 2 };
    let mut rejected = false;
    for e in g.edges() {
        let f = FailureSet::from_edges(g.edge_count(), [e]);
        for source in g.vertices() {
            if matches!(
                run_deterministic(&g, &set, &dup, &f, source),
                Err(SimError::UnexpectedDuplicate)
            ) {
                rejected = true;
            }
        }
    }
    assert!(rejected);
}
