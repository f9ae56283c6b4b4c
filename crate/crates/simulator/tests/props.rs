use graph_core::{FailureSet, MultiGraph};
use proptest::prelude::*;
use routing_schemes::{Circular, CompiledScheme, DfAlgo};
use simulator::{explore_randomized_branches, run_deterministic, Outcome};

fn fixture() -> (MultiGraph, graph_core::ArborescenceSet) {
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    /// Every deterministic run terminates with a classified outcome, never
    /// forwards over failed edges (that would be an Err), and a delivery
    /// means the path really ends at the destination.
    #[test]
    fn deterministic_runs_terminate_cleanly(mask in 0u32..64, src in 0usize..3) {
        let (g, set) = fixture();
        let f = FailureSet::from_edges(
            g.edge_count(),
            g.edges().filter(|e| mask >> e.index() & 1 == 1),
        );
        let source = g.vertices().nth(src).unwrap();
        for scheme in [
            CompiledScheme::Circular(Circular::default_for(4, g.vertex_count())),
            CompiledScheme::DfAlgo(DfAlgo::new(&set)),
        ] {
            let trace = run_deterministic(&g, &set, &scheme, &f, source).unwrap();
            prop_assert!(trace.hops <= 4 * g.vertex_count() * set.k() * 3 * 2 + 1);
            if trace.outcome == Outcome::Delivered {
                prop_assert_eq!(
                    trace.path.last().unwrap().vertex.as_str(),
                    g.label(g.destination())
                );
            }
        }
        // Branch exploration can only answer true when the failures leave
        // the source connected to the destination at all.
        if mask.count_ones() as usize <= set.k() - 1 {
            prop_assert!(explore_randomized_branches(&g, &set, &f, source));
        }
    }
}
