use std::collections::{HashMap, HashSet};

use decomposition::{build_topology, subdivide_three, TopologySpec};
use graph_core::{reachable, EdgeId, FailureSet, MultiGraph, VertexId};
use rayon::prelude::*;
use routing_schemes::{CompiledScheme, VertexCircular};
use serde::Serialize;
use simulator::{run_deterministic, Outcome};

use crate::resilience::subsets_up_to;
use crate::VerifierError;

/// Port cycles of the 3-regular gadget in its reference rotation; flipping
/// a vertex reverses its cycle.
const CYCLES: [(&str, [&str; 3]); 7] = [
    ("o", ["x", "z", "y"]),
    ("y", ["o", "a", "c"]),
    ("a", ["y", "z", "d"]),
    ("z", ["a", "o", "b"]),
    ("b", ["x", "d", "z"]),
    ("c", ["y", "d", "x"]),
    ("x", ["o", "c", "b"]),
];

#[derive(Debug, Serialize)]
pub struct ScriptedCheck {
    pub name: &'static str,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ImpossibilityReport {
    /// All 2^7 rotation choices for the gadget's non-destination vertices.
    pub orientation_assignments: usize,
    /// How many of them lose some packet under at most two failures no
    /// matter which origin port each source picks.
    pub doomed_assignments: usize,
    pub scripted: Vec<ScriptedCheck>,
    pub subdivided_pass_through: bool,
    pub subdivided_no_bounce_back: bool,
    pub subdivided_distinct_entries: bool,
}

impl ImpossibilityReport {
    pub fn passed(&self) -> bool {
        self.doomed_assignments == self.orientation_assignments
            && self.scripted.iter().all(|c| c.passed)
            && self.subdivided_pass_through
            && self.subdivided_no_bounce_back
            && self.subdivided_distinct_entries
    }
}

fn port_tables(
    g: &MultiGraph,
    flipped: &[&str],
    origin: &[(&str, &str)],
) -> VertexCircular {
    let mut orders = vec![Vec::new(); g.vertex_count()];
    for (label, cycle) in CYCLES {
        let v = g.vertex_by_label(label).unwrap();
        let mut cyc: Vec<&str> = cycle.to_vec();
        if flipped.contains(&label) {
            cyc.reverse();
        }
        orders[v.index()] = cyc
            .iter()
            .map(|n| g.edge_between(v, g.vertex_by_label(n).unwrap()).unwrap())
            .collect();
    }
    let d = g.destination();
    orders[d.index()] = g.incident(d).to_vec();
    let mut origins = vec![None; g.vertex_count()];
    for (at, toward) in origin {
        let v = g.vertex_by_label(at).unwrap();
        let u = g.vertex_by_label(toward).unwrap();
        origins[v.index()] = Some(g.edge_between(v, u).unwrap());
    }
    VertexCircular::new(g, orders, origins).unwrap()
}

fn edge(g: &MultiGraph, p: &str, q: &str) -> EdgeId {
    g.edge_between(g.vertex_by_label(p).unwrap(), g.vertex_by_label(q).unwrap())
        .unwrap()
}

/// An orientation assignment is doomed when some ≤2-failure scenario and
/// still-connected source lose the packet for every choice of origin port,
/// since the origin entry is the only remaining freedom in the tables.
fn assignment_is_doomed(
    topo: &decomposition::Topology,
    flips: &[&str],
    failure_sets: &[Vec<EdgeId>],
) -> bool {
    let g = &topo.graph;
    let d = g.destination();
    failure_sets.iter().any(|subset| {
        let failures = FailureSet::from_edges(g.edge_count(), subset.iter().copied());
        g.vertices().any(|source| {
            if source == d {
                return false;
            }
            let reach = reachable(g, source, |e| failures.contains(e));
            if !reach[d.index()] {
                return false;
            }
            let label = g.label(source).to_string();
            !g.incident(source).iter().any(|&first| {
                let other = g.other_end(first, source);
                let vc = port_tables(g, flips, &[(label.as_str(), g.label(other))]);
                let scheme = CompiledScheme::VertexCircular(vc);
                let trace =
                    run_deterministic(g, &topo.set, &scheme, &failures, source).unwrap();
                trace.outcome == Outcome::Delivered
            })
        })
    })
}

fn scripted_loop(
    topo: &decomposition::Topology,
    name: &'static str,
    flips: &[&str],
    failed: [(&str, &str); 2],
) -> ScriptedCheck {
    let g = &topo.graph;
    let o = g.vertex_by_label("o").unwrap();
    let vc = port_tables(g, flips, &[("o", "y")]);
    let scheme = CompiledScheme::VertexCircular(vc);
    let none = FailureSet::for_graph(g);
    let fine = run_deterministic(g, &topo.set, &scheme, &none, o).unwrap();
    let f = FailureSet::from_edges(
        g.edge_count(),
        failed.iter().map(|(p, q)| edge(g, p, q)),
    );
    let broken = run_deterministic(g, &topo.set, &scheme, &f, o).unwrap();
    ScriptedCheck {
        name,
        passed: fine.outcome == Outcome::Delivered && broken.outcome == Outcome::Loop,
    }
}

/// Routing over the subdivided gadget with explicit per-(vertex, incoming)
/// preferred ports; the packet takes the first active port scanning the
/// vertex's port cycle from the preferred one.
struct PortWalk {
    ports: Vec<Vec<EdgeId>>,
    prefer: HashMap<(VertexId, Option<EdgeId>), EdgeId>,
}

#[derive(PartialEq)]
enum WalkEnd {
    Delivered,
    Loop,
    Stuck,
}

impl PortWalk {
    fn run(&self, g: &MultiGraph, failures: &FailureSet, source: VertexId) -> WalkEnd {
        let mut vertex = source;
        let mut incoming: Option<EdgeId> = None;
        let mut seen = HashSet::new();
        loop {
            if vertex == g.destination() {
                return WalkEnd::Delivered;
            }
            if !seen.insert((vertex, incoming)) {
                return WalkEnd::Loop;
            }
            let cycle = &self.ports[vertex.index()];
            let preferred = self
                .prefer
                .get(&(vertex, incoming))
                .copied()
                .or_else(|| match incoming {
                    None => cycle.first().copied(),
                    Some(e) => {
                        let p = cycle.iter().position(|&c| c == e).unwrap();
                        Some(cycle[(p + 1) % cycle.len()])
                    }
                })
                .unwrap();
            let p0 = cycle.iter().position(|&c| c == preferred).unwrap();
            let Some(out) = (0..cycle.len())
                .map(|off| cycle[(p0 + off) % cycle.len()])
                .find(|&e| !failures.contains(e))
            else {
                return WalkEnd::Stuck;
            };
            vertex = g.other_end(out, vertex);
            incoming = Some(out);
        }
    }
}

struct Subdivided {
    g: MultiGraph,
    walk: PortWalk,
}

/// Expands each gadget edge into a three-edge path and wires the reference
/// port cycles on the original vertices; intermediate vertices pass packets
/// through to their other edge.
fn subdivided_gadget(base: &MultiGraph) -> Subdivided {
    let g = subdivide_three(base);
    let mut ports = vec![Vec::new(); g.vertex_count()];
    for v in g.vertices() {
        ports[v.index()] = g.incident(v).to_vec();
    }
    for (label, cycle) in CYCLES {
        let v = g.vertex_by_label(label).unwrap();
        let base_v = base.vertex_by_label(label).unwrap();
        ports[v.index()] = cycle
            .iter()
            .map(|n| {
                let base_n = base.vertex_by_label(n).unwrap();
                let e = base.edge_between(base_v, base_n).unwrap();
                segment_toward(&g, base, e, label)
            })
            .collect();
    }
    Subdivided {
        g,
        walk: PortWalk {
            ports,
            prefer: HashMap::new(),
        },
    }
}

/// The subdivision's first or last segment of original edge `e`, whichever
/// touches the original vertex `at`.
fn segment_toward(g: &MultiGraph, base: &MultiGraph, e: EdgeId, at: &str) -> EdgeId {
    let id = base.external_id(e);
    let v = g.vertex_by_label(at).unwrap();
    for tag in ["a", "b"] {
        let sub = g.vertex_by_label(&format!("sub{id}{tag}")).unwrap();
        if let Some(seg) = g.edge_between(v, sub) {
            return seg;
        }
    }
    unreachable!("subdivision keeps both endpoints adjacent to its path");
}

fn middle_of(g: &MultiGraph, base: &MultiGraph, e: EdgeId) -> EdgeId {
    let id = base.external_id(e);
    let va = g.vertex_by_label(&format!("sub{id}a")).unwrap();
    let vb = g.vertex_by_label(&format!("sub{id}b")).unwrap();
    g.edge_between(va, vb).unwrap()
}

/// An intermediate vertex that bounces a packet back loops once every other
/// edge of the bounced-to vertex has failed.
fn check_pass_through(base: &MultiGraph) -> bool {
    let mut sub = subdivided_gadget(base);
    let g = &sub.g;
    let o = g.vertex_by_label("o").unwrap();
    let toward_x = sub.walk.ports[o.index()][0];
    let bouncer = g.other_end(toward_x, o);
    sub.walk.prefer.insert((bouncer, Some(toward_x)), toward_x);
    let others: Vec<EdgeId> = g
        .incident(o)
        .iter()
        .copied()
        .filter(|&e| e != toward_x)
        .collect();
    let failures = FailureSet::from_edges(g.edge_count(), others);
    sub.walk.run(g, &failures, o) == WalkEnd::Loop
}

/// An original vertex that bounces straight back loops as soon as the
/// middle of that direction's path fails: the intermediate vertex is forced
/// to return the packet.
fn check_no_bounce_back(base: &MultiGraph) -> bool {
    let mut sub = subdivided_gadget(base);
    let g = &sub.g;
    let o = g.vertex_by_label("o").unwrap();
    let toward_x = sub.walk.ports[o.index()][0];
    sub.walk.prefer.insert((o, Some(toward_x)), toward_x);
    sub.walk.prefer.insert((o, None), toward_x);
    let base_o = base.vertex_by_label("o").unwrap();
    let base_x = base.vertex_by_label("x").unwrap();
    let mid = middle_of(g, base, base.edge_between(base_o, base_x).unwrap());
    let failures = FailureSet::from_edges(g.edge_count(), [mid]);
    sub.walk.run(g, &failures, o) == WalkEnd::Loop
}

/// A table sending two directions to the same third one loops between the
/// vertex and the two dead-ended directions once both their paths lose
/// their middle edge.
fn check_distinct_entries(base: &MultiGraph) -> bool {
    let mut sub = subdivided_gadget(base);
    let g = &sub.g;
    let o = g.vertex_by_label("o").unwrap();
    let [toward_x, toward_z, toward_y] = sub.walk.ports[o.index()][..] else {
        return false;
    };
    sub.walk.prefer.insert((o, Some(toward_x)), toward_y);
    sub.walk.prefer.insert((o, Some(toward_z)), toward_y);
    sub.walk.prefer.insert((o, Some(toward_y)), toward_x);
    let entry = g.other_end(toward_z, o);
    sub.walk.prefer.insert((entry, None), toward_z);
    let base_o = base.vertex_by_label("o").unwrap();
    let mids = ["x", "y"].map(|n| {
        let base_n = base.vertex_by_label(n).unwrap();
        middle_of(g, base, base.edge_between(base_o, base_n).unwrap())
    });
    let failures = FailureSet::from_edges(g.edge_count(), mids);
    sub.walk.run(g, &failures, entry) == WalkEnd::Loop
}

pub fn impossibility_suite() -> Result<ImpossibilityReport, VerifierError> {
    let topo = build_topology(&TopologySpec::CubeGadget).expect("gadget builds");
    let g = &topo.graph;
    let edges: Vec<_> = g.edges().collect();
    let failure_sets = subsets_up_to(&edges, 2);
    let labels: Vec<&str> = CYCLES.iter().map(|(l, _)| *l).collect();
    let doomed = (0u32..1 << labels.len())
        .into_par_iter()
        .filter(|mask| {
            let flips: Vec<&str> = labels
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &l)| l)
                .collect();
            assignment_is_doomed(&topo, &flips, &failure_sets)
        })
        .count();
    let scripted = vec![
        scripted_loop(
            &topo,
            "forward-rotation-y",
            &["a", "z"],
            [("a", "d"), ("z", "b")],
        ),
        scripted_loop(
            &topo,
            "forward-rotation-a",
            &["y", "z"],
            [("y", "c"), ("z", "b")],
        ),
        scripted_loop(
            &topo,
            "forward-rotation-z",
            &["y", "a"],
            [("y", "c"), ("a", "d")],
        ),
        scripted_loop(
            &topo,
            "reverse-rotation-trio",
            &["y", "a", "z"],
            [("c", "d"), ("b", "d")],
        ),
        scripted_loop(
            &topo,
            "reverse-rotation-trio-with-x",
            &["y", "a", "z", "x"],
            [("c", "d"), ("b", "d")],
        ),
    ];
    Ok(ImpossibilityReport {
        orientation_assignments: 1 << labels.len(),
        doomed_assignments: doomed,
        scripted,
        subdivided_pass_through: check_pass_through(g),
        subdivided_no_bounce_back: check_no_bounce_back(g),
        subdivided_distinct_entries: check_distinct_entries(g),
    })
}
