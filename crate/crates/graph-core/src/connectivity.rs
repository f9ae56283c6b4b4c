use crate::graph::{EdgeId, MultiGraph, VertexId};

/// Breadth-first reachability from `start`, treating `disabled[e]` edges as
/// removed. Returns a per-vertex visited mask.
pub fn reachable(g: &MultiGraph, start: VertexId, disabled: impl Fn(EdgeId) -> bool) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = std::collections::VecDeque::new();
    seen[start.index()] = true;
    queue.push_back(start);
    while let Some(v) = queue.pop_front() {
        for &e in g.incident(v) {
            if disabled(e) {
                continue;
            }
            let w = g.other_end(e, v);
            if !seen[w.index()] {
                seen[w.index()] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

pub fn is_connected(g: &MultiGraph) -> bool {
    if g.vertex_count() == 0 {
        return true;
    }
    reachable(g, VertexId(0), |_| false).iter().all(|&b| b)
}

/// Max-flow with unit capacity per undirected edge, i.e. the number of
/// edge-disjoint s-t paths. Edmonds-Karp; fine at desk scale.
pub fn local_edge_connectivity(g: &MultiGraph, s: VertexId, t: VertexId) -> usize {
    assert_ne!(s, t);
    // cap[e][dir]: remaining capacity of edge e in direction dir, where dir 0
    // is stored-endpoint order. An undirected unit edge carries at most one
    // unit net flow; model as capacity 1 each way with residual cancellation.
    let m = g.edge_count();
    let mut cap = vec![[1u8, 1u8]; m];
    let mut flow = 0;
    loop {
        // BFS for an augmenting path.
        let mut prev: Vec<Option<(VertexId, EdgeId, usize)>> = vec![None; g.vertex_count()];
        let mut seen = vec![false; g.vertex_count()];
        let mut queue = std::collections::VecDeque::new();
        seen[s.index()] = true;
        queue.push_back(s);
        'bfs: while let Some(v) = queue.pop_front() {
            for &e in g.incident(v) {
                let (a, _) = g.endpoints(e);
                let dir = if v == a { 0 } else { 1 };
                if cap[e.index()][dir] == 0 {
                    continue;
                }
                let w = g.other_end(e, v);
                if seen[w.index()] {
                    continue;
                }
                seen[w.index()] = true;
                prev[w.index()] = Some((v, e, dir));
                if w == t {
                    break 'bfs;
                }
                queue.push_back(w);
            }
        }
        if !seen[t.index()] {
            return flow;
        }
        let mut cur = t;
        while cur != s {
            let (v, e, dir) = prev[cur.index()].unwrap();
            cap[e.index()][dir] -= 1;
            cap[e.index()][1 - dir] += 1;
            cur = v;
        }
        flow += 1;
    }
}

/// Global edge connectivity: the size of a minimum edge cut. Disconnected
/// graphs report 0. Computed as the minimum s-t connectivity from the
/// destination to every other vertex (exact for undirected graphs), with a
/// confirming sweep from an arbitrary second anchor.
pub fn edge_connectivity(g: &MultiGraph) -> usize {
    if g.vertex_count() <= 1 {
        return 0;
    }
    if !is_connected(g) {
        return 0;
    }
    let d = g.destination();
    let mut best = usize::MAX;
    for v in g.vertices() {
        if v != d {
            best = best.min(local_edge_connectivity(g, v, d));
        }
    }
    let anchor = g.vertices().find(|&v| v != d).unwrap();
    for v in g.vertices() {
        if v != anchor {
            best = best.min(local_edge_connectivity(g, anchor, v));
        }
    }
    best
}
