use graph_core::MultiGraph;

/// Replaces every edge {x, y} by a three-edge path x - v1 - v2 - y with two
/// fresh vertices. Original vertices keep their labels and indices; the first
/// segment of each path keeps the original external edge id.
pub fn subdivide_three(g: &MultiGraph) -> MultiGraph {
    let mut b = MultiGraph::builder();
    for v in g.vertices() {
        b.vertex(g.label(v));
    }
    let base = g.edges().map(|e| g.external_id(e)).max().unwrap_or(-1) + 1;
    for e in g.edges() {
        let (x, y) = g.endpoints(e);
        let id = g.external_id(e);
        let v1 = b.vertex(format!("sub{id}a"));
        let v2 = b.vertex(format!("sub{id}b"));
        b.edge_with_id(x, v1, id).expect("fresh vertex");
        b.edge_with_id(v1, v2, base + 2 * e.index() as i64)
            .expect("fresh vertices");
        b.edge_with_id(v2, y, base + 2 * e.index() as i64 + 1)
            .expect("fresh vertex");
    }
    b.build(g.destination()).expect("nonempty graph")
}
