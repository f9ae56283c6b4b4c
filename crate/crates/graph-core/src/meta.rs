use std::collections::BTreeSet;

use crate::arborescence::ArborescenceSet;
use crate::graph::{EdgeId, FailureSet, MultiGraph};

/// Graph on arborescence indices with one link per failed edge that some
/// arborescence uses. A failed edge used by two arborescences links them; one
/// used by a single arborescence becomes a self-loop there. Each link keeps
/// its originating edge so bounce targets can be recovered.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaGraph {
    k: usize,
    links: Vec<MetaLink>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetaLink {
    pub edge: EdgeId,
    pub a: usize,
    pub b: usize,
}

impl MetaLink {
    pub fn is_self_loop(&self) -> bool {
        self.a == self.b
    }
}

impl MetaGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn links(&self) -> &[MetaLink] {
        &self.links
    }
}

pub fn build_meta_graph(_g: &MultiGraph, t: &ArborescenceSet, f: &FailureSet) -> MetaGraph {
    let mut links = Vec::new();
    for e in f.iter() {
        let owners: Vec<usize> = t.owners_of_edge(e).collect();
        match owners.as_slice() {
            [] => {}
            [i] => links.push(MetaLink { edge: e, a: *i, b: *i }),
            [i, j] => links.push(MetaLink {
                edge: e,
                a: *i.min(j),
                b: *i.max(j),
            }),
            _ => unreachable!("an edge has only two arcs"),
        }
    }
    MetaGraph { k: t.k(), links }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaComponent {
    pub nodes: Vec<usize>,
    pub link_count: usize,
    pub is_tree: bool,
}

/// Connected components of the meta-graph, each tagged tree / non-tree.
/// Self-loops and parallel links count as links, so a component is a tree
/// exactly when link_count == nodes − 1.
pub fn tree_components(h: &MetaGraph) -> Vec<MetaComponent> {
    let k = h.k();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let r = find(parent, parent[x]);
            parent[x] = r;
        }
        parent[x]
    }
    for link in h.links() {
        let (ra, rb) = (find(&mut parent, link.a), find(&mut parent, link.b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut comps: std::collections::BTreeMap<usize, MetaComponent> = Default::default();
    for i in 0..k {
        let r = find(&mut parent, i);
        comps
            .entry(r)
            .or_insert_with(|| MetaComponent {
                nodes: Vec::new(),
                link_count: 0,
                is_tree: false,
            })
            .nodes
            .push(i);
    }
    for link in h.links() {
        let r = find(&mut parent, link.a);
        comps.get_mut(&r).unwrap().link_count += 1;
    }
    let mut out: Vec<MetaComponent> = comps.into_values().collect();
    for c in &mut out {
        c.is_tree = c.link_count == c.nodes.len() - 1;
    }
    out
}

/// Indices i such that every outgoing meta-arc of i is well-bouncing: for
/// each failed edge linking i to j, the arc that edge contributes to T_j has
/// a failure-free residual path to the destination. A self-loop (no reverse
/// arc to bounce onto) disqualifies its node. Non-empty whenever |F| ≤ k−1
/// on a valid set.
pub fn good_arborescences(g: &MultiGraph, t: &ArborescenceSet, f: &FailureSet) -> BTreeSet<usize> {
    let h = build_meta_graph(g, t, f);
    let mut good: Vec<bool> = vec![true; t.k()];
    for link in h.links() {
        if link.is_self_loop() {
            good[link.a] = false;
            continue;
        }
        // Meta-arc (a,b) is well-bouncing iff the arc of `edge` inside T_b is
        // good there; likewise for (b,a).
        for (from, to) in [(link.a, link.b), (link.b, link.a)] {
            let arc = t
                .member(to)
                .arc_of_edge(g, link.edge)
                .expect("link endpoint owns an arc of its edge");
            let ok = t
                .member(to)
                .is_good_arc(f, arc)
                .expect("arc taken from the tree itself");
            if !ok {
                good[from] = false;
            }
        }
    }
    good.iter()
        .enumerate()
        .filter_map(|(i, &g)| if g { Some(i) } else { None })
        .collect()
}
