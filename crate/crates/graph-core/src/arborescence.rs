use std::collections::HashSet;

use thiserror::Error;

use crate::graph::{EdgeId, FailureSet, MultiGraph, VertexId};

/// A directed use of an undirected edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub edge: EdgeId,
    pub tail: VertexId,
    pub head: VertexId,
}

impl Arc {
    pub fn new(edge: EdgeId, tail: VertexId, head: VertexId) -> Self {
        Arc { edge, tail, head }
    }

    pub fn reversed(self) -> Arc {
        Arc {
            edge: self.edge,
            tail: self.head,
            head: self.tail,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ArborescenceError {
    #[error("arc {0:?} is not part of this arborescence")]
    ArcNotInTree(Arc),
    #[error("vertex {0:?} has no path to the root")]
    NoPathToRoot(VertexId),
}

/// A destination-rooted spanning arborescence: every non-root vertex has
/// exactly one outgoing arc and following out-arcs always reaches the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arborescence {
    root: VertexId,
    out: Vec<Option<Arc>>,
}

impl Arborescence {
    pub fn new(root: VertexId, vertex_count: usize) -> Self {
        Arborescence {
            root,
            out: vec![None; vertex_count],
        }
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn vertex_count(&self) -> usize {
        self.out.len()
    }

    pub fn set_out(&mut self, arc: Arc) {
        self.out[arc.tail.index()] = Some(arc);
    }

    pub fn clear_out(&mut self, v: VertexId) {
        self.out[v.index()] = None;
    }

    pub fn out_arc(&self, v: VertexId) -> Option<Arc> {
        self.out[v.index()]
    }

    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        self.out.iter().filter_map(|a| *a)
    }

    pub fn contains_arc(&self, arc: Arc) -> bool {
        self.out[arc.tail.index()] == Some(arc)
    }

    /// The arc of `e` used by this arborescence, if any.
    pub fn arc_of_edge(&self, g: &MultiGraph, e: EdgeId) -> Option<Arc> {
        let (u, v) = g.endpoints(e);
        for w in [u, v] {
            if let Some(a) = self.out[w.index()] {
                if a.edge == e {
                    return Some(a);
                }
            }
        }
        None
    }

    /// Arcs on the path from `v` to the root, in order. Errors on a cycle.
    pub fn path_to_root(&self, v: VertexId) -> Result<Vec<Arc>, ArborescenceError> {
        let mut path = Vec::new();
        let mut cur = v;
        while cur != self.root {
            let arc = self.out[cur.index()].ok_or(ArborescenceError::NoPathToRoot(v))?;
            path.push(arc);
            cur = arc.head;
            if path.len() > self.out.len() {
                return Err(ArborescenceError::NoPathToRoot(v));
            }
        }
        Ok(path)
    }

    /// True iff the path from `arc.head` to the root avoids every failed edge.
    /// The arc itself must belong to this arborescence.
    pub fn is_good_arc(&self, f: &FailureSet, arc: Arc) -> Result<bool, ArborescenceError> {
        if !self.contains_arc(arc) {
            return Err(ArborescenceError::ArcNotInTree(arc));
        }
        let path = self.path_to_root(arc.head)?;
        Ok(path.iter().all(|a| !f.contains(a.edge)))
    }

    /// Children of each vertex in ascending head-vertex order; used by the
    /// traversal-based schemes so the walk order is reproducible.
    pub fn children_sorted(&self) -> Vec<Vec<VertexId>> {
        let mut children = vec![Vec::new(); self.out.len()];
        for arc in self.arcs() {
            children[arc.head.index()].push(arc.tail);
        }
        for c in &mut children {
            c.sort();
        }
        children
    }
}

/// Ordered list T_1..T_k of destination-rooted arborescences, pairwise
/// arc-disjoint. With `adbed` set, each half of the list is additionally
/// internally edge-disjoint.
#[derive(Clone, Debug)]
pub struct ArborescenceSet {
    members: Vec<Arborescence>,
    adbed: bool,
    // owners[edge] = (owner of the (lo,hi) direction, owner of the (hi,lo)
    // direction) where (lo,hi) are the stored endpoints; best-effort on
    // invalid sets (first owner wins), validation reports duplicates.
    owners: Vec<[Option<u32>; 2]>,
}

impl ArborescenceSet {
    pub fn new(g: &MultiGraph, members: Vec<Arborescence>, adbed: bool) -> Self {
        let mut owners = vec![[None, None]; g.edge_count()];
        for (i, t) in members.iter().enumerate() {
            for arc in t.arcs() {
                if arc.edge.index() >= owners.len() {
                    continue;
                }
                let (u, _) = g.endpoints(arc.edge);
                let slot = if arc.tail == u { 0 } else { 1 };
                let cell = &mut owners[arc.edge.index()][slot];
                if cell.is_none() {
                    *cell = Some(i as u32);
                }
            }
        }
        ArborescenceSet {
            members,
            adbed,
            owners,
        }
    }

    pub fn k(&self) -> usize {
        self.members.len()
    }

    pub fn adbed(&self) -> bool {
        self.adbed
    }

    pub fn members(&self) -> &[Arborescence] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Arborescence {
        &self.members[i]
    }

    /// Index of the arborescence containing this directed arc, if any.
    pub fn owner_of_arc(&self, g: &MultiGraph, arc: Arc) -> Option<usize> {
        let (u, _) = g.endpoints(arc.edge);
        let slot = if arc.tail == u { 0 } else { 1 };
        let i = self.owners[arc.edge.index()][slot]? as usize;
        if self.members[i].contains_arc(arc) {
            Some(i)
        } else {
            None
        }
    }

    /// Indices of arborescences using either direction of `e`.
    pub fn owners_of_edge(&self, e: EdgeId) -> impl Iterator<Item = usize> + '_ {
        self.owners[e.index()]
            .iter()
            .filter_map(|o| o.map(|i| i as usize))
    }
}

/// A single invariant violation found by `validate_arborescence_set`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WrongRoot {
        member: usize,
        found: VertexId,
    },
    RootHasOutArc {
        member: usize,
    },
    MissingOutArc {
        member: usize,
        vertex: VertexId,
    },
    ArcTailMismatch {
        member: usize,
        vertex: VertexId,
        arc: Arc,
    },
    ArcEdgeMismatch {
        member: usize,
        arc: Arc,
    },
    Cycle {
        member: usize,
        vertex: VertexId,
    },
    SharedArc {
        arc: Arc,
        members: (usize, usize),
    },
    SharedEdgeInHalf {
        edge: EdgeId,
        members: (usize, usize),
    },
}

/// Checks every structural invariant of an arborescence set against its graph.
/// Returns an empty list iff the set is valid; violations are data, not errors.
pub fn validate_arborescence_set(g: &MultiGraph, t: &ArborescenceSet) -> Vec<Violation> {
    let mut report = Vec::new();
    let d = g.destination();

    for (i, tree) in t.members().iter().enumerate() {
        if tree.root() != d {
            report.push(Violation::WrongRoot {
                member: i,
                found: tree.root(),
            });
        }
        if tree.out_arc(tree.root()).is_some() {
            report.push(Violation::RootHasOutArc { member: i });
        }
        for v in g.vertices() {
            if v == tree.root() {
                continue;
            }
            match tree.out_arc(v) {
                None => report.push(Violation::MissingOutArc { member: i, vertex: v }),
                Some(arc) => {
                    if arc.tail != v {
                        report.push(Violation::ArcTailMismatch {
                            member: i,
                            vertex: v,
                            arc,
                        });
                    }
                    let (a, b) = g.endpoints(arc.edge);
                    if (arc.tail, arc.head) != (a, b) && (arc.tail, arc.head) != (b, a) {
                        report.push(Violation::ArcEdgeMismatch { member: i, arc });
                    }
                }
            }
        }
        // Cycle / reachability check: walk up from every vertex.
        for v in g.vertices() {
            if tree.path_to_root(v).is_err() {
                report.push(Violation::Cycle { member: i, vertex: v });
                break;
            }
        }
    }

    // Arc-disjointness across all members.
    let mut seen_arcs: std::collections::HashMap<Arc, usize> = std::collections::HashMap::new();
    for (i, tree) in t.members().iter().enumerate() {
        for arc in tree.arcs() {
            if let Some(&j) = seen_arcs.get(&arc) {
                report.push(Violation::SharedArc {
                    arc,
                    members: (j, i),
                });
            } else {
                seen_arcs.insert(arc, i);
            }
        }
    }

    // Bipartite edge-disjointness: each half internally edge-disjoint.
    if t.adbed() {
        let k = t.k();
        let half = k / 2;
        let ranges = [(0, half), (half, 2 * half)];
        for (lo, hi) in ranges {
            let mut seen_edges: std::collections::HashMap<EdgeId, usize> =
                std::collections::HashMap::new();
            for i in lo..hi {
                let mut in_this: HashSet<EdgeId> = HashSet::new();
                for arc in t.member(i).arcs() {
                    in_this.insert(arc.edge);
                }
                for e in in_this {
                    if let Some(&j) = seen_edges.get(&e) {
                        report.push(Violation::SharedEdgeInHalf {
                            edge: e,
                            members: (j, i),
                        });
                    } else {
                        seen_edges.insert(e, i);
                    }
                }
            }
        }
    }

    report
}
