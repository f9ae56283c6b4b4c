use std::collections::HashMap;

use graph_core::{
    edge_connectivity, validate_arborescence_set, Arborescence, ArborescenceSet, Arc, MultiGraph,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::general::{extend_general, slot_of, DecomposeError};

/// One step of the inductive construction of k-connected multigraphs: every
/// k-connected graph arises from the 2-vertex k-parallel-edge graph by a
/// sequence of these operations, and the arborescence list is maintained
/// through each of them.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MaderOp {
    /// Add an edge between two existing vertices.
    AddEdge { u: String, v: String },
    /// Pinch k/2 edges with a fresh vertex: each edge {x,y} is replaced by
    /// the path x-z-y.
    PinchCeil { edges: Vec<i64> },
    /// Pinch k/2 edges with a fresh vertex z and additionally connect z to an
    /// existing vertex.
    PinchFloorPlusEdge { edges: Vec<i64>, attach: String },
    /// Pinch k/2 edges with a fresh z1, then k/2 current edges (not all
    /// incident to z1) with a fresh z2, and connect z1 to z2.
    DoublePinchPlusEdge { first: Vec<i64>, second: Vec<i64> },
}

#[derive(Debug, Error)]
pub enum MaderError {
    #[error("initial k must be an even integer >= 2, got {0}")]
    BadInitialK(usize),
    #[error("op {op}: expected {expected} distinct pinched edges, got {got}")]
    WrongArity {
        op: usize,
        expected: usize,
        got: usize,
    },
    #[error("op {op}: unknown edge id {id}")]
    UnknownEdge { op: usize, id: i64 },
    #[error("op {op}: unknown vertex {label:?}")]
    UnknownVertex { op: usize, label: String },
    #[error("op {op}: second pinch must not take all its edges at the first new vertex")]
    AllIncidentToFirst { op: usize },
    #[error("op {op} would drop connectivity to {found}, below the required {required}")]
    ConnectivityLost {
        op: usize,
        required: usize,
        found: usize,
    },
    #[error("op {op}: no valid reassignment of out-arcs at the new vertices exists")]
    CompletionFailed { op: usize },
    #[error("extension to an odd list failed: {0}")]
    OddExtension(#[from] DecomposeError),
}

/// Applies `ops` to the 2-vertex, `initial_k`-parallel-edge base graph,
/// carrying a list of k arc-disjoint arborescences whose two halves each stay
/// internally edge-disjoint. The result always passes the validator.
pub fn mader_build(
    initial_k: usize,
    ops: &[MaderOp],
) -> Result<(MultiGraph, ArborescenceSet), MaderError> {
    if initial_k < 2 || initial_k % 2 != 0 {
        return Err(MaderError::BadInitialK(initial_k));
    }
    let mut w = Work::base(initial_k);
    for (i, op) in ops.iter().enumerate() {
        w.apply(i, op)?;
    }
    Ok(w.freeze())
}

/// Even construction plus one extra arborescence found among the unused arcs,
/// giving 2m+1 members whose first two m-blocks are each edge-disjoint. The
/// graph must have been pushed above the even connectivity by add-edge ops.
pub fn mader_build_odd(
    initial_k: usize,
    ops: &[MaderOp],
    budget: u64,
) -> Result<(MultiGraph, ArborescenceSet), MaderError> {
    let (g, set) = mader_build(initial_k, ops)?;
    let extra = extend_general(&g, set.members(), 1, budget)?;
    let mut members = set.members().to_vec();
    members.extend(extra);
    let set = ArborescenceSet::new(&g, members, true);
    Ok((g, set))
}

struct Work {
    k: usize,
    labels: Vec<String>,
    /// Live edges as (u, v, stable external id).
    edges: Vec<(usize, usize, i64)>,
    /// Per tree: tail vertex -> (external edge id, head vertex).
    trees: Vec<HashMap<usize, (i64, usize)>>,
    next_ext: i64,
}

impl Work {
    fn base(k: usize) -> Self {
        let labels = vec!["z0".to_string(), "z1".to_string()];
        let edges: Vec<_> = (0..k).map(|j| (0usize, 1usize, j as i64)).collect();
        let trees = (0..k)
            .map(|j| {
                let mut t = HashMap::new();
                t.insert(1usize, (j as i64, 0usize));
                t
            })
            .collect();
        Work {
            k,
            labels,
            edges,
            trees,
            next_ext: k as i64,
        }
    }

    fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    fn edge_pos(&self, ext: i64) -> Option<usize> {
        self.edges.iter().position(|&(_, _, id)| id == ext)
    }

    fn apply(&mut self, op_index: usize, op: &MaderOp) -> Result<(), MaderError> {
        match op {
            MaderOp::AddEdge { u, v } => {
                let ui = self.vertex_by_label(u).ok_or_else(|| MaderError::UnknownVertex {
                    op: op_index,
                    label: u.clone(),
                })?;
                let vi = self.vertex_by_label(v).ok_or_else(|| MaderError::UnknownVertex {
                    op: op_index,
                    label: v.clone(),
                })?;
                let id = self.next_ext;
                self.next_ext += 1;
                self.edges.push((ui, vi, id));
            }
            MaderOp::PinchCeil { edges } => {
                let z = self.pinch(op_index, edges)?;
                self.complete(op_index, &[z])?;
            }
            MaderOp::PinchFloorPlusEdge { edges, attach } => {
                let a = self
                    .vertex_by_label(attach)
                    .ok_or_else(|| MaderError::UnknownVertex {
                        op: op_index,
                        label: attach.clone(),
                    })?;
                let z = self.pinch(op_index, edges)?;
                let id = self.next_ext;
                self.next_ext += 1;
                self.edges.push((z, a, id));
                self.complete(op_index, &[z])?;
            }
            MaderOp::DoublePinchPlusEdge { first, second } => {
                let z1 = self.pinch(op_index, first)?;
                if second
                    .iter()
                    .all(|&id| self.edge_pos(id).map_or(false, |p| {
                        let (u, v, _) = self.edges[p];
                        u == z1 || v == z1
                    }))
                {
                    return Err(MaderError::AllIncidentToFirst { op: op_index });
                }
                let z2 = self.pinch(op_index, second)?;
                let id = self.next_ext;
                self.next_ext += 1;
                self.edges.push((z1, z2, id));
                self.complete(op_index, &[z1, z2])?;
            }
        }
        self.check_connectivity(op_index)
    }

    /// Splits each listed edge {x,y} into x-z-y through a fresh vertex z,
    /// rerouting any arborescence arc over a pinched edge onto its half at
    /// the tail. The new vertex has no out-arcs yet in any tree.
    fn pinch(&mut self, op_index: usize, pinched: &[i64]) -> Result<usize, MaderError> {
        let expected = self.k / 2;
        let mut distinct = pinched.to_vec();
        distinct.sort();
        distinct.dedup();
        if distinct.len() != pinched.len() || pinched.len() != expected {
            return Err(MaderError::WrongArity {
                op: op_index,
                expected,
                got: pinched.len(),
            });
        }
        let z = self.labels.len();
        self.labels.push(format!("z{z}"));
        for &ext in pinched {
            let pos = self
                .edge_pos(ext)
                .ok_or(MaderError::UnknownEdge { op: op_index, id: ext })?;
            let (x, y, _) = self.edges.remove(pos);
            let half_x = self.next_ext;
            let half_y = self.next_ext + 1;
            self.next_ext += 2;
            self.edges.push((x, z, half_x));
            self.edges.push((z, y, half_y));
            for t in &mut self.trees {
                match t.get(&x) {
                    Some(&(id, head)) if id == ext && head == y => {
                        t.insert(x, (half_x, z));
                    }
                    _ => {}
                }
                match t.get(&y) {
                    Some(&(id, head)) if id == ext && head == x => {
                        t.insert(y, (half_y, z));
                    }
                    _ => {}
                }
            }
        }
        Ok(z)
    }

    /// Backtracking assignment of one out-arc per tree at each new vertex,
    /// subject to global arc-disjointness and per-half edge-disjointness; a
    /// candidate assignment is accepted only if the full list validates.
    fn complete(&mut self, op_index: usize, new_vs: &[usize]) -> Result<(), MaderError> {
        let (g, mut trees) = self.snapshot();
        let slots: Vec<(usize, usize)> = (0..self.k)
            .flat_map(|t| new_vs.iter().map(move |&z| (t, z)))
            .collect();
        let half = self.k / 2;
        // edge usage per half for the bipartite edge-disjointness constraint.
        let mut half_used: Vec<[bool; 2]> = vec![[false, false]; g.edge_count()];
        let mut arc_used: Vec<[bool; 2]> = vec![[false, false]; g.edge_count()];
        for (ti, t) in trees.iter().enumerate() {
            for arc in t.arcs() {
                arc_used[arc.edge.index()][slot_of(&g, arc)] = true;
                half_used[arc.edge.index()][ti / half] = true;
            }
        }
        if !assign(&g, &mut trees, &slots, 0, half, &mut arc_used, &mut half_used) {
            return Err(MaderError::CompletionFailed { op: op_index });
        }
        // Write the chosen arcs back in external-id space.
        for &(t, z) in &slots {
            let arc = trees[t]
                .out_arc(graph_core::VertexId(z as u32))
                .expect("assignment complete");
            self.trees[t].insert(z, (g.external_id(arc.edge), arc.head.index()));
        }
        Ok(())
    }

    fn check_connectivity(&self, op_index: usize) -> Result<(), MaderError> {
        let (g, trees) = self.snapshot();
        let set = ArborescenceSet::new(&g, trees, true);
        let report = validate_arborescence_set(&g, &set);
        debug_assert!(report.is_empty(), "op {op_index}: {report:?}");
        if !report.is_empty() {
            return Err(MaderError::CompletionFailed { op: op_index });
        }
        let found = edge_connectivity(&g);
        if found < self.k {
            return Err(MaderError::ConnectivityLost {
                op: op_index,
                required: self.k,
                found,
            });
        }
        Ok(())
    }

    fn snapshot(&self) -> (MultiGraph, Vec<Arborescence>) {
        let mut b = MultiGraph::builder();
        for label in &self.labels {
            b.vertex(label.clone());
        }
        for &(u, v, id) in &self.edges {
            b.edge_with_id(
                graph_core::VertexId(u as u32),
                graph_core::VertexId(v as u32),
                id,
            )
            .expect("work edges are well-formed");
        }
        let g = b.build(graph_core::VertexId(0)).expect("non-empty");
        let trees = self
            .trees
            .iter()
            .map(|t| {
                let mut a = Arborescence::new(g.destination(), g.vertex_count());
                for (&tail, &(ext, head)) in t {
                    let e = g.edge_by_external_id(ext).expect("live edge");
                    a.set_out(Arc::new(
                        e,
                        graph_core::VertexId(tail as u32),
                        graph_core::VertexId(head as u32),
                    ));
                }
                a
            })
            .collect();
        (g, trees)
    }

    fn freeze(&self) -> (MultiGraph, ArborescenceSet) {
        let (g, trees) = self.snapshot();
        let set = ArborescenceSet::new(&g, trees, true);
        (g, set)
    }
}

fn assign(
    g: &MultiGraph,
    trees: &mut [Arborescence],
    slots: &[(usize, usize)],
    at: usize,
    half: usize,
    arc_used: &mut [[bool; 2]],
    half_used: &mut [[bool; 2]],
) -> bool {
    if at == slots.len() {
        let set = ArborescenceSet::new(g, trees.to_vec(), true);
        return validate_arborescence_set(g, &set).is_empty();
    }
    let (t, z) = slots[at];
    let zv = graph_core::VertexId(z as u32);
    if trees[t].out_arc(zv).is_some() {
        // A reroute in phase one already gave this tree its out-arc at z.
        return assign(g, trees, slots, at + 1, half, arc_used, half_used);
    }
    let side = t / half;
    for &e in g.incident(zv) {
        let w = g.other_end(e, zv);
        let arc = Arc::new(e, zv, w);
        let slot = slot_of(g, arc);
        if arc_used[e.index()][slot] || half_used[e.index()][side] {
            continue;
        }
        // Cheap cycle guard: z must not be an ancestor of w in this tree.
        let mut cur = w;
        let mut steps = 0;
        let mut cyclic = false;
        while let Some(a) = trees[t].out_arc(cur) {
            if a.head == zv {
                cyclic = true;
                break;
            }
            cur = a.head;
            steps += 1;
            if steps > g.vertex_count() {
                cyclic = true;
                break;
            }
        }
        if cyclic {
            continue;
        }
        trees[t].set_out(arc);
        arc_used[e.index()][slot] = true;
        half_used[e.index()][side] = true;
        if assign(g, trees, slots, at + 1, half, arc_used, half_used) {
            return true;
        }
        trees[t].clear_out(zv);
        arc_used[e.index()][slot] = false;
        half_used[e.index()][side] = false;
    }
    false
}
