use std::collections::{HashMap, HashSet, VecDeque};

use graph_core::{Arborescence, ArborescenceSet, Arc, EdgeId, MultiGraph, VertexId};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::general::decompose_general;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TopologySpec {
    Clique {
        k: usize,
    },
    CompleteBipartite {
        a: usize,
        b: usize,
    },
    GeneralizedHypercube {
        i: usize,
        k: usize,
    },
    Clos {
        layers: usize,
        ports: usize,
    },
    TorusGrid {
        n: usize,
        m: usize,
    },
    NeverBounceGadget {
        k: usize,
        #[serde(default)]
        ring: Option<usize>,
    },
    CubeGadget,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error("construction failed: {0}")]
    Construction(String),
}

/// A benchmark scenario shipped with a gadget topology: the failure set it is
/// meant to be simulated under and the vertex packets originate from.
#[derive(Clone, Debug)]
pub struct GadgetBench {
    pub failures: Vec<EdgeId>,
    pub source: VertexId,
}

/// A constructed topology together with its arborescence set, the resilience
/// the construction is designed to deliver, per-arc reset annotations for
/// circular routing (arc -> arborescence index to restart from after the arc
/// is traversed), and optional extras specific to the kind.
pub struct Topology {
    pub graph: MultiGraph,
    pub set: ArborescenceSet,
    pub promised_resilience: usize,
    pub reset: HashMap<Arc, usize>,
    pub bench: Option<GadgetBench>,
    pub cycles: Option<[Vec<EdgeId>; 2]>,
}

pub fn build_topology(spec: &TopologySpec) -> Result<Topology, TopologyError> {
    match *spec {
        TopologySpec::Clique { k } => clique(k),
        TopologySpec::CompleteBipartite { a, b } => complete_bipartite(a, b),
        TopologySpec::GeneralizedHypercube { i, k } => hypercube(i, k),
        TopologySpec::Clos { layers, ports } => clos(layers, ports),
        TopologySpec::TorusGrid { n, m } => torus_grid(n, m),
        TopologySpec::NeverBounceGadget { k, ring } => never_bounce(k, ring.unwrap_or(2)),
        TopologySpec::CubeGadget => cube_gadget(),
    }
}

fn arc_between(g: &MultiGraph, from: VertexId, to: VertexId) -> Arc {
    let e = g
        .edge_between(from, to)
        .unwrap_or_else(|| panic!("no edge between {from:?} and {to:?}"));
    Arc::new(e, from, to)
}

fn plain(g: MultiGraph, members: Vec<Arborescence>, promised: usize) -> Topology {
    let set = ArborescenceSet::new(&g, members, false);
    Topology {
        graph: g,
        set,
        promised_resilience: promised,
        reset: HashMap::new(),
        bench: None,
        cycles: None,
    }
}

fn clique(k: usize) -> Result<Topology, TopologyError> {
    if k < 1 {
        return Err(TopologyError::Unsupported("clique needs k >= 1".into()));
    }
    let mut b = MultiGraph::builder();
    let d = b.vertex("d");
    let vs: Vec<VertexId> = (1..=k).map(|i| b.vertex(format!("v{i}"))).collect();
    let all: Vec<VertexId> = std::iter::once(d).chain(vs.iter().copied()).collect();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            b.edge(all[i], all[j]).expect("distinct vertices");
        }
    }
    let g = b.build(d).expect("nonempty graph");
    let mut members = Vec::with_capacity(k);
    for i in 0..k {
        let mut t = Arborescence::new(d, g.vertex_count());
        t.set_out(arc_between(&g, vs[i], d));
        for j in 0..k {
            if j != i {
                t.set_out(arc_between(&g, vs[j], vs[i]));
            }
        }
        members.push(t);
    }
    Ok(plain(g, members, k.saturating_sub(1)))
}

fn complete_bipartite(a: usize, b_count: usize) -> Result<Topology, TopologyError> {
    if a < 1 || b_count < 1 {
        return Err(TopologyError::Unsupported(
            "bipartite sides must be positive".into(),
        ));
    }
    let mut b = MultiGraph::builder();
    let d = b.vertex("d");
    let side_a: Vec<VertexId> = (1..=a).map(|i| b.vertex(format!("a{i}"))).collect();
    let side_b: Vec<VertexId> = (1..=b_count).map(|i| b.vertex(format!("b{i}"))).collect();
    for &x in std::iter::once(&d).chain(side_a.iter()) {
        for &y in &side_b {
            b.edge(x, y).expect("distinct vertices");
        }
    }
    let g = b.build(d).expect("nonempty graph");
    let k = a.min(b_count);
    let mut members = Vec::with_capacity(k);
    for i in 0..k {
        let mut t = Arborescence::new(d, g.vertex_count());
        for (tail, head) in bipartite_block_arcs(i, d, &side_a, &side_b) {
            t.set_out(arc_between(&g, tail, head));
        }
        members.push(t);
    }
    Ok(plain(g, members, k.saturating_sub(1)))
}

/// Arc list of the i-th local arborescence of a complete bipartite block
/// rooted at `dest`: `dest` sits on the same side as `side_a`, which excludes
/// it. Requires i < min(|side_a|, |side_b|).
fn bipartite_block_arcs(
    i: usize,
    dest: VertexId,
    side_a: &[VertexId],
    side_b: &[VertexId],
) -> Vec<(VertexId, VertexId)> {
    let mut arcs = vec![(side_b[i], dest)];
    for &x in side_a {
        arcs.push((x, side_b[i]));
    }
    for (j, &y) in side_b.iter().enumerate() {
        if j != i {
            arcs.push((y, side_a[i]));
        }
    }
    arcs
}

struct HLevel {
    verts: Vec<String>,
    d: String,
    /// trees[t]: tail label -> head label.
    trees: Vec<HashMap<String, String>>,
    /// n[t]: the unique neighbor of d whose arc into d lies in tree t.
    n: Vec<String>,
    /// Arcs that restart circular routing at the first tree when traversed.
    resets: HashSet<(String, String)>,
}

fn h_base(k: usize) -> HLevel {
    let verts: Vec<String> = (0..=k).map(|m| m.to_string()).collect();
    let mut trees = Vec::with_capacity(k);
    for j in 1..=k {
        let mut t = HashMap::new();
        t.insert(verts[j].clone(), verts[0].clone());
        for m in 1..=k {
            if m != j {
                t.insert(verts[m].clone(), verts[j].clone());
            }
        }
        trees.push(t);
    }
    HLevel {
        d: verts[0].clone(),
        n: verts[1..].to_vec(),
        verts,
        trees,
        resets: HashSet::new(),
    }
}

fn h_prefix(level: &HLevel, digit: char) -> HLevel {
    let p = |s: &String| format!("{digit}{s}");
    HLevel {
        verts: level.verts.iter().map(p).collect(),
        d: p(&level.d),
        trees: level
            .trees
            .iter()
            .map(|t| t.iter().map(|(a, b)| (p(a), p(b))).collect())
            .collect(),
        n: level.n.iter().map(p).collect(),
        resets: level.resets.iter().map(|(a, b)| (p(a), p(b))).collect(),
    }
}

/// Glues a fresh copy onto the aggregate of the previous copies. `n_base` is
/// the tree count of a single copy; the aggregate has `n_base + copies - 1`
/// trees and gains one more.
fn h_combine(agg: HLevel, fresh: HLevel, n_base: usize) -> HLevel {
    let c_agg = agg.trees.len();
    let d1 = fresh.d.clone();
    let agg_d = agg.d.clone();
    let agg_verts = agg.verts;
    let mut trees = agg.trees;
    let mut resets = agg.resets;
    resets.extend(fresh.resets.iter().cloned());
    let sibling_in_first = |v: &String| format!("0{}", &v[1..]);
    let fresh_digit = d1.chars().next().expect("nonempty label");

    // Trees 1..n_base-1: the fresh copy routes through its own tree, except
    // its root-neighbor crosses over to the first copy and the fresh root
    // routes back to that neighbor.
    for (j, tree) in trees.iter_mut().enumerate().take(n_base - 1) {
        let nj = fresh.n[j].clone();
        for (tail, head) in &fresh.trees[j] {
            if *tail != nj {
                tree.insert(tail.clone(), head.clone());
            }
        }
        let bridge = sibling_in_first(&nj);
        tree.insert(nj.clone(), bridge.clone());
        resets.insert((nj.clone(), bridge));
        tree.insert(d1.clone(), nj);
    }

    // Middle trees: every fresh vertex drops directly into one of the other
    // previous copies.
    for (j, tree) in trees
        .iter_mut()
        .enumerate()
        .take(c_agg - 1)
        .skip(n_base - 1)
    {
        let p = char::from_digit((j + 2 - n_base) as u32, 10).expect("copy digit");
        for v in &fresh.verts {
            let head = format!("{p}{}", &v[1..]);
            tree.insert(v.clone(), head.clone());
            resets.insert((v.clone(), head));
        }
    }

    // Last aggregate tree: fresh vertices drop into the first copy, except
    // the distinguished neighbors funnel through the fresh root.
    {
        let skip: HashSet<&String> = std::iter::once(&d1)
            .chain(fresh.n[..n_base - 1].iter())
            .collect();
        let tree = &mut trees[c_agg - 1];
        for v in &fresh.verts {
            if skip.contains(v) {
                continue;
            }
            let head = sibling_in_first(v);
            tree.insert(v.clone(), head.clone());
            resets.insert((v.clone(), head));
        }
        for nj in &fresh.n[..n_base - 1] {
            tree.insert(nj.clone(), d1.clone());
        }
        tree.insert(d1.clone(), fresh.n[n_base - 1].clone());
    }

    // New tree: the fresh copy's n_base-th tree plus every old vertex lifting
    // into its fresh sibling; the fresh root alone crosses back down, without
    // a reset.
    {
        let mut last = fresh.trees[n_base - 1].clone();
        for v in &agg_verts {
            if *v != agg_d {
                last.insert(v.clone(), format!("{fresh_digit}{}", &v[1..]));
            }
        }
        last.insert(d1.clone(), agg_d.clone());
        trees.push(last);
    }

    let mut n = agg.n;
    n.push(d1);
    let mut verts = agg_verts;
    verts.extend(fresh.verts);
    HLevel {
        verts,
        d: agg_d,
        trees,
        n,
        resets,
    }
}

fn h_build(i: usize, k: usize) -> HLevel {
    if i == 1 {
        return h_base(k);
    }
    let sub = h_build(i - 1, k);
    let n_base = sub.trees.len();
    let mut agg = h_prefix(&sub, '0');
    for l in 2..=k + 1 {
        let digit = char::from_digit((l - 1) as u32, 10).expect("copy digit");
        let fresh = h_prefix(&sub, digit);
        agg = h_combine(agg, fresh, n_base);
    }
    agg
}

fn hypercube(i: usize, k: usize) -> Result<Topology, TopologyError> {
    if i < 1 || k < 1 || k > 9 {
        return Err(TopologyError::Unsupported(
            "hypercube needs i >= 1 and 1 <= k <= 9".into(),
        ));
    }
    let level = h_build(i, k);
    let mut b = MultiGraph::builder();
    let ids: Vec<VertexId> = level.verts.iter().map(|v| b.vertex(v.clone())).collect();
    for x in 0..level.verts.len() {
        for y in x + 1..level.verts.len() {
            let diff = level.verts[x]
                .chars()
                .zip(level.verts[y].chars())
                .filter(|(a, c)| a != c)
                .count();
            if diff == 1 {
                b.edge(ids[x], ids[y]).expect("distinct vertices");
            }
        }
    }
    let by_label: HashMap<&String, VertexId> =
        level.verts.iter().zip(ids.iter().copied()).collect();
    let d = by_label[&level.d];
    let g = b.build(d).expect("nonempty graph");
    let mut members = Vec::with_capacity(level.trees.len());
    for t in &level.trees {
        let mut arb = Arborescence::new(d, g.vertex_count());
        for (tail, head) in t {
            arb.set_out(arc_between(&g, by_label[tail], by_label[head]));
        }
        members.push(arb);
    }
    let reset: HashMap<Arc, usize> = level
        .resets
        .iter()
        .map(|(tail, head)| (arc_between(&g, by_label[tail], by_label[head]), 0))
        .collect();
    let promised = i * k - 1;
    let set = ArborescenceSet::new(&g, members, false);
    Ok(Topology {
        graph: g,
        set,
        promised_resilience: promised,
        reset,
        bench: None,
        cycles: None,
    })
}

fn clos(layers: usize, ports: usize) -> Result<Topology, TopologyError> {
    let k = ports;
    if k < 2 {
        return Err(TopologyError::Unsupported("clos needs ports >= 2".into()));
    }
    match layers {
        2 => {
            let mut t = complete_bipartite(k - 1, k)?;
            t.promised_resilience = k - 2;
            Ok(t)
        }
        3 => clos_three(k),
        _ => Err(TopologyError::Unsupported(
            "clos supports 2 or 3 layers".into(),
        )),
    }
}

/// Three layers: k top switches, k groups of k middle switches, k groups of k
/// leaves. Every middle links to every top; middle group g links completely
/// to leaf group g. The destination is a leaf; each vertex takes its out-arcs
/// from the bipartite block in which it routes closer to the destination.
fn clos_three(k: usize) -> Result<Topology, TopologyError> {
    let mut b = MultiGraph::builder();
    let tops: Vec<VertexId> = (0..k).map(|j| b.vertex(format!("t{j}"))).collect();
    let mids: Vec<Vec<VertexId>> = (0..k)
        .map(|g| (0..k).map(|j| b.vertex(format!("m{g}_{j}"))).collect())
        .collect();
    let leaves: Vec<Vec<VertexId>> = (0..k)
        .map(|g| (0..k).map(|j| b.vertex(format!("l{g}_{j}"))).collect())
        .collect();
    for grp in &mids {
        for &m in grp {
            for &t in &tops {
                b.edge(m, t).expect("distinct vertices");
            }
        }
    }
    for g in 0..k {
        for &m in &mids[g] {
            for &l in &leaves[g] {
                b.edge(m, l).expect("distinct vertices");
            }
        }
    }
    let d = leaves[0][0];
    let graph = b.build(d).expect("nonempty graph");

    // Per-block bipartite sides (destination excluded from its side).
    let home_a: Vec<VertexId> = leaves[0][1..].to_vec();
    let home_b: Vec<VertexId> = mids[0].clone();
    let core_a: Vec<VertexId> = mids
        .iter()
        .flatten()
        .copied()
        .filter(|&v| v != mids[0][0])
        .collect();
    let core_b: Vec<VertexId> = tops.clone();

    let trees = k - 1;
    let mut members = Vec::with_capacity(trees);
    for i in 0..trees {
        let mut arcs: HashMap<VertexId, VertexId> = HashMap::new();
        // Home block of the destination: its leaf group and middle group.
        for (tail, head) in bipartite_block_arcs(i, d, &home_a, &home_b) {
            arcs.insert(tail, head);
        }
        // Core block: middles and tops route toward the first middle of the
        // destination's group; middles of that group keep their home arcs.
        for (tail, head) in bipartite_block_arcs(i, mids[0][0], &core_a, &core_b) {
            if mids[0].contains(&tail) {
                continue;
            }
            arcs.insert(tail, head);
        }
        // Leaf groups away from the destination route toward the first
        // middle of their own group; only the leaves take arcs here.
        for g in 1..k {
            let block_a: Vec<VertexId> = mids[g][1..].to_vec();
            for (tail, head) in bipartite_block_arcs(i, mids[g][0], &block_a, &leaves[g]) {
                if leaves[g].contains(&tail) {
                    arcs.insert(tail, head);
                }
            }
        }
        let mut t = Arborescence::new(d, graph.vertex_count());
        for (tail, head) in arcs {
            t.set_out(arc_between(&graph, tail, head));
        }
        members.push(t);
    }
    Ok(plain(graph, members, trees.saturating_sub(1)))
}

fn torus_grid(n: usize, m: usize) -> Result<Topology, TopologyError> {
    if n < 3 || m < 3 {
        return Err(TopologyError::Unsupported("grid needs n, m >= 3".into()));
    }
    let mut b = MultiGraph::builder();
    let at: Vec<Vec<VertexId>> = (0..n)
        .map(|r| (0..m).map(|c| b.vertex(format!("x{r}_{c}"))).collect())
        .collect();
    for r in 0..n {
        for c in 0..m {
            b.edge(at[r][c], at[r][(c + 1) % m]).expect("simple grid");
            b.edge(at[r][c], at[(r + 1) % n][c]).expect("simple grid");
        }
    }
    let d = at[0][0];
    let g = b.build(d).expect("nonempty graph");
    let cycles = two_hamiltonian_cycles(&g).ok_or_else(|| {
        TopologyError::Construction(format!("no Hamiltonian cycle split for {n}x{m} torus"))
    })?;
    let mut members = Vec::with_capacity(4);
    for edges in &cycles {
        let order = cycle_order(&g, edges, d);
        let nv = order.len();
        let mut fwd = Arborescence::new(d, g.vertex_count());
        let mut bwd = Arborescence::new(d, g.vertex_count());
        for i in 1..nv {
            let (v, e_next) = order[i];
            let (next, _) = order[(i + 1) % nv];
            fwd.set_out(Arc::new(e_next, v, next));
            let (prev, e_prev) = order[i - 1];
            bwd.set_out(Arc::new(e_prev, v, prev));
        }
        members.push(fwd);
        members.push(bwd);
    }
    let set = ArborescenceSet::new(&g, members, false);
    Ok(Topology {
        graph: g,
        set,
        promised_resilience: 3,
        reset: HashMap::new(),
        bench: None,
        cycles: Some(cycles),
    })
}

/// Splits the edges of a 4-regular graph into two Hamiltonian cycles by
/// backtracking 2-coloring with forced-move propagation.
fn two_hamiltonian_cycles(g: &MultiGraph) -> Option<[Vec<EdgeId>; 2]> {
    let mut s = CycleSplit {
        g,
        color: vec![None; g.edge_count()],
        counts: vec![[0u8; 2]; g.vertex_count()],
    };
    if !s.solve() {
        return None;
    }
    let mut out = [Vec::new(), Vec::new()];
    for e in g.edges() {
        out[s.color[e.index()].expect("fully colored") as usize].push(e);
    }
    Some(out)
}

struct CycleSplit<'g> {
    g: &'g MultiGraph,
    color: Vec<Option<u8>>,
    counts: Vec<[u8; 2]>,
}

impl CycleSplit<'_> {
    fn solve(&mut self) -> bool {
        // Prefer an uncolored edge touching an already-constrained vertex.
        let pick = self
            .g
            .edges()
            .filter(|e| self.color[e.index()].is_none())
            .max_by_key(|&e| {
                let (u, v) = self.g.endpoints(e);
                let cu = self.counts[u.index()];
                let cv = self.counts[v.index()];
                (cu[0] + cu[1]).max(cv[0] + cv[1])
            });
        let Some(e) = pick else {
            return self.is_hamiltonian(0) && self.is_hamiltonian(1);
        };
        for c in [0u8, 1u8] {
            if let Some(trail) = self.try_assign(e, c) {
                if self.solve() {
                    return true;
                }
                self.undo(trail);
            }
        }
        false
    }

    fn try_assign(&mut self, e: EdgeId, c: u8) -> Option<Vec<EdgeId>> {
        let mut trail = Vec::new();
        let mut queue = vec![(e, c)];
        while let Some((e, c)) = queue.pop() {
            match self.color[e.index()] {
                Some(x) if x == c => continue,
                Some(_) => {
                    self.undo(trail);
                    return None;
                }
                None => {}
            }
            let (u, v) = self.g.endpoints(e);
            if self.counts[u.index()][c as usize] == 2
                || self.counts[v.index()][c as usize] == 2
                || self.closes_short_cycle(e, c)
            {
                self.undo(trail);
                return None;
            }
            self.color[e.index()] = Some(c);
            self.counts[u.index()][c as usize] += 1;
            self.counts[v.index()][c as usize] += 1;
            trail.push(e);
            for w in [u, v] {
                if self.counts[w.index()][c as usize] == 2 {
                    for &f in self.g.incident(w) {
                        if self.color[f.index()].is_none() {
                            queue.push((f, 1 - c));
                        }
                    }
                }
            }
        }
        Some(trail)
    }

    fn undo(&mut self, trail: Vec<EdgeId>) {
        for e in trail {
            let c = self.color[e.index()].take().expect("was assigned") as usize;
            let (u, v) = self.g.endpoints(e);
            self.counts[u.index()][c] -= 1;
            self.counts[v.index()][c] -= 1;
        }
    }

    /// Would coloring `e` with `c` close a cycle missing some vertex?
    fn closes_short_cycle(&self, e: EdgeId, c: u8) -> bool {
        let (u, v) = self.g.endpoints(e);
        let mut seen = vec![false; self.g.vertex_count()];
        let mut queue = VecDeque::from([u]);
        seen[u.index()] = true;
        let mut size = 1;
        while let Some(x) = queue.pop_front() {
            for &f in self.g.incident(x) {
                if f == e || self.color[f.index()] != Some(c) {
                    continue;
                }
                let y = self.g.other_end(f, x);
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    size += 1;
                    queue.push_back(y);
                }
            }
        }
        seen[v.index()] && size < self.g.vertex_count()
    }

    fn is_hamiltonian(&self, c: u8) -> bool {
        let mut seen = vec![false; self.g.vertex_count()];
        let mut queue = VecDeque::from([self.g.destination()]);
        seen[self.g.destination().index()] = true;
        let mut size = 1;
        while let Some(x) = queue.pop_front() {
            for &f in self.g.incident(x) {
                if self.color[f.index()] != Some(c) {
                    continue;
                }
                let y = self.g.other_end(f, x);
                if !seen[y.index()] {
                    seen[y.index()] = true;
                    size += 1;
                    queue.push_back(y);
                }
            }
        }
        size == self.g.vertex_count()
    }
}

/// Orders a cycle's vertices starting from `start`; each entry pairs a vertex
/// with the cycle edge leading to the next entry (wrapping to `start`).
fn cycle_order(g: &MultiGraph, edges: &[EdgeId], start: VertexId) -> Vec<(VertexId, EdgeId)> {
    let in_cycle: HashSet<EdgeId> = edges.iter().copied().collect();
    let mut order = Vec::with_capacity(g.vertex_count());
    let mut prev_edge: Option<EdgeId> = None;
    let mut cur = start;
    loop {
        let e = g
            .incident(cur)
            .iter()
            .copied()
            .find(|f| in_cycle.contains(f) && Some(*f) != prev_edge)
            .expect("cycle vertex has two cycle edges");
        order.push((cur, e));
        cur = g.other_end(e, cur);
        prev_edge = Some(e);
        if cur == start {
            break;
        }
    }
    order
}

/// Randomized-routing benchmark gadget with 2k arborescences. Under the
/// shipped failure set every internal vertex keeps exactly k-1 live out-arcs
/// while a uniform re-sampling walk started on a uniformly random
/// arborescence needs (k-1)^2 expected switches to deliver.
fn never_bounce(k: usize, ring: usize) -> Result<Topology, TopologyError> {
    if k < 3 {
        return Err(TopologyError::Unsupported("gadget needs k >= 3".into()));
    }
    if ring < 2 || ring % 2 != 0 {
        return Err(TopologyError::Unsupported(
            "gadget ring size must be even and >= 2".into(),
        ));
    }
    let kk = 2 * k;
    let mut b = MultiGraph::builder();
    let s = b.vertex("s");
    let u = b.vertex("u");
    let w: Vec<VertexId> = (0..ring).map(|j| b.vertex(format!("w{j}"))).collect();
    let d = b.vertex("d");

    let t_a = 0;
    let t_r = k - 1;
    let s_first = k;
    let t_b1 = 2 * k - 2;
    let t_b2 = 2 * k - 1;

    let mut failures: Vec<EdgeId> = Vec::new();
    let mut arcs: Vec<Vec<(EdgeId, VertexId, VertexId)>> = vec![Vec::new(); kk];
    let edge =
        |b: &mut graph_core::GraphBuilder, x: VertexId, y: VertexId| b.edge(x, y).expect("edge");

    // Source out-arcs: a live parallel edge to u per tree, so a bounce chain
    // at u is reachable from every starting arborescence.
    for t in 0..kk {
        let e = edge(&mut b, s, u);
        arcs[t].push((e, s, u));
    }

    // Deliverer: straight to d from u, dead ends elsewhere.
    let e_ud = edge(&mut b, u, d);
    arcs[t_a].push((e_ud, u, d));
    let z0 = edge(&mut b, u, w[0]);
    failures.push(z0);
    arcs[t_a].push((z0, w[0], u));
    let z1 = edge(&mut b, u, w[1]);
    failures.push(z1);
    arcs[t_a].push((z1, w[1], u));
    for &wj in &w[2..] {
        let e = edge(&mut b, wj, d);
        failures.push(e);
        arcs[t_a].push((e, wj, d));
    }

    // Feeder group: live from u onto the ring, advancing on odd positions.
    for t in 1..=k - 2 {
        let e = edge(&mut b, u, w[0]);
        arcs[t].push((e, u, w[0]));
        for j in 0..ring {
            if j % 2 == 0 {
                let e = edge(&mut b, w[j], d);
                failures.push(e);
                arcs[t].push((e, w[j], d));
            } else {
                let e = edge(&mut b, w[j], w[(j + 1) % ring]);
                arcs[t].push((e, w[j], w[(j + 1) % ring]));
            }
        }
    }

    // Returner: live from every ring vertex back to u, blocked at u.
    for &wj in &w {
        let e = edge(&mut b, wj, u);
        arcs[t_r].push((e, wj, u));
    }
    let c_r = edge(&mut b, u, d);
    failures.push(c_r);
    arcs[t_r].push((c_r, u, d));

    // Blocked group: dead at u, advancing on even ring positions.
    let mut m0 = None;
    let mut m1 = None;
    for m in 0..=k - 3 {
        let t = s_first + m;
        match m {
            0 => {
                let e = edge(&mut b, u, w[0]);
                failures.push(e);
                arcs[t].push((e, u, w[0]));
                m0 = Some(e);
            }
            1 => {
                let e = edge(&mut b, u, w[1]);
                failures.push(e);
                arcs[t].push((e, u, w[1]));
                m1 = Some(e);
            }
            _ => {
                let e = edge(&mut b, u, d);
                failures.push(e);
                arcs[t].push((e, u, d));
            }
        }
        for j in 0..ring {
            if j % 2 == 0 {
                let e = edge(&mut b, w[j], w[(j + 1) % ring]);
                arcs[t].push((e, w[j], w[(j + 1) % ring]));
            } else {
                let e = edge(&mut b, w[j], d);
                failures.push(e);
                arcs[t].push((e, w[j], d));
            }
        }
    }

    // Bounce targets: each reuses a dead edge at u in the direction its
    // partner left free, so a bounce at u chains into the deliverer.
    arcs[t_b1].push((z0, u, w[0]));
    match m1 {
        Some(e) => arcs[t_b1].push((e, w[1], u)),
        None => {
            let e = edge(&mut b, w[1], d);
            failures.push(e);
            arcs[t_b1].push((e, w[1], d));
        }
    }
    for (j, &wj) in w.iter().enumerate() {
        if j == 1 {
            continue;
        }
        let e = edge(&mut b, wj, d);
        failures.push(e);
        arcs[t_b1].push((e, wj, d));
    }

    arcs[t_b2].push((z1, u, w[1]));
    arcs[t_b2].push((m0.expect("first blocked tree exists"), w[0], u));
    for (j, &wj) in w.iter().enumerate() {
        if j == 0 {
            continue;
        }
        let e = edge(&mut b, wj, d);
        failures.push(e);
        arcs[t_b2].push((e, wj, d));
    }

    let g = b.build(d).expect("nonempty graph");
    let mut members = Vec::with_capacity(kk);
    for tree_arcs in arcs {
        let mut t = Arborescence::new(d, g.vertex_count());
        for (e, tail, head) in tree_arcs {
            t.set_out(Arc::new(e, tail, head));
        }
        members.push(t);
    }
    let set = ArborescenceSet::new(&g, members, false);
    Ok(Topology {
        graph: g,
        set,
        promised_resilience: 0,
        reset: HashMap::new(),
        bench: Some(GadgetBench {
            failures,
            source: s,
        }),
        cycles: None,
    })
}

/// The 3-regular, 3-connected counterexample graph (a 3-cube) with a general
/// decomposition into 3 arborescences.
fn cube_gadget() -> Result<Topology, TopologyError> {
    let mut b = MultiGraph::builder();
    let names = ["d", "a", "b", "c", "o", "x", "y", "z"];
    let ids: HashMap<&str, VertexId> = names.iter().map(|&n| (n, b.vertex(n))).collect();
    let adjacency = [
        ("d", "a"),
        ("d", "b"),
        ("d", "c"),
        ("o", "x"),
        ("o", "y"),
        ("o", "z"),
        ("a", "y"),
        ("a", "z"),
        ("b", "x"),
        ("b", "z"),
        ("c", "x"),
        ("c", "y"),
    ];
    for (p, q) in adjacency {
        b.edge(ids[p], ids[q]).expect("distinct vertices");
    }
    let g = b.build(ids["d"]).expect("nonempty graph");
    let set = decompose_general(&g, 3)
        .map_err(|e| TopologyError::Construction(format!("cube gadget decomposition: {e}")))?;
    Ok(Topology {
        graph: g,
        set,
        promised_resilience: 0,
        reset: HashMap::new(),
        bench: None,
        cycles: None,
    })
}
