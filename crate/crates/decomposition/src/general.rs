use graph_core::{Arborescence, ArborescenceSet, Arc, EdgeId, MultiGraph, VertexId};
use thiserror::Error;

pub const DEFAULT_BUDGET: u64 = 200_000;

#[derive(Debug, Error)]
pub enum DecomposeError {
    #[error("graph connectivity {connectivity} is below the requested {requested}")]
    Infeasible {
        connectivity: usize,
        requested: usize,
    },
    #[error("search budget of {budget} decisions exhausted")]
    Budget {
        budget: u64,
        /// Deepest consistent prefix reached before giving up; the completed
        /// members are valid arborescences, the last one may be partial.
        partial: Vec<Arborescence>,
    },
    #[error("no arc-disjoint extension exists for the given prefix")]
    NoExtension,
}

/// Finds `k` pairwise arc-disjoint destination-rooted spanning arborescences
/// by backtracking over out-arc assignments, one tree at a time, rejecting
/// arcs that would close a cycle; every branch point re-checks that each
/// vertex still has enough residual arc-connectivity to the destination to
/// serve the trees it is not yet attached to.
pub fn decompose_general(g: &MultiGraph, k: usize) -> Result<ArborescenceSet, DecomposeError> {
    decompose_with_budget(g, k, DEFAULT_BUDGET)
}

pub fn decompose_with_budget(
    g: &MultiGraph,
    k: usize,
    budget: u64,
) -> Result<ArborescenceSet, DecomposeError> {
    let connectivity = graph_core::edge_connectivity(g);
    if connectivity < k {
        return Err(DecomposeError::Infeasible {
            connectivity,
            requested: k,
        });
    }
    let members = extend_general(g, &[], k, budget)?;
    Ok(ArborescenceSet::new(g, members, false))
}

/// Searches for `extra` additional spanning arborescences arc-disjoint from
/// each other and from `existing`. Returns only the new members.
pub fn extend_general(
    g: &MultiGraph,
    existing: &[Arborescence],
    extra: usize,
    budget: u64,
) -> Result<Vec<Arborescence>, DecomposeError> {
    let mut search = Search::new(g, existing, extra, budget);
    match search.run() {
        Outcome::Found => Ok(search.trees),
        Outcome::Exhausted => Err(DecomposeError::NoExtension),
        Outcome::OutOfBudget => Err(DecomposeError::Budget {
            budget,
            partial: search.best_partial,
        }),
    }
}

enum Outcome {
    Found,
    Exhausted,
    OutOfBudget,
}

struct Search<'g> {
    g: &'g MultiGraph,
    k: usize,
    trees: Vec<Arborescence>,
    covered: Vec<Vec<bool>>,
    covered_count: Vec<usize>,
    /// used[edge][slot]: slot 0 is the arc leaving the lower-indexed stored
    /// endpoint. Includes the arcs of the pre-existing trees.
    used: Vec<[bool; 2]>,
    decisions: u64,
    budget: u64,
    best_partial: Vec<Arborescence>,
    best_depth: usize,
}

impl<'g> Search<'g> {
    fn new(g: &'g MultiGraph, existing: &[Arborescence], extra: usize, budget: u64) -> Self {
        let d = g.destination();
        let n = g.vertex_count();
        let mut used = vec![[false, false]; g.edge_count()];
        for t in existing {
            for arc in t.arcs() {
                used[arc.edge.index()][slot_of(g, arc)] = true;
            }
        }
        let mut covered = vec![vec![false; n]; extra];
        for c in &mut covered {
            c[d.index()] = true;
        }
        Search {
            g,
            k: extra,
            trees: vec![Arborescence::new(d, n); extra],
            covered,
            covered_count: vec![1; extra],
            used,
            decisions: 0,
            budget,
            best_partial: Vec::new(),
            best_depth: 0,
        }
    }

    fn run(&mut self) -> Outcome {
        self.descend()
    }

    fn descend(&mut self) -> Outcome {
        let n = self.g.vertex_count();
        let Some(tree) = (0..self.k).find(|&i| self.covered_count[i] < n) else {
            return Outcome::Found;
        };
        self.decisions += 1;
        if self.decisions > self.budget {
            return Outcome::OutOfBudget;
        }
        if !self.flow_feasible() {
            return Outcome::Exhausted;
        }

        // Most constrained uncovered vertex of the current tree: fewest
        // candidate out-arcs into the covered region.
        let mut best: Option<(usize, Vec<Arc>)> = None;
        for v in self.g.vertices() {
            if self.covered[tree][v.index()] {
                continue;
            }
            let cands = self.candidates(tree, v);
            let score = cands.len();
            if score == 0 {
                return Outcome::Exhausted;
            }
            if best.as_ref().map_or(true, |(s, _)| score < *s) {
                best = Some((score, cands));
            }
            if score == 1 {
                break;
            }
        }
        let (_, cands) = best.expect("some vertex is uncovered");

        for arc in cands {
            self.place(tree, arc);
            match self.descend() {
                Outcome::Found => return Outcome::Found,
                Outcome::OutOfBudget => return Outcome::OutOfBudget,
                Outcome::Exhausted => self.unplace(tree, arc),
            }
        }
        Outcome::Exhausted
    }

    fn candidates(&self, tree: usize, v: VertexId) -> Vec<Arc> {
        let mut cands = Vec::new();
        for &e in self.g.incident(v) {
            let w = self.g.other_end(e, v);
            if self.chain_reaches(tree, w, v) {
                continue;
            }
            let arc = Arc::new(e, v, w);
            if !self.used[e.index()][slot_of(self.g, arc)] {
                cands.push(arc);
            }
        }
        cands
    }

    /// Whether following the out-arcs assigned so far in `tree` from `from`
    /// runs into `target` (which would close a cycle).
    fn chain_reaches(&self, tree: usize, from: VertexId, target: VertexId) -> bool {
        let mut cur = from;
        loop {
            if cur == target {
                return true;
            }
            match self.trees[tree].out_arc(cur) {
                Some(a) => cur = a.head,
                None => return false,
            }
        }
    }

    fn place(&mut self, tree: usize, arc: Arc) {
        self.trees[tree].set_out(arc);
        self.covered[tree][arc.tail.index()] = true;
        self.covered_count[tree] += 1;
        self.used[arc.edge.index()][slot_of(self.g, arc)] = true;
        let depth: usize = self.covered_count.iter().sum();
        if depth > self.best_depth {
            self.best_depth = depth;
            self.best_partial = self.trees.clone();
        }
    }

    fn unplace(&mut self, tree: usize, arc: Arc) {
        self.trees[tree].clear_out(arc.tail);
        self.covered[tree][arc.tail.index()] = false;
        self.covered_count[tree] -= 1;
        self.used[arc.edge.index()][slot_of(self.g, arc)] = false;
    }

    /// For every vertex v, the arcs still usable by trees not covering v
    /// (unused arcs plus arcs already inside those trees) must carry a flow of
    /// `#trees not covering v` from v to the destination.
    fn flow_feasible(&self) -> bool {
        let d = self.g.destination();
        for v in self.g.vertices() {
            if v == d {
                continue;
            }
            let open: Vec<usize> = (0..self.k)
                .filter(|&i| !self.covered[i][v.index()])
                .collect();
            if open.is_empty() {
                continue;
            }
            if self.maxflow_at_most(v, &open) < open.len() {
                return false;
            }
        }
        true
    }

    /// Max-flow from v to d over unused arcs and arcs owned by the trees in
    /// `open`, stopping once |open| units are found.
    fn maxflow_at_most(&self, v: VertexId, open: &[usize]) -> usize {
        let m = self.g.edge_count();
        let mut cap = vec![[0u8; 2]; m];
        for e in 0..m {
            for slot in 0..2 {
                if !self.used[e][slot] {
                    cap[e][slot] = 1;
                }
            }
        }
        for &i in open {
            for arc in self.trees[i].arcs() {
                cap[arc.edge.index()][slot_of(self.g, arc)] = 1;
            }
        }
        let d = self.g.destination();
        let need = open.len();
        let mut flow = 0;
        let mut prev: Vec<Option<(EdgeId, usize)>> = vec![None; self.g.vertex_count()];
        while flow < need {
            for p in prev.iter_mut() {
                *p = None;
            }
            let mut queue = std::collections::VecDeque::new();
            queue.push_back(v);
            prev[v.index()] = Some((EdgeId(u32::MAX), 0));
            'bfs: while let Some(x) = queue.pop_front() {
                for &e in self.g.incident(x) {
                    let y = self.g.other_end(e, x);
                    let slot = slot_of(self.g, Arc::new(e, x, y));
                    if cap[e.index()][slot] == 0 || prev[y.index()].is_some() {
                        continue;
                    }
                    prev[y.index()] = Some((e, slot));
                    if y == d {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
            if prev[d.index()].is_none() {
                break;
            }
            let mut cur = d;
            while cur != v {
                let (e, slot) = prev[cur.index()].unwrap();
                cap[e.index()][slot] -= 1;
                cap[e.index()][1 - slot] += 1;
                cur = self.g.other_end(e, cur);
            }
            flow += 1;
        }
        flow
    }
}

pub(crate) fn slot_of(g: &MultiGraph, arc: Arc) -> usize {
    let (u, _) = g.endpoints(arc.edge);
    if arc.tail == u {
        0
    } else {
        1
    }
}
