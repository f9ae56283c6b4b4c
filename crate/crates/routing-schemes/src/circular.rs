use std::collections::{BTreeSet, HashMap};

use graph_core::{Arc, ArborescenceSet};

use crate::{ForwardAction, Header, LocalView, SchemeError};

/// Compiled circular scheme: a cyclic ordering over a window of tree indices,
/// per-vertex start trees for originated packets, and optional reset arcs
/// that restart the cycle at a fixed tree when traversed.
#[derive(Clone, Debug)]
pub struct Circular {
    ordering: Vec<usize>,
    pos: Vec<Option<usize>>,
    start: Vec<usize>,
    reset: HashMap<Arc, usize>,
}

impl Circular {
    /// `ordering` must be a permutation of `0..w` for some window size
    /// `w <= k`; trees outside the window are never scheduled.
    pub fn new(
        k: usize,
        ordering: Vec<usize>,
        start: Vec<usize>,
        reset: HashMap<Arc, usize>,
    ) -> Result<Self, SchemeError> {
        let mut sorted = ordering.clone();
        sorted.sort_unstable();
        if sorted != (0..ordering.len()).collect::<Vec<_>>() || ordering.len() > k {
            return Err(SchemeError::BadOrdering(ordering));
        }
        let mut pos = vec![None; k];
        for (p, &t) in ordering.iter().enumerate() {
            pos[t] = Some(p);
        }
        let unscheduled = |t: usize| pos.get(t).copied().flatten().is_none();
        if start.iter().any(|&t| unscheduled(t)) || reset.values().any(|&t| unscheduled(t)) {
            return Err(SchemeError::BadOrdering(ordering));
        }
        Ok(Circular {
            ordering,
            pos,
            start,
            reset,
        })
    }

    /// Identity ordering over all trees, every vertex starting on the first.
    pub fn default_for(k: usize, n: usize) -> Self {
        Circular::new(k, (0..k).collect(), vec![0; n], HashMap::new())
            .expect("identity ordering is a permutation")
    }

    pub fn window(&self) -> usize {
        self.ordering.len()
    }

    fn position(&self, tree: usize) -> Option<usize> {
        self.pos.get(tree).copied().flatten()
    }

    /// Tries the out-arcs of the scheduled trees starting at `from_tree`,
    /// skipping failed ones in cyclic order. Every skipped tree is reported
    /// through `blocked` as (tree index, failed edge).
    fn scan(
        &self,
        t: &ArborescenceSet,
        view: &LocalView,
        from_tree: usize,
        pre_failed: &mut BTreeSet<graph_core::EdgeId>,
        blocked: &mut Vec<(usize, graph_core::EdgeId)>,
    ) -> ForwardAction {
        let w = self.ordering.len();
        let p0 = self.position(from_tree).expect("scheduled tree");
        for off in 0..w {
            let tree = self.ordering[(p0 + off) % w];
            let arc = t
                .member(tree)
                .out_arc(view.vertex)
                .expect("spanning arborescence");
            if view.is_active(arc.edge) {
                return ForwardAction::Forward {
                    arc,
                    header: Header::default(),
                };
            }
            pre_failed.insert(arc.edge);
            blocked.push((tree, arc.edge));
        }
        ForwardAction::Drop {
            distinct_failures: pre_failed.len(),
        }
    }
}

pub fn circular_decide(
    t: &ArborescenceSet,
    c: &Circular,
    view: &LocalView,
) -> Result<ForwardAction, SchemeError> {
    circular_decide_traced(t, c, view).map(|(action, _)| action)
}

/// As `circular_decide`, but also reports which trees the scan skipped over
/// and on which failed edge, for audits of the blocked-tree bookkeeping.
pub fn circular_decide_traced(
    t: &ArborescenceSet,
    c: &Circular,
    view: &LocalView,
) -> Result<(ForwardAction, Vec<(usize, graph_core::EdgeId)>), SchemeError> {
    if view.vertex == view.g.destination() {
        return Ok((ForwardAction::Deliver, Vec::new()));
    }
    let cur = match view.incoming {
        None => c.start[view.vertex.index()],
        Some(a) => match c.reset.get(&a) {
            Some(&target) => target,
            None => {
                let owner = t
                    .owner_of_arc(view.g, a)
                    .ok_or(SchemeError::IncomingNotInAnyTree(a))?;
                c.position(owner)
                    .map(|_| owner)
                    .ok_or(SchemeError::IncomingNotInAnyTree(a))?
            }
        },
    };
    let mut blocked = Vec::new();
    let action = c.scan(t, view, cur, &mut BTreeSet::new(), &mut blocked);
    Ok((action, blocked))
}

/// Originated packets ride the last arborescence; the first failed edge they
/// hit on it diverts them into the circular scheme over the remaining trees,
/// entered at the tree owning the reversed failed arc when there is one.
pub fn plus_one_decide(
    t: &ArborescenceSet,
    inner: &Circular,
    view: &LocalView,
) -> Result<ForwardAction, SchemeError> {
    let k = t.k();
    if k < 2 || inner.window() != k - 1 {
        return Err(SchemeError::WrongTreeCount {
            expected: k - 1,
            got: inner.window(),
        });
    }
    if view.vertex == view.g.destination() {
        return Ok(ForwardAction::Deliver);
    }
    let outer = k - 1;
    let cur = match view.incoming {
        None => outer,
        Some(a) => t
            .owner_of_arc(view.g, a)
            .ok_or(SchemeError::IncomingNotInAnyTree(a))?,
    };
    let mut failed = BTreeSet::new();
    let from_tree = if cur == outer {
        let arc = t
            .member(outer)
            .out_arc(view.vertex)
            .expect("spanning arborescence");
        if view.is_active(arc.edge) {
            return Ok(ForwardAction::Forward {
                arc,
                header: Header::default(),
            });
        }
        failed.insert(arc.edge);
        match t.owner_of_arc(view.g, arc.reversed()) {
            Some(rev) if rev < outer => rev,
            _ => inner.ordering[0],
        }
    } else {
        cur
    };
    Ok(inner.scan(t, view, from_tree, &mut failed, &mut Vec::new()))
}
