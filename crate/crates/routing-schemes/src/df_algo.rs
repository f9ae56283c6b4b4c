use std::collections::{BTreeSet, HashMap};

use graph_core::{ArborescenceSet, Arc, EdgeId, MultiGraph};

use crate::{dfs_traversal, ForwardAction, Header, LocalView, SchemeError};

/// Indices of the trees using the two directions of `e`, as an ordered pair
/// (lower, higher); a single owner fills both slots.
pub fn tree_indices_of_edge(t: &ArborescenceSet, e: EdgeId) -> Result<(usize, usize), SchemeError> {
    let owners: Vec<usize> = t.owners_of_edge(e).collect();
    match owners.as_slice() {
        [] => Err(SchemeError::EdgeNotInAnyTree(e)),
        &[i] => Ok((i, i)),
        &[i, j] => Ok((i.min(j), i.max(j))),
        _ => unreachable!("an edge has two directions"),
    }
}

/// Circular canonical routing that, on a failed edge shared with another
/// tree, bounces onto that tree's depth-first walk; a second failure while
/// walking backtracks along the inverse walk to the original failed edge and
/// resumes the circular scan at the next tree. Three header bits (rm, h)
/// carry which of the walks is in use and which co-owner of the last edge.
#[derive(Clone, Debug)]
pub struct DfAlgo {
    r_next: Vec<HashMap<Arc, Arc>>,
    rinv_next: Vec<HashMap<Arc, Arc>>,
}

fn successor_map(walk: &[Arc]) -> HashMap<Arc, Arc> {
    walk.windows(2).map(|w| (w[0], w[1])).collect()
}

impl DfAlgo {
    pub fn new(t: &ArborescenceSet) -> Self {
        let mut r_next = Vec::with_capacity(t.k());
        let mut rinv_next = Vec::with_capacity(t.k());
        for tree in t.members() {
            let (r, rinv) = dfs_traversal(tree);
            r_next.push(successor_map(&r));
            rinv_next.push(successor_map(&rinv));
        }
        DfAlgo { r_next, rinv_next }
    }

    fn h_for(t: &ArborescenceSet, tree: usize, e: EdgeId) -> Result<u8, SchemeError> {
        let (_, hi) = tree_indices_of_edge(t, e)?;
        Ok(u8::from(tree == hi))
    }

    fn tree_given_h(t: &ArborescenceSet, h: u8, e: EdgeId) -> Result<usize, SchemeError> {
        let (lo, hi) = tree_indices_of_edge(t, e)?;
        Ok(if h == 1 { hi } else { lo })
    }

    /// Tree index encoded by (rm, h) and the last arc.
    fn tree_index(
        &self,
        g: &MultiGraph,
        t: &ArborescenceSet,
        header: Header,
        arc: Arc,
    ) -> Result<usize, SchemeError> {
        if header.rm == 0 {
            t.owner_of_arc(g, arc)
                .ok_or(SchemeError::IncomingNotInAnyTree(arc))
        } else {
            Self::tree_given_h(t, header.h, arc.edge)
        }
    }

    /// The arc the walk of `tree` takes after `arc`, under mode `rm`.
    fn next_arc(&self, t: &ArborescenceSet, rm: u8, arc: Arc, tree: usize) -> Option<Arc> {
        match rm {
            0 => t.member(tree).out_arc(arc.head),
            1 => self.r_next[tree].get(&arc).copied(),
            _ => self.rinv_next[tree].get(&arc).copied(),
        }
    }

    pub fn decide(
        &self,
        t: &ArborescenceSet,
        view: &LocalView,
    ) -> Result<ForwardAction, SchemeError> {
        if !view.header.is_valid() {
            return Err(SchemeError::BadHeader {
                rm: view.header.rm,
                h: view.header.h,
            });
        }
        if view.vertex == view.g.destination() {
            return Ok(ForwardAction::Deliver);
        }
        let k = t.k();
        // Candidate next arc out of the current vertex, before failures.
        let (mut rm, mut tree, mut cand) = match view.incoming {
            None => (0u8, 0usize, t.member(0).out_arc(view.vertex)),
            Some(a) => {
                let i = self.tree_index(view.g, t, view.header, a)?;
                (view.header.rm, i, self.next_arc(t, view.header.rm, a, i))
            }
        };
        let mut failed = BTreeSet::new();
        for _ in 0..8 * k.max(1) {
            let arc = cand.ok_or_else(|| {
                SchemeError::IncomingNotInAnyTree(view.incoming.expect("walk arcs have sources"))
            })?;
            debug_assert_eq!(arc.tail, view.vertex);
            if view.is_active(arc.edge) {
                let h = Self::h_for(t, tree, arc.edge)?;
                return Ok(ForwardAction::Forward {
                    arc,
                    header: Header::new(rm, h),
                });
            }
            failed.insert(arc.edge);
            match rm {
                0 => {
                    let hc = Self::h_for(t, tree, arc.edge)?;
                    let j = Self::tree_given_h(t, 1 - hc, arc.edge)?;
                    if j != tree {
                        // Bounce: continue after the reversed arc in T_j's walk.
                        rm = 1;
                        cand = self.r_next[j].get(&arc.reversed()).copied();
                        tree = j;
                    } else {
                        // No co-owner: fall through to the backtrack rule,
                        // which advances the circular scan past this tree.
                        rm = 2;
                    }
                }
                1 => {
                    rm = 2;
                    cand = self.rinv_next[tree].get(&arc.reversed()).copied();
                }
                _ => {
                    let j = t
                        .owner_of_arc(view.g, arc)
                        .ok_or(SchemeError::IncomingNotInAnyTree(arc))?;
                    rm = 0;
                    tree = (j + 1) % k;
                    cand = t.member(tree).out_arc(view.vertex);
                }
            }
        }
        Ok(ForwardAction::Drop {
            distinct_failures: failed.len(),
        })
    }
}
