use std::collections::BTreeSet;

use graph_core::{ArborescenceSet, Arc};

use crate::{ForwardAction, Header, LocalView, SchemeError};

/// Shared engine for both duplication variants, parameterized by the
/// 1-based index thresholds: trees up to `bounce_upto` bounce a copy and
/// advance the original, tree `fan_at` fans out onto `fan_targets`
/// (0-based), anything later destroys the packet.
struct Dup<'a> {
    t: &'a ArborescenceSet,
    bounce_upto: usize,
    fan_at: usize,
    fan_advance: bool,
    fan_targets: std::ops::Range<usize>,
}

impl Dup<'_> {
    fn resolve(
        &self,
        view: &LocalView,
        tree: usize,
        out: &mut Vec<(Arc, Header)>,
        created: &mut usize,
        failed: &mut BTreeSet<graph_core::EdgeId>,
        depth: usize,
    ) {
        if depth > 2 * self.t.k() + 2 {
            return;
        }
        let arc = self.t.member(tree).out_arc(view.vertex).expect("spanning");
        if view.is_active(arc.edge) {
            out.push((arc, Header::default()));
            return;
        }
        failed.insert(arc.edge);
        let i = tree + 1;
        if i <= self.bounce_upto {
            self.resolve(view, tree + 1, out, created, failed, depth + 1);
            if let Some(l) = self.t.owner_of_arc(view.g, arc.reversed()) {
                *created += 1;
                self.resolve(view, l, out, created, failed, depth + 1);
            }
        } else if i == self.fan_at {
            *created += self.fan_targets.len();
            if self.fan_advance {
                self.resolve(view, self.fan_at, out, created, failed, depth + 1);
            }
            for l in self.fan_targets.clone() {
                self.resolve(view, l, out, created, failed, depth + 1);
            }
        }
        // i past the fan-out point: the packet is destroyed.
    }

    fn decide(&self, view: &LocalView) -> Result<ForwardAction, SchemeError> {
        if view.vertex == view.g.destination() {
            return Ok(ForwardAction::Deliver);
        }
        let tree = match view.incoming {
            None => 0,
            Some(a) => self
                .t
                .owner_of_arc(view.g, a)
                .ok_or(SchemeError::IncomingNotInAnyTree(a))?,
        };
        let mut out = Vec::new();
        let mut created = 0;
        let mut failed = BTreeSet::new();
        self.resolve(view, tree, &mut out, &mut created, &mut failed, 0);
        Ok(match (out.len(), created) {
            (0, _) => ForwardAction::Drop {
                distinct_failures: failed.len(),
            },
            (1, 0) => {
                let (arc, header) = out.pop().expect("one entry");
                ForwardAction::Forward { arc, header }
            }
            _ => ForwardAction::Duplicate { out, created },
        })
    }
}

/// Even variant over an ADBED list of 2s trees: a failure on one of the
/// first s-1 trees bounces one copy and advances the original; a failure on
/// tree s forwards the original to tree s+1 and fans s-1 copies over the
/// second half; failures later than s destroy the packet.
pub fn dup_even_decide(
    t: &ArborescenceSet,
    s: usize,
    view: &LocalView,
) -> Result<ForwardAction, SchemeError> {
    if s == 0 || t.k() != 2 * s {
        return Err(SchemeError::WrongTreeCount {
            expected: 2 * s.max(1),
            got: t.k(),
        });
    }
    Dup {
        t,
        bounce_upto: s - 1,
        fan_at: s,
        fan_advance: true,
        fan_targets: s + 1..2 * s,
    }
    .decide(view)
}

/// Odd variant over 2k+1 trees: bounce-and-advance through the first k, a
/// fan-out of k copies onto the last k trees at tree k+1, destruction after.
pub fn dup_odd_decide(
    t: &ArborescenceSet,
    k: usize,
    view: &LocalView,
) -> Result<ForwardAction, SchemeError> {
    if k == 0 || t.k() != 2 * k + 1 {
        return Err(SchemeError::WrongTreeCount {
            expected: 2 * k + 1,
            got: t.k(),
        });
    }
    Dup {
        t,
        bounce_upto: k,
        fan_at: k + 1,
        fan_advance: false,
        fan_targets: k + 1..2 * k + 1,
    }
    .decide(view)
}
