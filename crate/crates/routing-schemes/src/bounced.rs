use std::collections::BTreeSet;

use graph_core::ArborescenceSet;
use rand::Rng;

use crate::{ForwardAction, Header, LocalView, SchemeError};

/// Canonical routing on a uniformly chosen start tree; every failed out-arc
/// either re-samples the tree uniformly (with probability `q`, or always if
/// `pure_resample`) or bounces onto the tree owning the reversed arc. A
/// reversed arc owned by no tree falls back to re-sampling.
pub fn bounced_rand_decide<R: Rng + ?Sized>(
    t: &ArborescenceSet,
    q: f64,
    pure_resample: bool,
    view: &LocalView,
    rng: &mut R,
) -> Result<ForwardAction, SchemeError> {
    if !pure_resample && !(q > 0.0 && q < 1.0) {
        return Err(SchemeError::BadProbability(q));
    }
    if view.vertex == view.g.destination() {
        return Ok(ForwardAction::Deliver);
    }
    let k = t.k();
    let mut cur = match view.incoming {
        Some(a) => t
            .owner_of_arc(view.g, a)
            .ok_or(SchemeError::IncomingNotInAnyTree(a))?,
        None => rng.gen_range(0..k),
    };
    let live: Vec<usize> = (0..k)
        .filter(|&i| {
            let arc = t.member(i).out_arc(view.vertex).expect("spanning");
            view.is_active(arc.edge)
        })
        .collect();
    let mut failed = BTreeSet::new();
    loop {
        let arc = t.member(cur).out_arc(view.vertex).expect("spanning");
        if view.is_active(arc.edge) {
            return Ok(ForwardAction::Forward {
                arc,
                header: Header::default(),
            });
        }
        failed.insert(arc.edge);
        if live.is_empty() {
            return Ok(ForwardAction::Drop {
                distinct_failures: failed.len(),
            });
        }
        if pure_resample {
            // Re-sampling until an active tree comes up is distribution-equal
            // to drawing uniformly from the active ones, without unbounded
            // rng consumption.
            cur = live[rng.gen_range(0..live.len())];
        } else if rng.gen_bool(q) {
            cur = rng.gen_range(0..k);
        } else {
            cur = match t.owner_of_arc(view.g, arc.reversed()) {
                Some(owner) => owner,
                None => rng.gen_range(0..k),
            };
        }
    }
}
