//! Executes a compiled scheme over a graph under a fixed failure set,
//! reporting delivery, loops, and hop/switch/copy counts.

use std::collections::{HashSet, VecDeque};

use graph_core::{Arc, ArborescenceSet, FailureSet, MultiGraph, VertexId};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use routing_schemes::{
    bounced_rand_decide, CompiledScheme, ForwardAction, Header, LocalView, SchemeError,
};
use serde::Serialize;
use thiserror::Error;

/// Step budget for a single randomized run. Harness constant, not a claim
/// about the schemes; exceeding it counts as non-delivery.
pub const DEFAULT_STEP_BUDGET: usize = 100_000;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("scheme forwarded over failed edge {0:?}")]
    ForwardedFailedEdge(Arc),
    #[error("scheme duplicated a packet outside the duplication engine")]
    UnexpectedDuplicate,
    #[error("duplication engine given a non-duplicating scheme")]
    NotDuplicating,
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Delivered,
    Loop,
    Dropped,
    BudgetExceeded,
}

/// One forwarding state along a packet's path.
#[derive(Clone, Debug, Serialize)]
pub struct PacketRecord {
    pub vertex: String,
    pub incoming_edge: Option<i64>,
    pub header: (u8, u8),
    pub steps: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Trace {
    pub outcome: Outcome,
    pub hops: usize,
    pub switches: usize,
    pub copies: usize,
    /// Largest count of distinct failed edges any drop decision witnessed.
    pub distinct_failures_seen: usize,
    pub path: Vec<PacketRecord>,
}

type State = (VertexId, Option<Arc>, Header);

fn record(g: &MultiGraph, state: State, steps: usize) -> PacketRecord {
    PacketRecord {
        vertex: g.label(state.0).to_string(),
        incoming_edge: state.1.map(|a| g.external_id(a.edge)),
        header: (state.2.rm, state.2.h),
        steps,
    }
}

/// A forwarding step switches arborescences when the chosen out-arc belongs
/// to a different tree than the arc the packet arrived over. Originated
/// packets have no previous tree, so their first step never counts.
fn is_switch(g: &MultiGraph, t: &ArborescenceSet, incoming: Option<Arc>, out: Arc) -> bool {
    match incoming {
        None => false,
        Some(prev) => t.owner_of_arc(g, prev) != t.owner_of_arc(g, out),
    }
}

/// Steps the decision procedure from `source` until delivery, a drop, or a
/// repeated (vertex, incoming, header) state, which proves a forwarding loop
/// for any deterministic memoryless scheme. The hop budget 4·|V|·k·3·2 (the
/// state-space size) is an absolute backstop.
pub fn run_deterministic(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    failures: &FailureSet,
    source: VertexId,
) -> Result<Trace, SimError> {
    let budget = 4 * g.vertex_count() * t.k() * 3 * 2;
    let mut state: State = (source, None, Header::default());
    let mut visited = HashSet::new();
    let mut path = Vec::new();
    let mut hops = 0;
    let mut switches = 0;
    let mut distinct = 0;
    loop {
        path.push(record(g, state, hops));
        if !visited.insert(state) {
            return Ok(finish(Outcome::Loop, hops, switches, 0, distinct, path));
        }
        if hops > budget {
            return Ok(finish(
                Outcome::BudgetExceeded,
                hops,
                switches,
                0,
                distinct,
                path,
            ));
        }
        let view = LocalView::new(g, failures, state.0, state.1, state.2);
        match scheme.decide(t, &view, None)? {
            ForwardAction::Deliver => {
                return Ok(finish(Outcome::Delivered, hops, switches, 0, distinct, path));
            }
            ForwardAction::Drop { distinct_failures } => {
                distinct = distinct.max(distinct_failures);
                return Ok(finish(Outcome::Dropped, hops, switches, 0, distinct, path));
            }
            ForwardAction::Forward { arc, header } => {
                if failures.contains(arc.edge) {
                    return Err(SimError::ForwardedFailedEdge(arc));
                }
                if is_switch(g, t, state.1, arc) {
                    switches += 1;
                }
                hops += 1;
                state = (arc.head, Some(arc), header);
            }
            ForwardAction::Duplicate { .. } => return Err(SimError::UnexpectedDuplicate),
        }
    }
}

fn finish(
    outcome: Outcome,
    hops: usize,
    switches: usize,
    copies: usize,
    distinct_failures_seen: usize,
    path: Vec<PacketRecord>,
) -> Trace {
    Trace {
        outcome,
        hops,
        switches,
        copies,
        distinct_failures_seen,
        path,
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RandStats {
    pub trials: usize,
    pub delivery_rate: f64,
    pub mean_switches: f64,
    /// Standard error of the mean switch count.
    pub std_error: f64,
}

/// One randomized trial; `None` means the step budget ran out.
fn randomized_trial(
    g: &MultiGraph,
    t: &ArborescenceSet,
    q: f64,
    pure_resample: bool,
    failures: &FailureSet,
    source: VertexId,
    rng: &mut dyn RngCore,
    budget: usize,
) -> Result<Option<(bool, usize)>, SimError> {
    let mut state: (VertexId, Option<Arc>) = (source, None);
    let mut switches = 0;
    for _ in 0..=budget {
        let view = LocalView::new(g, failures, state.0, state.1, Header::default());
        match bounced_rand_decide(t, q, pure_resample, &view, rng)? {
            ForwardAction::Deliver => return Ok(Some((true, switches))),
            ForwardAction::Drop { .. } => return Ok(Some((false, switches))),
            ForwardAction::Forward { arc, .. } => {
                if failures.contains(arc.edge) {
                    return Err(SimError::ForwardedFailedEdge(arc));
                }
                if is_switch(g, t, state.1, arc) {
                    switches += 1;
                }
                state = (arc.head, Some(arc));
            }
            ForwardAction::Duplicate { .. } => return Err(SimError::UnexpectedDuplicate),
        }
    }
    Ok(None)
}

/// Runs `trials` independent random-bounce trials. Each trial draws its own
/// seed from a master stream seeded by `seed`, so results are bit-identical
/// for identical arguments. Budget-exhausted trials count as non-delivery;
/// switch counts aggregate over every trial.
pub fn run_randomized(
    g: &MultiGraph,
    t: &ArborescenceSet,
    q: f64,
    pure_resample: bool,
    failures: &FailureSet,
    source: VertexId,
    trials: usize,
    seed: u64,
) -> Result<RandStats, SimError> {
    run_randomized_with_budget(
        g,
        t,
        q,
        pure_resample,
        failures,
        source,
        trials,
        seed,
        DEFAULT_STEP_BUDGET,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn run_randomized_with_budget(
    g: &MultiGraph,
    t: &ArborescenceSet,
    q: f64,
    pure_resample: bool,
    failures: &FailureSet,
    source: VertexId,
    trials: usize,
    seed: u64,
    budget: usize,
) -> Result<RandStats, SimError> {
    assert!(trials >= 1);
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let mut delivered = 0usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let switches = match randomized_trial(
            g,
            t,
            q,
            pure_resample,
            failures,
            source,
            &mut rng,
            budget,
        )? {
            Some((true, s)) => {
                delivered += 1;
                s
            }
            Some((false, s)) => s,
            None => budget,
        };
        sum += switches as f64;
        sum_sq += (switches * switches) as f64;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(RandStats {
        trials,
        delivery_rate: delivered as f64 / n,
        mean_switches: mean,
        std_error: (var / n).sqrt(),
    })
}

/// Treats each random choice of the bounce scheme as nondeterministic
/// branching over (vertex, current arborescence) states and reports whether
/// the destination is reachable at all. Both the resample branch (every
/// tree) and the bounce branch have positive probability, so reachability
/// here is exactly delivery with positive probability.
pub fn explore_randomized_branches(
    g: &MultiGraph,
    t: &ArborescenceSet,
    failures: &FailureSet,
    source: VertexId,
) -> bool {
    let d = g.destination();
    if source == d {
        return true;
    }
    let k = t.k();
    let mut seen = vec![false; g.vertex_count() * k];
    let mut queue: VecDeque<(VertexId, usize)> = (0..k).map(|i| (source, i)).collect();
    for &(v, i) in &queue {
        seen[v.index() * k + i] = true;
    }
    while let Some((v, cur)) = queue.pop_front() {
        let arc = t.member(cur).out_arc(v).expect("spanning arborescence");
        if !failures.contains(arc.edge) {
            if arc.head == d {
                return true;
            }
            if !seen[arc.head.index() * k + cur] {
                seen[arc.head.index() * k + cur] = true;
                queue.push_back((arc.head, cur));
            }
            continue;
        }
        let mut push = |tree: usize| {
            if !seen[v.index() * k + tree] {
                seen[v.index() * k + tree] = true;
                queue.push_back((v, tree));
            }
        };
        for tree in 0..k {
            push(tree);
        }
        if let Some(owner) = t.owner_of_arc(g, arc.reversed()) {
            push(owner);
        }
    }
    false
}

/// Breadth-first execution of a duplicating scheme. Copy states are
/// deduplicated on (vertex, incoming arc), which keeps the multiset finite;
/// the copy counter counts creation events, including copies destroyed on
/// their first decision. Delivered iff any copy reaches the destination.
pub fn run_duplication(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    failures: &FailureSet,
    source: VertexId,
) -> Result<Trace, SimError> {
    if !scheme.is_duplicating() {
        return Err(SimError::NotDuplicating);
    }
    let mut seen: HashSet<(VertexId, Option<Arc>)> = HashSet::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    let start: State = (source, None, Header::default());
    seen.insert((source, None));
    queue.push_back(start);
    let mut path = Vec::new();
    let mut hops = 0;
    let mut switches = 0;
    let mut copies = 0;
    let mut distinct = 0;
    let mut delivered = false;
    while let Some(state) = queue.pop_front() {
        path.push(record(g, state, hops));
        let view = LocalView::new(g, failures, state.0, state.1, state.2);
        let outs = match scheme.decide(t, &view, None)? {
            ForwardAction::Deliver => {
                delivered = true;
                continue;
            }
            ForwardAction::Drop { distinct_failures } => {
                distinct = distinct.max(distinct_failures);
                continue;
            }
            ForwardAction::Forward { arc, header } => vec![(arc, header)],
            ForwardAction::Duplicate { out, created } => {
                copies += created;
                out
            }
        };
        for (arc, header) in outs {
            if failures.contains(arc.edge) {
                return Err(SimError::ForwardedFailedEdge(arc));
            }
            if is_switch(g, t, state.1, arc) {
                switches += 1;
            }
            hops += 1;
            if seen.insert((arc.head, Some(arc))) {
                queue.push_back((arc.head, Some(arc), header));
            }
        }
    }
    let outcome = if delivered {
        Outcome::Delivered
    } else {
        Outcome::Dropped
    };
    Ok(finish(outcome, hops, switches, copies, distinct, path))
}
