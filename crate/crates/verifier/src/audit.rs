use std::collections::HashSet;

use graph_core::{reachable, ArborescenceSet, FailureSet, MultiGraph, VertexId};
use rayon::prelude::*;
use routing_schemes::{circular_decide_traced, Circular, CompiledScheme, ForwardAction, Header,
    LocalView};
use serde::Serialize;

use crate::resilience::subsets_up_to;
use crate::VerifierError;

#[derive(Debug, Serialize)]
pub struct AuditReport {
    pub r: usize,
    pub scenarios: usize,
    /// Decision steps where at least one tree was skipped over.
    pub blocked_events: usize,
    pub holds: bool,
    /// A scenario where some packet was bumped off more distinct trees than
    /// the distinct failed edges it had witnessed.
    pub violation: Option<AuditViolation>,
}

#[derive(Debug, Serialize)]
pub struct AuditViolation {
    pub failed_edges: Vec<i64>,
    pub source: String,
    pub trees_blocked: usize,
    pub distinct_failures_witnessed: usize,
}

/// Follows one packet, checking that whenever it has been bumped off its
/// i-th distinct arborescence it has also witnessed at least i distinct
/// failed edges. Shared edges between trees are exactly what breaks this.
fn audit_run(
    g: &MultiGraph,
    t: &ArborescenceSet,
    c: &Circular,
    failures: &FailureSet,
    source: VertexId,
) -> Result<Result<usize, (usize, usize)>, VerifierError> {
    let mut vertex = source;
    let mut incoming = None;
    let mut seen = HashSet::new();
    let mut trees_blocked = HashSet::new();
    let mut edges_witnessed = HashSet::new();
    let mut events = 0;
    loop {
        if !seen.insert((vertex, incoming)) {
            return Ok(Ok(events));
        }
        let view = LocalView::new(g, failures, vertex, incoming, Header::default());
        let (action, blocked) = circular_decide_traced(t, c, &view)?;
        if !blocked.is_empty() {
            events += 1;
            for (tree, edge) in blocked {
                trees_blocked.insert(tree);
                edges_witnessed.insert(edge);
            }
            if edges_witnessed.len() < trees_blocked.len() {
                return Ok(Err((trees_blocked.len(), edges_witnessed.len())));
            }
        }
        match action {
            ForwardAction::Forward { arc, .. } => {
                vertex = arc.head;
                incoming = Some(arc);
            }
            _ => return Ok(Ok(events)),
        }
    }
}

/// Exhausts every failure set of size at most `r` and every source,
/// certifying that distinct blocked arborescences always come with as many
/// distinct failed edges along each packet's run.
pub fn shared_failure_free_audit(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    r: usize,
) -> Result<AuditReport, VerifierError> {
    let CompiledScheme::Circular(c) = scheme else {
        return Err(VerifierError::UnsupportedScheme);
    };
    let edges: Vec<_> = g.edges().collect();
    let subsets = subsets_up_to(&edges, r);
    let results: Result<Vec<_>, VerifierError> = subsets
        .par_iter()
        .map(|subset| {
            let failures = FailureSet::from_edges(g.edge_count(), subset.iter().copied());
            let mut scenarios = 0;
            let mut events = 0;
            let mut violation = None;
            for source in g.vertices() {
                if source == g.destination() {
                    continue;
                }
                let reach = reachable(g, source, |e| failures.contains(e));
                if !reach[g.destination().index()] {
                    continue;
                }
                scenarios += 1;
                match audit_run(g, t, c, &failures, source)? {
                    Ok(e) => events += e,
                    Err((blocked, witnessed)) => {
                        let mut failed_edges: Vec<i64> =
                            subset.iter().map(|&e| g.external_id(e)).collect();
                        failed_edges.sort_unstable();
                        violation.get_or_insert(AuditViolation {
                            failed_edges,
                            source: g.label(source).to_string(),
                            trees_blocked: blocked,
                            distinct_failures_witnessed: witnessed,
                        });
                    }
                }
            }
            Ok((scenarios, events, violation))
        })
        .collect();
    let mut scenarios = 0;
    let mut blocked_events = 0;
    let mut violation = None;
    for (s, e, v) in results? {
        scenarios += s;
        blocked_events += e;
        if violation.is_none() {
            violation = v;
        }
    }
    Ok(AuditReport {
        r,
        scenarios,
        blocked_events,
        holds: violation.is_none(),
        violation,
    })
}
