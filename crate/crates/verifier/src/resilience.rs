use graph_core::{reachable, ArborescenceSet, EdgeId, FailureSet, MultiGraph, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use routing_schemes::CompiledScheme;
use serde::Serialize;
use simulator::{
    explore_randomized_branches, run_deterministic, run_duplication, Outcome, Trace,
};

use crate::VerifierError;

pub const DEFAULT_SCENARIO_CEILING: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum Mode {
    Exhaustive,
    Sampled {
        samples: usize,
        seed: u64,
        /// Concentrate each sampled failure set on a single arborescence.
        adversarial: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub failed_edges: Vec<i64>,
    pub source: String,
    /// Absent for randomized schemes, whose failure is a reachability fact
    /// rather than a single trajectory.
    pub trace: Option<Trace>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum VerdictResult {
    Holds,
    Fails { counterexample: Counterexample },
}

#[derive(Debug, Serialize)]
pub struct Verdict {
    pub r: usize,
    pub scenarios_checked: usize,
    pub mode: Mode,
    #[serde(flatten)]
    pub result: VerdictResult,
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self.result, VerdictResult::Holds)
    }
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    out
}

/// All edge subsets of size at most `r`, in lexicographic order.
pub(crate) fn subsets_up_to(edges: &[EdgeId], r: usize) -> Vec<Vec<EdgeId>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..r {
        let mut next = Vec::new();
        for idx in &frontier {
            let lo = idx.last().map_or(0, |&i| i + 1);
            for i in lo..edges.len() {
                let mut grown = idx.clone();
                grown.push(i);
                out.push(grown.iter().map(|&j| edges[j]).collect());
                next.push(grown);
            }
        }
        frontier = next;
    }
    out
}

/// `None` for vacuous scenarios where the failures disconnect the source.
fn scenario_delivers(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    failures: &FailureSet,
    source: VertexId,
) -> Result<Option<(bool, Option<Trace>)>, VerifierError> {
    let reach = reachable(g, source, |e| failures.contains(e));
    if !reach[g.destination().index()] {
        return Ok(None);
    }
    Ok(Some(if scheme.is_randomized() {
        (explore_randomized_branches(g, t, failures, source), None)
    } else if scheme.is_duplicating() {
        let trace = run_duplication(g, t, scheme, failures, source)?;
        (trace.outcome == Outcome::Delivered, Some(trace))
    } else {
        let trace = run_deterministic(g, t, scheme, failures, source)?;
        (trace.outcome == Outcome::Delivered, Some(trace))
    }))
}

/// Checks one failure set against every source; returns the number of
/// non-vacuous scenarios and the first failing source, if any.
fn check_failure_set(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    edges: &[EdgeId],
) -> Result<(usize, Option<Counterexample>), VerifierError> {
    let failures = FailureSet::from_edges(g.edge_count(), edges.iter().copied());
    let mut checked = 0;
    for source in g.vertices() {
        if source == g.destination() {
            continue;
        }
        match scenario_delivers(g, t, scheme, &failures, source)? {
            None => continue,
            Some((true, _)) => checked += 1,
            Some((false, trace)) => {
                checked += 1;
                let mut failed_edges: Vec<i64> =
                    edges.iter().map(|&e| g.external_id(e)).collect();
                failed_edges.sort_unstable();
                return Ok((
                    checked,
                    Some(Counterexample {
                        failed_edges,
                        source: g.label(source).to_string(),
                        trace,
                    }),
                ));
            }
        }
    }
    Ok((checked, None))
}

pub fn check_resilience(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    r: usize,
    mode: Mode,
) -> Result<Verdict, VerifierError> {
    check_resilience_with_ceiling(g, t, scheme, r, mode, DEFAULT_SCENARIO_CEILING)
}

pub fn check_resilience_with_ceiling(
    g: &MultiGraph,
    t: &ArborescenceSet,
    scheme: &CompiledScheme,
    r: usize,
    mode: Mode,
    ceiling: u128,
) -> Result<Verdict, VerifierError> {
    let failure_sets = match mode {
        Mode::Exhaustive => {
            let sets: u128 = (0..=r).map(|i| binomial(g.edge_count(), i)).sum();
            let scenarios = sets.saturating_mul(g.vertex_count() as u128);
            if scenarios > ceiling {
                return Err(VerifierError::TooLarge { scenarios, ceiling });
            }
            let edges: Vec<_> = g.edges().collect();
            subsets_up_to(&edges, r)
        }
        Mode::Sampled {
            samples,
            seed,
            adversarial,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let edges: Vec<_> = g.edges().collect();
            (0..samples)
                .map(|_| sample_failure_set(t, &edges, r, adversarial, &mut rng))
                .collect()
        }
    };
    let (checked, worst) = failure_sets
        .par_iter()
        .map(|edges| check_failure_set(g, t, scheme, edges))
        .try_reduce(
            || (0, None),
            |(c1, w1), (c2, w2)| {
                let worst = match (w1, w2) {
                    (Some(a), Some(b)) => {
                        // Deterministic pick under parallel reduction order.
                        if (&a.failed_edges, &a.source) <= (&b.failed_edges, &b.source) {
                            Some(a)
                        } else {
                            Some(b)
                        }
                    }
                    (a, b) => a.or(b),
                };
                Ok((c1 + c2, worst))
            },
        )?;
    Ok(Verdict {
        r,
        scenarios_checked: checked,
        mode,
        result: match worst {
            None => VerdictResult::Holds,
            Some(counterexample) => VerdictResult::Fails { counterexample },
        },
    })
}

/// Uniform r-subset of all edges, or, adversarially, of the edges of one
/// uniformly chosen arborescence (topped up from the rest when it is short).
pub(crate) fn sample_failure_set(
    t: &ArborescenceSet,
    edges: &[EdgeId],
    r: usize,
    adversarial: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<EdgeId> {
    if !adversarial {
        let mut pool = edges.to_vec();
        pool.shuffle(rng);
        pool.truncate(r.min(pool.len()));
        return pool;
    }
    let tree = rng.gen_range(0..t.k());
    let mut pool: Vec<EdgeId> = t.member(tree).arcs().map(|a| a.edge).collect();
    pool.sort_unstable();
    pool.dedup();
    pool.shuffle(rng);
    pool.truncate(r.min(pool.len()));
    if pool.len() < r {
        let mut rest: Vec<EdgeId> = edges
            .iter()
            .copied()
            .filter(|e| !pool.contains(e))
            .collect();
        rest.shuffle(rng);
        pool.extend(rest.into_iter().take(r - pool.len()));
    }
    pool
}
