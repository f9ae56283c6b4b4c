use graph_core::{ArborescenceSet, FailureSet, MultiGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::resilience::sample_failure_set;
use crate::VerifierError;

/// Closed-form ceiling on the expected number of arborescence switches for
/// the random-bounce walk when a fraction t = f/k of the trees is unusable
/// and a blocked packet re-samples with probability q.
pub fn upper_bound_for(t: f64, q: f64) -> f64 {
    t / ((1.0 - q) * q * (1.0 - t)) + 1.0 / (1.0 - q)
}

pub fn optimal_resample_probability(t: f64) -> f64 {
    1.0 - 1.0 / (1.0 + t.sqrt())
}

pub fn upper_bound_at_optimum(t: f64) -> f64 {
    (1.0 + t.sqrt()) / (1.0 - t.sqrt())
}

pub fn upper_bound_at_half(t: f64) -> f64 {
    2.0 + 4.0 * t / (1.0 - t)
}

#[derive(Debug, Serialize)]
pub struct SwitchBoundReport {
    pub t: f64,
    pub q: f64,
    pub bound: f64,
    pub optimal_q: f64,
    pub bound_at_optimal_q: f64,
    pub bound_at_half: f64,
    pub trials: usize,
    pub empirical_mean_switches: f64,
    pub std_error: f64,
    pub delivery_rate: f64,
    /// True when the empirical mean exceeds the bound by over 3 standard
    /// errors, which would falsify the analysis.
    pub violation: bool,
}

/// Monte Carlo check of the switch-count ceiling: runs the random-bounce
/// walk over adversarially sampled f-edge failure sets (each concentrated on
/// one arborescence, the structure the analysis assumes) from uniformly
/// drawn sources, and compares the aggregate mean to U(q).
pub fn switch_bound_report(
    g: &MultiGraph,
    t: &ArborescenceSet,
    q: f64,
    f: usize,
    trials: usize,
    seed: u64,
) -> Result<SwitchBoundReport, VerifierError> {
    let k = t.k();
    if f >= k {
        return Err(VerifierError::TooManyFailures { f, k });
    }
    let frac = f as f64 / k as f64;
    let edges: Vec<_> = g.edges().collect();
    let sources: Vec<_> = g.vertices().filter(|&v| v != g.destination()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut delivered = 0usize;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let fail_edges = sample_failure_set(t, &edges, f, true, &mut rng);
        let failures = FailureSet::from_edges(g.edge_count(), fail_edges);
        let source = sources[rng.gen_range(0..sources.len())];
        let stats = simulator::run_randomized(
            g,
            t,
            q,
            false,
            &failures,
            source,
            1,
            rng.gen(),
        )?;
        if stats.delivery_rate > 0.0 {
            delivered += 1;
        }
        sum += stats.mean_switches;
        sum_sq += stats.mean_switches * stats.mean_switches;
    }
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sum_sq - sum * sum / n) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    let std_error = (var / n).sqrt();
    let bound = upper_bound_for(frac, q);
    Ok(SwitchBoundReport {
        t: frac,
        q,
        bound,
        optimal_q: optimal_resample_probability(frac),
        bound_at_optimal_q: upper_bound_at_optimum(frac),
        bound_at_half: upper_bound_at_half(frac),
        trials,
        empirical_mean_switches: mean,
        std_error,
        delivery_rate: delivered as f64 / n,
        violation: mean > bound + 3.0 * std_error,
    })
}
