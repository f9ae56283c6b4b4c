//! Certifies resilience claims by failure enumeration, reproduces the small
//! impossibility gadget results, and checks the randomized switch-count
//! analytics against their closed forms.

mod audit;
mod bounds;
mod impossibility;
mod resilience;
mod search;

pub use audit::{shared_failure_free_audit, AuditReport};
pub use bounds::{
    optimal_resample_probability, switch_bound_report, upper_bound_at_half,
    upper_bound_at_optimum, upper_bound_for, SwitchBoundReport,
};
pub use impossibility::{impossibility_suite, ImpossibilityReport, ScriptedCheck};
pub use resilience::{
    check_resilience, check_resilience_with_ceiling, Counterexample, Mode, Verdict,
    VerdictResult, DEFAULT_SCENARIO_CEILING,
};
pub use search::{search_orderings, SearchReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifierError {
    #[error(
        "exhaustive enumeration needs {scenarios} scenarios, above the ceiling {ceiling}; \
         use sampled mode"
    )]
    TooLarge { scenarios: u128, ceiling: u128 },
    #[error("failed-tree fraction needs f < k, got f={f}, k={k}")]
    TooManyFailures { f: usize, k: usize },
    #[error("audit requires a tree-ordering scheme with traced scans")]
    UnsupportedScheme,
    #[error(transparent)]
    Sim(#[from] simulator::SimError),
    #[error(transparent)]
    Scheme(#[from] routing_schemes::SchemeError),
}
