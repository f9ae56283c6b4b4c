use graph_core::{ArborescenceSet, MultiGraph};
use routing_schemes::{Circular, CompiledScheme};
use serde::Serialize;

use crate::resilience::{check_resilience_with_ceiling, Mode};
use crate::VerifierError;

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub r: usize,
    pub orderings_examined: usize,
    /// First tree ordering whose cyclic scheme survives every scenario, if
    /// any ordering does.
    pub found: Option<Vec<usize>>,
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..k)
                    .filter(|i| !p.contains(i))
                    .map(|i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Exhaustive search over cyclic tree orderings for one that delivers under
/// every failure set of size at most `r`. Orderings starting anywhere but
/// tree 0 are rotations of ones already tried, so they are skipped.
pub fn search_orderings(
    g: &MultiGraph,
    t: &ArborescenceSet,
    r: usize,
    ceiling: u128,
) -> Result<SearchReport, VerifierError> {
    let mut examined = 0;
    for ordering in permutations(t.k()) {
        if ordering.first() != Some(&0) {
            continue;
        }
        examined += 1;
        let c = Circular::new(t.k(), ordering.clone(), vec![0; g.vertex_count()], Default::default())?;
        let verdict = check_resilience_with_ceiling(
            g,
            t,
            &CompiledScheme::Circular(c),
            r,
            Mode::Exhaustive,
            ceiling,
        )?;
        if verdict.holds() {
            return Ok(SearchReport {
                r,
                orderings_examined: examined,
                found: Some(ordering),
            });
        }
    }
    Ok(SearchReport {
        r,
        orderings_examined: examined,
        found: None,
    })
}
