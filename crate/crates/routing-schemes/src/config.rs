use std::collections::{BTreeMap, HashMap};

use graph_core::{ArborescenceSet, Arc, EdgeId, MultiGraph};
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::{
    bounced_rand_decide, circular_decide, dup_even_decide, dup_odd_decide, plus_one_decide,
    vertex_circular_decide, Circular, DfAlgo, ForwardAction, LocalView, SchemeError,
    VertexCircular,
};

/// Arc spelled with stable identifiers, for configs that survive
/// serialization: the external edge id plus the label of the tail vertex.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResetRule {
    pub edge: i64,
    pub tail: String,
    pub target: usize,
}

/// Serializable scheme selection. Tree indices are 0-based positions in the
/// arborescence list; edges are referenced by external id, vertices by label.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SchemeConfig {
    Circular {
        ordering: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<BTreeMap<String, usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resets: Option<Vec<ResetRule>>,
    },
    VertexCircular {
        orders: BTreeMap<String, Vec<i64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        origin: Option<BTreeMap<String, i64>>,
    },
    PlusOne {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ordering: Option<Vec<usize>>,
    },
    BouncedRand {
        q: f64,
        #[serde(default)]
        pure_resample: bool,
    },
    DfAlgo,
    DupEven {
        s: usize,
    },
    DupOdd {
        k: usize,
    },
}

pub enum CompiledScheme {
    Circular(Circular),
    VertexCircular(VertexCircular),
    PlusOne(Circular),
    BouncedRand { q: f64, pure_resample: bool },
    DfAlgo(DfAlgo),
    DupEven { s: usize },
    DupOdd { k: usize },
}

impl CompiledScheme {
    pub fn is_randomized(&self) -> bool {
        matches!(self, CompiledScheme::BouncedRand { .. })
    }

    pub fn is_duplicating(&self) -> bool {
        matches!(
            self,
            CompiledScheme::DupEven { .. } | CompiledScheme::DupOdd { .. }
        )
    }

    pub fn decide(
        &self,
        t: &ArborescenceSet,
        view: &LocalView,
        rng: Option<&mut dyn RngCore>,
    ) -> Result<ForwardAction, SchemeError> {
        match self {
            CompiledScheme::Circular(c) => circular_decide(t, c, view),
            CompiledScheme::VertexCircular(c) => vertex_circular_decide(c, view),
            CompiledScheme::PlusOne(inner) => plus_one_decide(t, inner, view),
            CompiledScheme::BouncedRand { q, pure_resample } => {
                let rng = rng.ok_or(SchemeError::MissingRng)?;
                bounced_rand_decide(t, *q, *pure_resample, view, rng)
            }
            CompiledScheme::DfAlgo(df) => df.decide(t, view),
            CompiledScheme::DupEven { s } => dup_even_decide(t, *s, view),
            CompiledScheme::DupOdd { k } => dup_odd_decide(t, *k, view),
        }
    }
}

fn vertex_of(g: &MultiGraph, label: &str) -> Result<graph_core::VertexId, SchemeError> {
    g.vertex_by_label(label)
        .ok_or_else(|| SchemeError::UnknownVertex(label.to_string()))
}

fn edge_of(g: &MultiGraph, id: i64) -> Result<EdgeId, SchemeError> {
    g.edge_by_external_id(id).ok_or(SchemeError::UnknownEdge(id))
}

pub fn compile(
    g: &MultiGraph,
    t: &ArborescenceSet,
    config: &SchemeConfig,
) -> Result<CompiledScheme, SchemeError> {
    let k = t.k();
    let n = g.vertex_count();
    Ok(match config {
        SchemeConfig::Circular {
            ordering,
            start,
            resets,
        } => {
            let mut start_vec = vec![0; n];
            if let Some(map) = start {
                for (label, &tree) in map {
                    start_vec[vertex_of(g, label)?.index()] = tree;
                }
            }
            let mut reset = HashMap::new();
            if let Some(rules) = resets {
                for rule in rules {
                    let e = edge_of(g, rule.edge)?;
                    let tail = vertex_of(g, &rule.tail)?;
                    if !g.is_endpoint(e, tail) {
                        return Err(SchemeError::UnknownEdge(rule.edge));
                    }
                    reset.insert(Arc::new(e, tail, g.other_end(e, tail)), rule.target);
                }
            }
            if ordering.len() != k {
                return Err(SchemeError::BadOrdering(ordering.clone()));
            }
            CompiledScheme::Circular(Circular::new(k, ordering.clone(), start_vec, reset)?)
        }
        SchemeConfig::VertexCircular { orders, origin } => {
            let mut order_vec = vec![Vec::new(); n];
            for (label, ids) in orders {
                let v = vertex_of(g, label)?;
                order_vec[v.index()] = ids
                    .iter()
                    .map(|&id| edge_of(g, id))
                    .collect::<Result<_, _>>()?;
            }
            let mut origin_vec = vec![None; n];
            if let Some(map) = origin {
                for (label, &id) in map {
                    origin_vec[vertex_of(g, label)?.index()] = Some(edge_of(g, id)?);
                }
            }
            CompiledScheme::VertexCircular(VertexCircular::new(g, order_vec, origin_vec)?)
        }
        SchemeConfig::PlusOne { ordering } => {
            if k < 2 {
                return Err(SchemeError::WrongTreeCount {
                    expected: 2,
                    got: k,
                });
            }
            let inner_order = ordering.clone().unwrap_or_else(|| (0..k - 1).collect());
            CompiledScheme::PlusOne(Circular::new(k, inner_order, vec![0; n], HashMap::new())?)
        }
        SchemeConfig::BouncedRand { q, pure_resample } => {
            if !*pure_resample && !(*q > 0.0 && *q < 1.0) {
                return Err(SchemeError::BadProbability(*q));
            }
            CompiledScheme::BouncedRand {
                q: *q,
                pure_resample: *pure_resample,
            }
        }
        SchemeConfig::DfAlgo => CompiledScheme::DfAlgo(DfAlgo::new(t)),
        SchemeConfig::DupEven { s } => {
            if *s == 0 || k != 2 * s {
                return Err(SchemeError::WrongTreeCount {
                    expected: 2 * (*s).max(1),
                    got: k,
                });
            }
            CompiledScheme::DupEven { s: *s }
        }
        SchemeConfig::DupOdd { k: kk } => {
            if *kk == 0 || k != 2 * kk + 1 {
                return Err(SchemeError::WrongTreeCount {
                    expected: 2 * kk + 1,
                    got: k,
                });
            }
            CompiledScheme::DupOdd { k: *kk }
        }
    })
}
