use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arborescence::{Arborescence, ArborescenceSet, Arc};
use crate::graph::{GraphError, MultiGraph};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(i64),
    #[error("arborescence {index}: {problem}")]
    BadArborescence { index: usize, problem: String },
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
    destination: String,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: i64,
    u: String,
    v: String,
}

pub fn graph_to_json(g: &MultiGraph) -> serde_json::Value {
    let doc = GraphJson {
        vertices: g.vertices().map(|v| g.label(v).to_string()).collect(),
        edges: g
            .edges()
            .map(|e| {
                let (u, v) = g.endpoints(e);
                EdgeJson {
                    id: g.external_id(e),
                    u: g.label(u).to_string(),
                    v: g.label(v).to_string(),
                }
            })
            .collect(),
        destination: g.label(g.destination()).to_string(),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

pub fn graph_from_json(value: &serde_json::Value) -> Result<MultiGraph, IoError> {
    let doc: GraphJson = serde_json::from_value(value.clone())?;
    let mut g = MultiGraph::builder();
    for label in &doc.vertices {
        g.vertex(label.clone());
    }
    let declared = doc.vertices.len();
    // vertex() interns, so a lookup past the declared count means the label
    // was never listed in "vertices".
    let find = |g: &mut crate::graph::GraphBuilder, label: &str| {
        let v = g.vertex(label.to_string());
        if v.index() >= declared {
            Err(IoError::UnknownVertex(label.to_string()))
        } else {
            Ok(v)
        }
    };
    for e in &doc.edges {
        let u = find(&mut g, &e.u)?;
        let v = find(&mut g, &e.v)?;
        g.edge_with_id(u, v, e.id)?;
    }
    let d = find(&mut g, &doc.destination)?;
    Ok(g.build(d)?)
}

#[derive(Serialize, Deserialize)]
struct ArbSetJson {
    root: String,
    arborescences: Vec<Vec<ArcJson>>,
    adbed: bool,
}

#[derive(Serialize, Deserialize)]
struct ArcJson {
    edge: i64,
    tail: String,
    head: String,
}

pub fn arborescences_to_json(g: &MultiGraph, t: &ArborescenceSet) -> serde_json::Value {
    let doc = ArbSetJson {
        root: g.label(g.destination()).to_string(),
        arborescences: t
            .members()
            .iter()
            .map(|tree| {
                let mut arcs: Vec<Arc> = tree.arcs().collect();
                arcs.sort_by_key(|a| a.tail);
                arcs.into_iter()
                    .map(|a| ArcJson {
                        edge: g.external_id(a.edge),
                        tail: g.label(a.tail).to_string(),
                        head: g.label(a.head).to_string(),
                    })
                    .collect()
            })
            .collect(),
        adbed: t.adbed(),
    };
    serde_json::to_value(doc).expect("plain data serializes")
}

pub fn arborescences_from_json(
    g: &MultiGraph,
    value: &serde_json::Value,
) -> Result<ArborescenceSet, IoError> {
    let doc: ArbSetJson = serde_json::from_value(value.clone())?;
    let root = g
        .vertex_by_label(&doc.root)
        .ok_or_else(|| IoError::UnknownVertex(doc.root.clone()))?;
    let mut members = Vec::new();
    for (index, arcs) in doc.arborescences.iter().enumerate() {
        let mut tree = Arborescence::new(root, g.vertex_count());
        for a in arcs {
            let edge = g
                .edge_by_external_id(a.edge)
                .ok_or(IoError::UnknownEdge(a.edge))?;
            let tail = g
                .vertex_by_label(&a.tail)
                .ok_or_else(|| IoError::UnknownVertex(a.tail.clone()))?;
            let head = g
                .vertex_by_label(&a.head)
                .ok_or_else(|| IoError::UnknownVertex(a.head.clone()))?;
            if tree.out_arc(tail).is_some() {
                return Err(IoError::BadArborescence {
                    index,
                    problem: format!("vertex {:?} has two out-arcs", a.tail),
                });
            }
            tree.set_out(Arc { edge, tail, head });
        }
        members.push(tree);
    }
    Ok(ArborescenceSet::new(g, members, doc.adbed))
}

/// Graphviz rendering; edges carried by an arborescence are labelled and
/// colored by the (1-based) index of their owner.
pub fn to_dot(g: &MultiGraph, t: Option<&ArborescenceSet>) -> String {
    const PALETTE: [&str; 10] = [
        "blue", "orange", "red", "green", "purple", "brown", "cyan", "magenta", "olive", "gray",
    ];
    let mut out = String::from("graph g {\n");
    for v in g.vertices() {
        let shape = if v == g.destination() {
            " [shape=doublecircle]"
        } else {
            ""
        };
        out.push_str(&format!("  \"{}\"{};\n", g.label(v), shape));
    }
    for e in g.edges() {
        let (u, v) = g.endpoints(e);
        let mut attrs = vec![format!("id={}", g.external_id(e))];
        if let Some(set) = t {
            let owners: Vec<usize> = set.owners_of_edge(e).collect();
            if !owners.is_empty() {
                let label = owners
                    .iter()
                    .map(|i| format!("T{}", i + 1))
                    .collect::<Vec<_>>()
                    .join(",");
                attrs.push(format!("label=\"{label}\""));
                attrs.push(format!("color={}", PALETTE[owners[0] % PALETTE.len()]));
            }
        }
        out.push_str(&format!(
            "  \"{}\" -- \"{}\" [{}];\n",
            g.label(u),
            g.label(v),
            attrs.join(", ")
        ));
    }
    out.push_str("}\n");
    out
}
