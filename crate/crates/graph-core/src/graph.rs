use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a vertex inside a `MultiGraph`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexId(pub u32);

/// Index of an edge inside a `MultiGraph`. Parallel edges get distinct ids.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loops are not allowed (vertex {0:?})")]
    SelfLoop(VertexId),
    #[error("vertex {0:?} is out of range")]
    NoSuchVertex(VertexId),
    #[error("edge {0:?} is out of range")]
    NoSuchEdge(EdgeId),
    #[error("no vertex labelled {0:?}")]
    NoSuchLabel(String),
    #[error("duplicate vertex label {0:?}")]
    DuplicateLabel(String),
    #[error("duplicate external edge id {0}")]
    DuplicateExternalId(i64),
    #[error("graph has no vertices")]
    Empty,
}

/// Undirected multigraph with a distinguished destination vertex.
///
/// Vertices and edges are stored as dense indices; vertices additionally carry
/// a human-readable label used by the JSON format and the topology builders.
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct MultiGraph {
    labels: Vec<String>,
    endpoints: Vec<(VertexId, VertexId)>,
    external_ids: Vec<i64>,
    destination: VertexId,
    incident: Vec<Vec<EdgeId>>,
    label_index: HashMap<String, VertexId>,
}

impl MultiGraph {
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.endpoints.len()
    }

    pub fn destination(&self) -> VertexId {
        self.destination
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.labels.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.endpoints.len() as u32).map(EdgeId)
    }

    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.endpoints[e.index()]
    }

    pub fn external_id(&self, e: EdgeId) -> i64 {
        self.external_ids[e.index()]
    }

    pub fn edge_by_external_id(&self, id: i64) -> Option<EdgeId> {
        self.external_ids
            .iter()
            .position(|&x| x == id)
            .map(|i| EdgeId(i as u32))
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.label_index.get(label).copied()
    }

    /// Edges incident to `v`, in insertion order.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incident[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.incident[v.index()].len()
    }

    /// The endpoint of `e` that is not `v`. Panics if `v` is not an endpoint.
    pub fn other_end(&self, e: EdgeId, v: VertexId) -> VertexId {
        let (a, b) = self.endpoints[e.index()];
        if v == a {
            b
        } else {
            assert_eq!(v, b, "vertex {v:?} is not an endpoint of {e:?}");
            a
        }
    }

    pub fn is_endpoint(&self, e: EdgeId, v: VertexId) -> bool {
        let (a, b) = self.endpoints[e.index()];
        v == a || v == b
    }

    /// Any edge between `u` and `v` (first by id), ignoring direction.
    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.incident[u.index()]
            .iter()
            .copied()
            .find(|&e| self.other_end(e, u) == v)
    }

    pub fn builder() -> GraphBuilder {
        GraphBuilder::default()
    }
}

/// Incremental construction of a `MultiGraph`.
#[derive(Default)]
pub struct GraphBuilder {
    labels: Vec<String>,
    label_index: HashMap<String, VertexId>,
    endpoints: Vec<(VertexId, VertexId)>,
    external_ids: Vec<i64>,
    used_external: HashMap<i64, EdgeId>,
}

impl GraphBuilder {
    /// Returns the vertex with this label, creating it if absent.
    pub fn vertex(&mut self, label: impl Into<String>) -> VertexId {
        let label = label.into();
        if let Some(&v) = self.label_index.get(&label) {
            return v;
        }
        let v = VertexId(self.labels.len() as u32);
        self.label_index.insert(label.clone(), v);
        self.labels.push(label);
        v
    }

    /// Adds an edge with an automatically assigned external id.
    pub fn edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        let mut id = self.external_ids.len() as i64;
        while self.used_external.contains_key(&id) {
            id += 1;
        }
        self.edge_with_id(u, v, id)
    }

    pub fn edge_with_id(&mut self, u: VertexId, v: VertexId, id: i64) -> Result<EdgeId, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for &w in [u, v].iter() {
            if w.index() >= self.labels.len() {
                return Err(GraphError::NoSuchVertex(w));
            }
        }
        if self.used_external.contains_key(&id) {
            return Err(GraphError::DuplicateExternalId(id));
        }
        let e = EdgeId(self.endpoints.len() as u32);
        self.used_external.insert(id, e);
        self.endpoints.push((u, v));
        self.external_ids.push(id);
        Ok(e)
    }

    pub fn build(self, destination: VertexId) -> Result<MultiGraph, GraphError> {
        if self.labels.is_empty() {
            return Err(GraphError::Empty);
        }
        if destination.index() >= self.labels.len() {
            return Err(GraphError::NoSuchVertex(destination));
        }
        let mut incident = vec![Vec::new(); self.labels.len()];
        for (i, &(u, v)) in self.endpoints.iter().enumerate() {
            incident[u.index()].push(EdgeId(i as u32));
            incident[v.index()].push(EdgeId(i as u32));
        }
        Ok(MultiGraph {
            labels: self.labels,
            endpoints: self.endpoints,
            external_ids: self.external_ids,
            destination,
            incident,
            label_index: self.label_index,
        })
    }
}

/// Set of failed undirected edges. Both arcs of a failed edge are unusable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailureSet {
    bits: Vec<bool>,
    members: Vec<EdgeId>,
}

impl FailureSet {
    pub fn empty(edge_count: usize) -> Self {
        FailureSet {
            bits: vec![false; edge_count],
            members: Vec::new(),
        }
    }

    pub fn for_graph(g: &MultiGraph) -> Self {
        Self::empty(g.edge_count())
    }

    pub fn from_edges(edge_count: usize, edges: impl IntoIterator<Item = EdgeId>) -> Self {
        let mut f = Self::empty(edge_count);
        for e in edges {
            f.insert(e);
        }
        f
    }

    pub fn insert(&mut self, e: EdgeId) {
        if !self.bits[e.index()] {
            self.bits[e.index()] = true;
            self.members.push(e);
        }
    }

    pub fn remove(&mut self, e: EdgeId) {
        if self.bits[e.index()] {
            self.bits[e.index()] = false;
            self.members.retain(|&x| x != e);
        }
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.bits[e.index()]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members.iter().copied()
    }
}
