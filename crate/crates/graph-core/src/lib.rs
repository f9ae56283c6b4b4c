//! Multigraph core for the failover routing toolkit: graph and arborescence
//! types, edge connectivity, validation, and the failure meta-graph used to
//! reason about bounce targets.

pub mod arborescence;
pub mod connectivity;
pub mod graph;
pub mod io;
pub mod meta;

pub use arborescence::{
    validate_arborescence_set, Arborescence, ArborescenceError, ArborescenceSet, Arc, Violation,
};
pub use connectivity::{edge_connectivity, is_connected, local_edge_connectivity, reachable};
pub use graph::{EdgeId, FailureSet, GraphBuilder, GraphError, MultiGraph, VertexId};
pub use io::{
    arborescences_from_json, arborescences_to_json, graph_from_json, graph_to_json, to_dot, IoError,
};
pub use meta::{build_meta_graph, good_arborescences, tree_components, MetaComponent, MetaGraph, MetaLink};
