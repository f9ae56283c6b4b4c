pub mod bounced;
pub mod circular;
pub mod config;
pub mod df_algo;
pub mod dup;
pub mod traversal;
pub mod vertex_circular;

use graph_core::{Arc, EdgeId, FailureSet, MultiGraph, VertexId};
use thiserror::Error;

pub use bounced::bounced_rand_decide;
pub use circular::{circular_decide, circular_decide_traced, plus_one_decide, Circular};
pub use config::{compile, CompiledScheme, ResetRule, SchemeConfig};
pub use df_algo::{tree_indices_of_edge, DfAlgo};
pub use dup::{dup_even_decide, dup_odd_decide};
pub use traversal::dfs_traversal;
pub use vertex_circular::{vertex_circular_decide, VertexCircular};

/// Per-packet control bits: `rm` selects the routing mode (0 canonical,
/// 1 forward traversal, 2 inverse traversal) and `h` disambiguates which of
/// the two arborescences sharing the last edge is in use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Header {
    pub rm: u8,
    pub h: u8,
}

impl Header {
    pub fn new(rm: u8, h: u8) -> Self {
        Header { rm, h }
    }

    pub fn is_valid(self) -> bool {
        self.rm <= 2 && self.h <= 1
    }
}

/// Everything a vertex may consult when deciding where to forward: its own
/// identity, the arc the packet arrived over (`None` for locally originated
/// packets), which incident edges are still up, and the packet header.
#[derive(Clone, Copy)]
pub struct LocalView<'a> {
    pub g: &'a MultiGraph,
    pub failures: &'a FailureSet,
    pub vertex: VertexId,
    pub incoming: Option<Arc>,
    pub header: Header,
}

impl<'a> LocalView<'a> {
    pub fn new(
        g: &'a MultiGraph,
        failures: &'a FailureSet,
        vertex: VertexId,
        incoming: Option<Arc>,
        header: Header,
    ) -> Self {
        debug_assert!(incoming.map_or(true, |a| a.head == vertex));
        LocalView {
            g,
            failures,
            vertex,
            incoming,
            header,
        }
    }

    pub fn is_active(&self, e: EdgeId) -> bool {
        !self.failures.contains(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForwardAction {
    Forward {
        arc: Arc,
        header: Header,
    },
    /// Several outgoing packets at once; `created` counts how many fresh
    /// copies were spawned while resolving this decision (dropped copies
    /// included), which is the quantity the copy bounds speak about.
    Duplicate {
        out: Vec<(Arc, Header)>,
        created: usize,
    },
    Drop {
        distinct_failures: usize,
    },
    Deliver,
}

#[derive(Debug, Error, PartialEq)]
pub enum SchemeError {
    #[error("incoming arc {0:?} belongs to no arborescence")]
    IncomingNotInAnyTree(Arc),
    #[error("header rm={rm} h={h} out of range")]
    BadHeader { rm: u8, h: u8 },
    #[error("ordering {0:?} is not a permutation of the tree indices")]
    BadOrdering(Vec<usize>),
    #[error("probability {0} outside (0, 1)")]
    BadProbability(f64),
    #[error("edge {0:?} belongs to no arborescence")]
    EdgeNotInAnyTree(EdgeId),
    #[error("port order at {0} is not a cyclic permutation of its incident edges")]
    BadPortOrder(String),
    #[error("scheme expects {expected} arborescences, set has {got}")]
    WrongTreeCount { expected: usize, got: usize },
    #[error("unknown vertex label {0}")]
    UnknownVertex(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(i64),
    #[error("randomized scheme invoked without a random stream")]
    MissingRng,
}
