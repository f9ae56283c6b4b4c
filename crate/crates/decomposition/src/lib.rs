//! Arborescence-set construction: general backtracking decomposition, the
//! edge-disjoint-by-halves builder driven by pinch operations, bespoke
//! topology generators, and edge subdivision.

pub mod general;
pub mod mader;
pub mod subdivide;
pub mod topology;

pub use general::{
    decompose_general, decompose_with_budget, extend_general, DecomposeError, DEFAULT_BUDGET,
};
pub use mader::{mader_build, mader_build_odd, MaderError, MaderOp};
pub use subdivide::subdivide_three;
pub use topology::{build_topology, GadgetBench, Topology, TopologyError, TopologySpec};
