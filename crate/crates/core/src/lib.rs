//! Decide whether a bipartite graph admits a 2-layer fan-planar drawing.
//!
//! A 2-layer drawing places the two vertex classes on two parallel lines
//! and draws edges as straight segments; it is fan-planar when the edges
//! crossing any fixed edge all share an endpoint. The pipeline combines
//! degree reductions, counting-based rejection rules, an exhaustive search
//! oracle for small instances, and a windowed dynamic program, and returns
//! a verifiable drawing on YES.

pub mod drawing;
pub mod dpsolver;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod reduction;

pub use drawing::{render_svg, CrossingReport, DrawingFile, TwoLayerDrawing};
pub use dpsolver::{
    decide, decide_dp, Answer, DecideOptions, DecideStats, Decision, DpBudget, DpMemo, DpOutcome,
    DpState, Method,
};
pub use error::{Error, Result};
pub use graph::{parse_graph, BipartiteGraph, Edge, EdgeSet, Side, VertexSet};
pub use oracle::{
    decide_bruteforce, exhaustive_graphs, min_k, random_graph, Lcg, MinKOutcome, OracleOutcome,
    SearchBudget,
};
pub use reduction::{
    apply_reductions, early_reject, is_reduced, lift_drawing, replay_trace, RejectKind,
    RejectReason, ReductionStep, ReductionTrace, Rule,
};
