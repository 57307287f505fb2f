//! Decreasingly minimal ("fair") integral modular flows.
//!
//! Given a digraph with integer bounds `f <= x <= g` (possibly infinite),
//! node supplies `m` and a focus edge set `F`, this crate computes integral
//! m-flows whose values on `F`, sorted decreasingly, are lexicographically
//! smallest. It also computes a box `(f*, g*)`, of width at most one on `F`,
//! whose integral m-flows are exactly the decreasingly minimal ones, and it
//! checks optimality with independent certificates (improving di-circuits
//! and lexicographic potential-vectors).

pub mod bellman_ford;
pub mod certificates;
pub mod decmin;
pub mod error;
pub mod existence;
pub mod ext;
pub mod graph;
pub mod io;
pub mod maxflow;
pub mod mincost;
pub mod newton_dinkelbach;
pub mod oracle;
pub mod upper_minimizer;

pub use error::{FlowError, Result};
pub use ext::{ExtInt, Fin, NegInf, PosInf};
pub use graph::{
    boundary_sums, build_aux_digraph, check_flow, decmin_compare, AuxDigraph, Digraph, FlowCheck, FlowProblem,
    IntegralFlow, NodeSet,
};
