//! Max-plus algebra models of single-class fork-join queueing networks.
//!
//! A network is a directed graph of single-server FCFS nodes. Customers are
//! joined on entry (one from every predecessor), served, and forked on
//! departure (one to every successor). Buffers may be finite, in which case
//! servers block under the manufacturing or the communication rule.
//!
//! The departure epochs `d(k)` of the `k`-th customers obey an implicit
//! max-plus equation. When the graph of arcs into initially empty nodes is
//! acyclic, it has the explicit form `d(k) = ⊕_m T_m(k) ⊗ d(k − m)`, and the
//! stacked state evolves as `d̂(k) = T̂(k) ⊗ d̂(k − 1)`.
//!
//! - [`maxplus`]: scalar and matrix algebra, associated graphs, the implicit solver.
//! - [`network`]: topology, buffers, service times and the JSON file format.
//! - [`system`]: delayed adjacency matrices, solvability, transition matrices.
//! - [`dynamics`]: the three evolution engines.
//! - [`oracle`]: an independent discrete-event simulator.
//! - [`export`]: CSV and JSON renderings.
//! - [`random`]: seeded random networks for testing and experiments.

pub mod dynamics;
pub mod export;
pub mod maxplus;
pub mod network;
pub mod oracle;
pub mod random;
pub mod system;

/// Time values used by the queueing model: integer epochs or ε.
pub type Time = maxplus::TimeValue<i64>;
