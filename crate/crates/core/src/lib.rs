//! Deterministic simulator and placement heuristics for edge-cloud
//! infrastructures with per-task latency SLAs.
//!
//! The crate is organised around a static [`scenario::Scenario`]
//! (servers, network, users, tasks), a pure cost model in [`metrics`],
//! pluggable placement policies in [`strategy`], a discrete-time
//! engine in [`sim`], and a full-factorial experiment harness in
//! [`experiment`]. Everything is deterministic: identical inputs give
//! byte-identical reports.

pub mod cli;
pub mod experiment;
pub mod metrics;
pub mod routing;
pub mod scenario;
pub mod sim;
pub mod strategy;

pub use metrics::{
    capacity_score, check_capacity, check_network, deadline_violation, finish_time, objective_cost,
    urgency_score, NodeState, TaskTiming,
};
pub use routing::{build_routes, Route, RouteTable};
pub use scenario::{
    builtin_paper_topology, builtin_toy, load_scenario, validate, ComputeNode, Id, Link,
    ModelWeights, NetworkElement, ResourceVector, Scenario, ScenarioError, Task, User, Violation,
};
pub use sim::{power_draw, simulate, LedgerEntry, RunReport, SimError};
pub use strategy::{
    optimal_place, proximity_place, tetris_place, NetworkView, PlacementPlan, PlacementRequest,
    Strategy,
};
