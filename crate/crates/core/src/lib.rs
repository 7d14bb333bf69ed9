//! Transmission scheduling and in-network aggregation for federated learning
//! in multi-hop UAV swarms.
//!
//! A swarm of hovering UAVs forms a connected unit-disk graph. Each global FL
//! round, every UAV trains a local model that must be aggregated at a single
//! root UAV. This crate selects the root with minimum graph eccentricity,
//! builds the breadth-first aggregation tree, derives the per-slot convergecast
//! schedule, and executes the round as a deterministic slot-by-slot simulation
//! that performs weighted in-network aggregation along the way.
//!
//! The scheme delivers three guarantees, all checked by the test suites:
//! the root's aggregate equals the direct weighted sum of all local models,
//! the round completes in exactly `min-eccentricity` slots, and exactly
//! `V - 1` messages are transmitted.
//!
//! Baseline schemes (shortest-path unicast, neighbor broadcast, alternative
//! root choices) and an experiment driver for paired comparisons live in
//! [`baselines`] and [`experiment`]. A synthetic convex FL workload with an
//! exact centralized reference lives in [`flmodel`].

pub mod baselines;
pub mod experiment;
pub mod flmodel;
pub mod schedule;
pub mod seed;
pub mod simcore;
pub mod topology;

pub use baselines::{BaselineResult, Scheme};
pub use experiment::{ExperimentOutput, ExperimentPlan};
pub use flmodel::{DataSplit, FlConfig, FlHistory, LocalProblem};
pub use schedule::{Schedule, TransmissionSlot, ValidationReport};
pub use simcore::{BroadcastResult, ModelVector, NodeState, RoundResult};
pub use topology::{BfsTree, DeploymentConfig, SwarmTopology};
