//! Round-based simulator for three-level heterogeneous wireless sensor
//! networks.
//!
//! Nodes come in three energy classes (normal, advanced, super) and are
//! deployed uniformly in a square field. Each round, cluster heads are
//! elected by LEACH, EEHC or EASM; members send one frame to the nearest
//! head, heads aggregate and forward to a distant base station. Energy is
//! charged with the first-order radio model and lifetime metrics (first node
//! dies, half nodes alive, last node dies) are folded from the round stream.

pub mod engine;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod network;
pub mod protocol;
pub mod radio;
pub mod rng;

pub use engine::{
    form_clusters, run_round, run_round_with_heads, run_steady_state, ClusterAssignment,
    RoundReport, RoundSetup, Simulation, SteadyStateOutcome,
};
pub use error::{Result, SimError};
pub use experiment::{
    compare, compare_in_memory, protocol_configs, run_experiment, run_single, simulate, sweep,
    ComparisonResult, ExperimentConfig, ExperimentResult, MilestoneStats, ProtocolStats,
    RunOutcome, SweepParam, SweepPoint, SCENARIO_1, SCENARIO_2,
};
pub use metrics::{fold, messages_vs_energy, LifetimeSummary, Milestone};
pub use network::{
    deploy, distance, total_initial_energy, ClassCounts, HeterogeneityParams, NetworkConfig, Node,
    NodeClass, Position,
};
pub use protocol::{
    class_probability, elect, epoch_length, threshold, ElectionContext, ProtocolKind, ResetTrigger,
};
pub use radio::{aggregation_cost, rx_cost, tx_cost, RadioParams};
