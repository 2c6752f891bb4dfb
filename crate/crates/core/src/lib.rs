//! Round-based simulator for clustered wireless sensor networks with up to
//! three energy tiers.
//!
//! Five protocols share one radio model and one round structure: LEACH, SEP
//! and ESEP report every frame, TEEN and TSEP report only when a reading
//! crosses the hard threshold and has moved by the soft threshold since the
//! last report. Runs are pure functions of their [`ScenarioConfig`], seed
//! included. Ensembles fan out over rayon when the `parallel` feature is on.

pub mod config;
pub mod election;
pub mod engine;
pub mod error;
pub mod field;
pub mod netmodel;
pub mod output;
pub mod plot;
pub mod presets;
pub mod protocols;
pub mod radio;

pub use election::{derive_probabilities, election_threshold, elect_cluster_heads, EpochState, TierProbabilities};
pub use engine::{
    run_comparison, run_ensemble, run_ensemble_with, run_scenario, summarize_comparison,
    ComparisonTable, Execution, Metric, RoundRecord, RunSummary, Simulation, Stat,
};
pub use error::{Error, Result};
pub use field::{FieldModel, FieldSampler};
pub use netmodel::{deploy_network, total_initial_energy, Node, Position, ScenarioConfig, Tier, TierScheme};
pub use protocols::{ProtocolKind, ReactiveConfig};
pub use radio::RadioParams;
