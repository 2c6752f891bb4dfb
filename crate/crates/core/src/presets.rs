//! Built-in comparison experiments.

use crate::netmodel::{Position, ScenarioConfig, TierScheme};
use crate::protocols::{ProtocolKind, ReactiveConfig};

/// Seeds used when a preset is run without an explicit seed count.
pub const DEFAULT_SEED_COUNT: u64 = 30;
/// Long enough for every node to die under all five protocols.
pub const PRESET_MAX_ROUNDS: u32 = 60_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: &'static str,
    pub base: ScenarioConfig,
    pub protocols: Vec<ProtocolKind>,
    pub seeds: Vec<u64>,
}

impl ExperimentPreset {
    /// Same preset over seeds `1..=count`.
    pub fn with_seed_count(mut self, count: u64) -> Self {
        self.seeds = (1..=count).collect();
        self
    }
}

pub const PRESET_NAMES: [&str; 2] = ["paper-case-1", "paper-case-2"];

/// 100 nodes in a 100 m square with the base station at the center, all five
/// protocols, and tier fractions `m` and `b = 0.3`.
fn heterogeneous(name: &'static str, m: f64, alpha: f64) -> ExperimentPreset {
    let base = ScenarioConfig {
        n: 100,
        field_side: 100.0,
        bs_position: Position::new(50.0, 50.0),
        initial_energy: 0.5,
        tiers: TierScheme::new(m, 0.3, alpha, 0.1).expect("preset tiers are valid"),
        protocol: ProtocolKind::Tsep,
        reactive: Some(ReactiveConfig::default()),
        max_rounds: PRESET_MAX_ROUNDS,
        ..ScenarioConfig::default()
    };
    ExperimentPreset {
        name,
        base,
        protocols: ProtocolKind::ALL.to_vec(),
        seeds: (1..=DEFAULT_SEED_COUNT).collect(),
    }
}

pub fn preset(name: &str) -> Option<ExperimentPreset> {
    match name {
        "paper-case-1" => Some(heterogeneous("paper-case-1", 0.1, 1.0)),
        "paper-case-2" => Some(heterogeneous("paper-case-2", 0.2, 3.0)),
        _ => None,
    }
}
