//! Simulation driver, per-round metrics, seed ensembles and protocol
//! comparison tables.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::election::{derive_probabilities, EpochState, TierProbabilities};
use crate::error::{Error, Result};
use crate::field::FieldSampler;
use crate::netmodel::{deploy_with_tiers, total_initial_energy, Node, ScenarioConfig};
use crate::protocols::{run_round, ProtocolKind, Reporting, RoundEnv};
use crate::radio::EnergyAccount;

const PLACEMENT_STREAM: u64 = 1;
const ELECTION_STREAM: u64 = 2;

/// Network state at the end of one round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    /// Zero-based round index.
    pub round: u32,
    pub alive: u32,
    pub dead: u32,
    pub ch_count: u32,
    pub packets_round: u64,
    pub packets_cum: u64,
    pub residual_energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub protocol: ProtocolKind,
    pub seed: u64,
    /// Round in which the first node died.
    pub stability_period: Option<u32>,
    /// Rounds from the first death to the last; absent unless every node died.
    pub instability_period: Option<u32>,
    /// Round in which the last node died, or `max_rounds` if some survived.
    pub network_lifetime: u32,
    /// Round by which at least half the nodes had died.
    pub half_dead_round: Option<u32>,
    pub total_packets: u64,
    pub initial_energy: f64,
    /// Energy drawn from batteries over the run, as booked by the charges.
    pub energy_drawn: f64,
    #[serde(skip)]
    pub per_round: Vec<RoundRecord>,
    #[serde(skip)]
    pub config: ScenarioConfig,
}

impl RunSummary {
    pub fn residual_energy(&self) -> f64 {
        self.per_round.last().map_or(self.initial_energy, |r| r.residual_energy)
    }
}

/// A single run in progress. Use [`run_scenario`] unless the node state
/// between rounds matters.
pub struct Simulation {
    config: ScenarioConfig,
    nodes: Vec<Node>,
    probs: TierProbabilities,
    epoch: EpochState,
    env: RoundEnv,
    election_rng: ChaCha8Rng,
    field: FieldSampler,
    account: EnergyAccount,
    round: u32,
    packets_cum: u64,
    initial_energy: f64,
    first_death: Option<u32>,
    half_dead: Option<u32>,
    last_death: Option<u32>,
    last_heads: Vec<usize>,
}

impl Simulation {
    /// Validates `config` and deploys its network. Placement, election and
    /// the sensed field draw from independent streams of the same seed, so
    /// every protocol sees the same layout for a given seed.
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let tiers = config.effective_tiers();
        let mut placement = ChaCha8Rng::seed_from_u64(config.rng_seed);
        placement.set_stream(PLACEMENT_STREAM);
        let nodes = deploy_with_tiers(&config, &tiers, &mut placement)?;
        let mut election_rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        election_rng.set_stream(ELECTION_STREAM);
        let probs = derive_probabilities(&tiers);
        let env = RoundEnv {
            radio: config.radio,
            bs: config.bs_position,
            broadcast_range: config.field_diagonal(),
            frames: config.frames(),
        };
        Ok(Simulation {
            initial_energy: total_initial_energy(&nodes),
            nodes,
            probs,
            epoch: EpochState::new(&probs),
            env,
            election_rng,
            field: FieldSampler::new(config.field, config.rng_seed),
            account: EnergyAccount::new(config.deaths_disabled),
            round: 0,
            packets_cum: 0,
            first_death: None,
            half_dead: None,
            last_death: None,
            last_heads: Vec::new(),
            config,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn probabilities(&self) -> &TierProbabilities {
        &self.probs
    }

    pub fn energy_drawn(&self) -> f64 {
        self.account.drawn()
    }

    pub fn alive(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    /// Cluster heads elected in the most recent round.
    pub fn last_heads(&self) -> &[usize] {
        &self.last_heads
    }

    /// Rounds simulated so far.
    pub fn rounds_done(&self) -> u32 {
        self.round
    }

    pub fn finished(&self) -> bool {
        self.round >= self.config.max_rounds || self.alive() == 0
    }

    /// Simulates the next round.
    pub fn step(&mut self) -> Result<RoundRecord> {
        let round = self.round;
        let mut reporting = match &self.config.reactive {
            Some(config) if self.config.protocol.is_reactive() => Reporting::Reactive {
                config,
                field: &mut self.field,
            },
            _ => Reporting::Proactive,
        };
        let outcome = run_round(
            &mut self.nodes,
            &self.epoch,
            &self.probs,
            &self.env,
            &mut reporting,
            round,
            &mut self.election_rng,
            &mut self.account,
        )?;
        self.round += 1;
        self.packets_cum += outcome.packets_to_bs;
        let ch_count = outcome.heads.len() as u32;
        self.last_heads = outcome.heads;

        let n = self.nodes.len();
        let alive = self.alive();
        let dead = n - alive;
        if dead > 0 && self.first_death.is_none() {
            self.first_death = Some(round);
        }
        if 2 * dead >= n && self.half_dead.is_none() {
            self.half_dead = Some(round);
        }
        if alive == 0 && self.last_death.is_none() {
            self.last_death = Some(round);
        }
        Ok(RoundRecord {
            round,
            alive: alive as u32,
            dead: dead as u32,
            ch_count,
            packets_round: outcome.packets_to_bs,
            packets_cum: self.packets_cum,
            residual_energy: self.nodes.iter().map(|n| n.residual_energy).sum(),
        })
    }

    /// Runs until every node is dead or `max_rounds` is reached.
    pub fn run(mut self) -> Result<RunSummary> {
        let mut per_round = Vec::new();
        while !self.finished() {
            per_round.push(self.step()?);
        }
        let stability = self.first_death;
        let lifetime = self.last_death.unwrap_or(self.config.max_rounds);
        Ok(RunSummary {
            protocol: self.config.protocol,
            seed: self.config.rng_seed,
            stability_period: stability,
            instability_period: self.last_death.zip(stability).map(|(last, first)| last - first),
            network_lifetime: lifetime,
            half_dead_round: self.half_dead,
            total_packets: self.packets_cum,
            initial_energy: self.initial_energy,
            energy_drawn: self.account.drawn(),
            per_round,
            config: self.config,
        })
    }
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<RunSummary> {
    Simulation::new(config.clone())?.run()
}

/// How ensemble members are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        return Execution::Parallel;
        #[cfg(not(feature = "parallel"))]
        return Execution::Sequential;
    }
}

fn map_ordered<T, U, F>(items: Vec<T>, exec: Execution, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    match exec {
        Execution::Sequential => items.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            items.into_par_iter().map(f).collect()
        }
    }
}

/// One run per seed, returned in seed-list order.
pub fn run_ensemble(config: &ScenarioConfig, seeds: &[u64]) -> Result<Vec<RunSummary>> {
    run_ensemble_with(config, seeds, Execution::default())
}

pub fn run_ensemble_with(
    config: &ScenarioConfig,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<RunSummary>> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    config.validate()?;
    let configs = seeds.iter().map(|&s| config.with_seed(s)).collect();
    map_ordered(configs, exec, |c| run_scenario(&c)).into_iter().collect()
}

/// Runs every protocol in `protocols` over every seed on the same base
/// scenario. Each protocol's runs come back in seed-list order.
pub fn run_comparison(
    base: &ScenarioConfig,
    protocols: &[ProtocolKind],
    seeds: &[u64],
    exec: Execution,
) -> Result<BTreeMap<ProtocolKind, Vec<RunSummary>>> {
    if seeds.is_empty() {
        return Err(Error::EmptySeeds);
    }
    if protocols.is_empty() {
        return Err(Error::EmptyComparison);
    }
    let jobs: Vec<ScenarioConfig> = protocols
        .iter()
        .flat_map(|&p| seeds.iter().map(move |&s| base.for_protocol(p).with_seed(s)))
        .collect();
    for job in jobs.iter().step_by(seeds.len()) {
        job.validate()?;
    }
    let mut out: BTreeMap<ProtocolKind, Vec<RunSummary>> = BTreeMap::new();
    for summary in map_ordered(jobs, exec, |c| run_scenario(&c)) {
        let summary = summary?;
        out.entry(summary.protocol).or_default().push(summary);
    }
    Ok(out)
}

/// Mean and sample standard deviation over the runs where a metric exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl Stat {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Stat {
        let xs: Vec<f64> = values.into_iter().collect();
        let count = xs.len();
        if count == 0 {
            return Stat { mean: f64::NAN, sd: f64::NAN, count };
        }
        let mean = xs.iter().sum::<f64>() / count as f64;
        let sd = if count > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Stat { mean, sd, count }
    }

    /// `self` lies strictly above `other` with the mean±sd intervals disjoint.
    pub fn separated_above(&self, other: &Stat) -> bool {
        self.mean - self.sd > other.mean + other.sd
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Metric {
    Stability,
    Lifetime,
    Packets,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Stability, Metric::Lifetime, Metric::Packets];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Stability => "stability",
            Metric::Lifetime => "lifetime",
            Metric::Packets => "packets",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub protocol: ProtocolKind,
    pub runs: usize,
    pub stability: Stat,
    pub lifetime: Stat,
    pub packets: Stat,
}

impl ComparisonRow {
    pub fn stat(&self, metric: Metric) -> &Stat {
        match metric {
            Metric::Stability => &self.stability,
            Metric::Lifetime => &self.lifetime,
            Metric::Packets => &self.packets,
        }
    }
}

/// Pairwise ordering of two protocols on one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ordering {
    pub higher: ProtocolKind,
    pub lower: ProtocolKind,
    pub metric: Metric,
    /// The mean±sd intervals do not overlap.
    pub separated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
    pub orderings: Vec<Ordering>,
}

impl ComparisonTable {
    pub fn row(&self, protocol: ProtocolKind) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.protocol == protocol)
    }

    /// The protocol with the highest mean for `metric`.
    pub fn leader(&self, metric: Metric) -> Option<ProtocolKind> {
        self.rows
            .iter()
            .filter(|r| !r.stat(metric).mean.is_nan())
            .max_by(|a, b| a.stat(metric).mean.total_cmp(&b.stat(metric).mean))
            .map(|r| r.protocol)
    }

    pub fn ordering(&self, a: ProtocolKind, b: ProtocolKind, metric: Metric) -> Option<&Ordering> {
        self.orderings.iter().find(|o| {
            o.metric == metric
                && ((o.higher == a && o.lower == b) || (o.higher == b && o.lower == a))
        })
    }
}

// What the runs of a comparison must share: everything but protocol and seed.
fn base_of(config: &ScenarioConfig) -> ScenarioConfig {
    ScenarioConfig {
        protocol: ProtocolKind::Leach,
        reactive: None,
        rng_seed: 0,
        ..config.clone()
    }
}

/// Per-protocol mean ± sd of stability period, lifetime and delivered packets,
/// plus an ordering entry for every protocol pair and metric.
pub fn summarize_comparison(
    summaries: &BTreeMap<ProtocolKind, Vec<RunSummary>>,
) -> Result<ComparisonTable> {
    let all = || summaries.values().flatten();
    let first = all().next().ok_or(Error::EmptyComparison)?;
    let base = base_of(&first.config);
    if all().any(|s| base_of(&s.config) != base) {
        return Err(Error::MixedBaseConfig);
    }
    let rows: Vec<ComparisonRow> = summaries
        .iter()
        .filter(|(_, runs)| !runs.is_empty())
        .map(|(&protocol, runs)| ComparisonRow {
            protocol,
            runs: runs.len(),
            stability: Stat::from_values(runs.iter().filter_map(|r| r.stability_period.map(f64::from))),
            lifetime: Stat::from_values(runs.iter().map(|r| r.network_lifetime as f64)),
            packets: Stat::from_values(runs.iter().map(|r| r.total_packets as f64)),
        })
        .collect();
    let mut orderings = Vec::new();
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            for metric in Metric::ALL {
                let (sa, sb) = (a.stat(metric), b.stat(metric));
                if sa.mean.is_nan() || sb.mean.is_nan() {
                    continue;
                }
                let (hi, lo, shi, slo) = if sa.mean >= sb.mean { (a, b, sa, sb) } else { (b, a, sb, sa) };
                orderings.push(Ordering {
                    higher: hi.protocol,
                    lower: lo.protocol,
                    metric,
                    separated: shi.separated_above(slo),
                });
            }
        }
    }
    Ok(ComparisonTable { rows, orderings })
}
