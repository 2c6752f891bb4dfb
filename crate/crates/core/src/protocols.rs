//! Per-round protocol behavior shared by LEACH, SEP, ESEP, TEEN and TSEP.
//!
//! The five protocols differ along two axes only: how many energy tiers the
//! election distinguishes and whether members report every frame (proactive)
//! or only when the hard/soft threshold gate opens (reactive).

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::election::{elect_cluster_heads, EpochState, TierProbabilities};
use crate::error::{invalid, Error, Result};
use crate::field::FieldSampler;
use crate::netmodel::{Node, Position, TierScheme};
use crate::radio::{EnergyAccount, RadioParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProtocolKind {
    Leach,
    Sep,
    Esep,
    Teen,
    Tsep,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 5] = [
        ProtocolKind::Leach,
        ProtocolKind::Sep,
        ProtocolKind::Esep,
        ProtocolKind::Teen,
        ProtocolKind::Tsep,
    ];

    pub fn is_reactive(self) -> bool {
        matches!(self, ProtocolKind::Teen | ProtocolKind::Tsep)
    }

    pub fn tier_count(self) -> u8 {
        match self {
            ProtocolKind::Leach | ProtocolKind::Teen => 1,
            ProtocolKind::Sep => 2,
            ProtocolKind::Esep | ProtocolKind::Tsep => 3,
        }
    }

    /// Reduces `base` to the tiers this protocol knows about: single-tier
    /// protocols drop both heterogeneous fractions, SEP drops the
    /// intermediate one.
    pub fn effective_tiers(self, base: &TierScheme) -> TierScheme {
        match self.tier_count() {
            1 => TierScheme::homogeneous(base.p_opt),
            2 => TierScheme { b: 0.0, ..*base },
            _ => *base,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Leach => "LEACH",
            ProtocolKind::Sep => "SEP",
            ProtocolKind::Esep => "ESEP",
            ProtocolKind::Teen => "TEEN",
            ProtocolKind::Tsep => "TSEP",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProtocolKind::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| invalid(format!("unknown protocol {s:?}")))
    }
}

/// Parameters a reactive cluster head broadcasts at every cluster change.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactiveConfig {
    /// HT: readings below this are never reported.
    pub hard_threshold: f64,
    /// ST: minimum change from the last reported value for a repeat report.
    pub soft_threshold: f64,
    /// A: attributes being sensed.
    pub attributes: Vec<String>,
    /// TR: reporting frames per round.
    pub report_time: u32,
}

impl Default for ReactiveConfig {
    fn default() -> Self {
        ReactiveConfig {
            hard_threshold: 50.0,
            soft_threshold: 2.0,
            attributes: vec!["temperature".to_owned()],
            report_time: 1,
        }
    }
}

impl ReactiveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.soft_threshold >= 0.0 && self.soft_threshold.is_finite()) {
            return Err(invalid(format!(
                "soft_threshold must be >= 0, got {}",
                self.soft_threshold
            )));
        }
        if !self.hard_threshold.is_finite() {
            return Err(invalid("hard_threshold must be finite"));
        }
        if self.attributes.is_empty() {
            return Err(invalid("attributes must not be empty"));
        }
        if self.report_time == 0 {
            return Err(invalid("report_time must be at least 1"));
        }
        Ok(())
    }
}

/// Hard/soft threshold gate: report when the reading reaches HT and either
/// nothing has been reported yet or it moved at least ST from the last report.
pub fn should_transmit(reading: f64, last_reported: Option<f64>, cfg: &ReactiveConfig) -> bool {
    reading >= cfg.hard_threshold
        && last_reported.is_none_or(|sv| (reading - sv).abs() >= cfg.soft_threshold)
}

/// Result of cluster formation for one round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    heads: Vec<usize>,
    head_of: Vec<Option<usize>>,
    unclustered: Vec<usize>,
}

impl ClusterAssignment {
    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    /// Cluster head serving `node`, if it is a member.
    pub fn head_of(&self, node: usize) -> Option<usize> {
        self.head_of.get(node).copied().flatten()
    }

    /// `(member, head)` pairs in member id order.
    pub fn members(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.head_of
            .iter()
            .enumerate()
            .filter_map(|(m, h)| h.map(|h| (m, h)))
    }

    pub fn unclustered(&self) -> &[usize] {
        &self.unclustered
    }
}

/// Geometry and radio constants for one run.
#[derive(Debug, Clone, Copy)]
pub struct RoundEnv {
    pub radio: RadioParams,
    pub bs: Position,
    /// Distance covered by a cluster-head advertisement.
    pub broadcast_range: f64,
    pub frames: u32,
}

/// How members decide to send during steady state.
pub enum Reporting<'a> {
    Proactive,
    Reactive {
        config: &'a ReactiveConfig,
        field: &'a mut FieldSampler,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RoundOutcome {
    /// Heads elected this round, ascending.
    pub heads: Vec<usize>,
    pub packets_to_bs: u64,
}

/// Associates every alive non-head node with its nearest alive head; ties go
/// to the lower head id. With no heads every alive node is unclustered.
pub fn assign_clusters(nodes: &[Node], heads: &[usize]) -> ClusterAssignment {
    let mut heads: Vec<usize> = heads.iter().copied().filter(|&h| nodes[h].alive).collect();
    heads.sort_unstable();
    heads.dedup();
    let mut head_of = vec![None; nodes.len()];
    let mut unclustered = Vec::new();
    for node in nodes.iter().filter(|n| n.alive) {
        if heads.binary_search(&node.id).is_ok() {
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        for &h in &heads {
            let d = node.pos.distance(&nodes[h].pos);
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, h));
            }
        }
        match best {
            Some((_, h)) => head_of[node.id] = Some(h),
            None => unclustered.push(node.id),
        }
    }
    ClusterAssignment { heads, head_of, unclustered }
}

/// Builds clusters and charges the setup exchange: each head advertises once
/// over `broadcast_range`, each member receives one advertisement and sends a
/// join message to its head.
pub fn form_clusters(
    nodes: &mut [Node],
    heads: &[usize],
    env: &RoundEnv,
    account: &mut EnergyAccount,
) -> Result<ClusterAssignment> {
    let assignment = assign_clusters(nodes, heads);
    let bits = env.radio.control_bits;
    if bits == 0 {
        return Ok(assignment);
    }
    let advert = env.radio.tx_cost(bits, env.broadcast_range);
    for &h in assignment.heads() {
        account.charge(&mut nodes[h], advert)?;
    }
    for (m, h) in assignment.members() {
        if !nodes[m].alive {
            continue;
        }
        let join = env.radio.tx_cost(bits, nodes[m].pos.distance(&nodes[h].pos));
        account.charge(&mut nodes[m], env.radio.rx_cost(bits))?;
        if nodes[m].alive {
            account.charge(&mut nodes[m], join)?;
        }
    }
    Ok(assignment)
}

/// Every alive member reports each frame; every alive head aggregates what it
/// received plus its own reading and forwards one packet to the base station.
/// Unclustered nodes send straight to the base station.
pub fn steady_state_proactive(
    nodes: &mut [Node],
    assignment: &ClusterAssignment,
    env: &RoundEnv,
    account: &mut EnergyAccount,
) -> Result<u64> {
    let k = env.radio.packet_bits;
    let mut received = vec![0usize; nodes.len()];
    let mut packets = 0;
    for _ in 0..env.frames {
        received.iter_mut().for_each(|r| *r = 0);
        for (m, h) in assignment.members() {
            if nodes[m].alive && nodes[h].alive {
                deliver(nodes, m, h, env, account)?;
                received[h] += 1;
            }
        }
        for &h in assignment.heads() {
            if nodes[h].alive && forward(nodes, h, received[h] + 1, env, account)? {
                packets += 1;
            }
        }
        for &u in assignment.unclustered() {
            if nodes[u].alive {
                let cost = env.radio.tx_cost(k, nodes[u].pos.distance(&env.bs));
                account.charge(&mut nodes[u], cost)?;
                packets += 1;
            }
        }
    }
    Ok(packets)
}

/// Threshold-gated reporting. Every node, heads included, senses each frame
/// and reports only when [`should_transmit`] opens; a head forwards to the
/// base station only if it has at least one signal to aggregate.
#[allow(clippy::too_many_arguments)]
pub fn steady_state_reactive(
    nodes: &mut [Node],
    assignment: &ClusterAssignment,
    env: &RoundEnv,
    config: &ReactiveConfig,
    field: &mut FieldSampler,
    round: u32,
    account: &mut EnergyAccount,
) -> Result<u64> {
    let k = env.radio.packet_bits;
    let mut received = vec![0usize; nodes.len()];
    let mut packets = 0;
    for frame in 0..env.frames {
        let tick = round as u64 * env.frames as u64 + frame as u64;
        received.iter_mut().for_each(|r| *r = 0);
        for (m, h) in assignment.members() {
            if nodes[m].alive && nodes[h].alive && gate(&mut nodes[m], config, field, tick) {
                deliver(nodes, m, h, env, account)?;
                received[h] += 1;
            }
        }
        for &h in assignment.heads() {
            if !nodes[h].alive {
                continue;
            }
            let own = gate(&mut nodes[h], config, field, tick) as usize;
            let signals = received[h] + own;
            if signals > 0 && forward(nodes, h, signals, env, account)? {
                packets += 1;
            }
        }
        for &u in assignment.unclustered() {
            if nodes[u].alive && gate(&mut nodes[u], config, field, tick) {
                let cost = env.radio.tx_cost(k, nodes[u].pos.distance(&env.bs));
                account.charge(&mut nodes[u], cost)?;
                packets += 1;
            }
        }
    }
    Ok(packets)
}

// Senses and, when the gate opens, records the reading as the last reported value.
fn gate(node: &mut Node, config: &ReactiveConfig, field: &mut FieldSampler, tick: u64) -> bool {
    let reading = field.sense(node.id, tick);
    let fire = should_transmit(reading, node.sensed_value_memory, config);
    if fire {
        node.sensed_value_memory = Some(reading);
    }
    fire
}

fn deliver(
    nodes: &mut [Node],
    member: usize,
    head: usize,
    env: &RoundEnv,
    account: &mut EnergyAccount,
) -> Result<()> {
    let k = env.radio.packet_bits;
    let d = nodes[member].pos.distance(&nodes[head].pos);
    account.charge(&mut nodes[member], env.radio.tx_cost(k, d))?;
    account.charge(&mut nodes[head], env.radio.rx_cost(k))
}

// Aggregates `signals` and sends one packet to the base station. Returns
// whether the packet left, i.e. the head survived aggregation.
fn forward(
    nodes: &mut [Node],
    head: usize,
    signals: usize,
    env: &RoundEnv,
    account: &mut EnergyAccount,
) -> Result<bool> {
    let k = env.radio.packet_bits;
    account.charge(&mut nodes[head], env.radio.aggregation_cost(k, signals))?;
    if !nodes[head].alive {
        return Ok(false);
    }
    let cost = env.radio.tx_cost(k, nodes[head].pos.distance(&env.bs));
    account.charge(&mut nodes[head], cost)?;
    Ok(true)
}

/// One full round: election, cluster formation, optional sensing draw and
/// steady-state reporting.
#[allow(clippy::too_many_arguments)]
pub fn run_round<R: Rng + ?Sized>(
    nodes: &mut [Node],
    epoch: &EpochState,
    probs: &TierProbabilities,
    env: &RoundEnv,
    reporting: &mut Reporting<'_>,
    round: u32,
    rng: &mut R,
    account: &mut EnergyAccount,
) -> Result<RoundOutcome> {
    let heads = elect_cluster_heads(nodes, probs, epoch, rng);
    let assignment = form_clusters(nodes, &heads, env, account)?;
    if env.radio.sense_energy > 0.0 {
        for node in nodes.iter_mut().filter(|n| n.alive) {
            account.charge(node, env.radio.sense_energy)?;
        }
    }
    let packets_to_bs = match reporting {
        Reporting::Proactive => steady_state_proactive(nodes, &assignment, env, account)?,
        Reporting::Reactive { config, field } => {
            steady_state_reactive(nodes, &assignment, env, config, field, round, account)?
        }
    };
    Ok(RoundOutcome { heads, packets_to_bs })
}
