//! Tier-weighted cluster-head election with per-tier rotating thresholds.
//!
//! Each tier elects with its own probability. Within a tier epoch of
//! `round(1/p)` rounds a node that already served is ineligible, and the
//! threshold `p / (1 - p·(r mod round(1/p)))` rises towards 1 as the epoch
//! runs out, so eligible nodes are forced in by the last round.

use rand::Rng;

use crate::netmodel::{Node, Tier, TierScheme};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TierProbabilities {
    pub p_nrm: f64,
    pub p_int: f64,
    pub p_adv: f64,
}

impl TierProbabilities {
    pub fn for_tier(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Normal => self.p_nrm,
            Tier::Intermediate => self.p_int,
            Tier::Advanced => self.p_adv,
        }
    }
}

/// Splits `p_opt` across tiers in proportion to their initial energy.
pub fn derive_probabilities(tiers: &TierScheme) -> TierProbabilities {
    let denom = 1.0 + tiers.m * tiers.alpha + tiers.b * tiers.mu;
    TierProbabilities {
        p_nrm: tiers.p_opt / denom,
        p_int: tiers.p_opt * (1.0 + tiers.mu) / denom,
        p_adv: tiers.p_opt * (1.0 + tiers.alpha) / denom,
    }
}

/// Rounds in one election epoch for a tier electing with probability `p`.
pub fn epoch_length(p: f64) -> u32 {
    ((1.0 / p).round() as u32).max(1)
}

/// Election threshold for a node at `position` rounds into its tier epoch.
pub fn election_threshold(p: f64, position: u32, eligible: bool) -> f64 {
    if !eligible {
        return 0.0;
    }
    let r = (position % epoch_length(p)) as f64;
    p / (1.0 - p * r)
}

/// Per-tier epoch lengths. Eligibility and epoch position live on each node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EpochState {
    lengths: [u32; 3],
}

impl EpochState {
    pub fn new(probs: &TierProbabilities) -> Self {
        EpochState {
            lengths: Tier::ALL.map(|t| epoch_length(probs.for_tier(t))),
        }
    }

    pub fn length(&self, tier: Tier) -> u32 {
        self.lengths[tier.index()]
    }
}

/// Runs one election round over `nodes`, returning the ids of the new
/// cluster heads in ascending order.
///
/// One uniform draw is taken per alive eligible node, in id order. Afterwards
/// every alive node advances one round in its tier epoch; when the epoch
/// completes its position and eligibility reset.
pub fn elect_cluster_heads<R: Rng + ?Sized>(
    nodes: &mut [Node],
    probs: &TierProbabilities,
    epoch: &EpochState,
    rng: &mut R,
) -> Vec<usize> {
    let mut heads = Vec::new();
    for node in nodes.iter_mut().filter(|n| n.alive) {
        if !node.was_ch_this_epoch {
            let p = probs.for_tier(node.tier);
            let threshold = election_threshold(p, node.rounds_since_epoch_start, true);
            let u: f64 = rng.random();
            if u < threshold {
                node.was_ch_this_epoch = true;
                heads.push(node.id);
            }
        }
        node.rounds_since_epoch_start += 1;
        if node.rounds_since_epoch_start >= epoch.length(node.tier) {
            node.rounds_since_epoch_start = 0;
            node.was_ch_this_epoch = false;
        }
    }
    heads
}
