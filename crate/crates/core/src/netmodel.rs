//! Nodes, tiers, scenario configuration and network deployment.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::FieldModel;
use crate::protocols::{ProtocolKind, ReactiveConfig};
use crate::radio::RadioParams;

/// Point in the square deployment field, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }

    pub fn distance(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Initial-energy class of a node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    Normal,
    Intermediate,
    Advanced,
}

impl Tier {
    pub const ALL: [Tier; 3] = [Tier::Normal, Tier::Intermediate, Tier::Advanced];

    pub(crate) fn index(self) -> usize {
        match self {
            Tier::Normal => 0,
            Tier::Intermediate => 1,
            Tier::Advanced => 2,
        }
    }
}

/// Three-level energy heterogeneity: a fraction `m` of advanced nodes carrying
/// `1 + alpha` times the base energy and a fraction `b` of intermediate nodes
/// carrying `1 + mu` times the base energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierScheme {
    pub m: f64,
    pub b: f64,
    pub alpha: f64,
    pub mu: f64,
    pub p_opt: f64,
}

impl TierScheme {
    /// Builds a scheme with the intermediate multiplier halfway to the advanced one.
    pub fn new(m: f64, b: f64, alpha: f64, p_opt: f64) -> Result<Self> {
        Self::with_mu(m, b, alpha, alpha / 2.0, p_opt)
    }

    pub fn with_mu(m: f64, b: f64, alpha: f64, mu: f64, p_opt: f64) -> Result<Self> {
        let scheme = TierScheme { m, b, alpha, mu, p_opt };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Single-tier network: every node is normal.
    pub fn homogeneous(p_opt: f64) -> Self {
        TierScheme { m: 0.0, b: 0.0, alpha: 0.0, mu: 0.0, p_opt }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !unit(self.m) {
            return Err(invalid(format!("m must lie in [0, 1], got {}", self.m)));
        }
        if !unit(self.b) {
            return Err(invalid(format!("b must lie in [0, 1], got {}", self.b)));
        }
        if self.m + self.b > 1.0 {
            return Err(invalid(format!("m + b must not exceed 1, got {}", self.m + self.b)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(invalid(format!("alpha must be finite and >= 0, got {}", self.alpha)));
        }
        if !(self.mu >= 0.0 && self.mu <= self.alpha) {
            return Err(invalid(format!("mu must lie in [0, alpha], got {}", self.mu)));
        }
        if !(self.p_opt > 0.0 && self.p_opt <= 1.0) {
            return Err(invalid(format!("p_opt must lie in (0, 1], got {}", self.p_opt)));
        }
        Ok(())
    }

    pub fn normal_fraction(&self) -> f64 {
        1.0 - self.m - self.b
    }

    /// Initial energy of a node of `tier` relative to the base energy.
    pub fn energy_multiplier(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Normal => 1.0,
            Tier::Intermediate => 1.0 + self.mu,
            Tier::Advanced => 1.0 + self.alpha,
        }
    }

    /// `(advanced, intermediate)` node counts for a network of `n` nodes.
    pub fn tier_counts(&self, n: usize) -> Result<(usize, usize)> {
        let advanced = (self.m * n as f64).round() as usize;
        let intermediate = (self.b * n as f64).round() as usize;
        if advanced + intermediate > n {
            return Err(invalid(format!(
                "round(m*n) + round(b*n) = {} exceeds n = {n}",
                advanced + intermediate
            )));
        }
        Ok((advanced, intermediate))
    }
}

/// A sensor node and its per-run state.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: usize,
    pub pos: Position,
    pub tier: Tier,
    pub initial_energy: f64,
    pub residual_energy: f64,
    pub alive: bool,
    /// Served as cluster head in the current epoch of its tier.
    pub was_ch_this_epoch: bool,
    /// Last value this node reported (reactive protocols only).
    pub sensed_value_memory: Option<f64>,
    pub rounds_since_epoch_start: u32,
}

impl Node {
    pub fn new(id: usize, pos: Position, tier: Tier, energy: f64) -> Self {
        Node {
            id,
            pos,
            tier,
            initial_energy: energy,
            residual_energy: energy,
            alive: true,
            was_ch_this_epoch: false,
            sensed_value_memory: None,
            rounds_since_epoch_start: 0,
        }
    }

    pub fn eligible(&self) -> bool {
        self.alive && !self.was_ch_this_epoch
    }

    pub fn consumed(&self) -> f64 {
        self.initial_energy - self.residual_energy
    }
}

/// Everything needed to run one simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    pub field_side: f64,
    pub bs_position: Position,
    /// Base energy of a normal node, joules.
    pub initial_energy: f64,
    pub tiers: TierScheme,
    pub radio: RadioParams,
    /// Present exactly when `protocol` is reactive.
    pub reactive: Option<ReactiveConfig>,
    pub field: FieldModel,
    pub protocol: ProtocolKind,
    pub max_rounds: u32,
    pub rng_seed: u64,
    pub frames_per_round: u32,
    /// Energy is never drawn and no node dies. Used to study election alone.
    pub deaths_disabled: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 100,
            field_side: 100.0,
            bs_position: Position::new(50.0, 50.0),
            initial_energy: 0.5,
            tiers: TierScheme::homogeneous(0.1),
            radio: RadioParams::default(),
            reactive: None,
            field: FieldModel::default(),
            protocol: ProtocolKind::Leach,
            max_rounds: 10_000,
            rng_seed: 0,
            frames_per_round: 1,
            deaths_disabled: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1"));
        }
        if !(self.field_side > 0.0 && self.field_side.is_finite()) {
            return Err(invalid(format!("field_side must be positive, got {}", self.field_side)));
        }
        if !(self.initial_energy > 0.0 && self.initial_energy.is_finite()) {
            return Err(invalid(format!(
                "initial_energy must be positive, got {}",
                self.initial_energy
            )));
        }
        if self.max_rounds == 0 {
            return Err(invalid("max_rounds must be at least 1"));
        }
        if self.frames_per_round == 0 {
            return Err(invalid("frames_per_round must be at least 1"));
        }
        self.tiers.validate()?;
        self.tiers.tier_counts(self.n)?;
        self.radio.validate()?;
        self.field.validate()?;
        match (&self.reactive, self.protocol.is_reactive()) {
            (Some(r), true) => r.validate()?,
            (None, false) => {}
            (None, true) => {
                return Err(invalid(format!(
                    "{} is reactive and needs reactive settings",
                    self.protocol
                )))
            }
            (Some(_), false) => {
                return Err(invalid(format!(
                    "{} is proactive and takes no reactive settings",
                    self.protocol
                )))
            }
        }
        Ok(())
    }

    /// Same scenario run under another protocol. Reactive settings are kept
    /// (or defaulted) for reactive protocols and dropped for proactive ones.
    pub fn for_protocol(&self, protocol: ProtocolKind) -> ScenarioConfig {
        let reactive = protocol
            .is_reactive()
            .then(|| self.reactive.clone().unwrap_or_default());
        ScenarioConfig { protocol, reactive, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> ScenarioConfig {
        ScenarioConfig { rng_seed: seed, ..self.clone() }
    }

    /// Tier scheme actually used once the protocol's tier count is applied.
    pub fn effective_tiers(&self) -> TierScheme {
        self.protocol.effective_tiers(&self.tiers)
    }

    /// Longest distance inside the field, used as the advertisement range.
    pub fn field_diagonal(&self) -> f64 {
        self.field_side * std::f64::consts::SQRT_2
    }

    /// Frames of steady-state reporting per round.
    pub fn frames(&self) -> u32 {
        match &self.reactive {
            Some(r) if self.protocol.is_reactive() => r.report_time,
            _ => self.frames_per_round,
        }
    }
}

/// Places `config.n` nodes uniformly over the field. Tiers are assigned by
/// exact counts: the first `round(m·n)` ids are advanced, the next `round(b·n)`
/// intermediate and the rest normal. Positions are i.i.d., so which ids carry
/// which tier does not bias the layout.
///
/// The tier scheme used is `config.tiers` as given; callers that want the
/// protocol-implied scheme pass a config whose tiers are already reduced.
pub fn deploy_network<R: Rng + ?Sized>(config: &ScenarioConfig, rng: &mut R) -> Result<Vec<Node>> {
    deploy_with_tiers(config, &config.tiers, rng)
}

pub(crate) fn deploy_with_tiers<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    tiers: &TierScheme,
    rng: &mut R,
) -> Result<Vec<Node>> {
    if config.n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let (advanced, intermediate) = tiers.tier_counts(config.n)?;
    let side = config.field_side;
    let nodes = (0..config.n)
        .map(|id| {
            let pos = Position::new(rng.random::<f64>() * side, rng.random::<f64>() * side);
            let tier = if id < advanced {
                Tier::Advanced
            } else if id < advanced + intermediate {
                Tier::Intermediate
            } else {
                Tier::Normal
            };
            let energy = config.initial_energy * tiers.energy_multiplier(tier);
            Node::new(id, pos, tier, energy)
        })
        .collect();
    Ok(nodes)
}

/// Sum of initial energies.
pub fn total_initial_energy(nodes: &[Node]) -> f64 {
    nodes.iter().map(|n| n.initial_energy).sum()
}
