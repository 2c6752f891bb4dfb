//! First-order radio energy model.
//!
//! Transmitting `k` bits over distance `d` costs `E_elec·k + ε_fs·k·d²` below
//! the crossover distance `d0 = sqrt(ε_fs/ε_mp)` and `E_elec·k + ε_mp·k·d⁴`
//! at or beyond it. Receiving costs `E_elec·k`; aggregating costs `E_DA` per
//! bit per merged signal.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::netmodel::Node;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Data aggregation energy, J/bit/signal.
    pub e_da: f64,
    /// Free-space amplifier, J/bit/m².
    pub eps_fs: f64,
    /// Multipath amplifier, J/bit/m⁴.
    pub eps_mp: f64,
    /// Data packet size K, bits.
    pub packet_bits: u32,
    /// Free-space/multipath crossover distance, m.
    pub d0: f64,
    /// Advertisement and join message size, bits. Zero disables control overhead.
    pub control_bits: u32,
    /// Energy drawn by every alive node each round for sensing, J.
    pub sense_energy: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        let eps_fs = 10e-12;
        let eps_mp = 0.0013e-12;
        RadioParams {
            e_elec: 50e-9,
            e_da: 5e-9,
            eps_fs,
            eps_mp,
            packet_bits: 4000,
            d0: (eps_fs / eps_mp).sqrt(),
            control_bits: 200,
            sense_energy: 0.0,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("e_elec", self.e_elec),
            ("e_da", self.e_da),
            ("eps_fs", self.eps_fs),
            ("eps_mp", self.eps_mp),
            ("packet_bits", self.packet_bits as f64),
            ("d0", self.d0),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if !(self.sense_energy >= 0.0 && self.sense_energy.is_finite()) {
            return Err(invalid(format!(
                "sense_energy must be >= 0, got {}",
                self.sense_energy
            )));
        }
        Ok(())
    }

    pub fn tx_cost(&self, bits: u32, distance: f64) -> f64 {
        let k = bits as f64;
        if distance < self.d0 {
            self.e_elec * k + self.eps_fs * k * distance * distance
        } else {
            self.e_elec * k + self.eps_mp * k * distance.powi(4)
        }
    }

    pub fn rx_cost(&self, bits: u32) -> f64 {
        self.e_elec * bits as f64
    }

    pub fn aggregation_cost(&self, bits: u32, signal_count: usize) -> f64 {
        self.e_da * bits as f64 * signal_count as f64
    }
}

/// Draws `cost` from a live node and returns the energy actually removed.
///
/// A charge that exhausts the node still happens (the packet was sent), but
/// the residual clamps at zero and only the energy the node held is drawn.
pub fn charge(node: &mut Node, cost: f64) -> Result<f64> {
    if !node.alive {
        return Err(Error::DeadNode(node.id));
    }
    let remaining = node.residual_energy - cost;
    if remaining <= 0.0 {
        let drawn = node.residual_energy;
        node.residual_energy = 0.0;
        node.alive = false;
        Ok(drawn)
    } else {
        let drawn = node.residual_energy - remaining;
        node.residual_energy = remaining;
        Ok(drawn)
    }
}

/// Running total of energy drawn during a run.
#[derive(Debug, Clone, Default)]
pub struct EnergyAccount {
    drawn: f64,
    // Neumaier compensation term, keeps the total exact to within an ulp
    carry: f64,
    deaths_disabled: bool,
}

impl EnergyAccount {
    pub fn new(deaths_disabled: bool) -> Self {
        EnergyAccount { drawn: 0.0, carry: 0.0, deaths_disabled }
    }

    pub fn charge(&mut self, node: &mut Node, cost: f64) -> Result<()> {
        if self.deaths_disabled {
            if !node.alive {
                return Err(Error::DeadNode(node.id));
            }
            return Ok(());
        }
        let x = charge(node, cost)?;
        let sum = self.drawn + x;
        self.carry += if self.drawn.abs() >= x.abs() {
            (self.drawn - sum) + x
        } else {
            (x - sum) + self.drawn
        };
        self.drawn = sum;
        Ok(())
    }

    pub fn drawn(&self) -> f64 {
        self.drawn + self.carry
    }
}
