//! Synthetic temperature field for the reactive protocols.
//!
//! A reading is the ambient baseline plus Gaussian jitter, plus an event
//! magnitude while the node sits inside an event window. Every random draw is
//! addressed by `(node, tick)` in a counter-based ChaCha stream, so a reading
//! depends only on the model, the seed, the node and the tick.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldModel {
    /// Ambient value in attribute units.
    pub baseline: f64,
    /// Chance that an event starts at a node on a given tick.
    pub event_probability: f64,
    pub magnitude_low: f64,
    pub magnitude_high: f64,
    /// Standard deviation of the per-tick jitter.
    pub drift_sigma: f64,
    /// Ticks an event stays active, including its first.
    pub event_duration: u32,
}

impl Default for FieldModel {
    fn default() -> Self {
        FieldModel {
            baseline: 25.0,
            event_probability: 0.005,
            magnitude_low: 40.0,
            magnitude_high: 80.0,
            drift_sigma: 0.5,
            event_duration: 5,
        }
    }
}

impl FieldModel {
    /// A field that always reads `value`.
    pub fn constant(value: f64) -> Self {
        FieldModel {
            baseline: value,
            event_probability: 0.0,
            magnitude_low: 0.0,
            magnitude_high: 0.0,
            drift_sigma: 0.0,
            event_duration: 1,
        }
    }

    // negated comparisons also reject NaN
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.event_probability) {
            return Err(invalid(format!(
                "event_probability must lie in [0, 1], got {}",
                self.event_probability
            )));
        }
        if !(self.magnitude_low <= self.magnitude_high) {
            return Err(invalid(format!(
                "magnitude range [{}, {}] is empty",
                self.magnitude_low, self.magnitude_high
            )));
        }
        if !(self.drift_sigma >= 0.0) {
            return Err(invalid(format!("drift_sigma must be >= 0, got {}", self.drift_sigma)));
        }
        if self.event_duration == 0 {
            return Err(invalid("event_duration must be at least 1"));
        }
        if !self.baseline.is_finite() {
            return Err(invalid("baseline must be finite"));
        }
        Ok(())
    }
}

const STREAM: u64 = 0x66_6965_6c64; // "field"
const TRIGGER: u64 = 0;
const MAGNITUDE: u64 = 1;
const JITTER: u64 = 2;

/// Reads a [`FieldModel`] for one seed.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    model: FieldModel,
    rng: ChaCha8Rng,
    // Per node: last tick read and the event active then. Lets consecutive
    // ticks skip rescanning the event window.
    memo: Vec<Option<(u64, Option<Event>)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Event {
    start: u64,
    magnitude: f64,
}

impl FieldSampler {
    pub fn new(model: FieldModel, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(STREAM);
        FieldSampler { model, rng, memo: Vec::new() }
    }

    pub fn model(&self) -> &FieldModel {
        &self.model
    }

    /// Reading at `node` on `tick`.
    pub fn sense(&mut self, node: usize, tick: u64) -> f64 {
        let m = self.model;
        let mut value = m.baseline;
        if m.drift_sigma > 0.0 {
            let z: f64 = self.at(node, tick, JITTER).sample(StandardNormal);
            value += m.drift_sigma * z;
        }
        if m.event_probability > 0.0 {
            if let Some(event) = self.event_at(node, tick) {
                value += event.magnitude;
            }
        }
        value
    }

    fn event_at(&mut self, node: usize, tick: u64) -> Option<Event> {
        if self.memo.len() <= node {
            self.memo.resize(node + 1, None);
        }
        let duration = self.model.event_duration as u64;
        let event = match self.memo[node] {
            Some((last, event)) if last == tick => event,
            Some((last, event)) if last + 1 == tick => {
                if self.triggered(node, tick) {
                    Some(self.start_event(node, tick))
                } else {
                    event.filter(|e| tick - e.start < duration)
                }
            }
            _ => {
                // most recent trigger wins when events overlap
                let window = tick.saturating_sub(duration - 1)..=tick;
                window
                    .rev()
                    .find(|&s| self.triggered(node, s))
                    .map(|s| self.start_event(node, s))
            }
        };
        self.memo[node] = Some((tick, event));
        event
    }

    fn start_event(&mut self, node: usize, start: u64) -> Event {
        let (low, high) = (self.model.magnitude_low, self.model.magnitude_high);
        let magnitude = if low == high {
            low
        } else {
            self.at(node, start, MAGNITUDE).random_range(low..=high)
        };
        Event { start, magnitude }
    }

    fn triggered(&mut self, node: usize, tick: u64) -> bool {
        let p = self.model.event_probability;
        p >= 1.0 || self.at(node, tick, TRIGGER).random::<f64>() < p
    }

    // 64-bit block counter: 24 bits of node, 38 of tick, 2 of slot.
    fn at(&mut self, node: usize, tick: u64, slot: u64) -> &mut impl RngCore {
        debug_assert!(node < 1 << 24 && tick < 1 << 38);
        let block = ((node as u64) << 40) | (tick << 2) | slot;
        self.rng.set_word_pos(block as u128 * 16);
        &mut self.rng
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field() {
        let mut s = FieldSampler::new(FieldModel::constant(25.0), 1);
        assert!((0..100).all(|t| s.sense(3, t) == 25.0));
        let mut s = FieldSampler::new(
            FieldModel { event_probability: 0.0, drift_sigma: 0.0, ..FieldModel::default() },
            1,
        );
        assert!((0..100).all(|t| s.sense(3, t) == 25.0));
    }

    #[test]
    fn forced_events() {
        let model = FieldModel {
            event_probability: 1.0,
            magnitude_low: 60.0,
            magnitude_high: 60.0,
            drift_sigma: 0.0,
            ..FieldModel::default()
        };
        let mut s = FieldSampler::new(model, 9);
        assert!((0..50).all(|t| s.sense(7, t) == 85.0));
    }

    #[test]
    fn readings_are_addressable() {
        let mut a = FieldSampler::new(FieldModel::default(), 42);
        let mut b = FieldSampler::new(FieldModel::default(), 42);
        let forward: Vec<f64> = (0..200).map(|t| a.sense(5, t)).collect();
        let backward: Vec<f64> = (0..200).rev().map(|t| b.sense(5, t)).collect();
        assert!(forward.iter().eq(backward.iter().rev()));
        assert_eq!(a.sense(5, 17), forward[17]);
        let mut other = FieldSampler::new(FieldModel::default(), 43);
        assert!((0..200).any(|t| other.sense(5, t) != forward[t as usize]));
    }

    #[test]
    fn sequential_reads_match_cold_reads() {
        let model = FieldModel { event_probability: 0.1, event_duration: 4, ..FieldModel::default() };
        let mut warm = FieldSampler::new(model, 8);
        for node in [0, 3] {
            for t in 0..3000 {
                let cold = FieldSampler::new(model, 8).sense(node, t);
                assert_eq!(warm.sense(node, t), cold, "node {node} tick {t}");
            }
        }
    }

    #[test]
    fn events_last_their_duration() {
        let model = FieldModel { drift_sigma: 0.0, event_probability: 0.02, ..FieldModel::default() };
        let mut s = FieldSampler::new(model, 3);
        let readings: Vec<f64> = (0..20_000).map(|t| s.sense(0, t)).collect();
        let hot = readings.iter().filter(|&&v| v > 25.0).count() as f64 / readings.len() as f64;
        // P(active) = 1 - (1 - p)^duration
        let expected = 1.0 - 0.98f64.powi(5);
        assert!((hot - expected).abs() < 0.02, "{hot} vs {expected}");
        assert!(readings.iter().all(|&v| v == 25.0 || (65.0..=105.0).contains(&v)));
    }

    #[test]
    fn jitter_has_configured_spread() {
        let model = FieldModel { event_probability: 0.0, ..FieldModel::default() };
        let mut s = FieldSampler::new(model, 11);
        let xs: Vec<f64> = (0..20_000).map(|t| s.sense(2, t) - 25.0).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
        assert!(mean.abs() < 0.02);
        assert!((sd - 0.5).abs() < 0.02);
    }

    #[test]
    fn rejects_bad_models() {
        assert!(FieldModel { event_probability: 1.5, ..FieldModel::default() }.validate().is_err());
        assert!(FieldModel { magnitude_low: 90.0, ..FieldModel::default() }.validate().is_err());
        assert!(FieldModel { event_duration: 0, ..FieldModel::default() }.validate().is_err());
        assert!(FieldModel::default().validate().is_ok());
    }
}
