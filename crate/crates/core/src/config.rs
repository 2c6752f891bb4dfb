//! Scenario files.
//!
//! A scenario file is TOML. Every key is optional and falls back to the
//! default listed below; unknown keys are rejected.
//!
//! ```toml
//! protocol = "LEACH"        # LEACH | SEP | ESEP | TEEN | TSEP
//! n = 100
//! field_side = 100.0        # m, square field
//! bs_x = 50.0               # m, defaults to the field center
//! bs_y = 50.0
//! initial_energy = 0.5      # J, normal-node energy E_o
//! max_rounds = 10000
//! seed = 0
//! frames_per_round = 1
//! deaths_disabled = false
//!
//! [tiers]
//! m = 0.0                   # advanced fraction
//! b = 0.0                   # intermediate fraction
//! alpha = 0.0               # advanced extra-energy factor
//! mu = 0.0                  # intermediate factor, defaults to alpha / 2
//! p_opt = 0.1
//!
//! [radio]
//! e_elec = 50e-9            # J/bit
//! e_da = 5e-9               # J/bit/signal
//! eps_fs = 10e-12           # J/bit/m^2
//! eps_mp = 0.0013e-12       # J/bit/m^4
//! packet_bits = 4000
//! d0 = 87.7058              # m, defaults to sqrt(eps_fs / eps_mp)
//! control_bits = 200        # 0 disables setup overhead
//! sense_energy = 0.0        # J per node per round
//!
//! [reactive]                # used by TEEN and TSEP only
//! hard_threshold = 50.0
//! soft_threshold = 2.0
//! attributes = ["temperature"]
//! report_time = 1           # frames per round, defaults to frames_per_round
//!
//! [field]
//! baseline = 25.0
//! event_probability = 0.005
//! magnitude_low = 40.0
//! magnitude_high = 80.0
//! drift_sigma = 0.5
//! event_duration = 5
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::error::Error;
use crate::field::FieldModel;
use crate::netmodel::{Position, ScenarioConfig, TierScheme};
use crate::protocols::{ProtocolKind, ReactiveConfig};
use crate::radio::RadioParams;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Invalid(#[from] Error),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    protocol: Option<String>,
    n: Option<usize>,
    field_side: Option<f64>,
    bs_x: Option<f64>,
    bs_y: Option<f64>,
    initial_energy: Option<f64>,
    max_rounds: Option<u32>,
    seed: Option<u64>,
    frames_per_round: Option<u32>,
    deaths_disabled: Option<bool>,
    #[serde(default)]
    tiers: RawTiers,
    #[serde(default)]
    radio: RawRadio,
    #[serde(default)]
    reactive: RawReactive,
    #[serde(default)]
    field: RawField,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTiers {
    m: Option<f64>,
    b: Option<f64>,
    alpha: Option<f64>,
    mu: Option<f64>,
    p_opt: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRadio {
    e_elec: Option<f64>,
    e_da: Option<f64>,
    eps_fs: Option<f64>,
    eps_mp: Option<f64>,
    packet_bits: Option<u32>,
    d0: Option<f64>,
    control_bits: Option<u32>,
    sense_energy: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReactive {
    hard_threshold: Option<f64>,
    soft_threshold: Option<f64>,
    attributes: Option<Vec<String>>,
    report_time: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    baseline: Option<f64>,
    event_probability: Option<f64>,
    magnitude_low: Option<f64>,
    magnitude_high: Option<f64>,
    drift_sigma: Option<f64>,
    event_duration: Option<u32>,
}

/// A parsed scenario file. The `[reactive]` table is kept even when the file
/// names a proactive protocol, so one file can drive a whole comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    /// Scenario for the protocol named in the file.
    pub scenario: ScenarioConfig,
    pub reactive: ReactiveConfig,
}

impl ScenarioFile {
    /// The file's scenario run under `protocol`.
    pub fn for_protocol(&self, protocol: ProtocolKind) -> ScenarioConfig {
        let mut config = self.scenario.clone();
        config.protocol = protocol;
        config.reactive = protocol.is_reactive().then(|| self.reactive.clone());
        config
    }
}

fn line_of(src: &str, offset: usize) -> usize {
    src[..offset.min(src.len())].matches('\n').count() + 1
}

/// Parses scenario-file text. See the module docs for the schema.
pub fn parse_scenario(src: &str) -> Result<ScenarioFile, ConfigError> {
    let raw: RawScenario = toml::from_str(src).map_err(|e| ConfigError::Parse {
        line: e.span().map_or(1, |s| line_of(src, s.start)),
        message: e.message().to_owned(),
    })?;

    let d = ScenarioConfig::default();
    let protocol = match raw.protocol {
        Some(p) => p.parse()?,
        None => d.protocol,
    };
    let field_side = raw.field_side.unwrap_or(d.field_side);
    let frames_per_round = raw.frames_per_round.unwrap_or(d.frames_per_round);

    let alpha = raw.tiers.alpha.unwrap_or(d.tiers.alpha);
    let tiers = TierScheme::with_mu(
        raw.tiers.m.unwrap_or(d.tiers.m),
        raw.tiers.b.unwrap_or(d.tiers.b),
        alpha,
        raw.tiers.mu.unwrap_or(alpha / 2.0),
        raw.tiers.p_opt.unwrap_or(d.tiers.p_opt),
    )?;

    let dr = RadioParams::default();
    let eps_fs = raw.radio.eps_fs.unwrap_or(dr.eps_fs);
    let eps_mp = raw.radio.eps_mp.unwrap_or(dr.eps_mp);
    let radio = RadioParams {
        e_elec: raw.radio.e_elec.unwrap_or(dr.e_elec),
        e_da: raw.radio.e_da.unwrap_or(dr.e_da),
        eps_fs,
        eps_mp,
        packet_bits: raw.radio.packet_bits.unwrap_or(dr.packet_bits),
        d0: raw.radio.d0.unwrap_or_else(|| (eps_fs / eps_mp).sqrt()),
        control_bits: raw.radio.control_bits.unwrap_or(dr.control_bits),
        sense_energy: raw.radio.sense_energy.unwrap_or(dr.sense_energy),
    };

    let dre = ReactiveConfig::default();
    let reactive = ReactiveConfig {
        hard_threshold: raw.reactive.hard_threshold.unwrap_or(dre.hard_threshold),
        soft_threshold: raw.reactive.soft_threshold.unwrap_or(dre.soft_threshold),
        attributes: raw.reactive.attributes.unwrap_or(dre.attributes),
        report_time: raw.reactive.report_time.unwrap_or(frames_per_round),
    };

    let df = FieldModel::default();
    let field = FieldModel {
        baseline: raw.field.baseline.unwrap_or(df.baseline),
        event_probability: raw.field.event_probability.unwrap_or(df.event_probability),
        magnitude_low: raw.field.magnitude_low.unwrap_or(df.magnitude_low),
        magnitude_high: raw.field.magnitude_high.unwrap_or(df.magnitude_high),
        drift_sigma: raw.field.drift_sigma.unwrap_or(df.drift_sigma),
        event_duration: raw.field.event_duration.unwrap_or(df.event_duration),
    };

    let scenario = ScenarioConfig {
        n: raw.n.unwrap_or(d.n),
        field_side,
        bs_position: Position::new(
            raw.bs_x.unwrap_or(field_side / 2.0),
            raw.bs_y.unwrap_or(field_side / 2.0),
        ),
        initial_energy: raw.initial_energy.unwrap_or(d.initial_energy),
        tiers,
        radio,
        reactive: protocol.is_reactive().then(|| reactive.clone()),
        field,
        protocol,
        max_rounds: raw.max_rounds.unwrap_or(d.max_rounds),
        rng_seed: raw.seed.unwrap_or(d.rng_seed),
        frames_per_round,
        deaths_disabled: raw.deaths_disabled.unwrap_or(d.deaths_disabled),
    };
    reactive.validate()?;
    scenario.validate()?;
    Ok(ScenarioFile { scenario, reactive })
}

pub fn load_scenario_file(path: &Path) -> Result<ScenarioFile, ConfigError> {
    let src = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_scenario(&src)
}

/// Loads the scenario a file describes.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    Ok(load_scenario_file(path)?.scenario)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let f = parse_scenario("").unwrap();
        let c = &f.scenario;
        assert_eq!(*c, ScenarioConfig::default());
        assert_eq!(c.protocol, ProtocolKind::Leach);
        assert_eq!(c.n, 100);
        assert_eq!(c.field_side, 100.0);
        assert_eq!(c.bs_position, Position::new(50.0, 50.0));
        assert_eq!(c.initial_energy, 0.5);
        assert_eq!(c.tiers.p_opt, 0.1);
        assert_eq!(c.radio.e_elec, 50e-9);
        assert_eq!(c.radio.e_da, 5e-9);
        assert_eq!(c.radio.eps_fs, 10e-12);
        assert_eq!(c.radio.eps_mp, 0.0013e-12);
        assert_eq!(c.radio.packet_bits, 4000);
    }

    #[test]
    fn overfull_tiers_rejected() {
        let err = parse_scenario("[tiers]\nm = 0.8\nb = 0.3\n").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
        assert!(err.to_string().contains("m + b"));
    }

    #[test]
    fn reactive_protocol_gets_default_thresholds() {
        let c = parse_scenario("protocol = \"TEEN\"\n").unwrap().scenario;
        let r = c.reactive.unwrap();
        assert_eq!((r.hard_threshold, r.soft_threshold), (50.0, 2.0));
    }

    #[test]
    fn unknown_key_reports_line() {
        let err = parse_scenario("n = 10\n\n[radio]\nwatts = 3\n").unwrap_err();
        match err {
            ConfigError::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("unexpected {other}"),
        }
        let err = parse_scenario("n = 10\nfield_side = \n").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn full_file() {
        let src = r#"
protocol = "tsep"
n = 50
field_side = 200.0
seed = 9
[tiers]
m = 0.2
b = 0.3
alpha = 3.0
[radio]
control_bits = 0
[reactive]
hard_threshold = 40.0
[field]
event_probability = 0.05
"#;
        let f = parse_scenario(src).unwrap();
        let c = &f.scenario;
        assert_eq!(c.protocol, ProtocolKind::Tsep);
        assert_eq!(c.bs_position, Position::new(100.0, 100.0));
        assert_eq!(c.tiers.mu, 1.5);
        assert_eq!(c.radio.control_bits, 0);
        assert_eq!(c.reactive.as_ref().unwrap().hard_threshold, 40.0);
        assert_eq!(c.field.event_probability, 0.05);
        assert_eq!(c.rng_seed, 9);
        assert!(f.for_protocol(ProtocolKind::Esep).reactive.is_none());
        assert_eq!(f.for_protocol(ProtocolKind::Teen).reactive.unwrap().hard_threshold, 40.0);
    }

    #[test]
    fn proactive_file_keeps_reactive_table() {
        let f = parse_scenario("[reactive]\nsoft_threshold = 0.5\n").unwrap();
        assert!(f.scenario.reactive.is_none());
        assert_eq!(f.reactive.soft_threshold, 0.5);
    }

    #[test]
    fn bad_protocol() {
        assert!(matches!(parse_scenario("protocol = \"MTE\""), Err(ConfigError::Invalid(_))));
    }
}
