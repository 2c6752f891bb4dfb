//! CSV and JSON artifacts.

use std::io::{self, Read, Write};

use crate::engine::{ComparisonTable, RoundRecord, RunSummary, Stat};

pub const ROUND_CSV_HEADER: &str = "round,alive,dead,ch_count,packets_round,packets_cum,residual_energy";

/// Nine significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn write_rounds_csv<W: Write>(mut w: W, records: &[RoundRecord]) -> io::Result<()> {
    writeln!(w, "{ROUND_CSV_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.round,
            r.alive,
            r.dead,
            r.ch_count,
            r.packets_round,
            r.packets_cum,
            fmt_float(r.residual_energy)
        )?;
    }
    w.flush()
}

pub fn read_rounds_csv<R: Read>(r: R) -> csv::Result<Vec<RoundRecord>> {
    csv::Reader::from_reader(r).deserialize().collect()
}

/// Scalar metrics of a run as pretty JSON (per-round history excluded).
pub fn write_summary_json<W: Write>(mut w: W, summary: &RunSummary) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)
}

fn stat_cells(s: &Stat) -> String {
    if s.count == 0 {
        ",,0".to_owned()
    } else {
        format!("{},{},{}", fmt_float(s.mean), fmt_float(s.sd), s.count)
    }
}

pub const COMPARISON_CSV_HEADER: &str = "protocol,runs,\
stability_mean,stability_sd,stability_n,\
lifetime_mean,lifetime_sd,lifetime_n,\
packets_mean,packets_sd,packets_n";

pub fn write_comparison_csv<W: Write>(mut w: W, table: &ComparisonTable) -> io::Result<()> {
    writeln!(w, "{COMPARISON_CSV_HEADER}")?;
    for row in &table.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            row.protocol,
            row.runs,
            stat_cells(&row.stability),
            stat_cells(&row.lifetime),
            stat_cells(&row.packets)
        )?;
    }
    w.flush()
}

/// Human-readable comparison table with the pairwise orderings below it.
pub fn format_comparison(table: &ComparisonTable) -> String {
    let cell = |s: &Stat| {
        if s.count == 0 {
            "-".to_owned()
        } else {
            format!("{:.1} ± {:.1}", s.mean, s.sd)
        }
    };
    let mut out = format!(
        "{:<8}{:>6}{:>22}{:>22}{:>24}\n",
        "protocol", "runs", "stability (rounds)", "lifetime (rounds)", "packets to BS"
    );
    for row in &table.rows {
        let stability = if row.stability.count < row.runs && row.stability.count > 0 {
            format!("{} [{}/{}]", cell(&row.stability), row.stability.count, row.runs)
        } else {
            cell(&row.stability)
        };
        out += &format!(
            "{:<8}{:>6}{:>22}{:>22}{:>24}\n",
            row.protocol.name(),
            row.runs,
            stability,
            cell(&row.lifetime),
            cell(&row.packets)
        );
    }
    if !table.orderings.is_empty() {
        out += "\n";
        for o in &table.orderings {
            out += &format!(
                "{:<10} {} > {}{}\n",
                o.metric.name(),
                o.higher,
                o.lower,
                if o.separated { "" } else { "  (intervals overlap)" }
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::ScenarioConfig;
    use crate::{run_scenario, ProtocolKind};

    #[test]
    fn float_format_has_nine_significant_digits() {
        assert_eq!(fmt_float(62.5), "6.25000000e1");
        assert_eq!(fmt_float(1.0 / 3.0), "3.33333333e-1");
        assert_eq!(fmt_float(0.0), "0.00000000e0");
    }

    #[test]
    fn rounds_csv_round_trip() {
        let cfg = ScenarioConfig { n: 10, max_rounds: 40, ..ScenarioConfig::default() }
            .for_protocol(ProtocolKind::Teen);
        let s = run_scenario(&cfg).unwrap();
        let mut buf = Vec::new();
        write_rounds_csv(&mut buf, &s.per_round).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), ROUND_CSV_HEADER);
        assert_eq!(text.lines().count(), 41);
        let back = read_rounds_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 40);
        for (a, b) in back.iter().zip(&s.per_round) {
            assert_eq!((a.round, a.alive, a.dead, a.packets_cum), (b.round, b.alive, b.dead, b.packets_cum));
            assert!((a.residual_energy - b.residual_energy).abs() <= 1e-8 * b.residual_energy);
        }
    }

    #[test]
    fn summary_json_has_scalars_only() {
        let cfg = ScenarioConfig { n: 5, max_rounds: 3, ..ScenarioConfig::default() };
        let s = run_scenario(&cfg).unwrap();
        let mut buf = Vec::new();
        write_summary_json(&mut buf, &s).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["protocol"], "LEACH");
        assert_eq!(v["network_lifetime"], 3);
        assert!(v["stability_period"].is_null());
        assert!(v.get("per_round").is_none());
    }
}
