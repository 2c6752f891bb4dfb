//! Static SVG line charts drawn from the per-round CSV files.

use std::fmt::Write as _;
use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use crate::engine::RoundRecord;
use crate::output::read_rounds_csv;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 130.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const MAX_POINTS: usize = 1500;
const COLORS: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct LineChart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// 1, 2 or 5 times a power of ten, giving at most ~6 ticks.
fn tick_step(span: f64) -> f64 {
    if span <= 0.0 {
        return 1.0;
    }
    let raw = span / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|f| f * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

// Keeps at most MAX_POINTS evenly spaced points, always including the last.
fn thin(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= MAX_POINTS {
        return points.to_vec();
    }
    let stride = points.len().div_ceil(MAX_POINTS);
    let mut out: Vec<_> = points.iter().copied().step_by(stride).collect();
    if let Some(&last) = points.last() {
        if out.last() != Some(&last) {
            out.push(last);
        }
    }
    out
}

impl LineChart {
    pub fn to_svg(&self) -> String {
        let all = self.series.iter().flat_map(|s| s.points.iter());
        let (x_max, y_max) = all.fold((0.0f64, 0.0f64), |(x, y), p| (x.max(p.0), y.max(p.1)));
        let x_max = if x_max > 0.0 { x_max } else { 1.0 };
        let y_max = if y_max > 0.0 { y_max } else { 1.0 };
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let sx = |x: f64| LEFT + x / x_max * plot_w;
        let sy = |y: f64| TOP + plot_h - y / y_max * plot_h;

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(&self.title)
        );

        let xs = tick_step(x_max);
        let mut t = 0.0;
        while t <= x_max * (1.0 + 1e-9) {
            let x = sx(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{x:.1}" y1="{TOP}" x2="{x:.1}" y2="{:.1}" stroke="#e0e0e0"/><text x="{x:.1}" y="{:.1}" text-anchor="middle">{t}</text>"##,
                TOP + plot_h,
                TOP + plot_h + 16.0
            );
            t += xs;
        }
        let ys = tick_step(y_max);
        let mut t = 0.0;
        while t <= y_max * (1.0 + 1e-9) {
            let y = sy(t);
            let _ = writeln!(
                svg,
                r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#e0e0e0"/><text x="{:.1}" y="{:.1}" text-anchor="end">{t}</text>"##,
                LEFT + plot_w,
                LEFT - 6.0,
                y + 4.0
            );
            t += ys;
        }
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text transform="translate(18 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + plot_h / 2.0,
            escape(&self.y_label)
        );

        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = thin(&s.points)
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.6" points="{}"/>"#,
                pts.join(" ")
            );
            let ly = TOP + 14.0 + i as f64 * 18.0;
            let lx = LEFT + plot_w + 12.0;
            let _ = writeln!(
                svg,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                lx + 22.0,
                lx + 28.0,
                ly + 4.0,
                escape(&s.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// Quantity drawn against the round index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Alive,
    Dead,
    CumulativePackets,
}

impl PlotKind {
    pub const ALL: [PlotKind; 3] = [PlotKind::Alive, PlotKind::Dead, PlotKind::CumulativePackets];

    pub fn file_name(self) -> &'static str {
        match self {
            PlotKind::Alive => "alive.svg",
            PlotKind::Dead => "dead.svg",
            PlotKind::CumulativePackets => "packets.svg",
        }
    }

    fn title(self) -> &'static str {
        match self {
            PlotKind::Alive => "Alive nodes per round",
            PlotKind::Dead => "Dead nodes per round",
            PlotKind::CumulativePackets => "Packets sent from cluster heads to BS",
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            PlotKind::Alive => "alive nodes",
            PlotKind::Dead => "dead nodes",
            PlotKind::CumulativePackets => "packets (cumulative)",
        }
    }

    fn value(self, r: &RoundRecord) -> f64 {
        match self {
            PlotKind::Alive => r.alive as f64,
            PlotKind::Dead => r.dead as f64,
            PlotKind::CumulativePackets => r.packets_cum as f64,
        }
    }
}

pub fn chart(kind: PlotKind, runs: &[(String, Vec<RoundRecord>)]) -> LineChart {
    LineChart {
        title: kind.title().to_owned(),
        x_label: "round".to_owned(),
        y_label: kind.y_label().to_owned(),
        series: runs
            .iter()
            .map(|(label, records)| Series {
                label: label.clone(),
                points: records.iter().map(|r| (r.round as f64, kind.value(r))).collect(),
            })
            .collect(),
    }
}

/// Reads each labelled per-round CSV and writes the three comparison charts
/// into `out_dir`. Returns the paths written.
pub fn plots_from_csvs(inputs: &[(String, PathBuf)], out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut runs = Vec::with_capacity(inputs.len());
    for (label, path) in inputs {
        let records = read_rounds_csv(File::open(path)?)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))?;
        runs.push((label.clone(), records));
    }
    PlotKind::ALL
        .into_iter()
        .map(|kind| {
            let path = out_dir.join(kind.file_name());
            std::fs::write(&path, chart(kind, &runs).to_svg())?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ticks() {
        assert_eq!(tick_step(10.0), 2.0);
        assert_eq!(tick_step(100.0), 20.0);
        assert_eq!(tick_step(5000.0), 1000.0);
        assert_eq!(tick_step(0.0), 1.0);
    }

    #[test]
    fn thinning_keeps_endpoints() {
        let pts: Vec<(f64, f64)> = (0..10_001).map(|i| (i as f64, 0.0)).collect();
        let t = thin(&pts);
        assert!(t.len() <= MAX_POINTS + 1);
        assert_eq!(t.first(), pts.first());
        assert_eq!(t.last(), pts.last());
    }

    #[test]
    fn svg_has_one_polyline_per_series() {
        let c = LineChart {
            title: "a < b".into(),
            x_label: "round".into(),
            y_label: "alive".into(),
            series: vec![
                Series { label: "LEACH".into(), points: vec![(0.0, 10.0), (5.0, 3.0)] },
                Series { label: "TSEP".into(), points: vec![(0.0, 10.0), (9.0, 0.0)] },
            ],
        };
        let svg = c.to_svg();
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("a &lt; b"));
    }
}
