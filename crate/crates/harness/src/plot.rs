//! Log-scale line charts as standalone SVG.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::experiment::InstanceReport;

/// Values below this are drawn at the floor.
pub const Y_FLOOR: f64 = 1e-17;

/// At most this many points per polyline; longer series are sampled at a
/// common stride so that series stay comparable point by point.
pub const MAX_POINTS: usize = 1500;

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
    pub dashed: bool,
    pub color: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub title: String,
    pub series: Vec<Series>,
}

/// One solid series per (run, diagnostic) and one dashed `r^k` envelope per
/// run with a certificate.
pub fn chart_for_instance(experiment: &str, inst: &InstanceReport, kinds: &[String]) -> Chart {
    let mut series = Vec::new();
    for (i, r) in inst.runs.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for kind in kinds {
            let values = match kind.as_str() {
                "e" => Some(r.traces.e.clone()),
                "v" => Some(r.traces.v.clone()),
                "ell" => r.traces.ell.clone(),
                _ => None,
            };
            if let Some(values) = values {
                series.push(Series {
                    name: format!("{} {kind}", r.label),
                    values,
                    dashed: false,
                    color,
                });
            }
        }
        if let Some(rate) = r.certificate_rate {
            let len = r.traces.e.len();
            series.push(Series {
                name: format!("{} r^k", r.label),
                values: (0..len).map(|k| rate.powi(k as i32)).collect(),
                dashed: true,
                color,
            });
        }
    }
    Chart {
        title: format!(
            "{experiment}: {} (mu = {:.3e}, rho = {})",
            inst.label, inst.mu, inst.params.rho
        ),
        series,
    }
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    k_max: f64,
    lo: f64,
    hi: f64,
}

impl Frame {
    fn x(&self, k: usize) -> f64 {
        self.left + self.width * k as f64 / self.k_max
    }

    fn y(&self, v: f64) -> f64 {
        let l = v.max(Y_FLOOR).log10().clamp(self.lo, self.hi);
        self.top + self.height * (self.hi - l) / (self.hi - self.lo)
    }
}

pub fn render_svg(chart: &Chart) -> String {
    let (w, h) = (900.0, 560.0);
    let longest = chart.series.iter().map(|s| s.values.len()).max().unwrap_or(1);
    let positive = chart
        .series
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .filter(|v| v.is_finite() && *v > 0.0);
    let (mut lo, mut hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v.max(Y_FLOOR)), b.max(v))
    });
    if !lo.is_finite() {
        (lo, hi) = (Y_FLOOR, 1.0);
    }
    let frame = Frame {
        left: 70.0,
        top: 40.0,
        width: w - 70.0 - 220.0,
        height: h - 40.0 - 50.0,
        k_max: (longest.max(2) - 1) as f64,
        lo: lo.log10().floor(),
        hi: hi.log10().ceil().max(lo.log10().floor() + 1.0),
    };
    let stride = longest.div_ceil(MAX_POINTS).max(1);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        frame.left + frame.width / 2.0,
        escape(&chart.title)
    );
    let _ = writeln!(
        s,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#333"/>"##,
        frame.left, frame.top, frame.width, frame.height
    );
    // Decade grid lines.
    let mut decade = frame.lo as i32;
    let step = (((frame.hi - frame.lo) / 10.0).ceil() as i32).max(1);
    while decade as f64 <= frame.hi {
        let y = frame.y(10f64.powi(decade));
        let _ = writeln!(
            s,
            r##"<line x1="{}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#e0e0e0"/><text x="{}" y="{:.2}" text-anchor="end">1e{decade}</text>"##,
            frame.left,
            frame.left + frame.width,
            frame.left - 6.0,
            y + 4.0
        );
        decade += step;
    }
    for t in 0..=5 {
        let k = (frame.k_max * t as f64 / 5.0).round() as usize;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.1}" text-anchor="middle">{k}</text>"#,
            frame.x(k),
            frame.top + frame.height + 16.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">iteration k</text>"#,
        frame.left + frame.width / 2.0,
        h - 12.0
    );

    for (i, series) in chart.series.iter().enumerate() {
        let mut points = String::new();
        let last = series.values.len().saturating_sub(1);
        for (k, &v) in series.values.iter().enumerate() {
            if k % stride != 0 && k != last {
                continue;
            }
            let _ = write!(points, "{:.3},{:.3} ", frame.x(k), frame.y(v));
        }
        let dash = if series.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline class="{}" data-name="{}" fill="none" stroke="{}" stroke-width="1.4"{dash} points="{}"/>"#,
            if series.dashed { "envelope" } else { "trace" },
            escape(&series.name),
            series.color,
            points.trim_end()
        );
        let ly = frame.top + 8.0 + 16.0 * i as f64;
        let lx = frame.left + frame.width + 14.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"{dash}/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            series.color,
            lx + 30.0,
            ly + 4.0,
            escape(&series.name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn emit_plot(chart: &Chart, path: &Path) -> Result<()> {
    if chart.series.is_empty() {
        return Err(HarnessError::Config("plot has no series".into()));
    }
    fs::write(path, render_svg(chart)).map_err(|e| HarnessError::io(path, e))
}
