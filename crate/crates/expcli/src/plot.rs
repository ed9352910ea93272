//! Static SVG plots: analytic curves as lines, simulation estimates as
//! markers with confidence bars.

use std::fmt::Write as _;

use crate::config::PlotKind;
use crate::sweep::{RowValues, SweepResult};

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 70.0;

const COLORS: [&str; 5] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

struct Point {
    x: f64,
    analytic: f64,
    /// `(mean, ci_halfwidth)`
    mc: Option<(f64, f64)>,
}

struct Series {
    label: &'static str,
    points: Vec<Point>,
}

fn series(result: &SweepResult) -> Vec<Series> {
    type Pick = fn(&RowValues) -> Option<(f64, Option<(f64, f64)>)>;
    let picks: Vec<(&'static str, Pick)> = match result.plot {
        PlotKind::Success => vec![
            ("V2X", |r| match r {
                RowValues::Success { analytic, mc } => {
                    Some((analytic.p_v2x, mc.map(|m| (m.v2x.mean, m.v2x.ci_halfwidth))))
                }
                _ => None,
            }),
            ("C-V2V", |r| match r {
                RowValues::Success { analytic, mc } => Some((
                    analytic.p_v2v_success,
                    mc.map(|m| (m.v2v_success.mean, m.v2v_success.ci_halfwidth)),
                )),
                _ => None,
            }),
            ("C-V2B", |r| match r {
                RowValues::Success { analytic, mc } => Some((
                    analytic.p_v2b_success,
                    mc.map(|m| (m.v2b_success.mean, m.v2b_success.ci_halfwidth)),
                )),
                _ => None,
            }),
            ("V2V", |r| match r {
                RowValues::Success { analytic, mc } => Some((
                    analytic.p_v2v_only,
                    mc.map(|m| (m.v2v_only.mean, m.v2v_only.ci_halfwidth)),
                )),
                _ => None,
            }),
        ],
        PlotKind::Association => vec![
            ("V2V link", |r| match r {
                RowValues::Success { analytic, mc } => Some((
                    analytic.p_v2v_assoc,
                    mc.map(|m| (m.v2v_assoc.mean, m.v2v_assoc.ci_halfwidth)),
                )),
                _ => None,
            }),
            ("V2B link", |r| match r {
                RowValues::Success { analytic, mc } => Some((
                    analytic.p_v2b_assoc,
                    mc.map(|m| (m.v2b_assoc.mean, m.v2b_assoc.ci_halfwidth)),
                )),
                _ => None,
            }),
        ],
        PlotKind::Distance => vec![
            ("V2V link", |r| match r {
                RowValues::Distance { cdf_v2v, mc, .. } => {
                    Some((*cdf_v2v, mc.map(|m| (m.cdf_v2v, 0.0))))
                }
                _ => None,
            }),
            ("V2B link", |r| match r {
                RowValues::Distance { cdf_v2b, mc, .. } => {
                    Some((*cdf_v2b, mc.map(|m| (m.cdf_v2b, 0.0))))
                }
                _ => None,
            }),
        ],
    };
    picks
        .into_iter()
        .map(|(label, pick)| Series {
            label,
            points: result
                .rows
                .iter()
                .filter_map(|row| {
                    let values = row.outcome.as_ref().ok()?;
                    let (analytic, mc) = pick(values)?;
                    Some(Point {
                        x: row.value,
                        analytic,
                        mc,
                    })
                })
                .collect(),
        })
        .collect()
}

fn y_label(kind: PlotKind) -> &'static str {
    match kind {
        PlotKind::Success => "Success Probability",
        PlotKind::Association => "Association Probability",
        PlotKind::Distance => "Cumulative Distribution",
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Axis {
    log: bool,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(values: &[f64], log_requested: bool) -> Self {
        let log = log_requested && values.iter().all(|&v| v > 0.0);
        let t = |v: f64| if log { v.log10() } else { v };
        let mut lo = values.iter().copied().map(t).fold(f64::INFINITY, f64::min);
        let mut hi = values
            .iter()
            .copied()
            .map(t)
            .fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() || !hi.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        Self { log, lo, hi }
    }

    fn px(&self, v: f64) -> f64 {
        let t = if self.log { v.log10() } else { v };
        LEFT + (t - self.lo) / (self.hi - self.lo) * (WIDTH - LEFT - RIGHT)
    }

    /// `(value, label)` pairs for tick marks.
    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let (a, b) = (self.lo.ceil() as i32, self.hi.floor() as i32);
            return (a..=b).map(|k| (10f64.powi(k), format!("1e{k}"))).collect();
        }
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0]
            .into_iter()
            .map(|m| m * mag)
            .find(|s| *s >= raw)
            .unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last)
            .map(|k| {
                let v = k as f64 * step;
                (v, format!("{}", (v * 1e9).round() / 1e9))
            })
            .collect()
    }
}

fn py(p: f64) -> f64 {
    TOP + (1.0 - p.clamp(0.0, 1.0)) * (HEIGHT - TOP - BOTTOM)
}

/// Renders the sweep as a standalone SVG document.
pub fn render_svg(result: &SweepResult) -> String {
    let xs: Vec<f64> = result.rows.iter().map(|r| r.value).collect();
    let axis = Axis::new(&xs, result.parameter.log_scale());
    let all = series(result);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
    let _ = writeln!(
        s,
        r#"<rect x="{x0}" y="{y1}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        x1 - x0,
        y0 - y1
    );

    for (v, label) in axis.ticks() {
        let x = axis.px(v);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{y0}" x2="{x:.2}" y2="{y1}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            y0 + 18.0,
            escape(&label)
        );
    }
    for k in 0..=5 {
        let p = k as f64 / 5.0;
        let y = py(p);
        let _ = writeln!(
            s,
            r##"<line x1="{x0}" y1="{y:.2}" x2="{x1}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{p:.1}</text>"##,
            x0 - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        0.5 * (x0 + x1),
        HEIGHT - 25.0,
        escape(result.parameter.axis_label())
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        0.5 * (y0 + y1),
        0.5 * (y0 + y1),
        y_label(result.plot)
    );

    for (k, ser) in all.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = ser
            .points
            .iter()
            .map(|p| format!("{:.2},{:.2}", axis.px(p.x), py(p.analytic)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline class="analytic" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
        }
        for p in &ser.points {
            if let Some((mean, ci)) = p.mc {
                let x = axis.px(p.x);
                if ci > 0.0 {
                    let _ = writeln!(
                        s,
                        r#"<line class="ci" x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="{color}"/>"#,
                        py(mean - ci),
                        py(mean + ci)
                    );
                }
                let _ = writeln!(
                    s,
                    r#"<circle class="mc" cx="{x:.2}" cy="{:.2}" r="4" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                    py(mean)
                );
            }
        }
        let ly = TOP + 20.0 + 22.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><circle cx="{}" cy="{ly}" r="4" fill="none" stroke="{color}"/><text class="legend" x="{}" y="{}">{}</text>"#,
            lx + 30.0,
            lx + 15.0,
            lx + 38.0,
            ly + 4.0,
            escape(ser.label)
        );
    }
    let note_y = TOP + 20.0 + 22.0 * all.len() as f64 + 10.0;
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{note_y}" font-size="10">lines: analytical</text><text x="{}" y="{}" font-size="10">markers: simulation</text>"#,
        WIDTH - RIGHT + 15.0,
        WIDTH - RIGHT + 15.0,
        note_y + 14.0
    );
    s.push_str("</svg>\n");
    s
}
