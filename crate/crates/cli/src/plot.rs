//! SVG figures: learning curves and cost-ratio bars.

use std::fmt::Write as _;

use prequel_core::eval::{loess, CostRow, Curves, LearningCurve};
use prequel_core::models::ModelFamily;

/// Train size of the vertical reference line drawn on every curve plot.
pub const REFERENCE_SIZE: usize = 144;

const WIDTH: f64 = 920.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 180.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

const STAT_COLORS: [&str; 6] = ["#1f77b4", "#17becf", "#2ca02c", "#7f7fff", "#005f73", "#3a86ff"];
const ML_COLORS: [&str; 6] = ["#d62728", "#ff7f0e", "#e377c2", "#bc5090", "#8c564b", "#f94144"];

/// Which per-model series a curve plot draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMetric {
    AvgRank,
    Mase,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Roughly five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).abs().max(1e-12);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// Ratio label: up to two decimals below 10, fewer above, no trailing zeros.
pub fn fmt_ratio(r: f64) -> String {
    let s = if r >= 100.0 {
        format!("{r:.0}")
    } else if r >= 10.0 {
        format!("{r:.1}")
    } else {
        format!("{r:.2}")
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - TOP - BOTTOM)
    }
}

fn header(svg: &mut String, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(svg: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let (left, right, top, bottom) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        right - left,
        bottom - top
    );
    for t in ticks(f.x0, f.x1) {
        let x = f.px(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{}" stroke="#444"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
            bottom + 5.0,
            bottom + 18.0,
            fmt_tick(t)
        );
    }
    for t in ticks(f.y0, f.y1) {
        let y = f.py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y:.2}" x2="{left}" y2="{y:.2}" stroke="#444"/><line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#eee"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            left - 5.0,
            left - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (left + right) / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        escape(y_label)
    );
}

fn polyline(svg: &mut String, f: &Frame, xs: &[f64], ys: &[f64], color: &str, width: f64, class: &str, name: &str) {
    let mut pts = String::new();
    for (x, y) in xs.iter().zip(ys) {
        if y.is_finite() {
            let _ = write!(pts, "{:.2},{:.2} ", f.px(*x), f.py(*y));
        }
    }
    let _ = writeln!(
        svg,
        r#"<polyline class="{class}" data-name="{}" points="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
        escape(name),
        pts.trim_end()
    );
}

fn family_label(f: ModelFamily) -> &'static str {
    match f {
        ModelFamily::Statistical => "statistical (LOESS)",
        ModelFamily::MachineLearning => "ML (LOESS)",
    }
}

fn family_color(f: ModelFamily) -> &'static str {
    match f {
        ModelFamily::Statistical => "#08306b",
        ModelFamily::MachineLearning => "#67000d",
    }
}

fn metric_values(c: &LearningCurve, metric: CurveMetric) -> &[f64] {
    match metric {
        CurveMetric::AvgRank => &c.avg_rank_smoothed,
        CurveMetric::Mase => &c.avg_mase_smoothed,
    }
}

/// Per-model smoothed curves coloured by family, bold family LOESS lines and
/// a vertical reference line at [`REFERENCE_SIZE`].
pub fn curve_svg(curves: &Curves, metric: CurveMetric, title: &str) -> String {
    let mut families: Vec<(ModelFamily, Vec<f64>, Vec<f64>)> = Vec::new();
    match metric {
        CurveMetric::AvgRank => {
            for t in &curves.types {
                let xs = t.train_sizes.iter().map(|&s| s as f64).collect();
                families.push((t.family, xs, t.loess_avg_rank.clone()));
            }
        }
        CurveMetric::Mase => {
            for fam in [ModelFamily::Statistical, ModelFamily::MachineLearning] {
                let (mut px, mut py) = (Vec::new(), Vec::new());
                let mut sizes = std::collections::BTreeSet::new();
                for c in curves.models.iter().filter(|c| c.model_id.family() == fam) {
                    for (s, v) in c.train_sizes.iter().zip(metric_values(c, metric)) {
                        px.push(*s as f64);
                        py.push(*v);
                        sizes.insert(*s);
                    }
                }
                if px.is_empty() {
                    continue;
                }
                let at: Vec<f64> = sizes.into_iter().map(|s| s as f64).collect();
                let ys = loess(&px, &py, &at, prequel_core::eval::curves::LOESS_SPAN);
                families.push((fam, at, ys));
            }
        }
    }

    let mut x0 = REFERENCE_SIZE as f64;
    let mut x1 = REFERENCE_SIZE as f64;
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &curves.models {
        for (s, v) in c.train_sizes.iter().zip(metric_values(c, metric)) {
            x0 = x0.min(*s as f64);
            x1 = x1.max(*s as f64);
            if v.is_finite() {
                y0 = y0.min(*v);
                y1 = y1.max(*v);
            }
        }
    }
    if !y0.is_finite() {
        (y0, y1) = (0.0, 1.0);
    }
    // Keep the reference line clear of the frame border.
    x1 = x1.max(REFERENCE_SIZE as f64 + 0.05 * (REFERENCE_SIZE as f64 - x0).max(1.0));
    let pad = ((y1 - y0) * 0.05).max(0.05);
    let frame = Frame {
        x0,
        x1,
        y0: y0 - pad,
        y1: y1 + pad,
    };

    let mut svg = String::new();
    header(&mut svg, title);
    let y_label = match metric {
        CurveMetric::AvgRank => "average rank (moving average)",
        CurveMetric::Mase => "average MASE (moving average)",
    };
    axes(&mut svg, &frame, "training set size", y_label);

    let mut legend: Vec<(String, String, f64)> = Vec::new();
    let (mut si, mut mi) = (0, 0);
    for c in &curves.models {
        let color = match c.model_id.family() {
            ModelFamily::Statistical => {
                si += 1;
                STAT_COLORS[(si - 1) % STAT_COLORS.len()]
            }
            ModelFamily::MachineLearning => {
                mi += 1;
                ML_COLORS[(mi - 1) % ML_COLORS.len()]
            }
        };
        let xs: Vec<f64> = c.train_sizes.iter().map(|&s| s as f64).collect();
        polyline(&mut svg, &frame, &xs, metric_values(c, metric), color, 1.2, "model-curve", c.model_id.as_str());
        legend.push((c.model_id.to_string(), color.to_string(), 1.2));
    }
    for (fam, xs, ys) in &families {
        polyline(&mut svg, &frame, xs, ys, family_color(*fam), 3.5, "type-loess", fam.as_str());
        legend.push((family_label(*fam).to_string(), family_color(*fam).to_string(), 3.5));
    }

    let rx = frame.px(REFERENCE_SIZE as f64);
    let _ = writeln!(
        svg,
        r#"<line class="reference" data-x="{REFERENCE_SIZE}" x1="{rx:.2}" y1="{TOP}" x2="{rx:.2}" y2="{}" stroke="black" stroke-width="1.5"/>"#,
        HEIGHT - BOTTOM
    );

    let lx = WIDTH - RIGHT + 15.0;
    for (i, (name, color, w)) in legend.iter().enumerate() {
        let y = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{y}" x2="{}" y2="{y}" stroke="{color}" stroke-width="{w}"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            y + 4.0,
            escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Log-scaled bars of cost ratios with the raw ratio printed in each bar.
pub fn cc_bars_svg(rows: &[CostRow], title: &str) -> String {
    let logs: Vec<f64> = rows.iter().map(|r| r.ratio.max(f64::MIN_POSITIVE).log10()).collect();
    let lo = logs.iter().copied().fold(0.0_f64, f64::min);
    let hi = logs.iter().copied().fold(0.0_f64, f64::max);
    let pad = ((hi - lo) * 0.08).max(0.25);
    let frame = Frame {
        x0: 0.0,
        x1: rows.len().max(1) as f64,
        y0: if lo < 0.0 { lo - pad } else { 0.0 },
        y1: hi + pad,
    };
    let mut svg = String::new();
    header(&mut svg, title);
    let (left, right, top, bottom) = (LEFT, WIDTH - RIGHT, TOP, HEIGHT - BOTTOM);
    let _ = writeln!(
        svg,
        r##"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
        right - left,
        bottom - top
    );
    for t in ticks(frame.y0, frame.y1) {
        let y = frame.py(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{left}" y1="{y:.2}" x2="{right}" y2="{y:.2}" stroke="#eee"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"##,
            left - 8.0,
            y + 4.0,
            fmt_tick(t)
        );
    }
    let base = frame.py(0.0);
    let _ = writeln!(svg, r##"<line x1="{left}" y1="{base:.2}" x2="{right}" y2="{base:.2}" stroke="#444"/>"##);
    let slot = (right - left) / rows.len().max(1) as f64;
    for (i, (row, l)) in rows.iter().zip(&logs).enumerate() {
        let x = left + slot * i as f64 + slot * 0.15;
        let w = slot * 0.7;
        let top_y = frame.py(l.max(0.0));
        let h = (frame.py(l.min(0.0)) - top_y).abs();
        let color = match row.model_id.family() {
            ModelFamily::Statistical => STAT_COLORS[0],
            ModelFamily::MachineLearning => ML_COLORS[0],
        };
        let label = fmt_ratio(row.ratio);
        let _ = writeln!(
            svg,
            r#"<rect class="bar" data-model="{}" data-ratio="{}" x="{x:.2}" y="{top_y:.2}" width="{w:.2}" height="{h:.2}" fill="{color}" fill-opacity="0.8"/>"#,
            row.model_id,
            row.ratio
        );
        // Inside the bar when it is tall enough, otherwise just above the base.
        let ly = if h >= 18.0 { top_y + h / 2.0 + 4.0 } else { base - 4.0 };
        let fill = if h >= 18.0 { "white" } else { "black" };
        let _ = writeln!(
            svg,
            r#"<text class="bar-label" x="{:.2}" y="{ly:.2}" text-anchor="middle" fill="{fill}">{label}</text>"#,
            x + w / 2.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#,
            x + w / 2.0,
            bottom + 18.0,
            row.model_id
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">log10(time / Naive2 time)</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_labels() {
        assert_eq!(fmt_ratio(1.0), "1");
        assert_eq!(fmt_ratio(2.5), "2.5");
        assert_eq!(fmt_ratio(12.34), "12.3");
        assert_eq!(fmt_ratio(1234.4), "1234");
    }

    #[test]
    fn ticks_cover_range() {
        let t = ticks(18.0, 982.0);
        assert!(t.len() >= 3 && t.len() <= 7);
        assert!(t[0] >= 18.0 && *t.last().unwrap() <= 982.0);
        assert_eq!(ticks(0.0, 1.0)[0], 0.0);
    }
}
