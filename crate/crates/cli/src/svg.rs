//! Static boxplot SVG emitter. One panel per metric and predictor family;
//! each level draws as one `<g class="box">` glyph (box, median, whiskers,
//! outlier circles).

use std::fmt::Write as _;

use ppbench_core::BoxStats;

const WIDTH: f64 = 560.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 44.0;
const MARGIN_BOTTOM: f64 = 64.0;

pub struct Panel<'a> {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Tick label per box, in drawing order.
    pub level_labels: Vec<String>,
    pub stats: Vec<&'a BoxStats>,
}

/// Compact level label: plain decimal, trailing zeros trimmed.
pub fn level_label(level: f64) -> String {
    if level == level.trunc() && level.abs() < 1e6 {
        format!("{}", level as i64)
    } else {
        format!("{level}")
    }
}

pub fn render_boxplot(panel: &Panel) -> String {
    assert_eq!(panel.level_labels.len(), panel.stats.len());
    let k = panel.stats.len();
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &panel.stats {
        lo = lo.min(s.whisker_low);
        hi = hi.max(s.whisker_high);
        for &o in &s.outliers {
            lo = lo.min(o);
            hi = hi.max(o);
        }
    }
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo < 1e-12 {
        lo -= 1.0;
        hi += 1.0;
    }
    let pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    let y = |v: f64| MARGIN_TOP + plot_h * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(&panel.title)
    );

    // y axis with nice ticks and horizontal gridlines
    for tick in nice_ticks(lo, hi, 6) {
        let ty = y(tick);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{ty:.2}" x2="{:.2}" y2="{ty:.2}" stroke="#dddddd" stroke-width="1"/>"##,
            MARGIN_LEFT,
            WIDTH - MARGIN_RIGHT
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN_LEFT - 8.0,
            ty + 4.0,
            tick_label(tick)
        );
    }
    let _ = writeln!(
        svg,
        r#"<line x1="{l:.2}" y1="{t:.2}" x2="{l:.2}" y2="{b:.2}" stroke="black" stroke-width="1"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = HEIGHT - MARGIN_BOTTOM
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{l:.2}" y1="{b:.2}" x2="{r:.2}" y2="{b:.2}" stroke="black" stroke-width="1"/>"#,
        l = MARGIN_LEFT,
        b = HEIGHT - MARGIN_BOTTOM,
        r = WIDTH - MARGIN_RIGHT
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0,
        escape(&panel.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        escape(&panel.y_label)
    );

    let slot = plot_w / k as f64;
    let box_w = 0.5 * slot;
    for (i, (s, label)) in panel.stats.iter().zip(&panel.level_labels).enumerate() {
        let cx = MARGIN_LEFT + slot * (i as f64 + 0.5);
        let _ = writeln!(svg, r##"<g class="box" stroke="#1f4e8c" fill="none">"##);
        // whisker stems and caps
        for (wv, qv) in [(s.whisker_low, s.q1), (s.whisker_high, s.q3)] {
            let _ = writeln!(
                svg,
                r#"<line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke-width="1"/>"#,
                y(wv),
                y(qv)
            );
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="1"/>"#,
                cx - box_w / 4.0,
                y(wv),
                cx + box_w / 4.0,
                y(wv)
            );
        }
        let _ = writeln!(
            svg,
            r##"<rect x="{:.2}" y="{:.2}" width="{box_w:.2}" height="{:.2}" fill="#dce9f7" stroke-width="1.2"/>"##,
            cx - box_w / 2.0,
            y(s.q3),
            (y(s.q1) - y(s.q3)).max(0.5)
        );
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke-width="2"/>"#,
            cx - box_w / 2.0,
            y(s.median),
            cx + box_w / 2.0,
            y(s.median)
        );
        for &o in &s.outliers {
            let _ = writeln!(
                svg,
                r#"<circle cx="{cx:.2}" cy="{:.2}" r="2" stroke-width="1"/>"#,
                y(o)
            );
        }
        let _ = writeln!(svg, "</g>");
        let _ = writeln!(
            svg,
            r#"<text x="{cx:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            HEIGHT - MARGIN_BOTTOM + 18.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e7 {
        format!("{}", v as i64)
    } else {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    }
}

/// Round ticks covering [lo, hi] with a 1/2/5 step.
fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * span {
        // snap near-zero ticks to exactly zero
        out.push(if t.abs() < 1e-12 * span { 0.0 } else { t });
        t += step;
    }
    out
}
