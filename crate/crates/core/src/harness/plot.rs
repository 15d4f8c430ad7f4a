//! Two-panel SVG of mean redundancy against segment count: a view zoomed on
//! the lower half of the values (left) and the full view (right).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::report::ResultTable;

const PANEL_W: f64 = 420.0;
const PANEL_H: f64 = 320.0;
const MARGIN: f64 = 56.0;
const LEGEND_H: f64 = 28.0;

const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Axis ranges of one panel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PanelRange {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let pad = if hi > lo { 0.05 * (hi - lo) } else { 1.0 };
    (lo - pad, hi + pad)
}

/// Zoomed and full ranges. The zoomed panel keeps the full x range and cuts
/// the y axis at the median mean.
pub fn panel_ranges(table: &ResultTable) -> [PanelRange; 2] {
    if table.is_empty() {
        let r = PanelRange {
            x: (0.0, 1.0),
            y: (0.0, 1.0),
        };
        return [r, r];
    }
    let xs = table.rows().iter().map(|r| r.segments as f64);
    let x = (
        xs.clone().fold(f64::INFINITY, f64::min),
        xs.fold(f64::NEG_INFINITY, f64::max),
    );
    let x = if x.1 > x.0 { x } else { (x.0 - 1.0, x.1 + 1.0) };
    let mut ys: Vec<f64> = table.rows().iter().map(|r| r.mean).collect();
    ys.sort_by(f64::total_cmp);
    let (lo, hi) = (ys[0], ys[ys.len() - 1]);
    let median = ys[ys.len() / 2];
    [
        PanelRange {
            x,
            y: padded(lo, median.max(lo)),
        },
        PanelRange {
            x,
            y: padded(lo, hi),
        },
    ]
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(t);
        t += step;
    }
    out
}

fn panel(
    svg: &mut String,
    table: &ResultTable,
    range: PanelRange,
    ox: f64,
    id: usize,
    title: &str,
) {
    let (x0, x1) = range.x;
    let (y0, y1) = range.y;
    let w = PANEL_W - 2.0 * MARGIN;
    let h = PANEL_H - 2.0 * MARGIN;
    let px = |x: f64| ox + MARGIN + (x - x0) / (x1 - x0) * w;
    let py = |y: f64| MARGIN + (1.0 - (y - y0) / (y1 - y0)) * h;

    let _ = writeln!(
        svg,
        r#"<clipPath id="clip{id}"><rect x="{:.1}" y="{:.1}" width="{w:.1}" height="{h:.1}"/></clipPath>"#,
        ox + MARGIN,
        MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{:.1}" y="{:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="black"/>"#,
        ox + MARGIN,
        MARGIN
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{title}</text>"#,
        ox + PANEL_W / 2.0,
        MARGIN - 12.0
    );
    for t in nice_ticks(x0, x1, 6) {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{t}</text>"#,
            px(t),
            MARGIN + h + 16.0
        );
    }
    for t in nice_ticks(y0, y1, 6) {
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/><text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{t}</text>"##,
            ox + MARGIN,
            ox + MARGIN + w,
            py(t),
            py(t),
            ox + MARGIN - 6.0,
            py(t) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">segments S</text>"#,
        ox + PANEL_W / 2.0,
        PANEL_H - 14.0
    );
    let _ = writeln!(svg, r#"<g clip-path="url(#clip{id})">"#);
    for (i, model) in table.models().into_iter().enumerate() {
        let pts: Vec<String> = table
            .series(model)
            .into_iter()
            .map(|(s, m)| format!("{:.2},{:.2}", px(s as f64), py(m)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="curve" data-model="{model}" fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            pts.join(" ")
        );
    }
    svg.push_str("</g>\n");
}

pub fn render_svg(table: &ResultTable) -> String {
    let [zoom, full] = panel_ranges(table);
    let width = 2.0 * PANEL_W;
    let height = PANEL_H + LEGEND_H;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif">"#
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.1}" font-size="12" transform="rotate(-90 14 {:.1})" text-anchor="middle">mean redundancy (nats)</text>"#,
        PANEL_H / 2.0,
        PANEL_H / 2.0
    );
    panel(&mut svg, table, zoom, 0.0, 0, "zoomed");
    panel(&mut svg, table, full, PANEL_W, 1, "full view");
    for (i, model) in table.models().into_iter().enumerate() {
        let x = MARGIN + i as f64 * 100.0;
        let y = PANEL_H + 8.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.1}" x2="{:.1}" y1="{y:.1}" y2="{y:.1}" stroke="{}" stroke-width="3"/><text x="{:.1}" y="{:.1}" font-size="12">{model}</text>"#,
            x + 18.0,
            COLORS[i % COLORS.len()],
            x + 22.0,
            y + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg(table: &ResultTable, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(table)).map_err(|e| Error::io(path, e))
}
