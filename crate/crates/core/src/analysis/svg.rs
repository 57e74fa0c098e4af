use std::fmt::Write;

use super::placement::PlacementGrid;
use crate::ingest::{ServeDepth, ServeWidth};
use crate::ArtifactStamp;

/// Geometry and colours shared by the charts.
#[derive(Clone, Debug, PartialEq)]
pub struct SvgStyle {
    pub cell_width: u32,
    pub cell_height: u32,
    pub bar_height: u32,
    pub bar_max_width: u32,
    pub label_width: u32,
    /// Fill of a 0 % cell and of the largest cell.
    pub low: [u8; 3],
    pub high: [u8; 3],
    pub font_family: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            cell_width: 84,
            cell_height: 110,
            bar_height: 18,
            bar_max_width: 360,
            label_width: 220,
            low: [247, 251, 255],
            high: [8, 48, 107],
            font_family: "sans-serif".into(),
        }
    }
}

impl SvgStyle {
    /// Linear blend between `low` and `high`, `t` clamped to [0, 1].
    pub fn shade(&self, t: f64) -> String {
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
        let c: Vec<u8> = self
            .low
            .iter()
            .zip(&self.high)
            .map(|(&a, &b)| (f64::from(a) + (f64::from(b) - f64::from(a)) * t).round() as u8)
            .collect();
        format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
    }
}

pub(crate) fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, width: u32, height: u32, style: &SvgStyle, stamp: &ArtifactStamp) {
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"{}\">",
        escape(&style.font_family)
    );
    let _ = writeln!(out, "<!-- {} -->", stamp.describe());
    let _ = writeln!(out, "<rect width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>");
}

/// Widths left to right, from the centre service line out to the sideline.
const COURT_ORDER: [ServeWidth; 5] = [ServeWidth::C, ServeWidth::BC, ServeWidth::B, ServeWidth::BW, ServeWidth::W];

/// One service box split into ten cells: the service line is at the top, so
/// CTL cells form the upper row. Shading is relative to the largest cell.
pub fn render_court_heatmap(grid: &PlacementGrid, style: &SvgStyle, stamp: &ArtifactStamp) -> String {
    let margin = 40;
    let top = 56;
    let width = margin * 2 + style.cell_width * 5;
    let height = top + style.cell_height * 2 + 48;
    let max = grid.cells().iter().map(|c| c.2).fold(0.0, f64::max);
    let mut out = String::new();
    header(&mut out, width, height, style, stamp);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"28\" font-size=\"16\" text-anchor=\"middle\">{} ({} serves)</text>",
        width / 2,
        escape(&grid.label()),
        grid.total
    );
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">service line</text>",
        width / 2,
        top - 6
    );
    for (row, depth) in [ServeDepth::Ctl, ServeDepth::Nctl].into_iter().enumerate() {
        for (col, w) in COURT_ORDER.into_iter().enumerate() {
            let pct = grid.percent(w, depth);
            let t = if max > 0.0 { pct / max } else { 0.0 };
            let x = margin + col as u32 * style.cell_width;
            let y = top + row as u32 * style.cell_height;
            let ink = if t > 0.5 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                out,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{}\" height=\"{}\" fill=\"{}\" stroke=\"#333333\" stroke-width=\"1\"/>",
                style.cell_width,
                style.cell_height,
                style.shade(t)
            );
            let cx = x + style.cell_width / 2;
            let cy = y + style.cell_height / 2;
            let _ = writeln!(
                out,
                "<text x=\"{cx}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\" fill=\"{ink}\">{w}/{depth}</text>",
                cy - 8
            );
            let _ = writeln!(
                out,
                "<text x=\"{cx}\" y=\"{}\" font-size=\"14\" text-anchor=\"middle\" fill=\"{ink}\">{pct:.1}%</text>",
                cy + 12
            );
        }
    }
    let base = top + style.cell_height * 2;
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">net</text>",
        width / 2,
        base + 16
    );
    let _ = writeln!(
        out,
        "<text x=\"{margin}\" y=\"{}\" font-size=\"11\">centre</text><text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">sideline</text>",
        base + 34,
        width - margin,
        base + 34
    );
    out.push_str("</svg>\n");
    out
}

/// Horizontal bars, one per entry, in the given order.
pub fn render_bar_chart(title: &str, entries: &[(String, f64)], style: &SvgStyle, stamp: &ArtifactStamp) -> String {
    let top = 48;
    let width = style.label_width + style.bar_max_width + 90;
    let rows = entries.len().max(1) as u32;
    let height = top + rows * (style.bar_height + 6) + 20;
    let max = entries.iter().map(|e| e.1).fold(0.0, f64::max);
    let mut out = String::new();
    header(&mut out, width, height, style, stamp);
    let _ = writeln!(
        out,
        "<text x=\"{}\" y=\"26\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        width / 2,
        escape(title)
    );
    if entries.is_empty() {
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">no entries above threshold</text>",
            width / 2,
            top + 12
        );
    }
    for (i, (name, v)) in entries.iter().enumerate() {
        let y = top + i as u32 * (style.bar_height + 6);
        let len = if max > 0.0 { (v / max * f64::from(style.bar_max_width)).round() as u32 } else { 0 };
        let mid = y + style.bar_height / 2 + 4;
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{mid}\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            style.label_width - 8,
            escape(name)
        );
        let _ = writeln!(
            out,
            "<rect x=\"{}\" y=\"{y}\" width=\"{len}\" height=\"{}\" fill=\"{}\"/>",
            style.label_width,
            style.bar_height,
            style.shade(0.8)
        );
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{mid}\" font-size=\"11\">{v:.4}</text>",
            style.label_width + len + 6
        );
    }
    out.push_str("</svg>\n");
    out
}
