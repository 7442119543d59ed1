//! Minimal deterministic SVG line plots.
//!
//! The renderer emits self-contained SVG 1.1 with axes, tick labels, a
//! legend, and exactly one polyline per series. All coordinates are
//! formatted with fixed precision, so identical specs produce identical
//! bytes. No styling is negotiated with the viewer; everything is inline.

use crate::error::{Error, Result};
use std::fmt::Write as _;
use std::path::Path;

/// One named curve. Points are (x, y) pairs with x non-decreasing.
#[derive(Debug, Clone)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

impl PlotSeries {
    pub fn new(name: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        PlotSeries {
            name: name.into(),
            points,
        }
    }
}

/// A complete plot description: what to draw and how to label it.
#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<PlotSeries>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_LEFT: f64 = 72.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;
const TICKS: usize = 5;

/// Stroke colors assigned to series in order, cycling when exhausted.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

fn validate(spec: &PlotSpec) -> Result<()> {
    if spec.series.is_empty() {
        return Err(Error::InvalidPlotSpec {
            reason: "plot needs at least one series".into(),
        });
    }
    for series in &spec.series {
        if series.points.is_empty() {
            return Err(Error::InvalidPlotSpec {
                reason: format!("series {:?} has no points", series.name),
            });
        }
        for window in series.points.windows(2) {
            if window[1].0 < window[0].0 {
                return Err(Error::InvalidPlotSpec {
                    reason: format!("series {:?} x values must be ascending", series.name),
                });
            }
        }
        for &(x, y) in &series.points {
            if !x.is_finite() || !y.is_finite() {
                return Err(Error::InvalidPlotSpec {
                    reason: format!("series {:?} contains a non-finite point", series.name),
                });
            }
        }
    }
    Ok(())
}

/// Data range padded so curves never sit on the frame. A zero-width range
/// is widened symmetrically to keep the projection invertible.
fn padded_range(lo: f64, hi: f64) -> (f64, f64) {
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Short label for a tick value: up to four significant digits, plain
/// decimal, trailing zeros trimmed.
fn tick_label(value: f64) -> String {
    let text = super::format_sig(value, 4);
    if text.contains('.') {
        let trimmed = text.trim_end_matches('0').trim_end_matches('.');
        if trimmed == "-0" {
            "0".to_string()
        } else {
            trimmed.to_string()
        }
    } else {
        text
    }
}

fn px(value: f64) -> String {
    format!("{value:.2}")
}

/// Renders the spec to `path` as standalone SVG.
///
/// Emits exactly one `<polyline>` per series plus one legend entry each.
/// Output bytes are a pure function of the spec.
pub fn render_line_plot(spec: &PlotSpec, path: &Path) -> Result<()> {
    validate(spec)?;

    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for series in &spec.series {
        for &(x, y) in &series.points {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    let (x_lo, x_hi) = padded_range(x_lo, x_hi);
    let (y_lo, y_hi) = padded_range(y_lo, y_hi);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px_x = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let to_px_y = |y: f64| MARGIN_TOP + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h;

    let mut svg = String::new();
    writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    )
    .expect("writing to a String cannot fail");
    writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>").unwrap();
    writeln!(
        svg,
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        px(MARGIN_LEFT + plot_w / 2.0),
        escape_xml(&spec.title)
    )
    .unwrap();

    // Axis frame: x axis along the bottom, y axis along the left.
    let x_axis_y = MARGIN_TOP + plot_h;
    writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>",
        px(MARGIN_LEFT),
        px(x_axis_y),
        px(MARGIN_LEFT + plot_w),
        px(x_axis_y)
    )
    .unwrap();
    writeln!(
        svg,
        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>",
        px(MARGIN_LEFT),
        px(MARGIN_TOP),
        px(MARGIN_LEFT),
        px(x_axis_y)
    )
    .unwrap();

    for i in 0..TICKS {
        let frac = i as f64 / (TICKS - 1) as f64;
        let x_val = x_lo + frac * (x_hi - x_lo);
        let x_px = to_px_x(x_val);
        writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>",
            px(x_px),
            px(x_axis_y),
            px(x_px),
            px(x_axis_y + 5.0)
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            px(x_px),
            px(x_axis_y + 18.0),
            tick_label(x_val)
        )
        .unwrap();

        let y_val = y_lo + frac * (y_hi - y_lo);
        let y_px = to_px_y(y_val);
        writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\" stroke-width=\"1\"/>",
            px(MARGIN_LEFT - 5.0),
            px(y_px),
            px(MARGIN_LEFT),
            px(y_px)
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
            px(MARGIN_LEFT - 8.0),
            px(y_px + 4.0),
            tick_label(y_val)
        )
        .unwrap();
    }

    writeln!(
        svg,
        "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
        px(MARGIN_LEFT + plot_w / 2.0),
        px(HEIGHT - 12.0),
        escape_xml(&spec.x_label)
    )
    .unwrap();
    writeln!(
        svg,
        "  <text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>",
        px(MARGIN_TOP + plot_h / 2.0),
        px(MARGIN_TOP + plot_h / 2.0),
        escape_xml(&spec.y_label)
    )
    .unwrap();

    for (idx, series) in spec.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut points = String::new();
        for (i, &(x, y)) in series.points.iter().enumerate() {
            if i > 0 {
                points.push(' ');
            }
            write!(points, "{},{}", px(to_px_x(x)), px(to_px_y(y))).unwrap();
        }
        writeln!(
            svg,
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{points}\"/>"
        )
        .unwrap();
    }

    // Legend: one swatch and label per series, stacked in the top right
    // corner of the plot area.
    let legend_x = MARGIN_LEFT + plot_w - 150.0;
    for (idx, series) in spec.series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let y = MARGIN_TOP + 14.0 + idx as f64 * 18.0;
        writeln!(
            svg,
            "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"1.5\"/>",
            px(legend_x),
            px(y),
            px(legend_x + 26.0),
            px(y),
            color
        )
        .unwrap();
        writeln!(
            svg,
            "  <text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>",
            px(legend_x + 32.0),
            px(y + 4.0),
            escape_xml(&series.name)
        )
        .unwrap();
    }

    writeln!(svg, "</svg>").unwrap();
    std::fs::write(path, &svg).map_err(|e| Error::io(path.display().to_string(), e))
}
