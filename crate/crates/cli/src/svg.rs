//! Deterministic SVG line plots of a finished sweep.
//!
//! The plot is self-contained (no scripts, no external fonts) and built
//! from plain string formatting with `{:.2}` pixel coordinates, so the
//! same sweep always renders to the same bytes. Receiver distance runs
//! along the x axis, log-scaled with decade ticks when the sweep spans a
//! factor of ten or more and linearly otherwise; reported power in dBm
//! runs along the y axis. Each strategy gets one colored polyline and a
//! legend entry; a single-distance sweep draws markers instead.

use std::fmt::Write as _;
use std::io::{self, Write};

use ris_core::experiment::SweepResult;

const WIDTH: f64 = 880.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 55.0;

/// Line colors, reused cyclically past eight strategies.
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
];

enum Axis {
    Linear { min: f64, max: f64 },
    Log { min: f64, max: f64 },
}

impl Axis {
    /// Picks the x scale: log with decade ticks once the sweep covers at
    /// least one decade, linear below that.
    fn for_distances(values: &[f64]) -> Axis {
        let min = values[0];
        let max = values[values.len() - 1];
        if max / min >= 10.0 {
            Axis::Log { min, max }
        } else {
            Axis::for_span(min, max)
        }
    }

    fn for_span(min: f64, max: f64) -> Axis {
        if min == max {
            // A flat series still needs a nonzero span to land on.
            let pad = if min == 0.0 { 1.0 } else { min.abs() * 0.1 };
            Axis::Linear {
                min: min - pad,
                max: max + pad,
            }
        } else {
            Axis::Linear { min, max }
        }
    }

    /// Fraction of the axis at which `v` sits, 0 at the left/bottom end.
    fn fraction(&self, v: f64) -> f64 {
        match *self {
            Axis::Linear { min, max } => (v - min) / (max - min),
            Axis::Log { min, max } => (v.log10() - min.log10()) / (max.log10() - min.log10()),
        }
    }

    fn ticks(&self) -> Vec<f64> {
        match *self {
            Axis::Log { min, max } => {
                let lo = min.log10().ceil() as i32;
                let hi = max.log10().floor() as i32;
                let mut ticks: Vec<f64> = (lo..=hi).map(|k| 10f64.powi(k)).collect();
                if ticks.len() < 2 {
                    if ticks.first().map_or(true, |&t| t / min > 1.001) {
                        ticks.insert(0, min);
                    }
                    if ticks.last().map_or(true, |&t| max / t > 1.001) {
                        ticks.push(max);
                    }
                }
                ticks
            }
            Axis::Linear { min, max } => {
                let step = nice_step(max - min, 6);
                let mut ticks = Vec::new();
                let mut k = (min / step).ceil() as i64;
                // Guard against the ceiling landing one step low on exact hits.
                if (k as f64) * step < min - step * 1e-9 {
                    k += 1;
                }
                while (k as f64) * step <= max + step * 1e-9 {
                    ticks.push(k as f64 * step);
                    k += 1;
                }
                ticks
            }
        }
    }
}

/// The largest of 1, 2, 5 times a power of ten giving at most `target`
/// intervals over `span`.
fn nice_step(span: f64, target: usize) -> f64 {
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let factor = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    factor * mag
}

/// Tick label: fixed six decimals, then trailing zeros (and a bare dot)
/// trimmed, so ticks like 0.6 computed as 3 * 0.2 never leak float noise.
fn format_tick(value: f64) -> String {
    let mut s = format!("{value:.6}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

fn escape_text(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the sweep as a standalone SVG document.
pub fn svg_bytes(result: &SweepResult, title: &str) -> String {
    let x_axis = Axis::for_distances(
        &result.rows.iter().map(|r| r.d2).collect::<Vec<_>>(),
    );
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for row in &result.rows {
        for outcome in &row.outcomes {
            y_min = y_min.min(outcome.reported_dbm);
            y_max = y_max.max(outcome.reported_dbm);
        }
    }
    let (y_min, y_max) = if y_min == y_max {
        (y_min - 1.0, y_max + 1.0)
    } else {
        let pad = (y_max - y_min) * 0.05;
        (y_min - pad, y_max + pad)
    };
    let y_axis = Axis::for_span(y_min, y_max);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let to_px = |x_frac: f64, y_frac: f64| {
        (
            MARGIN_LEFT + x_frac * plot_w,
            MARGIN_TOP + (1.0 - y_frac) * plot_h,
        )
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(out, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
        MARGIN_LEFT + plot_w / 2.0,
        escape_text(title)
    );

    // Gridlines and tick labels.
    for &tick in &x_axis.ticks() {
        let (px, _) = to_px(x_axis.fraction(tick), 0.0);
        let _ = writeln!(
            out,
            "  <line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        );
        let _ = writeln!(
            out,
            "  <text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            MARGIN_TOP + plot_h + 18.0,
            format_tick(tick)
        );
    }
    for &tick in &y_axis.ticks() {
        let (_, py) = to_px(0.0, y_axis.fraction(tick));
        let _ = writeln!(
            out,
            "  <line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#dddddd\"/>",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{py:.2}\" dy=\"0.35em\" text-anchor=\"end\">{}</text>",
            MARGIN_LEFT - 8.0,
            format_tick(tick)
        );
    }
    let _ = writeln!(
        out,
        "  <rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#333333\"/>"
    );

    // One series per strategy, in sweep order.
    for (i, id) in result.strategies.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<(f64, f64)> = result
            .rows
            .iter()
            .map(|row| {
                to_px(
                    x_axis.fraction(row.d2),
                    y_axis.fraction(row.outcomes[i].reported_dbm),
                )
            })
            .collect();
        if points.len() == 1 {
            let (px, py) = points[0];
            let _ = writeln!(
                out,
                "  <circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"4\" fill=\"{color}\"/>"
            );
        } else {
            let mut attr = String::new();
            for (k, (px, py)) in points.iter().enumerate() {
                if k > 0 {
                    attr.push(' ');
                }
                let _ = write!(attr, "{px:.2},{py:.2}");
            }
            let _ = writeln!(
                out,
                "  <polyline points=\"{attr}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>"
            );
        }

        // Legend entry.
        let ly = MARGIN_TOP + 14.0 + i as f64 * 22.0;
        let lx = WIDTH - MARGIN_RIGHT + 14.0;
        let _ = writeln!(
            out,
            "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"3\"/>",
            lx + 24.0
        );
        let _ = writeln!(
            out,
            "  <text x=\"{:.2}\" y=\"{ly:.2}\" dy=\"0.35em\">{}</text>",
            lx + 32.0,
            escape_text(id.name())
        );
    }

    let _ = writeln!(
        out,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">receiver distance d2 (m)</text>",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        out,
        "  <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">received power (dBm)</text>",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    );
    out.push_str("</svg>\n");
    out
}

/// Writes [`svg_bytes`] to `sink` and reports how many bytes went out.
pub fn emit_plot(result: &SweepResult, title: &str, sink: &mut impl Write) -> io::Result<usize> {
    let text = svg_bytes(result, title);
    sink.write_all(text.as_bytes())?;
    Ok(text.len())
}
