//! Self-contained SVG rendering of QBER/FER curves.
//!
//! One line per (mode, metric): QBER solid, FER dashed, colored by mode,
//! log10 y-axis, linear x-axis in the flip probability, error bars from the
//! Wilson interval columns. Non-positive values cannot be placed on the log
//! axis and are dropped (counted for a warning).

use crate::csvout::CsvRow;
use std::collections::BTreeSet;
use std::fmt::Write as _;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 240.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;

/// Fixed mode palette; unknown modes cycle through the tail colors.
const MODE_ORDER: [&str; 4] = ["perfect", "entangled", "unentangled", "no-information"];
const MODE_COLORS: [(&str, &str); 4] = [
    ("perfect", "#1f77b4"),
    ("entangled", "#2ca02c"),
    ("unentangled", "#ff7f0e"),
    ("no-information", "#d62728"),
];
const EXTRA_COLORS: [&str; 4] = ["#9467bd", "#8c564b", "#e377c2", "#17becf"];

struct Series {
    color: String,
    dashed: bool,
    points: Vec<(f64, f64, f64, f64)>, // x, y, y_lo, y_hi
}

/// Renders the plot; returns the SVG text and the number of points dropped
/// for being non-positive on the log axis.
pub fn render_svg(rows: &[(String, CsvRow)], title: &str) -> (String, usize) {
    let mut mode_labels: Vec<String> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    // canonical comparison ordering first, then appearance order
    for want in MODE_ORDER {
        for (label, row) in rows {
            let key = series_key(label, &row.mode);
            if row.mode == want && seen.insert(key.clone()) {
                mode_labels.push(key);
            }
        }
    }
    for (label, row) in rows {
        let key = series_key(label, &row.mode);
        if seen.insert(key.clone()) {
            mode_labels.push(key);
        }
    }

    let mut dropped = 0usize;
    let mut series: Vec<Series> = Vec::new();
    for (idx, key) in mode_labels.iter().enumerate() {
        let color = color_for(key, idx);
        for (metric, dashed) in [("qber", false), ("fer", true)] {
            let mut points = Vec::new();
            for (label, row) in rows {
                if series_key(label, &row.mode) != *key {
                    continue;
                }
                let (v, lo, hi) = match metric {
                    "qber" => (row.qber, row.qber_lo, row.qber_hi),
                    _ => (row.fer, row.fer_lo, row.fer_hi),
                };
                if v <= 0.0 {
                    dropped += 1;
                    continue;
                }
                points.push((row.f_prime, v, lo, hi));
            }
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            if !points.is_empty() {
                series.push(Series {
                    color: color.clone(),
                    dashed,
                    points,
                });
            }
        }
    }

    (draw(&series, &mode_labels, title), dropped)
}

fn series_key(label: &str, mode: &str) -> String {
    if label.is_empty() {
        mode.to_string()
    } else {
        format!("{label}:{mode}")
    }
}

fn color_for(key: &str, idx: usize) -> String {
    for (mode, color) in MODE_COLORS {
        if key == mode || key.ends_with(&format!(":{mode}")) {
            return color.to_string();
        }
    }
    EXTRA_COLORS[idx % EXTRA_COLORS.len()].to_string()
}

fn draw(series: &[Series], legend: &[String], title: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;

    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().map(|p| p.0)).collect();
    let ys: Vec<f64> = series
        .iter()
        .flat_map(|s| {
            s.points
                .iter()
                .flat_map(|p| [p.1, p.2, p.3])
                .filter(|&v| v > 0.0)
        })
        .collect();

    let (mut xmin, mut xmax) = min_max(&xs, (0.0, 1.0));
    if (xmax - xmin).abs() < 1e-12 {
        let pad = (xmin.abs() * 0.1).max(0.01);
        xmin -= pad;
        xmax += pad;
    } else {
        let pad = (xmax - xmin) * 0.05;
        xmin -= pad;
        xmax += pad;
    }
    let (ymin_raw, ymax_raw) = min_max(&ys, (1e-6, 1.0));
    let ly_min = ymin_raw.log10().floor();
    let ly_max = ymax_raw.log10().ceil().max(ly_min + 1.0);

    let x_px = |x: f64| LEFT + (x - xmin) / (xmax - xmin) * plot_w;
    let y_px = |y: f64| {
        let ly = y.max(10f64.powf(ly_min)).log10();
        TOP + (1.0 - (ly - ly_min) / (ly_max - ly_min)) * plot_h
    };

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">\n"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"24\" font-size=\"16\" text-anchor=\"middle\">{}</text>",
        LEFT + plot_w / 2.0,
        xml_escape(title)
    );

    // y grid and labels at decades
    let mut dec = ly_min as i64;
    while dec <= ly_max as i64 {
        let y = y_px(10f64.powi(dec as i32));
        let _ = writeln!(
            svg,
            "<line x1=\"{LEFT}\" y1=\"{y:.1}\" x2=\"{:.1}\" y2=\"{y:.1}\" stroke=\"#dddddd\"/>",
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">1e{dec}</text>",
            LEFT - 8.0,
            y + 4.0
        );
        dec += 1;
    }
    // x ticks
    for k in 0..=5 {
        let x = xmin + (xmax - xmin) * k as f64 / 5.0;
        let px = x_px(x);
        let _ = writeln!(
            svg,
            "<line x1=\"{px:.1}\" y1=\"{:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"#999999\"/>",
            TOP + plot_h,
            TOP + plot_h + 5.0
        );
        let _ = writeln!(
            svg,
            "<text x=\"{px:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{}</text>",
            TOP + plot_h + 20.0,
            format_tick(x)
        );
    }
    // axes
    let _ = writeln!(
        svg,
        "<rect x=\"{LEFT}\" y=\"{TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#333333\"/>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\">flip probability f'</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 18.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"22\" y=\"{:.1}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 22 {:.1})\">error rate</text>",
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for s in series {
        let dash = if s.dashed { " stroke-dasharray=\"6 4\"" } else { "" };
        if s.points.len() > 1 {
            let pts: Vec<String> = s
                .points
                .iter()
                .map(|p| format!("{:.2},{:.2}", x_px(p.0), y_px(p.1)))
                .collect();
            let _ = writeln!(
                svg,
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\"{dash}/>",
                pts.join(" "),
                s.color
            );
        }
        for &(x, y, lo, hi) in &s.points {
            let px = x_px(x);
            // error bar: clamp a zero lower bound to the plot floor
            let lo_y = y_px(if lo > 0.0 { lo } else { 10f64.powf(ly_min) });
            let hi_y = y_px(hi.max(y));
            let _ = writeln!(
                svg,
                "<line x1=\"{px:.2}\" y1=\"{lo_y:.2}\" x2=\"{px:.2}\" y2=\"{hi_y:.2}\" stroke=\"{}\" stroke-width=\"1\"/>",
                s.color
            );
            for cap in [lo_y, hi_y] {
                let _ = writeln!(
                    svg,
                    "<line x1=\"{:.2}\" y1=\"{cap:.2}\" x2=\"{:.2}\" y2=\"{cap:.2}\" stroke=\"{}\" stroke-width=\"1\"/>",
                    px - 3.0,
                    px + 3.0,
                    s.color
                );
            }
            let _ = writeln!(
                svg,
                "<circle cx=\"{px:.2}\" cy=\"{:.2}\" r=\"2.6\" fill=\"{}\"/>",
                y_px(y),
                s.color
            );
        }
    }

    // legend: one entry per mode, line style note below
    let lx = LEFT + plot_w + 18.0;
    let mut ly = TOP + 10.0;
    for (idx, key) in legend.iter().enumerate() {
        let color = color_for(key, idx);
        let _ = writeln!(
            svg,
            "<line x1=\"{lx}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>",
            lx + 26.0
        );
        let _ = writeln!(
            svg,
            "<text class=\"legend-entry\" x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\">{}</text>",
            lx + 34.0,
            ly + 4.0,
            xml_escape(key)
        );
        ly += 20.0;
    }
    ly += 10.0;
    let _ = writeln!(
        svg,
        "<text x=\"{lx}\" y=\"{ly:.1}\" font-size=\"11\" fill=\"#555555\">solid: QBER</text>"
    );
    let _ = writeln!(
        svg,
        "<text x=\"{lx}\" y=\"{:.1}\" font-size=\"11\" fill=\"#555555\">dashed: FER</text>",
        ly + 16.0
    );
    svg.push_str("</svg>\n");
    svg
}

fn min_max(values: &[f64], fallback: (f64, f64)) -> (f64, f64) {
    if values.is_empty() {
        return fallback;
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

fn format_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let formatted = format!("{v:.4}");
    let trimmed = formatted.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() || trimmed == "-" {
        "0".into()
    } else {
        trimmed.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(mode: &str, fp: f64, qber: f64, fer: f64) -> CsvRow {
        CsvRow {
            f_prime: fp,
            mode: mode.into(),
            qber,
            qber_lo: qber * 0.8,
            qber_hi: qber * 1.2,
            fer,
            fer_lo: fer * 0.8,
            fer_hi: fer * 1.2,
        }
    }

    #[test]
    fn single_point_renders_marker_and_error_bar() {
        let rows = vec![(String::new(), row("perfect", 0.1, 0.01, 0.05))];
        let (svg, dropped) = render_svg(&rows, "t");
        assert_eq!(dropped, 0);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<circle"));
        assert!(svg.contains("legend-entry"));
    }

    #[test]
    fn four_modes_give_four_legend_entries() {
        let rows: Vec<(String, CsvRow)> = ["no-information", "unentangled", "entangled", "perfect"]
            .iter()
            .map(|m| (String::new(), row(m, 0.1, 0.01, 0.05)))
            .collect();
        let (svg, _) = render_svg(&rows, "t");
        assert_eq!(svg.matches("legend-entry").count(), 4);
        // legend ordering: best to worst
        let p = svg.find(">perfect<").unwrap();
        let e = svg.find(">entangled<").unwrap();
        let u = svg.find(">unentangled<").unwrap();
        let n = svg.find(">no-information<").unwrap();
        assert!(p < e && e < u && u < n);
    }

    #[test]
    fn nonpositive_values_dropped() {
        let rows = vec![
            (String::new(), row("perfect", 0.1, 0.0, 0.05)),
            (String::new(), row("perfect", 0.2, 0.01, 0.05)),
        ];
        let (_, dropped) = render_svg(&rows, "t");
        assert_eq!(dropped, 1);
    }
}
