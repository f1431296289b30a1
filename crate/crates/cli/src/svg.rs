//! Minimal SVG renderer for line plots and the Q-function heat map.

use std::fmt::Write;

use hpsym_core::remnant::QGrid;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
/// Floor applied to values on a log axis.
const LOG_FLOOR: f64 = 1e-16;

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    pub dashed: bool,
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series], log_y: bool) -> String {
    let ty = |y: f64| if log_y { y.max(LOG_FLOOR).log10() } else { y };
    let (x0, x1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = range(series.iter().flat_map(|s| s.points.iter().map(|p| ty(p.1))));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (ty(y) - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    header(&mut out, title);
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    for i in 0..=4 {
        let f = i as f64 / 4.0;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let px = MARGIN + f * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - f * (HEIGHT - 2.0 * MARGIN);
        let ylabel = if log_y { format!("1e{yv:.1}") } else { format!("{yv:.3}") };
        let _ = writeln!(out, r#"<text x="{px:.2}" y="{}" text-anchor="middle">{xv:.3}</text>"#, HEIGHT - MARGIN + 16.0);
        let _ = writeln!(out, r#"<text x="{}" y="{py:.2}" text-anchor="end">{ylabel}</text>"#, MARGIN - 4.0);
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 16.0, escape(x_label));
    let _ = writeln!(
        out,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let dash = if s.dashed { r#" stroke-dasharray="6 4""# } else { "" };
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        );
        let ly = MARGIN + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{colour}" text-anchor="end">{}</text>"#,
            WIDTH - MARGIN - 6.0,
            escape(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Grey-scale map of `Q`, normalised to its maximum, over the unit disk.
pub fn heatmap(title: &str, grid: &QGrid) -> String {
    let side = HEIGHT - 2.0 * MARGIN;
    let cell = side / grid.resolution as f64;
    let left = (WIDTH - side) / 2.0;
    let max = grid.samples.iter().map(|s| s.q).fold(0.0, f64::max);
    let mut out = String::new();
    header(&mut out, title);
    for s in &grid.samples {
        let v = if max > 0.0 { s.q / max } else { 0.0 };
        let shade = (255.0 * (1.0 - v)).round() as u8;
        let x = left + (s.x + 1.0) / 2.0 * (side - cell);
        let y = MARGIN + (1.0 - s.z) / 2.0 * (side - cell);
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{:.2}" fill="rgb({shade},{shade},255)"/>"#,
            cell + 0.05,
            cell + 0.05
        );
    }
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#, WIDTH / 2.0, HEIGHT - 20.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">z</text>"#, left - 14.0, HEIGHT / 2.0);
    out.push_str("</svg>\n");
    out
}
