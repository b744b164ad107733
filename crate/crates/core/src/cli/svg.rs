//! Log-log plot of the normalized coherence ratio against `n_av`, written
//! as plain SVG.

use std::fmt::Write;

use super::sweep::SweepRow;

const WIDTH: f64 = 820.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Decade range `[10^lo, 10^hi]` covering all values.
fn decades(values: impl Iterator<Item = f64>) -> (i32, i32) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v.log10());
        hi = hi.max(v.log10());
    }
    if !lo.is_finite() {
        return (0, 1);
    }
    let (lo, mut hi) = ((lo + 1e-9).floor() as i32, (hi - 1e-9).ceil() as i32);
    if hi <= lo {
        hi = lo + 1;
    }
    (lo, hi)
}

/// Renders one polyline per state label, in the order states first appear
/// in `rows`. Points with a non-positive or undefined ratio are skipped.
pub fn render_svg(rows: &[SweepRow], m: u32) -> String {
    let mut labels: Vec<&str> = Vec::new();
    for row in rows {
        if !labels.contains(&row.state_label.as_str()) {
            labels.push(&row.state_label);
        }
    }
    let points: Vec<(usize, f64, f64)> = rows
        .iter()
        .filter_map(|row| {
            let ratio = row.values()?.ratio?;
            (ratio > 0.0 && row.n_av > 0.0).then(|| {
                let series = labels.iter().position(|l| *l == row.state_label).unwrap();
                (series, row.n_av, ratio)
            })
        })
        .collect();

    let (x_lo, x_hi) = decades(points.iter().map(|p| p.1));
    let (y_lo, y_hi) = decades(points.iter().map(|p| p.2));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x.log10() - x_lo as f64) / (x_hi - x_lo) as f64 * plot_w;
    let sy = |y: f64| TOP + plot_h - (y.log10() - y_lo as f64) / (y_hi - y_lo) as f64 * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    for d in x_lo..=x_hi {
        let x = sx(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#dddddd"/>"##,
            TOP + plot_h
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">1e{d}</text>"#,
            TOP + plot_h + 18.0
        );
    }
    for d in y_lo..=y_hi {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">mean photon number n_av</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">G^({m}) / n_av^{m}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (series, label) in labels.iter().enumerate() {
        let color = PALETTE[series % PALETTE.len()];
        let coords: Vec<String> = points
            .iter()
            .filter(|p| p.0 == series)
            .map(|&(_, x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                coords.join(" ")
            );
        }
        let ly = TOP + 20.0 + 20.0 * series as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 25.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 32.0,
            ly + 4.0,
            escape(label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}
