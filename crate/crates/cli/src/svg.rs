//! Regret-vs-budget line charts as self-contained SVG.

use std::fmt::Write;

use crate::report::SweepRow;

/// Series the reference envelope is fit to.
pub const FIT_POLICY: &str = "query_then_ucbv";

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 200.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// `min{n T ln T / k, √(n T ln T)}`, the regret envelope shape up to a constant.
pub fn envelope(n: usize, horizon: u64, k: f64) -> f64 {
    let ntl = n as f64 * horizon as f64 * (horizon as f64).ln();
    let flat = ntl.sqrt();
    if k <= 0.0 {
        flat
    } else {
        (ntl / k).min(flat)
    }
}

/// Least-squares `c` for `y ≈ c · envelope(k)`; `None` without usable points.
pub fn fit_constant(points: &[(u64, f64)], n: usize, horizon: u64) -> Option<f64> {
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(k, y)| {
        let g = envelope(n, horizon, k as f64);
        (num + g * y, den + g * g)
    });
    (den > 0.0).then(|| num / den)
}

/// Maps data coordinates to pixels.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    fn from_rows(rows: &[SweepRow], reference: &[(f64, f64)]) -> Self {
        let xs = rows.iter().map(|r| r.k as f64).chain(reference.iter().map(|p| p.0));
        let ys = rows.iter().flat_map(|r| [r.ci95_lo, r.ci95_hi]).chain(reference.iter().map(|p| p.1));
        let (x_min, x_max) = bounds(xs);
        let (y_min, y_max) = bounds(ys);
        let pad = 0.05 * (y_max - y_min);
        Frame { x_min, x_max, y_min: y_min - pad, y_max: y_max + pad }
    }

    pub fn px(&self, x: f64) -> f64 {
        MARGIN_LEFT + (x - self.x_min) / (self.x_max - self.x_min) * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    pub fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_BOTTOM - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

/// Distinct policy labels in first-seen order.
fn policies(rows: &[SweepRow]) -> Vec<&str> {
    let mut seen: Vec<&str> = Vec::new();
    for r in rows {
        if !seen.contains(&r.policy.as_str()) {
            seen.push(&r.policy);
        }
    }
    seen
}

/// Pixel vertices of one policy's mean curve, in increasing `k`.
pub fn series_vertices(rows: &[SweepRow], policy: &str, frame: &Frame) -> Vec<(f64, f64)> {
    let mut pts: Vec<&SweepRow> = rows.iter().filter(|r| r.policy == policy).collect();
    pts.sort_by_key(|r| r.k);
    pts.iter().map(|r| (frame.px(r.k as f64), frame.py(r.mean_pseudo_regret))).collect()
}

pub struct Chart {
    pub svg: String,
    /// Fitted envelope constant, when the fit series is present.
    pub fit: Option<f64>,
}

pub fn render(rows: &[SweepRow], n: usize, horizon: u64, title: &str) -> Chart {
    let fit_points: Vec<(u64, f64)> =
        rows.iter().filter(|r| r.policy == FIT_POLICY).map(|r| (r.k, r.mean_pseudo_regret)).collect();
    let fit = fit_constant(&fit_points, n, horizon);

    let (k_lo, k_hi) = bounds(rows.iter().map(|r| r.k as f64));
    let reference: Vec<(f64, f64)> = match fit {
        Some(c) => (0..=120)
            .map(|i| k_lo + (k_hi - k_lo) * i as f64 / 120.0)
            .map(|k| (k, c * envelope(n, horizon, k)))
            .collect(),
        None => Vec::new(),
    };
    let frame = Frame::from_rows(rows, &reference);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" style="font-family:sans-serif;font-size:12px">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" style="fill:#ffffff"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" style="font-size:15px;text-anchor:middle">{}</text>"#,
        (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
        escape(title)
    );
    axes(&mut s, &frame);

    for (i, policy) in policies(rows).into_iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pts: Vec<&SweepRow> = rows.iter().filter(|r| r.policy == policy).collect();
        pts.sort_by_key(|r| r.k);
        let upper = pts.iter().map(|r| (frame.px(r.k as f64), frame.py(r.ci95_hi)));
        let lower = pts.iter().rev().map(|r| (frame.px(r.k as f64), frame.py(r.ci95_lo)));
        let band: Vec<(f64, f64)> = upper.chain(lower).collect();
        let _ =
            writeln!(s, r#"<polygon points="{}" style="fill:{color};fill-opacity:0.18;stroke:none"/>"#, points(&band));
        let line = series_vertices(rows, policy, &frame);
        let _ =
            writeln!(s, r#"<polyline points="{}" style="fill:none;stroke:{color};stroke-width:2"/>"#, points(&line));
        for (x, y) in &line {
            let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" style="fill:{color}"/>"#);
        }
        legend(&mut s, i, color, policy, false);
    }

    if let Some(c) = fit {
        let px: Vec<(f64, f64)> = reference.iter().map(|&(k, y)| (frame.px(k), frame.py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" style="fill:none;stroke:#555555;stroke-width:1.5;stroke-dasharray:6 4"/>"#,
            points(&px)
        );
        let slot = policies(rows).len();
        legend(&mut s, slot, "#555555", "c·min{nT lnT/k, √(nT lnT)}", true);
        legend_note(&mut s, slot, &format!("c = {c:.4} (least squares)"));
    }
    s.push_str("</svg>\n");
    Chart { svg: s, fit }
}

fn axes(s: &mut String, f: &Frame) {
    let (x0, x1) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT);
    let (y0, y1) = (HEIGHT - MARGIN_BOTTOM, MARGIN_TOP);
    let _ = writeln!(s, r#"<g style="stroke:#000000;stroke-width:1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/>"#
    );
    let _ = writeln!(s, "</g>");
    for i in 0..=5 {
        let t = i as f64 / 5.0;
        let xv = f.x_min + t * (f.x_max - f.x_min);
        let yv = f.y_min + t * (f.y_max - f.y_min);
        let (px, py) = (f.px(xv), f.py(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{y0}" x2="{px:.2}" y2="{}" style="stroke:#000000"/><text x="{px:.2}" y="{}" style="text-anchor:middle">{}</text>"#,
            y0 + 5.0,
            y0 + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{x0}" y1="{py:.2}" x2="{x1}" y2="{py:.2}" style="stroke:#dddddd"/><text x="{}" y="{:.2}" style="text-anchor:end">{}</text>"#,
            x0 - 6.0,
            py + 4.0,
            tick(yv)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" style="text-anchor:middle">query budget k</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(16 {}) rotate(-90)" style="text-anchor:middle">mean pseudo-regret</text>"#,
        (y0 + y1) / 2.0
    );
}

fn legend(s: &mut String, slot: usize, color: &str, label: &str, dashed: bool) {
    let x = WIDTH - MARGIN_RIGHT + 14.0;
    let y = MARGIN_TOP + 10.0 + 20.0 * slot as f64;
    let dash = if dashed { ";stroke-dasharray:6 4" } else { "" };
    let _ = writeln!(
        s,
        r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" style="stroke:{color};stroke-width:2{dash}"/><text x="{}" y="{}" style="font-size:10px">{}</text>"#,
        x + 22.0,
        x + 28.0,
        y + 4.0,
        escape(label)
    );
}

fn legend_note(s: &mut String, slot: usize, text: &str) {
    let x = WIDTH - MARGIN_RIGHT + 42.0;
    let y = MARGIN_TOP + 10.0 + 20.0 * slot as f64 + 16.0;
    let _ = writeln!(s, r#"<text x="{x}" y="{y}" style="font-size:10px">{}</text>"#, escape(text));
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-2..1e6).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 100.0 {
        format!("{v:.0}")
    } else {
        format!("{}", (v * 100.0).round() / 100.0)
    }
}

fn points(pts: &[(f64, f64)]) -> String {
    pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect::<Vec<_>>().join(" ")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}
