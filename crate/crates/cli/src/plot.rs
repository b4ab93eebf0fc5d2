//! Static SVG line charts drawn from CSV columns, so a chart can always be
//! regenerated from its table alone.

use std::fmt::Write as _;

use crate::failure::Failure;
use crate::table::Columns;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

pub struct Chart<'a> {
    pub title: &'a str,
    pub x: &'a str,
    pub y_label: &'a str,
    /// `(column, legend label)`.
    pub series: &'a [(&'a str, &'a str)],
}

impl Chart<'_> {
    pub fn render(&self, table: &Columns) -> Result<String, Failure> {
        let xs = table.numbers(self.x)?;
        let mut lines = Vec::new();
        for (column, label) in self.series {
            lines.push((*label, table.numbers(column)?));
        }
        Ok(self.draw(&xs, &lines))
    }

    fn draw(&self, xs: &[Option<f64>], lines: &[(&str, Vec<Option<f64>>)]) -> String {
        let finite = |v: &Option<f64>| v.filter(|v| v.is_finite());
        let xv: Vec<f64> = xs.iter().filter_map(finite).collect();
        let yv: Vec<f64> = lines.iter().flat_map(|(_, ys)| ys.iter().filter_map(finite)).collect();
        let (x0, x1) = range(&xv, false);
        let (y0, y1) = range(&yv, true);
        let plot_w = WIDTH - LEFT - RIGHT;
        let plot_h = HEIGHT - TOP - BOTTOM;
        let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
        let py = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            LEFT + plot_w / 2.0,
            escape(self.title)
        );
        let _ = writeln!(
            s,
            r##"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#444"/>"##
        );
        for t in ticks(x0, x1) {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.1}" y1="{1:.1}" x2="{0:.1}" y2="{2:.1}" stroke="#444"/><text x="{0:.1}" y="{3:.1}" text-anchor="middle">{4}</text>"##,
                px(t),
                TOP + plot_h,
                TOP + plot_h + 5.0,
                TOP + plot_h + 20.0,
                label(t)
            );
        }
        for t in ticks(y0, y1) {
            let _ = writeln!(
                s,
                r##"<line x1="{0:.1}" y1="{1:.1}" x2="{2:.1}" y2="{1:.1}" stroke="#ddd"/><text x="{3:.1}" y="{4:.1}" text-anchor="end">{5}</text>"##,
                LEFT,
                py(t),
                LEFT + plot_w,
                LEFT - 6.0,
                py(t) + 4.0,
                label(t)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + plot_w / 2.0,
            HEIGHT - 22.0,
            escape(self.x)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{0:.1}" text-anchor="middle" transform="rotate(-90 16 {0:.1})">{1}</text>"#,
            TOP + plot_h / 2.0,
            escape(self.y_label)
        );

        let mut notes = Vec::new();
        for (k, (name, ys)) in lines.iter().enumerate() {
            let color = PALETTE[k % PALETTE.len()];
            let mut segment: Vec<String> = Vec::new();
            let mut segments = Vec::new();
            for (x, y) in xs.iter().zip(ys) {
                match (finite(x), finite(y)) {
                    (Some(x), Some(y)) => segment.push(format!("{:.1},{:.1}", px(x), py(y))),
                    _ => {
                        if let (Some(x), Some(y)) = (x, y) {
                            if y.is_infinite() {
                                notes.push(format!("{name} = {y} at {} = {x}", self.x));
                            }
                        }
                        segments.push(std::mem::take(&mut segment));
                    }
                }
            }
            segments.push(segment);
            for seg in segments.iter().filter(|s| !s.is_empty()) {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    seg.join(" ")
                );
                for p in seg {
                    let (cx, cy) = p.split_once(',').expect("point");
                    let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{color}"/>"#);
                }
            }
            let ly = TOP + 10.0 + 20.0 * k as f64;
            let lx = WIDTH - RIGHT + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 20.0,
                lx + 26.0,
                ly + 4.0,
                escape(name)
            );
        }
        for (i, note) in notes.iter().enumerate() {
            let _ = writeln!(
                s,
                r##"<text x="{:.1}" y="{:.1}" fill="#a00">{}</text>"##,
                WIDTH - RIGHT + 15.0,
                TOP + 20.0 * (lines.len() as f64 + 1.0) + 16.0 * i as f64,
                escape(note)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn range(values: &[f64], with_zero: bool) -> (f64, f64) {
    let mut lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if with_zero {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = if with_zero { 0.05 * (hi - lo) } else { 0.0 };
    (if lo == 0.0 { 0.0 } else { lo - pad }, hi + pad)
}

/// About five evenly spaced round values inside `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let raw = (hi - lo) / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
