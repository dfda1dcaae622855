//! Self-contained SVG charts. Output depends only on the input values, so
//! identical results render to identical bytes.

use std::fmt::Write;

use crate::experiment::{ExperimentResult, HarnessError, SweepResult};

const W: f64 = 640.0;
const H: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

/// Padded `[lo, hi]` covering `values`; a single value gets a small window.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let pad = if hi > lo { (hi - lo) * 0.08 } else { 0.01 };
    // Nonnegative data keeps a nonnegative axis.
    let floor = if lo >= 0.0 { 0.0 } else { f64::NEG_INFINITY };
    ((lo - pad).max(floor), hi + pad)
}

struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }
    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..TICKS).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn header(out: &mut String, title: &str) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#, W / 2.0, escape(title)).unwrap();
}

fn x_axis(out: &mut String, x: &Axis, label: &str) {
    let y0 = H - BOTTOM;
    writeln!(out, r#"<line class="axis" x1="{LEFT}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, W - RIGHT).unwrap();
    for t in x.ticks() {
        let px = x.map(t);
        writeln!(out, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{t:.4}</text>"#, y0 + 16.0).unwrap();
    }
    writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, (LEFT + W - RIGHT) / 2.0, H - 16.0, escape(label))
        .unwrap();
}

fn y_axis(out: &mut String, y: &Axis, label: &str, at: f64, class: &str) {
    let right = at > LEFT;
    writeln!(out, r#"<line class="axis {class}" x1="{at}" y1="{TOP}" x2="{at}" y2="{}" stroke="black"/>"#, H - BOTTOM).unwrap();
    let (dx, anchor) = if right { (6.0, "start") } else { (-6.0, "end") };
    for t in y.ticks() {
        writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{t:.4}</text>"#, at + dx, y.map(t) + 4.0).unwrap();
    }
    let lx = if right { W - 14.0 } else { 16.0 };
    let cy = (TOP + H - BOTTOM) / 2.0;
    writeln!(
        out,
        r#"<text x="{lx:.2}" y="{cy:.2}" text-anchor="middle" transform="rotate(-90 {lx:.2} {cy:.2})">{}</text>"#,
        escape(label)
    )
    .unwrap();
}

/// Scatter of accuracy (x) against EOD (y), one marker per labelled point.
pub fn scatter_svg(title: &str, points: &[(String, f64, f64)]) -> Result<String, HarnessError> {
    if points.is_empty() {
        return Err(HarnessError::Data("nothing to plot: no method has both mean accuracy and mean EOD".into()));
    }
    let (x_lo, x_hi) = range(points.iter().map(|p| p.1));
    let (y_lo, y_hi) = range(points.iter().map(|p| p.2));
    let x = Axis { lo: x_lo, hi: x_hi, from: LEFT, to: W - RIGHT };
    let y = Axis { lo: y_lo, hi: y_hi, from: H - BOTTOM, to: TOP };
    let mut out = String::new();
    header(&mut out, title);
    x_axis(&mut out, &x, "accuracy");
    y_axis(&mut out, &y, "equalized odds difference", LEFT, "eod");
    for (label, acc, eod) in points {
        let (px, py) = (x.map(*acc), y.map(*eod));
        writeln!(
            out,
            r#"<circle class="marker" data-label="{l}" cx="{px:.2}" cy="{py:.2}" r="5" fill="steelblue"/>"#,
            l = escape(label)
        )
        .unwrap();
        writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, px + 8.0, py - 8.0, escape(label)).unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Accuracy and EOD against α as two polylines sharing the x axis, with
/// accuracy on the left axis and EOD on the right.
pub fn sweep_svg(title: &str, points: &[(f64, f64, f64)]) -> Result<String, HarnessError> {
    if points.is_empty() {
        return Err(HarnessError::Data("nothing to plot: the sweep has no defined points".into()));
    }
    let (x_lo, x_hi) = range(points.iter().map(|p| p.0));
    let x = Axis { lo: x_lo, hi: x_hi, from: LEFT, to: W - RIGHT };
    let (a_lo, a_hi) = range(points.iter().map(|p| p.1));
    let acc = Axis { lo: a_lo, hi: a_hi, from: H - BOTTOM, to: TOP };
    let (e_lo, e_hi) = range(points.iter().map(|p| p.2));
    let eod = Axis { lo: e_lo, hi: e_hi, from: H - BOTTOM, to: TOP };
    let mut out = String::new();
    header(&mut out, title);
    x_axis(&mut out, &x, "alpha");
    y_axis(&mut out, &acc, "accuracy", LEFT, "accuracy");
    y_axis(&mut out, &eod, "equalized odds difference", W - RIGHT, "eod");
    for (class, axis, color, pick) in [
        ("accuracy", &acc, "steelblue", 1usize),
        ("eod", &eod, "firebrick", 2usize),
    ] {
        let coords: Vec<String> = points
            .iter()
            .map(|p| {
                let v = if pick == 1 { p.1 } else { p.2 };
                format!("{:.2},{:.2}", x.map(p.0), axis.map(v))
            })
            .collect();
        writeln!(out, r#"<polyline class="{class}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, coords.join(" "))
            .unwrap();
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Scatter over the methods of an experiment.
pub fn experiment_chart(result: &ExperimentResult) -> Result<String, HarnessError> {
    let points: Vec<(String, f64, f64)> = result
        .methods
        .iter()
        .filter_map(|m| Some((m.method.name().to_string(), m.summary.accuracy.mean?, m.summary.eod.mean?)))
        .collect();
    scatter_svg(&format!("{}: accuracy vs EOD", result.dataset.name), &points)
}

/// Accuracy and EOD over the α values of a sweep.
pub fn sweep_chart(result: &SweepResult) -> Result<String, HarnessError> {
    let points: Vec<(f64, f64, f64)> = result
        .points
        .iter()
        .filter_map(|p| Some((p.alpha, p.fairttts.summary.accuracy.mean?, p.fairttts.summary.eod.mean?)))
        .collect();
    sweep_svg(&format!("{}: FairTTTS alpha sweep", result.dataset.name), &points)
}

/// `(x, y)` pairs of the first polyline with the given class.
pub fn polyline_points(svg: &str, class: &str) -> Option<Vec<(f64, f64)>> {
    let start = svg.find(&format!(r#"<polyline class="{class}" points=""#))?;
    let rest = &svg[start..];
    let open = rest.find("points=\"")? + "points=\"".len();
    let close = open + rest[open..].find('"')?;
    rest[open..close]
        .split_whitespace()
        .map(|pair| {
            let (a, b) = pair.split_once(',')?;
            Some((a.parse().ok()?, b.parse().ok()?))
        })
        .collect()
}
