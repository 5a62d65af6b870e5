//! Hand-written SVG figures: walk paths with their hull, investor paths with
//! the hull chains, and log-log scatters with a fitted line.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 60.0;

/// Maps data coordinates onto the drawing area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Frame {
    /// Bounding box of `points` padded by 5%, or the unit square when empty.
    pub fn around(points: impl IntoIterator<Item = (f64, f64)>, equal_aspect: bool) -> Frame {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for (x, y) in points {
            if x.is_finite() && y.is_finite() {
                xmin = xmin.min(x);
                xmax = xmax.max(x);
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
        }
        if xmin > xmax {
            return Frame {
                xmin: 0.0,
                xmax: 1.0,
                ymin: 0.0,
                ymax: 1.0,
            };
        }
        let pad = |lo: f64, hi: f64| {
            let span = hi - lo;
            let p = if span > 0.0 {
                0.05 * span
            } else {
                0.5_f64.max(lo.abs() * 0.05)
            };
            (lo - p, hi + p)
        };
        let (mut xmin, mut xmax) = pad(xmin, xmax);
        let (mut ymin, mut ymax) = pad(ymin, ymax);
        if equal_aspect {
            let sx = (xmax - xmin) / (WIDTH - 2.0 * MARGIN);
            let sy = (ymax - ymin) / (HEIGHT - 2.0 * MARGIN);
            if sx > sy {
                let grow = (sx * (HEIGHT - 2.0 * MARGIN) - (ymax - ymin)) / 2.0;
                ymin -= grow;
                ymax += grow;
            } else {
                let grow = (sy * (WIDTH - 2.0 * MARGIN) - (xmax - xmin)) / 2.0;
                xmin -= grow;
                xmax += grow;
            }
        }
        Frame {
            xmin,
            xmax,
            ymin,
            ymax,
        }
    }

    pub fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let u = MARGIN + (x - self.xmin) / (self.xmax - self.xmin) * (WIDTH - 2.0 * MARGIN);
        let v =
            HEIGHT - MARGIN - (y - self.ymin) / (self.ymax - self.ymin) * (HEIGHT - 2.0 * MARGIN);
        (u, v)
    }

    /// Inverse of [`Frame::px`].
    pub fn data(&self, u: f64, v: f64) -> (f64, f64) {
        let x = self.xmin + (u - MARGIN) / (WIDTH - 2.0 * MARGIN) * (self.xmax - self.xmin);
        let y =
            self.ymin + (HEIGHT - MARGIN - v) / (HEIGHT - 2.0 * MARGIN) * (self.ymax - self.ymin);
        (x, y)
    }
}

/// Round tick positions covering `[lo, hi]`, about `target` of them.
pub fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span > 0.0) || !span.is_finite() {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn tick_label(v: f64, step: f64) -> String {
    if v != 0.0 && !(1e-4..1e5).contains(&step) {
        let s = format!("{v:.1e}");
        return s.replace(".0e", "e");
    }
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_owned()
    } else {
        s
    }
}

/// Ticks for an axis holding `log10` values: whole decades when at least
/// two fit, otherwise ordinary ticks.
fn log_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let decades: Vec<f64> = (lo.ceil() as i64..=hi.floor() as i64)
        .map(|k| k as f64)
        .collect();
    if decades.len() >= 2 {
        decades
    } else {
        ticks(lo, hi, 4)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub struct Figure {
    frame: Frame,
    log_axes: bool,
    body: String,
}

impl Figure {
    pub fn new(frame: Frame, log_axes: bool) -> Self {
        Figure {
            frame,
            log_axes,
            body: String::new(),
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    fn points_attr(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::with_capacity(pts.len() * 16);
        for &(x, y) in pts {
            let (u, v) = self.frame.px(x, y);
            let _ = write!(s, "{u:.2},{v:.2} ");
        }
        s.trim_end().to_owned()
    }

    pub fn polyline(&mut self, class: &str, pts: &[(f64, f64)], stroke: &str, width: f64) {
        if pts.is_empty() {
            return;
        }
        let _ = writeln!(
            self.body,
            r#"<polyline class="{class}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-linejoin="round" points="{}"/>"#,
            self.points_attr(pts)
        );
    }

    pub fn polygon(&mut self, class: &str, pts: &[(f64, f64)], stroke: &str, fill: &str) {
        if pts.is_empty() {
            return;
        }
        let _ = writeln!(
            self.body,
            r#"<polygon class="{class}" fill="{fill}" fill-opacity="0.15" stroke="{stroke}" stroke-width="1.5" points="{}"/>"#,
            self.points_attr(pts)
        );
    }

    pub fn dots(&mut self, class: &str, pts: &[(f64, f64)], r: f64, fill: &str) {
        let _ = writeln!(self.body, r#"<g class="{class}" fill="{fill}">"#);
        for &(x, y) in pts {
            let (u, v) = self.frame.px(x, y);
            let _ = writeln!(self.body, r#"<circle cx="{u:.2}" cy="{v:.2}" r="{r}"/>"#);
        }
        self.body.push_str("</g>\n");
    }

    pub fn line(&mut self, class: &str, a: (f64, f64), b: (f64, f64), stroke: &str, extra: &str) {
        let (x1, y1) = self.frame.px(a.0, a.1);
        let (x2, y2) = self.frame.px(b.0, b.1);
        let _ = writeln!(
            self.body,
            r#"<line class="{class}" x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="1.5" {extra}/>"#
        );
    }

    pub fn legend(&mut self, entries: &[(&str, &str)]) {
        let _ = writeln!(
            self.body,
            r#"<rect class="legend" x="{}" y="{}" width="170" height="{}" fill="white" fill-opacity="0.85"/>"#,
            MARGIN + 4.0,
            MARGIN + 2.0,
            16.0 * entries.len() as f64 + 4.0
        );
        for (i, (label, color)) in entries.iter().enumerate() {
            let y = MARGIN + 14.0 + 16.0 * i as f64;
            let x = MARGIN + 10.0;
            let _ = writeln!(
                self.body,
                r#"<rect x="{x}" y="{}" width="10" height="10" fill="{color}"/><text x="{}" y="{}" font-size="12">{}</text>"#,
                y - 9.0,
                x + 14.0,
                y,
                escape(label)
            );
        }
    }

    fn axes(&self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let f = self.frame;
        let mut s = String::new();
        let (left, bottom) = (MARGIN, HEIGHT - MARGIN);
        let (right, top) = (WIDTH - MARGIN, MARGIN);
        let _ = writeln!(
            s,
            r#"<rect class="axes" x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            right - left,
            bottom - top
        );
        let label = |v: f64, step: f64| {
            if self.log_axes {
                if (v - v.round()).abs() < 1e-9 {
                    return format!("1e{}", v.round() as i64);
                }
                return format!("{:.3}", 10f64.powf(v));
            }
            tick_label(v, step)
        };
        let axis_ticks = |lo: f64, hi: f64| {
            if self.log_axes {
                log_ticks(lo, hi)
            } else {
                ticks(lo, hi, 6)
            }
        };
        let xt = axis_ticks(f.xmin, f.xmax);
        let xstep = if xt.len() > 1 { xt[1] - xt[0] } else { 1.0 };
        for &t in &xt {
            let (u, _) = f.px(t, f.ymin);
            let _ = writeln!(
                s,
                r#"<line class="tick" x1="{u:.2}" y1="{bottom}" x2="{u:.2}" y2="{}" stroke="black"/><text x="{u:.2}" y="{}" font-size="11" text-anchor="middle">{}</text>"#,
                bottom + 5.0,
                bottom + 18.0,
                label(t, xstep)
            );
        }
        let yt = axis_ticks(f.ymin, f.ymax);
        let ystep = if yt.len() > 1 { yt[1] - yt[0] } else { 1.0 };
        for &t in &yt {
            let (_, v) = f.px(f.xmin, t);
            let _ = writeln!(
                s,
                r#"<line class="tick" x1="{}" y1="{v:.2}" x2="{left}" y2="{v:.2}" stroke="black"/><text x="{}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
                left - 5.0,
                left - 8.0,
                v + 4.0,
                label(t, ystep)
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            top - 20.0,
            escape(title)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 15.0,
            escape(xlabel)
        );
        let _ = writeln!(
            s,
            r#"<text x="15" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(ylabel)
        );
        s
    }

    /// Complete document. `metadata` is embedded verbatim (escaped).
    pub fn render(&self, title: &str, xlabel: &str, ylabel: &str, metadata: &str) -> String {
        let f = self.frame;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(s, "<metadata>{}</metadata>", escape(metadata));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<g id="frame" data-xmin="{:?}" data-xmax="{:?}" data-ymin="{:?}" data-ymax="{:?}" data-log="{}">"#,
            f.xmin, f.xmax, f.ymin, f.ymax, self.log_axes
        );
        s.push_str(&self.axes(title, xlabel, ylabel));
        let _ = writeln!(
            s,
            r#"<clipPath id="plot-area"><rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}"/></clipPath>"#,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        s.push_str(r#"<g clip-path="url(#plot-area)">"#);
        s.push('\n');
        s.push_str(&self.body);
        s.push_str("</g>\n</g>\n</svg>\n");
        s
    }
}
