//! Deterministic SVG line plots of trace signals.

use std::fmt::Write;

use duality_core::sim::SimTrace;

const WIDTH: f64 = 960.0;
const HEIGHT: f64 = 540.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 64.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
/// Above this many samples a series is reduced to per-column extrema.
const MAX_POINTS: usize = 4000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PlotError {
    #[error("no signals selected for plotting")]
    EmptySelection,
    #[error("series `{0}` has no samples")]
    EmptySeries(String),
    #[error("series `{0}` has mismatched time and value lengths")]
    Ragged(String),
    #[error(transparent)]
    Trace(#[from] duality_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl Series {
    /// `signal / scale - offset` against trace time.
    pub fn from_trace(
        trace: &SimTrace,
        signal: &str,
        label: impl Into<String>,
        scale: f64,
        offset: f64,
    ) -> Result<Self, PlotError> {
        let raw = trace.signal(signal)?;
        Ok(Self {
            label: label.into(),
            t: (0..raw.len()).map(|i| trace.time(i)).collect(),
            y: raw.iter().map(|v| v / scale - offset).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub y_label: String,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Tick spacing from {1, 2, 5}·10^k giving at most about `target` intervals.
fn tick_step(span: f64, target: f64) -> f64 {
    let raw = span / target;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let nice = if norm <= 1.0 {
        1.0
    } else if norm <= 2.0 {
        2.0
    } else if norm <= 5.0 {
        5.0
    } else {
        10.0
    };
    nice * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo, 6.0);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn fmt_tick(v: f64, step: f64) -> String {
    let digits = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{:.*}", digits, v);
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Keeps the first and last sample and, per output column, the extreme
/// samples in their original order.
fn reduce(t: &[f64], y: &[f64]) -> Vec<(f64, f64)> {
    if t.len() <= MAX_POINTS {
        return t.iter().copied().zip(y.iter().copied()).collect();
    }
    let buckets = MAX_POINTS / 2;
    let n = t.len();
    let mut out = Vec::with_capacity(MAX_POINTS + 2);
    for b in 0..buckets {
        let (s, e) = (b * n / buckets, ((b + 1) * n / buckets).max(b * n / buckets + 1));
        let (mut imin, mut imax) = (s, s);
        for i in s..e {
            if y[i] < y[imin] {
                imin = i;
            }
            if y[i] > y[imax] {
                imax = i;
            }
        }
        let (i0, i1) = if imin <= imax { (imin, imax) } else { (imax, imin) };
        out.push((t[i0], y[i0]));
        if i1 != i0 {
            out.push((t[i1], y[i1]));
        }
    }
    out
}

pub fn emit_plot(series: &[Series], spec: &PlotSpec) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::EmptySelection);
    }
    for s in series {
        if s.t.is_empty() {
            return Err(PlotError::EmptySeries(s.label.clone()));
        }
        if s.t.len() != s.y.len() {
            return Err(PlotError::Ragged(s.label.clone()));
        }
    }
    let fold = |f: fn(&Series) -> (f64, f64)| {
        series
            .iter()
            .map(f)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, b| (a.0.min(b.0), a.1.max(b.1)))
    };
    let (mut x0, mut x1) = fold(|s| (s.t[0], s.t[s.t.len() - 1]));
    let (mut y0, mut y1) = fold(|s| {
        s.y.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)))
    });
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 <= 1e-12 * y0.abs().max(y1.abs()).max(1.0) {
        let pad = (0.05 * y0.abs()).max(1e-3);
        y0 -= pad;
        y1 += pad;
    } else {
        let pad = 0.05 * (y1 - y0);
        y0 -= pad;
        y1 += pad;
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let py = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut svg = String::new();
    let w = &mut svg;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(w, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    writeln!(
        w,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        LEFT + pw / 2.0,
        escape(&spec.title)
    )
    .unwrap();

    let xstep = tick_step(x1 - x0, 8.0);
    for v in ticks(x0, x1) {
        let x = px(v);
        writeln!(
            w,
            r##"<line x1="{x:.2}" y1="{TOP:.2}" x2="{x:.2}" y2="{:.2}" stroke="#e0e0e0"/>"##,
            TOP + ph
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + ph + 18.0,
            fmt_tick(v, xstep)
        )
        .unwrap();
    }
    let ystep = tick_step(y1 - y0, 6.0);
    for v in ticks(y0, y1) {
        let y = py(v);
        writeln!(
            w,
            r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#e0e0e0"/>"##,
            LEFT + pw
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 6.0,
            y + 4.0,
            fmt_tick(v, ystep)
        )
        .unwrap();
    }
    writeln!(
        w,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{pw:.2}" height="{ph:.2}" fill="none" stroke="black"/>"#
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time (s)</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 18.0
    )
    .unwrap();
    writeln!(
        w,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&spec.y_label)
    )
    .unwrap();

    for (k, s) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = reduce(&s.t, &s.y)
            .into_iter()
            .map(|(t, y)| format!("{:.2},{:.2}", px(t), py(y)))
            .collect();
        let dash = if k % 2 == 1 { r#" stroke-dasharray="6 4""# } else { "" };
        writeln!(
            w,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{}"/>"#,
            pts.join(" ")
        )
        .unwrap();
        let ly = TOP + 16.0 + 18.0 * k as f64;
        let lx = LEFT + pw - 180.0;
        writeln!(
            w,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"{dash}/>"#,
            lx + 24.0
        )
        .unwrap();
        writeln!(
            w,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        )
        .unwrap();
    }
    writeln!(w, "</svg>").unwrap();
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> PlotSpec {
        PlotSpec {
            title: "t".into(),
            y_label: "y".into(),
        }
    }

    #[test]
    fn empty_selection_is_error() {
        assert_eq!(emit_plot(&[], &spec()), Err(PlotError::EmptySelection));
        let empty = Series {
            label: "x".into(),
            t: vec![],
            y: vec![],
        };
        assert!(matches!(emit_plot(&[empty], &spec()), Err(PlotError::EmptySeries(_))));
    }

    #[test]
    fn constant_signal_is_horizontal_and_spans_plot() {
        let s = Series {
            label: "c".into(),
            t: vec![0.0, 0.5, 1.0],
            y: vec![2.0; 3],
        };
        let svg = emit_plot(&[s], &spec()).unwrap();
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        let coords: Vec<(f64, f64)> = pts
            .split(' ')
            .map(|p| {
                let (x, y) = p.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert!(coords.iter().all(|c| c.1 == coords[0].1));
        assert_eq!(coords[0].0, LEFT);
        assert_eq!(coords[2].0, WIDTH - RIGHT);
        assert!(svg.contains(r#"width="960" height="540""#));
    }

    #[test]
    fn byte_stable() {
        let s = Series {
            label: "a<b".into(),
            t: (0..10_000).map(|i| i as f64 * 1e-3).collect(),
            y: (0..10_000).map(|i| (i as f64 * 0.01).sin()).collect(),
        };
        let a = emit_plot(std::slice::from_ref(&s), &spec()).unwrap();
        let b = emit_plot(&[s], &spec()).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("a&lt;b"));
    }

    #[test]
    fn nice_ticks() {
        assert_eq!(tick_step(20.0, 8.0), 5.0);
        assert_eq!(tick_step(0.7, 6.0), 0.2);
        assert_eq!(fmt_tick(-0.0, 0.2), "0.0");
    }
}
