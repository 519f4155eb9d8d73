//! CSV, JSON and SVG emitters.
//!
//! Numbers are written with 17 significant digits (`{:.16e}`), `.` as the
//! decimal separator and `\n` line endings, so files round-trip exactly and
//! identical runs produce identical bytes.

use crate::error::{Error, Result};
use crate::manifolds::ManifoldSpace;
use crate::solver::Trace;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)?)
}

/// Columns: `k, x0..x{n-1}, cost, grad_norm, dist_to_o, dist_to_final, step_used`.
pub fn write_trace_csv(path: &Path, trace: &Trace, space: &ManifoldSpace) -> Result<()> {
    let mut w = csv_writer(path)?;
    let n = trace.final_point().len();
    let mut header = vec!["k".to_string()];
    header.extend((0..n).map(|i| format!("x{i}")));
    header.extend(["cost", "grad_norm", "dist_to_o", "dist_to_final", "step_used"].map(String::from));
    w.write_record(&header)?;
    for (rec, d) in trace.iterates.iter().zip(trace.dist_to_final(space)) {
        let mut row = vec![rec.k.to_string()];
        row.extend(rec.point.as_slice().iter().map(|v| fmt_num(*v)));
        row.extend([rec.cost, rec.grad_norm, rec.dist_to_o, d, rec.step_used].map(fmt_num));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotSeries {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl PlotSeries {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let s = PlotSeries {
            label: label.into(),
            xs,
            ys,
        };
        if s.xs.len() != s.ys.len() {
            return Err(Error::Config(format!(
                "series {:?}: {} xs vs {} ys",
                s.label,
                s.xs.len(),
                s.ys.len()
            )));
        }
        if s.xs.iter().chain(&s.ys).any(|v| !v.is_finite()) {
            return Err(Error::Config(format!("series {:?} has non-finite values", s.label)));
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub y_log: bool,
    pub series: Vec<PlotSeries>,
}

/// Long-format CSV `series, x, y` with exactly the plotted values.
pub fn write_plot_csv(path: &Path, plot: &Plot) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["series", "x", "y"])?;
    for s in &plot.series {
        for (x, y) in s.xs.iter().zip(&s.ys) {
            w.write_record([s.label.clone(), fmt_num(*x), fmt_num(*y)])?;
        }
    }
    w.flush()?;
    Ok(())
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn nice_ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-300);
    let raw = span / n as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

/// Renders line series into a fixed 800x600 SVG. On a log axis, points with
/// `y <= 0` cannot be drawn and are left out of the polyline; the count is
/// recorded in a comment.
pub fn render_svg(plot: &Plot) -> String {
    let ty = |y: f64| if plot.y_log { y.log10() } else { y };
    let drawable = |y: f64| !plot.y_log || y > 0.0;
    let pts: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.xs.iter().zip(&s.ys))
        .filter(|(_, y)| drawable(**y))
        .map(|(x, y)| (*x, ty(*y)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), (x, y)| (a.min(*x), b.max(*x), c.min(*y), d.max(*y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-300 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-300 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(&plot.title)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for t in nice_ticks(x0, x1, 8) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.2}" y1="{}" x2="{x:.2}" y2="{}" stroke="#ccc"/><text x="{x:.2}" y="{}" text-anchor="middle">{}</text>"##,
            TOP,
            TOP + ph,
            TOP + ph + 18.0,
            format_tick(t)
        );
    }
    let y_ticks = if plot.y_log {
        (y0.floor() as i64..=y1.ceil() as i64)
            .map(|e| e as f64)
            .filter(|e| *e >= y0 - 1e-9 && *e <= y1 + 1e-9)
            .collect()
    } else {
        nice_ticks(y0, y1, 8)
    };
    for t in y_ticks {
        let y = sy(t);
        let label = if plot.y_log { format!("1e{}", t as i64) } else { format_tick(t) };
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ccc"/><text x="{}" y="{:.2}" text-anchor="end">{label}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 16.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    for (i, s) in plot.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = s
            .xs
            .iter()
            .zip(&s.ys)
            .filter(|(_, y)| drawable(**y))
            .map(|(x, y)| format!("{:.3},{:.3}", sx(*x), sy(ty(*y))))
            .collect();
        let dropped = s.xs.len() - coords.len();
        if dropped > 0 {
            let _ = writeln!(svg, "<!-- {}: {dropped} non-positive values not drawn -->", escape(&s.label));
        }
        let _ = writeln!(
            svg,
            r#"<polyline data-series="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(&s.label),
            coords.join(" ")
        );
        let ly = TOP + 16.0 + 18.0 * i as f64;
        let lx = LEFT + pw - 170.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn format_tick(t: f64) -> String {
    let s = format!("{t:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn write_svg(path: &Path, plot: &Plot) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, render_svg(plot))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plot(y_log: bool) -> Plot {
        Plot {
            title: "a < b".into(),
            x_label: "k".into(),
            y_label: "d".into(),
            y_log,
            series: vec![
                PlotSeries::new("one", vec![0.0, 1.0, 2.0], vec![1.0, 0.1, 0.0]).unwrap(),
                PlotSeries::new("two", vec![0.0, 1.0], vec![0.5, 0.25]).unwrap(),
            ],
        }
    }

    #[test]
    fn series_validation() {
        assert!(PlotSeries::new("x", vec![0.0], vec![]).is_err());
        assert!(PlotSeries::new("x", vec![0.0], vec![f64::NAN]).is_err());
    }

    #[test]
    fn svg_has_one_vertex_per_drawable_value() {
        let svg = render_svg(&plot(false));
        assert!(svg.contains(r#"viewBox="0 0 800 600""#));
        assert!(svg.contains("a &lt; b"));
        let counts: Vec<usize> = svg
            .lines()
            .filter(|l| l.starts_with("<polyline"))
            .map(|l| l.split("points=\"").nth(1).unwrap().split_whitespace().count())
            .collect();
        assert_eq!(counts, vec![3, 2]);
        let svg = render_svg(&plot(true));
        assert!(svg.contains("1 non-positive values not drawn"));
    }

    #[test]
    fn csv_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_plot_csv(&a, &plot(false)).unwrap();
        write_plot_csv(&b, &plot(false)).unwrap();
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(text, std::fs::read_to_string(&b).unwrap());
        assert!(!text.contains('\r'));
        assert!(text.contains("one,1.0000000000000000e0,1.0000000000000001e-1\n"));
        let back: f64 = "1.0000000000000001e-1".parse().unwrap();
        assert_eq!(back, 0.1);
    }
}
