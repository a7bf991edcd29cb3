//! SVG figures of a run, each written next to the data series it draws.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

use isotrack::scenario::Scenario;
use isotrack::sim::TrajectoryRow;

/// Upper limit on points per drawn series.
const MAX_POINTS: usize = 2000;
const SNAPSHOTS: usize = 5;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

struct Chart {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
    body: String,
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    if span.partial_cmp(&1e-12) != Some(std::cmp::Ordering::Greater) {
        let pad = lo.abs().max(1.0) * 0.05;
        (lo - pad, hi + pad)
    } else {
        (lo - 0.05 * span, hi + 0.05 * span)
    }
}

impl Chart {
    fn new(x: (f64, f64), y: (f64, f64), equal_aspect: bool) -> Self {
        let (x, y) = (padded(x.0, x.1), padded(y.0, y.1));
        let (w, h) = (WIDTH - 2.0 * MARGIN, HEIGHT - 2.0 * MARGIN);
        let (mut sx, mut sy) = (w / (x.1 - x.0), h / (y.1 - y.0));
        let (mut x0, mut y0) = (x.0, y.0);
        if equal_aspect {
            let s = sx.min(sy);
            x0 -= (w / s - (x.1 - x.0)) / 2.0;
            y0 -= (h / s - (y.1 - y.0)) / 2.0;
            sx = s;
            sy = s;
        }
        Self {
            x0,
            y0,
            sx,
            sy,
            body: String::new(),
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            MARGIN + (x - self.x0) * self.sx,
            HEIGHT - MARGIN - (y - self.y0) * self.sy,
        )
    }

    fn x_range(&self) -> (f64, f64) {
        (self.x0, self.x0 + (WIDTH - 2.0 * MARGIN) / self.sx)
    }

    fn y_range(&self) -> (f64, f64) {
        (self.y0, self.y0 + (HEIGHT - 2.0 * MARGIN) / self.sy)
    }

    fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, dash: bool) {
        let mut attr = String::new();
        for &(x, y) in pts {
            let (a, b) = self.px(x, y);
            let _ = write!(attr, "{a:.2},{b:.2} ");
        }
        let dash = if dash {
            r#" stroke-dasharray="6 4""#
        } else {
            ""
        };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.5"{dash}/>"#,
            attr.trim_end()
        );
    }

    /// Circle of data radius `r`; only round on equal-aspect charts.
    fn circle(&mut self, cx: f64, cy: f64, r: f64, stroke: &str) {
        let (a, b) = self.px(cx, cy);
        let _ = writeln!(
            self.body,
            r#"<ellipse cx="{a:.2}" cy="{b:.2}" rx="{:.2}" ry="{:.2}" fill="none" stroke="{stroke}" stroke-width="1" stroke-dasharray="4 3"/>"#,
            r * self.sx,
            r * self.sy
        );
    }

    fn marker(&mut self, x: f64, y: f64, fill: &str) {
        let (a, b) = self.px(x, y);
        let _ = writeln!(
            self.body,
            r#"<circle cx="{a:.2}" cy="{b:.2}" r="3" fill="{fill}"/>"#
        );
    }

    fn hline(&mut self, y: f64, stroke: &str, dash: bool) {
        let (lo, hi) = self.x_range();
        self.polyline(&[(lo, y), (hi, y)], stroke, dash);
    }

    fn render(self, title: &str, xlabel: &str, ylabel: &str) -> String {
        let (xl, xh) = self.x_range();
        let (yl, yh) = self.y_range();
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<clipPath id="plot"><rect x="{l}" y="{t}" width="{}" height="{}"/></clipPath>"#,
            r - l,
            b - t
        );
        let _ = writeln!(s, r#"<g clip-path="url(#plot)">"#);
        s.push_str(&self.body);
        let _ = writeln!(s, "</g>");
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            r - l,
            b - t
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{title}</text>"#,
            WIDTH / 2.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">{ylabel}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{l}" y="{}" text-anchor="start">{}</text>"#,
            b + 16.0,
            tick(xl)
        );
        let _ = writeln!(
            s,
            r#"<text x="{r}" y="{}" text-anchor="end">{}</text>"#,
            b + 16.0,
            tick(xh)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{b}" text-anchor="end">{}</text>"#,
            l - 4.0,
            tick(yl)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            l - 4.0,
            t + 10.0,
            tick(yh)
        );
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

fn write_series(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

fn write_svg(path: &Path, svg: String) -> Result<()> {
    std::fs::write(path, svg).with_context(|| format!("cannot write {}", path.display()))
}

/// Tracked isoline at evenly spaced times: `(t, center_x, center_y, radius)`.
fn isoline_snapshots(scenario: &Scenario, t_first: f64, t_last: f64) -> Vec<[f64; 4]> {
    let radius = scenario.tracked_radius();
    let n = if t_last > t_first { SNAPSHOTS } else { 1 };
    (0..n)
        .map(|i| {
            let t = if n == 1 {
                t_first
            } else {
                t_first + (t_last - t_first) * i as f64 / (n - 1) as f64
            };
            let c = scenario.radial.center.state(t).position;
            [t, c.x, c.y, radius]
        })
        .collect()
}

/// Writes the path, level and switching figures plus their data series into
/// `dir` and returns the files written.
pub fn emit_plots(rows: &[TrajectoryRow], scenario: &Scenario, dir: &Path) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        bail!("no trajectory rows to plot");
    }
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let stride = rows.len().div_ceil(MAX_POINTS);
    let mut drawn: Vec<&TrajectoryRow> = rows.iter().step_by(stride).collect();
    let last = rows.last().expect("non-empty");
    if !std::ptr::eq(*drawn.last().expect("non-empty"), last) {
        drawn.push(last);
    }
    let (t_first, t_last) = (rows[0].t, last.t);
    let dt = if rows.len() > 1 {
        rows[1].t - rows[0].t
    } else {
        0.0
    };
    let d0 = scenario.ctrl.d0;
    let band = scenario.level_band(dt);
    let mut written = Vec::new();

    // Path over isoline snapshots.
    let snaps = isoline_snapshots(scenario, t_first, t_last);
    let path_pts: Vec<(f64, f64)> = drawn.iter().map(|r| (r.x, r.y)).collect();
    let xs = path_pts
        .iter()
        .map(|p| p.0)
        .chain(snaps.iter().flat_map(|s| [s[1] - s[3], s[1] + s[3]]));
    let ys = path_pts
        .iter()
        .map(|p| p.1)
        .chain(snaps.iter().flat_map(|s| [s[2] - s[3], s[2] + s[3]]));
    let mut chart = Chart::new(bounds(xs), bounds(ys), true);
    for s in &snaps {
        chart.circle(s[1], s[2], s[3], "#4a7fb5");
        chart.marker(s[1], s[2], "#4a7fb5");
    }
    let centers: Vec<(f64, f64)> = snaps.iter().map(|s| (s[1], s[2])).collect();
    if centers.len() > 1 {
        chart.polyline(&centers, "#4a7fb5", true);
    }
    chart.polyline(&path_pts, "#c0392b", false);
    chart.marker(path_pts[0].0, path_pts[0].1, "#c0392b");
    let file = dir.join("trajectory.svg");
    write_svg(
        &file,
        chart.render(
            &format!("{}: path and tracked isoline", scenario.name),
            "x (m)",
            "y (m)",
        ),
    )?;
    written.push(file);
    let file = dir.join("plot_path.csv");
    write_series(
        &file,
        &["t", "x", "y"],
        drawn.iter().map(|r| vec![r.t, r.x, r.y]),
    )?;
    written.push(file);
    let file = dir.join("plot_isolines.csv");
    write_series(
        &file,
        &["t", "center_x", "center_y", "radius"],
        snaps.iter().map(|s| s.to_vec()),
    )?;
    written.push(file);

    // Reading against the desired level.
    let level: Vec<(f64, f64)> = drawn.iter().map(|r| (r.t, r.d)).collect();
    let ys = level.iter().map(|p| p.1).chain([d0 - band, d0 + band]);
    let mut chart = Chart::new((t_first, t_last), bounds(ys), false);
    chart.hline(d0 + band, "#7f8c8d", true);
    chart.hline(d0 - band, "#7f8c8d", true);
    chart.hline(d0, "#4a7fb5", false);
    chart.polyline(&level, "#c0392b", false);
    let file = dir.join("level.svg");
    write_svg(
        &file,
        chart.render("field reading and desired level", "t (s)", "d"),
    )?;
    written.push(file);
    let file = dir.join("plot_level.csv");
    write_series(
        &file,
        &["t", "d", "d0", "band_lo", "band_hi"],
        drawn
            .iter()
            .map(|r| vec![r.t, r.d, d0, d0 - band, d0 + band]),
    )?;
    written.push(file);

    // Switching signal.
    let switching: Vec<(f64, f64)> = drawn.iter().map(|r| (r.t, r.s)).collect();
    let mut chart = Chart::new(
        (t_first, t_last),
        bounds(switching.iter().map(|p| p.1).chain([0.0])),
        false,
    );
    chart.hline(0.0, "#7f8c8d", true);
    chart.polyline(&switching, "#c0392b", false);
    let file = dir.join("switching.svg");
    write_svg(&file, chart.render("switching signal", "t (s)", "s"))?;
    written.push(file);
    let file = dir.join("plot_switching.csv");
    write_series(
        &file,
        &["t", "s", "u"],
        drawn.iter().map(|r| vec![r.t, r.s, r.u]),
    )?;
    written.push(file);

    Ok(written)
}
