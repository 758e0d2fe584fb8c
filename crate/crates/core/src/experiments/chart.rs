//! Plain SVG line chart of per-interaction mean UG.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::report::{io_err, ReportError};
use super::runner::GroupSeries;
use crate::population::{UG_MAX, UG_MIN};
use crate::Group;

pub const DEFAULT_SMOOTHING: usize = 10;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn color(g: Group) -> &'static str {
    match g {
        Group::Fire => "#d62728",
        Group::Ca => "#1f77b4",
        Group::Adaptable => "#2ca02c",
    }
}

/// Trailing moving average; the first points average what is available.
pub fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(values.len());
    let mut sum = 0.0;
    for i in 0..values.len() {
        sum += values[i];
        if i >= w {
            sum -= values[i - w];
        }
        out.push(sum / (i + 1).min(w) as f64);
    }
    out
}

pub fn y_coord(ug: f64) -> f64 {
    let plot_h = HEIGHT - TOP - BOTTOM;
    TOP + (UG_MAX - ug.clamp(UG_MIN, UG_MAX)) / (UG_MAX - UG_MIN) * plot_h
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

pub fn render_svg(series: &[GroupSeries], smoothing: usize, title: &str) -> String {
    let plot_w = WIDTH - LEFT - RIGHT;
    let max_x = series
        .iter()
        .flat_map(|s| s.points.last())
        .map(|p| p.interaction_index)
        .max()
        .unwrap_or(1)
        .max(2);
    let x_coord = |i: u64| LEFT + (i - 1) as f64 / (max_x - 1) as f64 * plot_w;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="18" text-anchor="middle" font-size="14">{}</text>"#, fmt(LEFT + plot_w / 2.0), escape(title));

    // axes and gridlines every 5 UG
    let mut ug = UG_MIN;
    while ug <= UG_MAX {
        let y = fmt(y_coord(ug));
        let stroke = if ug == 0.0 { "#888" } else { "#ddd" };
        let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{y}" x2="{}" y2="{y}" stroke="{stroke}"/>"#, fmt(LEFT + plot_w));
        let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{ug}</text>"#, fmt(LEFT - 6.0));
        ug += 5.0;
    }
    let bottom = fmt(HEIGHT - BOTTOM);
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{}" x2="{LEFT}" y2="{bottom}" stroke="black"/>"#, fmt(TOP));
    let _ = writeln!(s, r#"<line x1="{LEFT}" y1="{bottom}" x2="{}" y2="{bottom}" stroke="black"/>"#, fmt(LEFT + plot_w));
    for k in 0..=4u64 {
        let i = 1 + (max_x - 1) * k / 4;
        let x = fmt(x_coord(i));
        let _ = writeln!(s, r#"<text x="{x}" y="{}" text-anchor="middle">{i}</text>"#, fmt(HEIGHT - BOTTOM + 16.0));
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">interaction</text>"#, fmt(LEFT + plot_w / 2.0), fmt(HEIGHT - 12.0));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">mean UG</text>"#,
        fmt(TOP + (HEIGHT - TOP - BOTTOM) / 2.0)
    );

    for (k, gs) in series.iter().enumerate() {
        let values: Vec<f64> = gs.points.iter().map(|p| p.mean_ug).collect();
        let smooth = moving_average(&values, smoothing);
        let pts: Vec<String> = gs
            .points
            .iter()
            .zip(&smooth)
            .map(|(p, v)| format!("{},{}", fmt(x_coord(p.interaction_index)), fmt(y_coord(*v))))
            .collect();
        let c = color(gs.group);
        let _ = writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 15.0;
        let _ = writeln!(s, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{c}" stroke-width="3"/>"#, fmt(lx), fmt(ly), fmt(lx + 20.0), fmt(ly));
        let _ = writeln!(s, r#"<text x="{}" y="{}" dominant-baseline="middle">{}</text>"#, fmt(lx + 26.0), fmt(ly), gs.group.name());
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_chart(series: &[GroupSeries], smoothing: usize, title: &str, path: &Path) -> Result<(), ReportError> {
    fs::write(path, render_svg(series, smoothing, title)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::runner::SeriesPoint;

    fn flat(group: Group, v: f64, n: u64) -> GroupSeries {
        GroupSeries {
            group,
            points: (1..=n).map(|i| SeriesPoint { interaction_index: i, mean_ug: v, n: 1 }).collect(),
        }
    }

    #[test]
    fn flat_series_is_horizontal() {
        let svg = render_svg(&[flat(Group::Fire, 5.0, 20)], 10, "t");
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let y = fmt(y_coord(5.0));
        let pts = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>");
        assert!(pts.split(' ').all(|p| p.ends_with(&format!(",{y}"))));
        assert_eq!(y_coord(10.0), TOP);
        assert_eq!(y_coord(-10.0), HEIGHT - BOTTOM);
    }

    #[test]
    fn one_polyline_per_group() {
        let series = [flat(Group::Fire, 1.0, 5), flat(Group::Ca, 2.0, 5), flat(Group::Adaptable, 3.0, 5)];
        let svg = render_svg(&series, 3, "t");
        assert_eq!(svg.matches("<polyline").count(), 3);
        for g in Group::ALL {
            assert!(svg.contains(&format!(">{}</text>", g.name())));
        }
        assert_eq!(svg, render_svg(&series, 3, "t"));
    }

    #[test]
    fn smoothing() {
        assert_eq!(moving_average(&[1.0, 3.0, 5.0, 7.0], 2), [1.0, 2.0, 4.0, 6.0]);
        assert_eq!(moving_average(&[1.0, 3.0], 1), [1.0, 3.0]);
    }
}
