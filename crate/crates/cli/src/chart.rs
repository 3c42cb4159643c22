//! Dependency-free SVG line charts.
//!
//! Output is a pure function of the [`ChartSpec`]: fixed 800×500 viewport,
//! fixed palette order, fixed number formatting. Each polyline carries the
//! raw data in `data-years` / `data-values` attributes formatted exactly as
//! the CSV writers format them, so charts can be checked against the CSVs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use placeval::panel::format_value;

use crate::error::CliError;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 500.0;
pub const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;
const Y_TICKS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: BTreeMap<i32, f64>,
}

impl Series {
    pub fn new(label: impl Into<String>, years: &[i32], values: &[f64]) -> Self {
        Self {
            label: label.into(),
            points: years.iter().copied().zip(values.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartSpec {
    pub title: String,
    pub series: Vec<Series>,
    pub vertical_marker_year: Option<i32>,
    pub x_label: String,
    pub y_label: String,
}

impl ChartSpec {
    /// Years present in every series.
    pub fn common_years(&self) -> Vec<i32> {
        let mut iter = self.series.iter();
        let Some(first) = iter.next() else {
            return Vec::new();
        };
        let mut common: BTreeSet<i32> = first.points.keys().copied().collect();
        for s in iter {
            common.retain(|y| s.points.contains_key(y));
        }
        common.into_iter().collect()
    }
}

pub fn emit_svg_chart(spec: &ChartSpec, path: impl AsRef<Path>) -> Result<(), CliError> {
    let svg = render_svg(spec)?;
    std::fs::write(path.as_ref(), svg).map_err(|e| CliError::io(path.as_ref(), e))
}

pub fn render_svg(spec: &ChartSpec) -> Result<String, CliError> {
    if spec.series.is_empty() {
        return Err(CliError::Chart("chart has no series".into()));
    }
    if spec.series.len() > PALETTE.len() {
        return Err(CliError::Chart(format!(
            "at most {} series supported",
            PALETTE.len()
        )));
    }
    let years = spec.common_years();
    if years.is_empty() {
        return Err(CliError::Chart("series share no years".into()));
    }
    let (x0, x1) = (years[0], *years.last().unwrap());
    if let Some(m) = spec.vertical_marker_year {
        if m < x0 || m > x1 {
            return Err(CliError::Chart(format!(
                "marker year {m} outside {x0}..={x1}"
            )));
        }
    }

    let finite = spec
        .series
        .iter()
        .flat_map(|s| years.iter().map(move |y| s.points[y]))
        .filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        (lo.min(v), hi.max(v))
    });
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        let pad = if lo.abs() > 1e-12 {
            lo.abs() * 0.1
        } else {
            1.0
        };
        lo -= pad;
        hi += pad;
    } else {
        let pad = (hi - lo) * 0.05;
        lo -= pad;
        hi += pad;
    }

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let span_x = f64::from((x1 - x0).max(1));
    let sx = |y: i32| {
        if x0 == x1 {
            LEFT + plot_w / 2.0
        } else {
            LEFT + f64::from(y - x0) / span_x * plot_w
        }
    };
    let sy = |v: f64| TOP + (hi - v) / (hi - lo) * plot_h;

    let mut out = String::new();
    let w = &mut out;
    w.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        w,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    let _ = writeln!(
        w,
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>"
    );
    let _ = writeln!(
        w,
        "<text x=\"{:.2}\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">{}</text>",
        LEFT + plot_w / 2.0,
        escape(&spec.title)
    );

    // axes
    let _ = writeln!(
        w,
        "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\"><line x1=\"{LEFT:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/><line x1=\"{LEFT:.2}\" y1=\"{TOP:.2}\" x2=\"{LEFT:.2}\" y2=\"{:.2}\"/></g>",
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h,
        TOP + plot_h
    );
    let step = (years.len() / 12).max(1);
    w.push_str("<g class=\"x-ticks\" text-anchor=\"middle\">\n");
    for y in years.iter().step_by(step) {
        let _ = writeln!(
            w,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/><text x=\"{0:.2}\" y=\"{3:.2}\">{4}</text>",
            sx(*y),
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 20.0,
            y
        );
    }
    w.push_str("</g>\n<g class=\"y-ticks\" text-anchor=\"end\">\n");
    for i in 0..=Y_TICKS {
        let v = lo + (hi - lo) * i as f64 / Y_TICKS as f64;
        let _ = writeln!(
            w,
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"#dddddd\"/><text x=\"{3:.2}\" y=\"{4:.2}\">{5:.2}</text>",
            LEFT,
            sy(v),
            LEFT + plot_w,
            LEFT - 6.0,
            sy(v) + 4.0,
            v
        );
    }
    w.push_str("</g>\n");
    let _ = writeln!(
        w,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(&spec.x_label)
    );
    let _ = writeln!(
        w,
        "<text x=\"18\" y=\"{0:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.2})\">{1}</text>",
        TOP + plot_h / 2.0,
        escape(&spec.y_label)
    );

    if let Some(m) = spec.vertical_marker_year {
        let _ = writeln!(
            w,
            "<line class=\"marker\" x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\" data-year=\"{3}\"/>",
            sx(m),
            TOP,
            TOP + plot_h,
            m
        );
    }

    for (idx, s) in spec.series.iter().enumerate() {
        let colour = PALETTE[idx];
        let coords: Vec<String> = years
            .iter()
            .filter(|y| s.points[y].is_finite())
            .map(|y| format!("{:.2},{:.2}", sx(*y), sy(s.points[y])))
            .collect();
        let data_years: Vec<String> = years.iter().map(i32::to_string).collect();
        let data_values: Vec<String> = years.iter().map(|y| format_value(s.points[y])).collect();
        let _ = writeln!(
            w,
            "<polyline class=\"series\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\" data-label=\"{}\" data-years=\"{}\" data-values=\"{}\" points=\"{}\"/>",
            escape(&s.label),
            data_years.join(" "),
            data_values.join(" "),
            coords.join(" ")
        );
    }

    w.push_str("<g class=\"legend\">\n");
    for (idx, s) in spec.series.iter().enumerate() {
        let y = TOP + 10.0 + idx as f64 * 20.0;
        let x = LEFT + plot_w + 15.0;
        let _ = writeln!(
            w,
            "<line x1=\"{x:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{}\" stroke-width=\"2\"/><text x=\"{:.2}\" y=\"{:.2}\">{}</text>",
            x + 20.0,
            PALETTE[idx],
            x + 26.0,
            y + 4.0,
            escape(&s.label)
        );
    }
    w.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}
