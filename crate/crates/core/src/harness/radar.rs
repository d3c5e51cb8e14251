//! Radar (spider) charts, one SVG per algorithm: an axis per metric, grouped
//! by category, and one polygon per epsilon with darker shades for stricter
//! budgets. All axes are rescaled so 1 is best and 0 is worst, which makes
//! area a rough eyeball proxy for utility.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::harness::report::{metric_rows, UtilityReport};
use crate::metrics::{MetricCategory, MetricResult, Orientation};

/// |log pMSE-ratio| beyond this renders as zero utility. Observed ratios on
/// heavily degraded synthesis stay below e^12, so the scale keeps resolution
/// where values actually land.
pub const RADAR_LOG_CAP: f64 = 12.0;

pub const RADAR_MIN_AXES: usize = 3;

/// Maps a metric onto its radar axis in [0, 1], 1 best. Raw pMSE and the
/// unlogged ratio return None: the log-ratio axis already carries that
/// signal at a readable scale.
pub fn axis_value(m: &MetricResult) -> Option<f64> {
    if let Some(rest) = m.name.strip_prefix("log_pmse_ratio") {
        let _ = rest;
        // Ratios at or below 1 (log <= 0) mean the classifier does no better
        // than chance, which is the best case; only penalize the upside.
        return Some(1.0 - (m.value.max(0.0) / RADAR_LOG_CAP).clamp(0.0, 1.0));
    }
    if m.name.starts_with("pmse") {
        return None;
    }
    Some(match m.orientation {
        Orientation::LargerBetter => m.value.clamp(0.0, 1.0),
        Orientation::SmallerBetter => 1.0 - m.value.clamp(0.0, 1.0),
    })
}

#[derive(Clone, Debug)]
pub struct RadarChart {
    pub svg: String,
    /// Axes left out because some epsilon had no value for them.
    pub dropped: Vec<String>,
}

/// Builds the chart for one algorithm from a report. Fails with a
/// degenerate-input error when fewer than three complete axes remain;
/// callers fall back to tables in that case.
pub fn build_radar(report: &UtilityReport, algorithm: &str) -> Result<RadarChart> {
    let bundles = report.bundles_for(algorithm);
    if bundles.is_empty() {
        return Err(Error::invalid(format!("report has no results for \"{algorithm}\"")));
    }
    let rows = metric_rows(&bundles);
    let mut axes: Vec<(String, MetricCategory)> = Vec::new();
    let mut values: Vec<Vec<f64>> = vec![Vec::new(); bundles.len()];
    let mut dropped = Vec::new();
    for (name, category) in rows {
        let per_eps: Vec<Option<f64>> = bundles
            .iter()
            .map(|b| b.metrics.iter().find(|m| m.name == name).and_then(axis_value))
            .collect();
        if per_eps.iter().all(|v| v.is_some()) {
            axes.push((name, category));
            for (vs, v) in values.iter_mut().zip(&per_eps) {
                vs.push(v.unwrap());
            }
        } else if per_eps.iter().any(|v| v.is_some()) {
            // present for some epsilons only; a partial polygon would lie
            dropped.push(name);
        }
    }
    if axes.len() < RADAR_MIN_AXES {
        return Err(Error::degenerate(format!(
            "radar chart needs at least {RADAR_MIN_AXES} complete axes, have {}; \
             the tables carry the full results",
            axes.len()
        )));
    }
    let epsilons: Vec<f64> = bundles.iter().map(|b| b.epsilon).collect();
    let svg = render_svg(algorithm, &epsilons, &axes, &values, &dropped);
    Ok(RadarChart { svg, dropped })
}

fn shade(rank: usize, count: usize) -> String {
    // dark #a63603 for the lowest epsilon through light #fdd0a2
    let t = if count <= 1 { 0.0 } else { rank as f64 / (count - 1) as f64 };
    let lerp = |a: f64, b: f64| (a + t * (b - a)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(166.0, 253.0), lerp(54.0, 208.0), lerp(3.0, 162.0))
}

fn category_color(c: MetricCategory) -> &'static str {
    match c {
        MetricCategory::Marginal => "#205493",
        MetricCategory::Joint => "#8a3e00",
        MetricCategory::Correlation => "#3c7a2a",
    }
}

fn render_svg(
    algorithm: &str,
    epsilons: &[f64],
    axes: &[(String, MetricCategory)],
    values: &[Vec<f64>],
    dropped: &[String],
) -> String {
    let (w, h) = (760.0, 700.0);
    let (cx, cy, r_max) = (380.0, 370.0, 220.0);
    let a = axes.len();
    let angle = |i: usize| -PI / 2.0 + 2.0 * PI * i as f64 / a as f64;
    let point = |i: usize, r: f64| {
        let th = angle(i);
        (cx + r * r_max * th.cos(), cy + r * r_max * th.sin())
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        s,
        "  <text x=\"{cx:.1}\" y=\"24\" text-anchor=\"middle\" font-size=\"18\">{algorithm}</text>"
    );
    // legend: one swatch per epsilon, then the axis color key
    let mut lx = 20.0;
    for (i, eps) in epsilons.iter().enumerate() {
        let color = shade(i, epsilons.len());
        let _ = writeln!(s, "  <rect x=\"{lx:.1}\" y=\"40\" width=\"14\" height=\"14\" fill=\"{color}\"/>");
        let label = format!("eps={eps}");
        let _ = writeln!(
            s,
            "  <text x=\"{:.1}\" y=\"52\" font-size=\"13\">{label}</text>",
            lx + 18.0
        );
        lx += 24.0 + 9.0 * label.len() as f64;
    }
    let _ = writeln!(
        s,
        "  <text x=\"20\" y=\"74\" font-size=\"12\" fill=\"#555\">axis label colors: \
         <tspan fill=\"#205493\">marginal</tspan>, <tspan fill=\"#8a3e00\">joint</tspan>, \
         <tspan fill=\"#3c7a2a\">correlation</tspan>; rim = best</text>"
    );

    for ring in [0.25, 0.5, 0.75, 1.0] {
        let pts: Vec<String> = (0..a)
            .map(|i| {
                let (x, y) = point(i, ring);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            s,
            "  <polygon points=\"{}\" fill=\"none\" stroke=\"#cccccc\" stroke-width=\"1\"/>",
            pts.join(" ")
        );
    }
    for (i, (name, category)) in axes.iter().enumerate() {
        let (x1, y1) = (cx, cy);
        let (x2, y2) = point(i, 1.0);
        let _ = writeln!(
            s,
            "  <line x1=\"{x1:.1}\" y1=\"{y1:.1}\" x2=\"{x2:.1}\" y2=\"{y2:.1}\" stroke=\"#cccccc\" stroke-width=\"1\"/>"
        );
        let th = angle(i);
        let (lx, ly) = (cx + 1.07 * r_max * th.cos(), cy + 1.07 * r_max * th.sin());
        let anchor = if th.cos() > 0.15 {
            "start"
        } else if th.cos() < -0.15 {
            "end"
        } else {
            "middle"
        };
        let dy = if th.sin() > 0.15 { "0.8em" } else if th.sin() < -0.15 { "-0.2em" } else { "0.3em" };
        let _ = writeln!(
            s,
            "  <text x=\"{lx:.1}\" y=\"{ly:.1}\" text-anchor=\"{anchor}\" dy=\"{dy}\" font-size=\"12\" fill=\"{}\">{name}</text>",
            category_color(*category)
        );
    }
    // highest epsilon (lightest, usually largest) first, so strict budgets
    // stay visible on top
    for i in (0..epsilons.len()).rev() {
        let color = shade(i, epsilons.len());
        let pts: Vec<String> = values[i]
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let (x, y) = point(j, v.clamp(0.0, 1.0));
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            s,
            "  <polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"{color}\" stroke-width=\"2\"/>",
            pts.join(" ")
        );
    }
    if !dropped.is_empty() {
        let _ = writeln!(
            s,
            "  <text x=\"20\" y=\"{:.1}\" font-size=\"12\" fill=\"#555\">axes omitted (value missing for some eps): {}</text>",
            h - 14.0,
            dropped.join(", ")
        );
    }
    s.push_str("</svg>\n");
    s
}
