use std::path::Path;

use anyhow::{anyhow, Result};
use debias_core::report::GroupSummary;
use plotters::prelude::*;

fn plot_err<E: std::fmt::Display>(e: E) -> anyhow::Error {
    anyhow!(debias_core::Error::Invalid(format!("plot: {e}")))
}

/// Bar chart of mean P_B per item popularity group.
pub fn group_bars(path: &Path, rows: &[GroupSummary]) -> Result<()> {
    let root = SVGBackend::new(path, (640, 420)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let n = rows.len() as u32;
    let mut chart = ChartBuilder::on(&root)
        .caption("Mean P_B by item popularity group", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(48)
        .build_cartesian_2d((0..n).into_segmented(), 0.0..1.0f64)
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc("popularity group (least to most popular)")
        .y_desc("mean P_B")
        .draw()
        .map_err(plot_err)?;
    chart
        .draw_series(rows.iter().filter_map(|r| {
            let m = r.mean?;
            let g = r.group as u32;
            Some(Rectangle::new(
                [(SegmentValue::Exact(g), 0.0), (SegmentValue::Exact(g + 1), m)],
                BLUE.mix(0.6).filled(),
            ))
        }))
        .map_err(plot_err)?;
    chart
        .draw_series(LineSeries::new([(SegmentValue::Exact(0), 0.5), (SegmentValue::Exact(n), 0.5)], BLACK.mix(0.5)))
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Validation NDCG against prediction bias, one point per round.
pub fn trajectory(path: &Path, points: &[(f64, f64)], attribute: &str, k: usize) -> Result<()> {
    let bounds = |f: fn(&(f64, f64)) -> f64| {
        let (lo, hi) = points.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        let pad = ((hi - lo) * 0.1).max(1e-3);
        (lo - pad)..(hi + pad)
    };
    let root = SVGBackend::new(path, (640, 420)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut chart = ChartBuilder::on(&root)
        .caption("Training trajectory", ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(36)
        .y_label_area_size(56)
        .build_cartesian_2d(bounds(|p| p.0), bounds(|p| p.1))
        .map_err(plot_err)?;
    chart
        .configure_mesh()
        .x_desc(format!("prediction bias ({attribute})"))
        .y_desc(format!("validation NDCG@{k}"))
        .draw()
        .map_err(plot_err)?;
    chart.draw_series(LineSeries::new(points.iter().copied(), RED.mix(0.5))).map_err(plot_err)?;
    chart
        .draw_series(points.iter().map(|&p| Circle::new(p, 3, RED.filled())))
        .map_err(plot_err)?;
    root.present().map_err(plot_err)?;
    Ok(())
}
