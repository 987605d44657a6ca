use std::path::Path;

use anyhow::{anyhow, Result};
use fhsmdp_core::analysis::option_regret_bound;
use plotters::prelude::*;

use crate::experiment::Dims;

pub struct Curve {
    pub label: String,
    pub values: Vec<f64>,
}

/// The option-level bound as a function of `k`, scaled to meet `end` at
/// the last episode. `None` when there is nothing to scale against.
pub fn shape_curve(dims: &Dims, episodes: usize, end: f64) -> Option<Curve> {
    let at = |k: usize| {
        option_regret_bound(
            dims.states as f64,
            dims.options as f64,
            k as f64,
            dims.d,
            dims.t_bar,
            dims.horizon as f64,
        )
    };
    let last = at(episodes);
    if episodes == 0 || !(end > 0.0) || !(last > 0.0) {
        return None;
    }
    Some(Curve {
        label: "option bound shape (rescaled)".into(),
        values: (1..=episodes).map(|k| at(k) * end / last).collect(),
    })
}

const COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// Mean cumulative regret against episode, as SVG.
pub fn regret_svg(path: &Path, curves: &[Curve], shape: Option<&Curve>) -> Result<()> {
    let k_max = curves.iter().map(|c| c.values.len()).max().unwrap_or(0).max(2);
    let y_max = curves
        .iter()
        .chain(shape)
        .flat_map(|c| c.values.iter().copied())
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max)
        .max(1e-9)
        * 1.05;
    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow!("{e}"))?;
    let mut chart = ChartBuilder::on(&root)
        .margin(16)
        .caption("cumulative regret", ("sans-serif", 22))
        .x_label_area_size(40)
        .y_label_area_size(60)
        .build_cartesian_2d(1f64..k_max as f64, 0f64..y_max)
        .map_err(|e| anyhow!("{e}"))?;
    chart
        .configure_mesh()
        .x_desc("episode")
        .y_desc("regret")
        .draw()
        .map_err(|e| anyhow!("{e}"))?;
    for (i, c) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(
                c.values.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)),
                color.stroke_width(2),
            ))
            .map_err(|e| anyhow!("{e}"))?
            .label(c.label.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    if let Some(c) = shape {
        chart
            .draw_series(LineSeries::new(
                c.values.iter().enumerate().map(|(k, &v)| ((k + 1) as f64, v)),
                BLACK.stroke_width(1),
            ))
            .map_err(|e| anyhow!("{e}"))?
            .label(c.label.clone())
            .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK));
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperLeft)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| anyhow!("{e}"))?;
    root.present().map_err(|e| anyhow!("{e}"))?;
    Ok(())
}
