//! Standalone SVG line plots.

use anyhow::{anyhow, Result};
use plotters::prelude::*;

const PALETTE: [RGBColor; 6] = [
    RGBColor(200, 30, 30),
    RGBColor(20, 20, 20),
    RGBColor(30, 90, 200),
    RGBColor(20, 140, 60),
    RGBColor(170, 90, 10),
    RGBColor(120, 40, 160),
];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, x: &[f64], y: &[f64]) -> Self {
        Series { label: label.into(), points: x.iter().copied().zip(y.iter().copied()).collect() }
    }
}

pub struct Figure<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub series: Vec<Series>,
    /// Horizontal reference line, e.g. the 0 dB shot-noise level.
    pub reference: Option<f64>,
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.05).max(1e-6);
    (lo - pad, hi + pad)
}

impl Figure<'_> {
    pub fn render(&self) -> Result<String> {
        let mut svg = String::new();
        {
            let root = SVGBackend::with_string(&mut svg, (800, 520)).into_drawing_area();
            let err = |e: DrawingAreaErrorKind<_>| anyhow!("plot rendering failed: {e:?}");
            root.fill(&WHITE).map_err(err)?;
            let all = || self.series.iter().flat_map(|s| s.points.iter());
            let (x0, x1) = bounds(all().map(|p| p.0));
            let (y0, y1) = bounds(all().map(|p| p.1).chain(self.reference));
            let mut chart = ChartBuilder::on(&root)
                .caption(self.title, ("sans-serif", 22))
                .margin(16)
                .x_label_area_size(44)
                .y_label_area_size(60)
                .build_cartesian_2d(x0..x1, y0..y1)
                .map_err(err)?;
            chart.configure_mesh().x_desc(self.x_label).y_desc(self.y_label).draw().map_err(err)?;
            if let Some(r) = self.reference {
                chart
                    .draw_series(LineSeries::new([(x0, r), (x1, r)], BLACK.mix(0.4).stroke_width(1)))
                    .map_err(err)?;
            }
            for (i, s) in self.series.iter().enumerate() {
                let color = PALETTE[i % PALETTE.len()];
                chart
                    .draw_series(LineSeries::new(s.points.iter().copied(), color.stroke_width(2)))
                    .map_err(err)?
                    .label(s.label.as_str())
                    .legend(move |(x, y)| PathElement::new([(x, y), (x + 18, y)], color.stroke_width(2)));
            }
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.85))
                .border_style(BLACK)
                .draw()
                .map_err(err)?;
            root.present().map_err(err)?;
        }
        Ok(svg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_labels_and_is_deterministic() {
        let fig = || Figure {
            title: "spectrum",
            x_label: "analysis frequency (MHz)",
            y_label: "noise (dB)",
            series: vec![Series::new("n", &[0.0, 1.0, 2.0], &[-1.0, 0.5, 1.0])],
            reference: Some(0.0),
        };
        let a = fig().render().unwrap();
        assert!(a.starts_with("<svg"));
        assert!(a.contains("noise (dB)") && a.contains("analysis frequency (MHz)"));
        assert_eq!(a, fig().render().unwrap());
    }
}
