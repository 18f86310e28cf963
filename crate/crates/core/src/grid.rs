//! Uniformly sampled curves.

use crate::error::{Error, Result};

/// Relative tolerance on grid-spacing uniformity.
pub const UNIFORMITY_TOL: f64 = 1e-9;

/// Tolerance (in grid steps) for treating a query point as a grid node.
pub const NODE_TOL: f64 = 1e-6;

/// A strictly increasing, uniformly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    start: f64,
    step: f64,
    len: usize,
}

impl UniformGrid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(start.is_finite() && step.is_finite()) {
            return Err(Error::Argument("grid start and step must be finite".into()));
        }
        if !(step > 0.0) {
            return Err(Error::Argument(format!("grid step must be positive, got {step}")));
        }
        if len == 0 {
            return Err(Error::Argument("grid must contain at least one point".into()));
        }
        Ok(UniformGrid { start, step, len })
    }

    /// Grid covering `[start, stop]` with the given step; `stop` is included
    /// when it lands on a node.
    pub fn span(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(stop >= start) {
            return Err(Error::Argument(format!("grid stop {stop} precedes start {start}")));
        }
        let n = ((stop - start) / step + NODE_TOL).floor() as usize + 1;
        Self::new(start, step, n)
    }

    /// Validates that `points` are strictly increasing and uniform to within
    /// [`UNIFORMITY_TOL`] relative spacing deviation.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        match points {
            [] => Err(Error::data("grid is empty")),
            [x] => Self::new(*x, 1.0, 1),
            _ => {
                let n = points.len();
                let step = (points[n - 1] - points[0]) / (n - 1) as f64;
                for (i, w) in points.windows(2).enumerate() {
                    let d = w[1] - w[0];
                    if !(d > 0.0) {
                        return Err(Error::data_at(
                            i + 2,
                            format!("grid not strictly increasing ({} then {})", w[0], w[1]),
                        ));
                    }
                    if ((d - step) / step).abs() > UNIFORMITY_TOL {
                        return Err(Error::data_at(
                            i + 2,
                            format!("non-uniform grid spacing {d} (expected {step})"),
                        ));
                    }
                }
                Self::new(points[0], step, n)
            }
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.at(self.len - 1)
    }

    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.at(i))
    }

    /// Fractional index of `x`.
    pub fn position(&self, x: f64) -> f64 {
        (x - self.start) / self.step
    }

    pub fn contains(&self, x: f64) -> bool {
        let p = self.position(x);
        p >= -NODE_TOL && p <= (self.len - 1) as f64 + NODE_TOL
    }

    /// Index of the node at `x`, if `x` sits on the grid.
    pub fn node(&self, x: f64) -> Option<usize> {
        let p = self.position(x);
        let r = p.round();
        if (p - r).abs() <= NODE_TOL && r >= 0.0 && (r as usize) < self.len {
            Some(r as usize)
        } else {
            None
        }
    }
}

/// Values sampled on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl Curve {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Argument(format!(
                "curve has {} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Curve { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        Curve { grid, values }
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Curve {
        Curve { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Linear interpolation inside the support; exact at nodes.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::Argument(format!("query point must be finite, got {x}")));
        }
        if let Some(i) = self.grid.node(x) {
            return Ok(self.values[i]);
        }
        if !self.grid.contains(x) {
            return Err(Error::Range(format!(
                "{x} MHz outside curve support [{}, {}] MHz",
                self.grid.start(),
                self.grid.end()
            )));
        }
        let p = self.grid.position(x);
        let i = (p.floor() as usize).min(self.grid.len() - 2);
        let t = p - i as f64;
        Ok(self.values[i] + t * (self.values[i + 1] - self.values[i]))
    }

    /// Value at an exact grid node; no interpolation.
    pub fn at_node(&self, x: f64) -> Result<f64> {
        self.grid.node(x).map(|i| self.values[i]).ok_or_else(|| {
            Error::Range(format!(
                "{x} MHz is not a node of the grid starting at {} with step {}",
                self.grid.start(),
                self.grid.step()
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_points_accepts_uniform() {
        let g = UniformGrid::from_points(&[-1.0, -0.5, 0.0, 0.5]).unwrap();
        assert_eq!(g.len(), 4);
        assert_eq!(g.step(), 0.5);
        assert_eq!(g.node(0.0), Some(2));
        assert_eq!(g.node(0.25), None);
    }

    #[test]
    fn from_points_rejects_non_uniform_and_decreasing() {
        let err = UniformGrid::from_points(&[0.0, 1.0, 2.5]).unwrap_err();
        assert!(matches!(err, Error::Data { line: Some(_), .. }));
        assert!(UniformGrid::from_points(&[0.0, 1.0, 1.0]).is_err());
        assert!(UniformGrid::from_points(&[]).is_err());
    }

    #[test]
    fn span_includes_endpoint() {
        let g = UniformGrid::span(-30.0, 40.0, 0.25).unwrap();
        assert_eq!(g.len(), 281);
        assert!((g.end() - 40.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_linear_and_bounded() {
        let g = UniformGrid::new(0.0, 1.0, 3).unwrap();
        let c = Curve::new(g, vec![0.0, 2.0, 6.0]).unwrap();
        assert_eq!(c.interpolate(1.0).unwrap(), 2.0);
        assert_eq!(c.interpolate(1.5).unwrap(), 4.0);
        assert_eq!(c.interpolate(2.0).unwrap(), 6.0);
        assert!(matches!(c.interpolate(2.5), Err(Error::Range(_))));
        assert!(matches!(c.at_node(0.5), Err(Error::Range(_))));
    }
}
