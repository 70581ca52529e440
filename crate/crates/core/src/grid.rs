//! Uniform spatial mesh with truncated far-field boundaries.

use crate::{Error, Result};

/// Uniform node-centred grid on `[x_min, x_max]` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::Grid("non-finite bounds".into()));
        }
        if x_min >= x_max {
            return Err(Error::Grid(format!(
                "x_min = {x_min} must be strictly below x_max = {x_max}"
            )));
        }
        if n_cells < 8 {
            return Err(Error::Grid(format!("n_cells = {n_cells} below minimum of 8")));
        }
        let dx = (x_max - x_min) / (n_cells - 1) as f64;
        Ok(Self { x_min, x_max, n_cells, dx })
    }

    /// Grid covering `[x_min, x_max]` with spacing as close to `dx_target`
    /// as an integer node count allows.
    pub fn with_spacing(x_min: f64, x_max: f64, dx_target: f64) -> Result<Self> {
        if !(dx_target > 0.0) {
            return Err(Error::Grid(format!("dx = {dx_target} must be positive")));
        }
        let n = ((x_max - x_min) / dx_target).round() as usize + 1;
        Self::new(x_min, x_max, n.max(8))
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_cells).map(move |i| self.node(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_are_reproducible() {
        let g = Grid1D::new(-2.0, 3.0, 11).unwrap();
        assert_eq!(g.dx, 0.5);
        for i in 0..g.n_cells {
            assert_eq!(g.node(i), -2.0 + i as f64 * 0.5);
        }
        assert_eq!(g.node(g.n_cells - 1), g.x_max);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::new(1.0, 1.0, 16).is_err());
        assert!(Grid1D::new(2.0, 1.0, 16).is_err());
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(Grid1D::new(f64::NAN, 1.0, 16).is_err());
    }

    #[test]
    fn spacing_constructor_rounds_to_nodes() {
        let g = Grid1D::with_spacing(0.0, 1.0, 0.01).unwrap();
        assert_eq!(g.n_cells, 101);
        assert!((g.dx - 0.01).abs() < 1e-15);
    }
}
