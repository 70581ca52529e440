//! Nodal fields and the discrete calculus shared by every module:
//! second-order derivatives, trapezoidal quadrature, Lp norms.

use crate::grid::Grid1D;
use crate::{Error, Result};

/// One real value per grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid1D,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::Grid(format!(
                "field length {} does not match grid with {} nodes",
                values.len(),
                grid.n_cells
            )));
        }
        let f = Self { grid, values };
        f.ensure_finite("field construction")?;
        Ok(f)
    }

    pub fn zeros(grid: Grid1D) -> Self {
        Self { grid, values: vec![0.0; grid.n_cells] }
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        Self { grid, values: vec![c; grid.n_cells] }
    }

    /// Sample a function at the grid nodes.
    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().map(f).collect();
        Self { grid, values }
    }

    #[inline]
    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ensure_finite(&self, context: &'static str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { context })
        }
    }

    /// Discrete d/dx: central differences inside, one-sided second-order
    /// stencils at the two boundary nodes.
    pub fn ddx(&self) -> Result<Field> {
        self.ensure_finite("ddx input")?;
        let v = &self.values;
        let n = v.len();
        let dx = self.grid.dx;
        let mut out = vec![0.0; n];
        out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dx);
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
        }
        out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * dx);
        Ok(Field { grid: self.grid, values: out })
    }

    /// Discrete d2/dx2: three-point stencil inside, one-sided second-order
    /// four-point stencils at the boundary nodes.
    pub fn d2dx2(&self) -> Result<Field> {
        self.ensure_finite("d2dx2 input")?;
        let v = &self.values;
        let n = v.len();
        let dx2 = self.grid.dx * self.grid.dx;
        let mut out = vec![0.0; n];
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / dx2;
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / dx2;
        }
        out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / dx2;
        Ok(Field { grid: self.grid, values: out })
    }

    /// Trapezoidal `(integral |f|^p dx)^(1/p)`; the max-norm for `p = inf`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.ensure_finite("lp_norm input")?;
        if p.is_infinite() && p > 0.0 {
            return Ok(self.max_abs());
        }
        if !(p >= 1.0) {
            return Err(Error::Parameter(format!("Lp norm needs p >= 1, got {p}")));
        }
        let integrand: Vec<f64> = self.values.iter().map(|v| v.abs().powf(p)).collect();
        Ok(trapezoid(&integrand, self.grid.dx).powf(1.0 / p))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// L2 inner product (f, g) by trapezoidal quadrature.
    pub fn inner(&self, other: &Field) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let integrand: Vec<f64> =
            self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(trapezoid(&integrand, self.grid.dx))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect();
        Ok(Field { grid: self.grid, values })
    }
}

/// Compensated (Neumaier) summation; keeps quadrature independent of
/// accumulation order at the 1e-16 level.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Trapezoidal rule on nodal values with compensated summation.
pub fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner = kahan_sum(values[1..n - 1].iter().copied());
    dx * (0.5 * (values[0] + values[n - 1]) + inner)
}

/// Both sides of the sup-norm interpolation bound
/// `max|f| <= sqrt(2) ||f||^(1/2) ||f_x||^(1/2)`.
#[derive(Debug, Clone, Copy)]
pub enum SobolevCheck {
    Report { lhs: f64, rhs: f64 },
    /// The bound presumes decay at infinity; on a truncated grid it is only
    /// meaningful when the field is already small at the boundary.
    Inapplicable { boundary_fraction: f64 },
}

pub fn sobolev_sup_check(f: &Field) -> Result<SobolevCheck> {
    f.ensure_finite("sobolev check input")?;
    let sup = f.max_abs();
    if sup == 0.0 {
        return Ok(SobolevCheck::Report { lhs: 0.0, rhs: 0.0 });
    }
    let v = f.values();
    let boundary = v[0].abs().max(v[v.len() - 1].abs());
    if boundary >= 0.01 * sup {
        return Ok(SobolevCheck::Inapplicable { boundary_fraction: boundary / sup });
    }
    let l2 = f.lp_norm(2.0)?;
    let dl2 = f.ddx()?.lp_norm(2.0)?;
    Ok(SobolevCheck::Report { lhs: sup, rhs: std::f64::consts::SQRT_2 * l2.sqrt() * dl2.sqrt() })
}
