//! Periodic-domain variant of the one-fluid stepper for cross-validation
//! against the Fourier-side analysis: same IMEX scheme, but the potential
//! comes from the mode-wise relation `eps phi_xx = (n - 1) + phi` solved
//! exactly in Fourier space.

use crate::poisson::cyclic_tridiag_solve;
use crate::{Error, Result};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct PeriodicOneFluid {
    pub a_temp: f64,
    pub eps_poisson: f64,
    pub dx: f64,
    pub length: f64,
    pub time: f64,
    n: Vec<f64>,
    u: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl PeriodicOneFluid {
    /// Nodes sit at `x_j = j L / n_cells`, no duplicated endpoint.
    pub fn new(
        n_cells: usize,
        length: f64,
        a_temp: f64,
        eps_poisson: f64,
        n0: Vec<f64>,
        u0: Vec<f64>,
    ) -> Result<Self> {
        if n_cells < 16 {
            return Err(Error::Grid("periodic run needs at least 16 cells".into()));
        }
        if n0.len() != n_cells || u0.len() != n_cells {
            return Err(Error::Grid("initial data length mismatch".into()));
        }
        if n0.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::Parameter("initial density must be positive".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            a_temp,
            eps_poisson,
            dx: length / n_cells as f64,
            length,
            time: 0.0,
            n: n0,
            u: u0,
            fft: planner.plan_fft_forward(n_cells),
            ifft: planner.plan_fft_inverse(n_cells),
        })
    }

    pub fn n(&self) -> &[f64] {
        &self.n
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    fn frequency(&self, k: usize) -> f64 {
        let n = self.n.len();
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        2.0 * std::f64::consts::PI * signed / self.length
    }

    /// `d/dx phi` with `phi_hat = -(n - 1)_hat / (eps xi^2 + 1)` applied
    /// mode by mode.
    fn electro_grad(&self, n: &[f64]) -> Vec<f64> {
        let nn = n.len();
        let mut buf: Vec<Complex64> =
            n.iter().map(|v| Complex64::new(v - 1.0, 0.0)).collect();
        self.fft.process(&mut buf);
        for (k, c) in buf.iter_mut().enumerate() {
            let xi = self.frequency(k);
            let a = self.eps_poisson * xi * xi + 1.0;
            *c = Complex64::new(0.0, xi) * (-*c / a);
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / nn as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    fn continuity_rhs(&self, n: &[f64], u: &[f64], k4: f64) -> Vec<f64> {
        let nn = n.len();
        let mut face = vec![0.0; nn];
        for i in 0..nn {
            let j = (i + 1) % nn;
            face[i] = 0.5 * (n[i] * u[i] + n[j] * u[j])
                + k4 * (n[(i + 2) % nn] - 3.0 * n[j] + 3.0 * n[i] - n[(i + nn - 1) % nn]);
        }
        (0..nn).map(|i| -(face[i] - face[(i + nn - 1) % nn]) / self.dx).collect()
    }

    fn momentum_explicit(&self, n: &[f64], u: &[f64], dphi: &[f64]) -> Vec<f64> {
        let nn = n.len();
        let inv2dx = 1.0 / (2.0 * self.dx);
        (0..nn)
            .map(|i| {
                let (l, r) = ((i + nn - 1) % nn, (i + 1) % nn);
                let du = (u[r] - u[l]) * inv2dx;
                let dn = (n[r] - n[l]) * inv2dx;
                -u[i] * du - self.a_temp * dn / n[i] + dphi[i]
            })
            .collect()
    }

    fn viscous_solve(
        &self,
        u_old: &[f64],
        explicit: &[f64],
        n_new: &[f64],
        n_old: &[f64],
        dt: f64,
        theta: f64,
    ) -> Result<Vec<f64>> {
        let nn = u_old.len();
        let inv_dx2 = 1.0 / (self.dx * self.dx);
        let mut lower = vec![0.0; nn - 1];
        let mut upper = vec![0.0; nn - 1];
        let mut diag = vec![0.0; nn];
        let mut rhs = vec![0.0; nn];
        for i in 0..nn {
            let a = dt * theta * inv_dx2 / n_new[i];
            diag[i] = 1.0 + 2.0 * a;
            if i > 0 {
                lower[i - 1] = -a;
            }
            if i < nn - 1 {
                upper[i] = -a;
            }
            let (l, r) = ((i + nn - 1) % nn, (i + 1) % nn);
            let lap_old = (u_old[r] - 2.0 * u_old[i] + u_old[l]) * inv_dx2;
            rhs[i] = u_old[i] + dt * explicit[i] + dt * (1.0 - theta) * lap_old / n_old[i];
        }
        let corner_upper_right = -dt * theta * inv_dx2 / n_new[0];
        let corner_lower_left = -dt * theta * inv_dx2 / n_new[nn - 1];
        cyclic_tridiag_solve(&lower, &diag, &upper, corner_upper_right, corner_lower_left, &rhs)
    }

    /// One Heun/theta step; same scheme as the bounded solver.
    pub fn step(&mut self, dt: f64, theta: f64) -> Result<()> {
        let c = (self.a_temp + 1.0).sqrt();
        let smax = self.u.iter().fold(0.0f64, |m, v| m.max(v.abs())) + c;
        let k4 = super::K4_DISSIPATION * smax;

        let dphi0 = self.electro_grad(&self.n);
        let cn1 = self.continuity_rhs(&self.n, &self.u, k4);
        let e1 = self.momentum_explicit(&self.n, &self.u, &dphi0);
        let n_star: Vec<f64> = self.n.iter().zip(&cn1).map(|(n, r)| n + dt * r).collect();
        if n_star.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::PositivityLoss { time: self.time, node: 0, value: 0.0 });
        }
        let u_star = self.viscous_solve(&self.u, &e1, &n_star, &self.n, dt, theta)?;

        let dphi_star = self.electro_grad(&n_star);
        let cn2 = self.continuity_rhs(&n_star, &u_star, k4);
        let e2 = self.momentum_explicit(&n_star, &u_star, &dphi_star);
        let n1: Vec<f64> =
            (0..self.n.len()).map(|i| self.n[i] + 0.5 * dt * (cn1[i] + cn2[i])).collect();
        if n1.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::PositivityLoss { time: self.time, node: 0, value: 0.0 });
        }
        let e_avg: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| 0.5 * (a + b)).collect();
        let u1 = self.viscous_solve(&self.u, &e_avg, &n1, &self.n, dt, theta)?;

        self.n = n1;
        self.u = u1;
        self.time += dt;
        Ok(())
    }

    /// DFT coefficients (convention `(1/N) sum f_j exp(-i xi x_j)`) of the
    /// density and velocity perturbations at the given integer mode indices.
    pub fn mode_coefficients(&self, modes: &[usize]) -> Vec<(Complex64, Complex64)> {
        let nn = self.n.len();
        let mut nbuf: Vec<Complex64> =
            self.n.iter().map(|v| Complex64::new(v - 1.0, 0.0)).collect();
        let mut ubuf: Vec<Complex64> = self.u.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.fft.process(&mut nbuf);
        self.fft.process(&mut ubuf);
        let scale = 1.0 / nn as f64;
        modes.iter().map(|&k| (nbuf[k] * scale, ubuf[k] * scale)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_state_stays_put() {
        let n = vec![1.0; 64];
        let u = vec![0.0; 64];
        let mut sim =
            PeriodicOneFluid::new(64, 2.0 * std::f64::consts::PI, 1.0, 1.0, n, u).unwrap();
        for _ in 0..50 {
            sim.step(0.005, 0.5).unwrap();
        }
        for v in sim.n() {
            assert!((v - 1.0).abs() < 1e-14);
        }
        for v in sim.u() {
            assert!(v.abs() < 1e-14);
        }
    }

    #[test]
    fn mass_is_conserved_exactly() {
        let nn = 128;
        let l = 2.0 * std::f64::consts::PI;
        let n: Vec<f64> = (0..nn)
            .map(|j| 1.0 + 0.01 * (2.0 * std::f64::consts::PI * j as f64 / nn as f64).cos())
            .collect();
        let u = vec![0.0; nn];
        let mut sim = PeriodicOneFluid::new(nn, l, 1.0, 1.0, n, u).unwrap();
        let mass0: f64 = sim.n().iter().sum();
        for _ in 0..500 {
            sim.step(0.004, 0.5).unwrap();
        }
        let mass1: f64 = sim.n().iter().sum();
        assert!((mass1 - mass0).abs() < 1e-10 * mass0);
    }

    #[test]
    fn spectral_potential_gradient_matches_analytic() {
        let nn = 128;
        let l = 2.0 * std::f64::consts::PI;
        // n - 1 = a cos(kx) => phi = a cos(kx) / (eps k^2 + 1) * (-1)
        // => dphi/dx = a k sin(kx) / (eps k^2 + 1)
        let (a, k, eps) = (0.01, 3.0, 0.7);
        let n: Vec<f64> =
            (0..nn).map(|j| 1.0 + a * (k * l * j as f64 / nn as f64).cos()).collect();
        let sim = PeriodicOneFluid::new(nn, l, 1.0, eps, n.clone(), vec![0.0; nn]).unwrap();
        let grad = sim.electro_grad(&n);
        for j in 0..nn {
            let x = l * j as f64 / nn as f64;
            let want = a * k * (k * x).sin() / (eps * k * k + 1.0);
            assert!((grad[j] - want).abs() < 1e-12, "node {j}: {} vs {want}", grad[j]);
        }
    }
}
