//! IMEX stepping of the one-fluid system with Boltzmann electrons.

use super::{
    check_positive, continuity_rhs, max_abs, viscous_theta_solve, FluidState, Perturbation,
    EXPLICIT_SAFETY, K4_DISSIPATION,
};
use crate::field::Field;
use crate::grid::Grid1D;
use crate::params::PhysParamsOne;
use crate::poisson::solve_poisson_boltzmann;
use crate::rarewave::profile_onefluid;
use crate::Result;

/// Per-step bookkeeping: time-averaged mass fluxes through the outermost
/// interior faces and elliptic work.
#[derive(Debug, Clone, Copy)]
pub struct StepInfo {
    pub dt: f64,
    pub mass_flux_left: f64,
    pub mass_flux_right: f64,
    pub poisson_iterations: usize,
}

/// Acoustic CFL bound; the viscous term is implicit so only the explicit
/// transport and source terms restrict dt.
pub fn cfl_dt_onefluid(state: &FluidState, params: &PhysParamsOne, cfl: f64) -> f64 {
    let dx = state.n.grid().dx;
    let s_max = max_abs(state.u.values()) + params.sound_speed();
    cfl * (dx / s_max).min(EXPLICIT_SAFETY * dx * dx)
}

/// Profile at t = 0 plus the configured perturbation, boundary nodes pinned
/// to the far-field constants, potential from the nonlinear Poisson solve.
pub fn initial_state_onefluid(
    params: &PhysParamsOne,
    perturbation: &Perturbation,
    grid: Grid1D,
) -> Result<FluidState> {
    let profile = profile_onefluid(params, 0.0, grid)?;
    let bump = perturbation.sample(grid);
    let last = grid.n_cells - 1;

    let mut n_vals: Vec<f64> =
        profile.nr.values().iter().zip(&bump).map(|(a, b)| a + b).collect();
    let mut u_vals: Vec<f64> = if perturbation.on_velocity {
        profile.ur.values().iter().zip(&bump).map(|(a, b)| a + b).collect()
    } else {
        profile.ur.values().to_vec()
    };
    n_vals[0] = params.n_minus;
    n_vals[last] = params.n_plus;
    u_vals[0] = params.u_minus;
    u_vals[last] = params.u_plus();
    check_positive(&n_vals, 0.0)?;

    let n = Field::new(grid, n_vals)?;
    let u = Field::new(grid, u_vals)?;
    let guess = n.map(|v| -v.ln());
    let solve = solve_poisson_boltzmann(&n, params.phi_minus(), params.phi_plus(), Some(&guess))?;
    Ok(FluidState { time: 0.0, n, u, phi: solve.phi })
}

fn momentum_explicit(n: &[f64], u: &[f64], phi: &[f64], a_temp: f64, dx: f64) -> Vec<f64> {
    let nn = n.len();
    let inv2dx = 1.0 / (2.0 * dx);
    let mut e = vec![0.0; nn];
    for i in 1..nn - 1 {
        let du = (u[i + 1] - u[i - 1]) * inv2dx;
        let dn = (n[i + 1] - n[i - 1]) * inv2dx;
        let dphi = (phi[i + 1] - phi[i - 1]) * inv2dx;
        e[i] = -u[i] * du - a_temp * dn / n[i] + dphi;
    }
    e
}

/// One Heun/theta-implicit step of the one-fluid system; advances the state
/// in place.
pub fn step_onefluid(
    state: &mut FluidState,
    params: &PhysParamsOne,
    dt: f64,
    theta: f64,
) -> Result<StepInfo> {
    let grid = state.n.grid();
    let dx = grid.dx;
    let c = params.sound_speed();
    let u_bc = (params.u_minus, params.u_plus());
    let (phi_l, phi_r) = (params.phi_minus(), params.phi_plus());

    let n0 = state.n.values();
    let u0 = state.u.values();
    let phi0 = state.phi.values();
    let coef0: Vec<f64> = n0.iter().map(|v| 1.0 / v).collect();

    // predictor stage
    let k4 = K4_DISSIPATION * (max_abs(u0) + c);
    let (cn1, fl1, fr1) = continuity_rhs(n0, u0, dx, k4);
    let e1 = momentum_explicit(n0, u0, phi0, params.a_temp, dx);

    let n_star: Vec<f64> = n0.iter().zip(&cn1).map(|(n, r)| n + dt * r).collect();
    check_positive(&n_star, state.time)?;
    let coef_star: Vec<f64> = n_star.iter().map(|v| 1.0 / v).collect();
    let u_star = viscous_theta_solve(u0, &e1, &coef_star, &coef0, dt, theta, dx, u_bc)?;

    let n_star_field = Field::new(grid, n_star)?;
    let phi_star_solve = solve_poisson_boltzmann(&n_star_field, phi_l, phi_r, Some(&state.phi))?;
    let phi_star = phi_star_solve.phi;

    // corrector stage
    let k4b = K4_DISSIPATION * (max_abs(&u_star) + c);
    let (cn2, fl2, fr2) = continuity_rhs(n_star_field.values(), &u_star, dx, k4b);
    let e2 = momentum_explicit(n_star_field.values(), &u_star, phi_star.values(), params.a_temp, dx);

    let n1: Vec<f64> = (0..n0.len())
        .map(|i| n0[i] + 0.5 * dt * (cn1[i] + cn2[i]))
        .collect();
    check_positive(&n1, state.time)?;
    let coef1: Vec<f64> = n1.iter().map(|v| 1.0 / v).collect();
    let e_avg: Vec<f64> = e1.iter().zip(&e2).map(|(a, b)| 0.5 * (a + b)).collect();
    let u1 = viscous_theta_solve(u0, &e_avg, &coef1, &coef0, dt, theta, dx, u_bc)?;

    let n1_field = Field::new(grid, n1)?;
    let phi1_solve = solve_poisson_boltzmann(&n1_field, phi_l, phi_r, Some(&phi_star))?;

    state.time += dt;
    state.n = n1_field;
    state.u = Field::new(grid, u1)?;
    state.phi = phi1_solve.phi;

    Ok(StepInfo {
        dt,
        mass_flux_left: 0.5 * (fl1 + fl2),
        mass_flux_right: 0.5 * (fr1 + fr2),
        poisson_iterations: phi_star_solve.iterations + phi1_solve.iterations,
    })
}
