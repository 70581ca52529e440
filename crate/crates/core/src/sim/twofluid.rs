//! IMEX stepping of the two-fluid system: one continuity/momentum pair per
//! species, ion and electron momentum coupled through the linear Poisson
//! equation with opposite signs.

use super::{
    check_positive, continuity_rhs, max_abs, viscous_theta_solve, Perturbation, TwoFluidState,
    EXPLICIT_SAFETY, K4_DISSIPATION,
};
use crate::field::Field;
use crate::grid::Grid1D;
use crate::params::PhysParamsTwo;
use crate::poisson::solve_poisson_linear;
use crate::rarewave::profile_twofluid;
use crate::Result;

#[derive(Debug, Clone, Copy)]
pub struct TwoFluidStepInfo {
    pub dt: f64,
    pub ion_flux_left: f64,
    pub ion_flux_right: f64,
    pub electron_flux_left: f64,
    pub electron_flux_right: f64,
}

pub fn cfl_dt_twofluid(state: &TwoFluidState, params: &PhysParamsTwo, cfl: f64) -> f64 {
    let dx = state.n_ion.grid().dx;
    let s_max =
        max_abs(state.u_ion.values()).max(max_abs(state.u_electron.values())) + params.sound_speed();
    cfl * (dx / s_max).min(EXPLICIT_SAFETY * dx * dx)
}

/// Both species start on the same perturbed profile; the potential comes
/// from the linear Poisson solve (zero charge separation initially, so phi
/// is the harmonic interpolant of its boundary values minus the profile
/// curvature contribution).
pub fn initial_state_twofluid(
    params: &PhysParamsTwo,
    perturbation: &Perturbation,
    grid: Grid1D,
) -> Result<TwoFluidState> {
    let profile = profile_twofluid(params, 0.0, grid)?;
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

    let n_ion = Field::new(grid, n_vals)?;
    let u_ion = Field::new(grid, u_vals)?;
    let n_electron = n_ion.clone();
    let u_electron = u_ion.clone();

    let rhs = n_ion.zip_map(&n_electron, |a, b| a - b)?;
    let phi = solve_poisson_linear(&rhs, params.phi_minus(), params.phi_plus())?.phi;

    Ok(TwoFluidState { time: 0.0, n_ion, u_ion, n_electron, u_electron, phi })
}

/// Explicit momentum RHS for one species; `charge_sign` is +1 for ions
/// (force -n dphi/dx on the left side) and -1 for electrons.
#[allow(clippy::too_many_arguments)]
fn momentum_explicit(
    n: &[f64],
    u: &[f64],
    phi: &[f64],
    temp: f64,
    mass: f64,
    charge_sign: f64,
    dx: f64,
) -> Vec<f64> {
    let nn = n.len();
    let inv2dx = 1.0 / (2.0 * dx);
    let mut e = vec![0.0; nn];
    for i in 1..nn - 1 {
        let du = (u[i + 1] - u[i - 1]) * inv2dx;
        let dn = (n[i + 1] - n[i - 1]) * inv2dx;
        let dphi = (phi[i + 1] - phi[i - 1]) * inv2dx;
        e[i] = -u[i] * du - (temp / mass) * dn / n[i] + charge_sign * dphi / mass;
    }
    e
}

struct SpeciesStage {
    n: Vec<f64>,
    u: Vec<f64>,
    cn: Vec<f64>,
    e: Vec<f64>,
    flux_left: f64,
    flux_right: f64,
}

#[allow(clippy::too_many_arguments)]
fn species_predictor(
    n0: &[f64],
    u0: &[f64],
    phi0: &[f64],
    temp: f64,
    mass: f64,
    mu: f64,
    charge_sign: f64,
    k4: f64,
    dt: f64,
    theta: f64,
    dx: f64,
    u_bc: (f64, f64),
    time: f64,
) -> Result<SpeciesStage> {
    let (cn, fl, fr) = continuity_rhs(n0, u0, dx, k4);
    let e = momentum_explicit(n0, u0, phi0, temp, mass, charge_sign, dx);
    let n_star: Vec<f64> = n0.iter().zip(&cn).map(|(n, r)| n + dt * r).collect();
    check_positive(&n_star, time)?;
    let coef_new: Vec<f64> = n_star.iter().map(|v| mu / (mass * v)).collect();
    let coef_old: Vec<f64> = n0.iter().map(|v| mu / (mass * v)).collect();
    let u_star = viscous_theta_solve(u0, &e, &coef_new, &coef_old, dt, theta, dx, u_bc)?;
    Ok(SpeciesStage { n: n_star, u: u_star, cn, e, flux_left: fl, flux_right: fr })
}

/// One Heun/theta-implicit step of the two-fluid system; the potential is
/// re-solved once per stage from the updated charge density.
pub fn step_twofluid(
    state: &mut TwoFluidState,
    params: &PhysParamsTwo,
    dt: f64,
    theta: f64,
) -> Result<TwoFluidStepInfo> {
    let grid = state.n_ion.grid();
    let dx = grid.dx;
    let c = params.sound_speed();
    let u_bc = (params.u_minus, params.u_plus());
    let (phi_l, phi_r) = (params.phi_minus(), params.phi_plus());

    let ni0 = state.n_ion.values();
    let ui0 = state.u_ion.values();
    let ne0 = state.n_electron.values();
    let ue0 = state.u_electron.values();
    let phi0 = state.phi.values();

    let k4 = K4_DISSIPATION * (max_abs(ui0).max(max_abs(ue0)) + c);

    // predictor stage, both species against the same lagged potential
    let ion1 = species_predictor(
        ni0, ui0, phi0, params.t_ion, params.m_ion, params.mu_ion, 1.0, k4, dt, theta, dx, u_bc,
        state.time,
    )?;
    let ele1 = species_predictor(
        ne0, ue0, phi0, params.t_electron, params.m_electron, params.mu_electron, -1.0, k4, dt,
        theta, dx, u_bc, state.time,
    )?;

    let rhs_star = Field::new(grid, ion1.n.iter().zip(&ele1.n).map(|(a, b)| a - b).collect())?;
    let phi_star = solve_poisson_linear(&rhs_star, phi_l, phi_r)?.phi;

    // corrector stage
    let k4b = K4_DISSIPATION * (max_abs(&ion1.u).max(max_abs(&ele1.u)) + c);
    let (cn_i2, fl_i2, fr_i2) = continuity_rhs(&ion1.n, &ion1.u, dx, k4b);
    let (cn_e2, fl_e2, fr_e2) = continuity_rhs(&ele1.n, &ele1.u, dx, k4b);
    let e_i2 = momentum_explicit(
        &ion1.n, &ion1.u, phi_star.values(), params.t_ion, params.m_ion, 1.0, dx,
    );
    let e_e2 = momentum_explicit(
        &ele1.n, &ele1.u, phi_star.values(), params.t_electron, params.m_electron, -1.0, dx,
    );

    let ni1: Vec<f64> =
        (0..ni0.len()).map(|i| ni0[i] + 0.5 * dt * (ion1.cn[i] + cn_i2[i])).collect();
    let ne1: Vec<f64> =
        (0..ne0.len()).map(|i| ne0[i] + 0.5 * dt * (ele1.cn[i] + cn_e2[i])).collect();
    check_positive(&ni1, state.time)?;
    check_positive(&ne1, state.time)?;

    let coef_i1: Vec<f64> = ni1.iter().map(|v| params.mu_ion / (params.m_ion * v)).collect();
    let coef_i0: Vec<f64> = ni0.iter().map(|v| params.mu_ion / (params.m_ion * v)).collect();
    let e_i_avg: Vec<f64> = ion1.e.iter().zip(&e_i2).map(|(a, b)| 0.5 * (a + b)).collect();
    let ui1 = viscous_theta_solve(ui0, &e_i_avg, &coef_i1, &coef_i0, dt, theta, dx, u_bc)?;

    let coef_e1: Vec<f64> =
        ne1.iter().map(|v| params.mu_electron / (params.m_electron * v)).collect();
    let coef_e0: Vec<f64> =
        ne0.iter().map(|v| params.mu_electron / (params.m_electron * v)).collect();
    let e_e_avg: Vec<f64> = ele1.e.iter().zip(&e_e2).map(|(a, b)| 0.5 * (a + b)).collect();
    let ue1 = viscous_theta_solve(ue0, &e_e_avg, &coef_e1, &coef_e0, dt, theta, dx, u_bc)?;

    let ni1_field = Field::new(grid, ni1)?;
    let ne1_field = Field::new(grid, ne1)?;
    let rhs1 = ni1_field.zip_map(&ne1_field, |a, b| a - b)?;
    let phi1 = solve_poisson_linear(&rhs1, phi_l, phi_r)?.phi;

    state.time += dt;
    state.n_ion = ni1_field;
    state.u_ion = Field::new(grid, ui1)?;
    state.n_electron = ne1_field;
    state.u_electron = Field::new(grid, ue1)?;
    state.phi = phi1;

    Ok(TwoFluidStepInfo {
        dt,
        ion_flux_left: 0.5 * (ion1.flux_left + fl_i2),
        ion_flux_right: 0.5 * (ion1.flux_right + fr_i2),
        electron_flux_left: 0.5 * (ele1.flux_left + fl_e2),
        electron_flux_right: 0.5 * (ele1.flux_right + fr_e2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric_params() -> PhysParamsTwo {
        PhysParamsTwo::new(1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1).unwrap()
    }

    #[test]
    fn species_symmetry_is_exact() {
        let p = symmetric_params();
        let grid = Grid1D::with_spacing(-40.0, 80.0, 0.1).unwrap();
        let mut state =
            initial_state_twofluid(&p, &Perturbation::gaussian(0.05), grid).unwrap();
        for _ in 0..200 {
            let dt = cfl_dt_twofluid(&state, &p, 0.4);
            step_twofluid(&mut state, &p, dt, 0.5).unwrap();
        }
        for i in 0..grid.n_cells {
            assert_eq!(state.n_ion.values()[i], state.n_electron.values()[i]);
            assert_eq!(state.u_ion.values()[i], state.u_electron.values()[i]);
        }
        // with zero charge separation and zero boundary potentials the
        // potential vanishes identically
        assert!(state.phi.max_abs() < 1e-12);
    }

    #[test]
    fn equilibrium_fixed_point() {
        let p = symmetric_params();
        let grid = Grid1D::with_spacing(-10.0, 10.0, 0.1).unwrap();
        let pc = PhysParamsTwo { n_plus: p.n_minus * (1.0 + 1e-15), ..p };
        let n = Field::constant(grid, p.n_minus);
        let u = Field::constant(grid, p.u_minus);
        let mut state = TwoFluidState {
            time: 0.0,
            n_ion: n.clone(),
            u_ion: u.clone(),
            n_electron: n,
            u_electron: u,
            phi: Field::zeros(grid),
        };
        for _ in 0..100 {
            step_twofluid(&mut state, &pc, 0.01, 0.5).unwrap();
        }
        for v in state.n_ion.values() {
            assert!((v - p.n_minus).abs() < 1e-13);
        }
        for v in state.u_electron.values() {
            assert!(v.abs() < 1e-13);
        }
    }

    #[test]
    fn equal_species_perturbation_leaves_only_profile_curvature() {
        // with n~_i = n~_e the discrete perturbation Poisson equation reads
        // D2 phi~ = -D2 phi^r
        let p = PhysParamsTwo::new(2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        let grid = Grid1D::with_spacing(-40.0, 80.0, 0.05).unwrap();
        let state = initial_state_twofluid(&p, &Perturbation::gaussian(0.05), grid).unwrap();
        let profile = profile_twofluid(&p, 0.0, grid).unwrap();
        let phit = state.phi.zip_map(&profile.phir, |a, b| a - b).unwrap();
        let lhs = phit.d2dx2().unwrap();
        let rhs = profile.phir.d2dx2().unwrap();
        for i in 2..grid.n_cells - 2 {
            let gap = lhs.values()[i] + rhs.values()[i];
            assert!(gap.abs() < 1e-9, "at node {i}: {gap:e}");
        }
    }
}
