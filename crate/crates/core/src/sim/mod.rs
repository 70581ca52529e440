//! Time integration of the one- and two-fluid NSP systems on the truncated
//! domain, coupled to the elliptic potential solve each stage.
//!
//! The scheme is IMEX: transport, pressure and the electrostatic source are
//! explicit (Heun predictor-corrector, second order), the viscous term is
//! theta-implicit through a tridiagonal solve, and the continuity flux gets
//! a fourth-difference dissipation whose coefficient vanishes as dx^3 under
//! refinement. Density positivity aborts the run rather than clipping.

mod onefluid;
pub mod periodic;
mod twofluid;

pub use onefluid::{cfl_dt_onefluid, initial_state_onefluid, step_onefluid, StepInfo};
pub use twofluid::{cfl_dt_twofluid, initial_state_twofluid, step_twofluid, TwoFluidStepInfo};

use crate::diagnostics::{
    energy_report_onefluid, energy_report_twofluid, first_order_energy, lyapunov_weight,
    lyapunov_weight_two, twofluid_energy, zero_order_energy, EnergyReport, TwoFluidWeights,
};
use crate::field::{kahan_sum, Field};
use crate::grid::Grid1D;
use crate::params::{PhysParamsOne, PhysParamsTwo};
use crate::poisson;
use crate::rarewave::{profile_onefluid, profile_twofluid, RarefactionProfile};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// Evolving one-fluid state; boundary nodes stay pinned to the far-field
/// constants.
#[derive(Debug, Clone)]
pub struct FluidState {
    pub time: f64,
    pub n: Field,
    pub u: Field,
    /// potential from the most recent elliptic solve
    pub phi: Field,
}

#[derive(Debug, Clone)]
pub struct TwoFluidState {
    pub time: f64,
    pub n_ion: Field,
    pub u_ion: Field,
    pub n_electron: Field,
    pub u_electron: Field,
    pub phi: Field,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelConfig {
    OneFluid(PhysParamsOne),
    TwoFluid(PhysParamsTwo),
}

impl ModelConfig {
    pub fn sound_speed(&self) -> f64 {
        match self {
            ModelConfig::OneFluid(p) => p.sound_speed(),
            ModelConfig::TwoFluid(p) => p.sound_speed(),
        }
    }

    pub fn u_plus(&self) -> f64 {
        match self {
            ModelConfig::OneFluid(p) => p.u_plus(),
            ModelConfig::TwoFluid(p) => p.u_plus(),
        }
    }

    pub fn wave_strength(&self) -> f64 {
        match self {
            ModelConfig::OneFluid(p) => p.wave_strength(),
            ModelConfig::TwoFluid(p) => p.wave_strength(),
        }
    }

    pub fn far_field(&self) -> FarField {
        match self {
            ModelConfig::OneFluid(p) => FarField {
                n_minus: p.n_minus,
                n_plus: p.n_plus,
                u_minus: p.u_minus,
                u_plus: p.u_plus(),
                phi_minus: p.phi_minus(),
                phi_plus: p.phi_plus(),
            },
            ModelConfig::TwoFluid(p) => FarField {
                n_minus: p.n_minus,
                n_plus: p.n_plus,
                u_minus: p.u_minus,
                u_plus: p.u_plus(),
                phi_minus: p.phi_minus(),
                phi_plus: p.phi_plus(),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelConfig::OneFluid(p) => p.validate(),
            ModelConfig::TwoFluid(p) => p.validate(),
        }
    }

    fn profile(&self, t: f64, grid: Grid1D) -> Result<RarefactionProfile> {
        match self {
            ModelConfig::OneFluid(p) => profile_onefluid(p, t, grid),
            ModelConfig::TwoFluid(p) => profile_twofluid(p, t, grid),
        }
    }
}

/// Domain specification. By default the right boundary is pushed past the
/// fan edge, which travels at `u_plus + c`, plus a tanh-foot margin, so the
/// pinned far-field boundary values stay valid for the whole run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GridSpec {
    /// left half-width L: the domain starts at -L
    pub half_width: f64,
    pub dx: f64,
    #[serde(default)]
    pub x_min: Option<f64>,
    #[serde(default)]
    pub x_max: Option<f64>,
    #[serde(default = "default_fan_margin")]
    pub fan_margin: f64,
}

fn default_fan_margin() -> f64 {
    60.0
}

impl GridSpec {
    pub fn new(half_width: f64, dx: f64) -> Self {
        Self { half_width, dx, x_min: None, x_max: None, fan_margin: default_fan_margin() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbShape {
    None,
    Gaussian,
    RandomBumps { count: usize },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Perturbation {
    pub shape: PerturbShape,
    pub amplitude: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub center: f64,
    /// also perturb the velocity field
    #[serde(default)]
    pub on_velocity: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_width() -> f64 {
    1.0
}

impl Perturbation {
    pub fn gaussian(amplitude: f64) -> Self {
        Self {
            shape: PerturbShape::Gaussian,
            amplitude,
            width: 1.0,
            center: 0.0,
            on_velocity: false,
            seed: 0,
        }
    }

    pub fn none() -> Self {
        Self::gaussian(0.0)
    }

    /// Nodal values of the perturbation; deterministic given the seed.
    pub fn sample(&self, grid: Grid1D) -> Vec<f64> {
        match self.shape {
            PerturbShape::None => vec![0.0; grid.n_cells],
            PerturbShape::Gaussian => grid
                .nodes()
                .map(|x| {
                    let s = (x - self.center) / self.width;
                    self.amplitude * (-s * s).exp()
                })
                .collect(),
            PerturbShape::RandomBumps { count } => {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(self.seed);
                let mut bumps = Vec::with_capacity(count);
                for _ in 0..count {
                    let center = self.center + rng.gen_range(-10.0 * self.width..10.0 * self.width);
                    let width = rng.gen_range(0.5 * self.width..2.0 * self.width);
                    let amp = rng.gen_range(-self.amplitude..=self.amplitude);
                    bumps.push((center, width, amp));
                }
                grid.nodes()
                    .map(|x| {
                        bumps
                            .iter()
                            .map(|(c, w, a)| {
                                let s = (x - c) / w;
                                a * (-s * s).exp()
                            })
                            .sum()
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: ModelConfig,
    pub grid: GridSpec,
    pub t_final: f64,
    #[serde(default = "default_cfl")]
    pub cfl_number: f64,
    #[serde(default = "default_theta")]
    pub viscous_theta: f64,
    /// time interval between diagnostic snapshots
    #[serde(default = "default_stride")]
    pub output_stride: f64,
    pub perturbation: Perturbation,
    /// times at which full states are kept; empty means {0, t_final}
    #[serde(default)]
    pub dump_times: Vec<f64>,
}

fn default_cfl() -> f64 {
    0.4
}

fn default_theta() -> f64 {
    0.5
}

fn default_stride() -> f64 {
    1.0
}

/// Acceptable relative mismatch between profile and pinned far-field data at
/// the domain boundaries.
const BOUNDARY_TOL: f64 = 1e-4;

pub struct FarField {
    pub n_minus: f64,
    pub n_plus: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub phi_minus: f64,
    pub phi_plus: f64,
}

impl SimConfig {
    pub fn new(model: ModelConfig, grid: GridSpec, t_final: f64, perturbation: Perturbation) -> Self {
        Self {
            model,
            grid,
            t_final,
            cfl_number: default_cfl(),
            viscous_theta: default_theta(),
            output_stride: default_stride(),
            perturbation,
            dump_times: Vec::new(),
        }
    }

    pub fn resolve_grid(&self) -> Result<Grid1D> {
        let c = self.model.sound_speed();
        let w_plus = self.model.u_plus() + c;
        let x_min = self.grid.x_min.unwrap_or(-self.grid.half_width);
        let x_max = self.grid.x_max.unwrap_or_else(|| {
            self.grid.half_width + w_plus * (self.t_final + 1.0) + self.grid.fan_margin
        });
        Grid1D::with_spacing(x_min, x_max, self.grid.dx)
    }

    /// Full validation: parameters, scheme knobs, and fan containment (the
    /// profile must still match the pinned far-field constants at both
    /// boundaries at t = 0 and t = t_final).
    pub fn validate(&self) -> Result<Grid1D> {
        self.model.validate()?;
        if !(self.t_final >= 0.0) {
            return Err(Error::Validation(format!("t_final = {} negative", self.t_final)));
        }
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return Err(Error::Validation(format!(
                "cfl_number = {} outside (0, 1]",
                self.cfl_number
            )));
        }
        if !(self.viscous_theta >= 0.5 && self.viscous_theta <= 1.0) {
            return Err(Error::Validation(format!(
                "viscous_theta = {} outside [0.5, 1]",
                self.viscous_theta
            )));
        }
        if !(self.output_stride > 0.0) {
            return Err(Error::Validation("output_stride must be positive".into()));
        }
        if !(self.perturbation.amplitude >= 0.0) {
            return Err(Error::Validation("perturbation amplitude must be nonnegative".into()));
        }
        let grid = self.resolve_grid()?;

        let ff = self.model.far_field();
        let scale = BOUNDARY_TOL * self.model.wave_strength();
        for t in [0.0, self.t_final] {
            let prof = self.model.profile(t, grid)?;
            let last = grid.n_cells - 1;
            let checks = [
                (prof.nr.values()[0], ff.n_minus, "n at x_min"),
                (prof.nr.values()[last], ff.n_plus, "n at x_max"),
                (prof.ur.values()[0], ff.u_minus, "u at x_min"),
                (prof.ur.values()[last], ff.u_plus, "u at x_max"),
            ];
            for (got, want, what) in checks {
                if (got - want).abs() > scale {
                    return Err(Error::Validation(format!(
                        "domain too small: fan reaches the boundary by t = {t} \
                         ({what}: profile {got:.6} vs far-field {want:.6}); \
                         widen the grid or shorten the run"
                    )));
                }
            }
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone)]
pub enum SimState {
    One(FluidState),
    Two(TwoFluidState),
}

impl SimState {
    pub fn time(&self) -> f64 {
        match self {
            SimState::One(s) => s.time,
            SimState::Two(s) => s.time,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StateDump {
    pub time: f64,
    pub state: SimState,
}

/// Result of a run: diagnostic snapshots plus optional full-state dumps.
#[derive(Debug)]
pub struct Trajectory {
    pub grid: Grid1D,
    pub reports: Vec<EnergyReport>,
    pub dumps: Vec<StateDump>,
    pub steps: usize,
    /// max over outputs of |interior mass - initial - accumulated boundary
    /// flux| / (initial mass * max(1, t))
    pub max_mass_balance_error: f64,
    /// max over outputs of the interior residual of the discrete Poisson
    /// equation
    pub max_poisson_identity_gap: f64,
    pub final_state: SimState,
}

/// Mass in the interior nodes (the pinned boundary nodes are excluded so the
/// balance against the accumulated boundary flux telescopes exactly).
pub fn interior_mass(n: &Field) -> f64 {
    let v = n.values();
    n.grid().dx * kahan_sum(v[1..v.len() - 1].iter().copied())
}

fn poisson_gap_onefluid(state: &FluidState) -> f64 {
    let phi = state.phi.values();
    let n = state.n.values();
    poisson::poisson_boltzmann_residual(phi, n, state.n.grid().dx)
}

fn poisson_gap_twofluid(state: &TwoFluidState) -> f64 {
    let phi = state.phi.values();
    let inv_dx2 = 1.0 / (state.phi.grid().dx * state.phi.grid().dx);
    let (ni, ne) = (state.n_ion.values(), state.n_electron.values());
    let mut worst: f64 = 0.0;
    for i in 1..phi.len() - 1 {
        let lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_dx2;
        worst = worst.max((lap - (ni[i] - ne[i])).abs());
    }
    worst
}

/// Numerical definiteness check of the combined Lyapunov functional on
/// random smooth perturbations of the profile; run once at startup.
fn definiteness_self_check(config: &SimConfig, grid: Grid1D) -> Result<()> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD1A6);
    let trials = 8;
    let profile = self_check_profile(config, grid)?;

    for trial in 0..trials {
        let bump = |rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            let k = 4;
            let mut centers = Vec::with_capacity(k);
            for _ in 0..k {
                centers.push((
                    rng.gen_range(-0.4 * grid.x_max.abs()..0.4 * grid.x_max.abs()),
                    rng.gen_range(0.5..3.0),
                    rng.gen_range(-1.0..1.0),
                ));
            }
            grid.nodes()
                .map(|x| {
                    0.02 * centers
                        .iter()
                        .map(|(c, w, a)| a * (-((x - c) / w).powi(2)).exp())
                        .sum::<f64>()
                })
                .collect()
        };
        let dn = bump(&mut rng);
        let du = bump(&mut rng);

        match &config.model {
            ModelConfig::OneFluid(p) => {
                let n = Field::new(grid, add_pinned(profile.nr.values(), &dn))?;
                let u = Field::new(grid, add_pinned(profile.ur.values(), &du))?;
                let phi =
                    poisson::solve_poisson_boltzmann(&n, p.phi_minus(), p.phi_plus(), None)?.phi;
                let state = FluidState { time: 0.0, n, u, phi };
                let zero = zero_order_energy(&state, &profile, p)?;
                let first = first_order_energy(&state, &profile)?;
                let combined = lyapunov_weight(p.n_minus) * zero.total() + first.total();
                let h1 = h1_norms(&state.n, &profile.nr)? + h1_norms(&state.u, &profile.ur)?;
                let lambda = 0.02 * p.a_temp.min(1.0) * p.n_minus.min(1.0);
                if combined < lambda * h1 {
                    return Err(Error::Validation(format!(
                        "Lyapunov positivity self-check failed on trial {trial}: \
                         combined = {combined:.3e} < {:.3e}",
                        lambda * h1
                    )));
                }
            }
            ModelConfig::TwoFluid(p) => {
                let ni = Field::new(grid, add_pinned(profile.nr.values(), &dn))?;
                let ui = Field::new(grid, add_pinned(profile.ur.values(), &du))?;
                let dn2 = bump(&mut rng);
                let du2 = bump(&mut rng);
                let ne = Field::new(grid, add_pinned(profile.nr.values(), &dn2))?;
                let ue = Field::new(grid, add_pinned(profile.ur.values(), &du2))?;
                let rhs = ni.zip_map(&ne, |a, b| a - b)?;
                let phi = poisson::solve_poisson_linear(&rhs, p.phi_minus(), p.phi_plus())?.phi;
                let state = TwoFluidState {
                    time: 0.0,
                    n_ion: ni,
                    u_ion: ui,
                    n_electron: ne,
                    u_electron: ue,
                    phi,
                };
                let e = twofluid_energy(&state, &profile, p, TwoFluidWeights::default_for(p))?;
                let h1 = h1_norms(&state.n_ion, &profile.nr)?
                    + h1_norms(&state.u_ion, &profile.ur)?
                    + h1_norms(&state.n_electron, &profile.nr)?
                    + h1_norms(&state.u_electron, &profile.ur)?;
                let lambda = 0.02
                    * p.t_ion.min(p.t_electron).min(1.0)
                    * p.n_minus.min(1.0)
                    * p.m_ion.min(p.m_electron).min(1.0);
                if e.combined() < lambda * h1 {
                    return Err(Error::Validation(format!(
                        "Lyapunov positivity self-check failed on trial {trial}: \
                         combined = {:.3e} < {:.3e}",
                        e.combined(),
                        lambda * h1
                    )));
                }
            }
        }
    }
    Ok(())
}

fn self_check_profile(config: &SimConfig, grid: Grid1D) -> Result<RarefactionProfile> {
    config.model.profile(0.0, grid)
}

fn add_pinned(base: &[f64], bump: &[f64]) -> Vec<f64> {
    let n = base.len();
    let mut out: Vec<f64> = base.iter().zip(bump).map(|(a, b)| a + b).collect();
    out[0] = base[0];
    out[n - 1] = base[n - 1];
    out
}

fn h1_norms(f: &Field, reference: &Field) -> Result<f64> {
    let tilde = f.zip_map(reference, |a, b| a - b)?;
    let d = tilde.ddx()?;
    Ok(tilde.inner(&tilde)? + d.inner(&d)?)
}

/// March a configuration from t = 0 to t_final, recording diagnostics every
/// `output_stride` and full states at the configured dump times.
/// Deterministic: identical configs produce identical trajectories.
pub fn run_simulation(config: &SimConfig) -> Result<Trajectory> {
    let grid = config.validate()?;
    definiteness_self_check(config, grid)?;

    let mut dump_times = if config.dump_times.is_empty() {
        vec![0.0, config.t_final]
    } else {
        config.dump_times.clone()
    };
    dump_times.retain(|t| *t >= 0.0 && *t <= config.t_final);

    // merged, sorted, deduplicated output schedule
    let mut targets: Vec<f64> = Vec::new();
    let mut t = 0.0;
    while t < config.t_final {
        targets.push(t);
        t += config.output_stride;
    }
    targets.push(config.t_final);
    targets.extend(dump_times.iter().copied());
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap());
    targets.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

    match &config.model {
        ModelConfig::OneFluid(p) => run_onefluid(config, p, grid, &targets, &dump_times),
        ModelConfig::TwoFluid(p) => run_twofluid(config, p, grid, &targets, &dump_times),
    }
}

fn is_dump_time(t: f64, dump_times: &[f64]) -> bool {
    dump_times.iter().any(|d| (d - t).abs() < 1e-12)
}

fn run_onefluid(
    config: &SimConfig,
    params: &PhysParamsOne,
    grid: Grid1D,
    targets: &[f64],
    dump_times: &[f64],
) -> Result<Trajectory> {
    let mut state = initial_state_onefluid(params, &config.perturbation, grid)?;
    let mass0 = interior_mass(&state.n);
    let mut flux_integral = 0.0;
    let mut steps = 0usize;
    let mut reports = Vec::new();
    let mut dumps = Vec::new();
    let mut max_mass_err: f64 = 0.0;
    let mut max_gap: f64 = 0.0;

    for (k, &target) in targets.iter().enumerate() {
        if k > 0 {
            while state.time < target - 1e-12 {
                let dt = cfl_dt_onefluid(&state, params, config.cfl_number)
                    .min(target - state.time);
                let info = step_onefluid(&mut state, params, dt, config.viscous_theta)?;
                flux_integral += dt * (info.mass_flux_left - info.mass_flux_right);
                steps += 1;
            }
            state.time = target;
        }
        let profile = profile_onefluid(params, target, grid)?;
        reports.push(energy_report_onefluid(&state, &profile, params)?);
        let mass_err =
            ((interior_mass(&state.n) - mass0 - flux_integral) / mass0).abs() / target.max(1.0);
        max_mass_err = max_mass_err.max(mass_err);
        max_gap = max_gap.max(poisson_gap_onefluid(&state));
        if is_dump_time(target, dump_times) {
            dumps.push(StateDump { time: target, state: SimState::One(state.clone()) });
        }
        log::debug!(
            "t = {target:.3}: sup_n = {:.3e}, lyapunov = {:.6e}",
            reports.last().unwrap().sup_n,
            reports.last().unwrap().lyapunov
        );
    }

    Ok(Trajectory {
        grid,
        reports,
        dumps,
        steps,
        max_mass_balance_error: max_mass_err,
        max_poisson_identity_gap: max_gap,
        final_state: SimState::One(state),
    })
}

fn run_twofluid(
    config: &SimConfig,
    params: &PhysParamsTwo,
    grid: Grid1D,
    targets: &[f64],
    dump_times: &[f64],
) -> Result<Trajectory> {
    let mut state = initial_state_twofluid(params, &config.perturbation, grid)?;
    let mass0_i = interior_mass(&state.n_ion);
    let mass0_e = interior_mass(&state.n_electron);
    let mut flux_i = 0.0;
    let mut flux_e = 0.0;
    let mut steps = 0usize;
    let mut reports = Vec::new();
    let mut dumps = Vec::new();
    let mut max_mass_err: f64 = 0.0;
    let mut max_gap: f64 = 0.0;

    for (k, &target) in targets.iter().enumerate() {
        if k > 0 {
            while state.time < target - 1e-12 {
                let dt = cfl_dt_twofluid(&state, params, config.cfl_number)
                    .min(target - state.time);
                let info = step_twofluid(&mut state, params, dt, config.viscous_theta)?;
                flux_i += dt * (info.ion_flux_left - info.ion_flux_right);
                flux_e += dt * (info.electron_flux_left - info.electron_flux_right);
                steps += 1;
            }
            state.time = target;
        }
        let profile = profile_twofluid(params, target, grid)?;
        reports.push(energy_report_twofluid(&state, &profile, params)?);
        let err_i = ((interior_mass(&state.n_ion) - mass0_i - flux_i) / mass0_i).abs();
        let err_e = ((interior_mass(&state.n_electron) - mass0_e - flux_e) / mass0_e).abs();
        max_mass_err = max_mass_err.max(err_i.max(err_e) / target.max(1.0));
        max_gap = max_gap.max(poisson_gap_twofluid(&state));
        if is_dump_time(target, dump_times) {
            dumps.push(StateDump { time: target, state: SimState::Two(state.clone()) });
        }
    }

    Ok(Trajectory {
        grid,
        reports,
        dumps,
        steps,
        max_mass_balance_error: max_mass_err,
        max_poisson_identity_gap: max_gap,
        final_state: SimState::Two(state),
    })
}

// ---- shared stencil machinery -------------------------------------------

/// Safety multiplier on the dx^2 branch of the time-step bound; explicit
/// source terms are mild, so the acoustic CFL dominates on any practical
/// grid.
pub(crate) const EXPLICIT_SAFETY: f64 = 10.0;

/// Fourth-difference dissipation constant on the continuity flux.
pub(crate) const K4_DISSIPATION: f64 = 0.02;

/// Conservative continuity RHS `-(d/dx)(n u)` in face-flux form with JST
/// fourth-difference dissipation on faces with a full stencil. Returns the
/// RHS (zero on the pinned boundary rows) plus the two outermost interior
/// face fluxes, whose difference is exactly the interior mass drain.
pub(crate) fn continuity_rhs(n: &[f64], u: &[f64], dx: f64, k4: f64) -> (Vec<f64>, f64, f64) {
    let nn = n.len();
    let mut face = vec![0.0; nn - 1];
    for i in 0..nn - 1 {
        face[i] = 0.5 * (n[i] * u[i] + n[i + 1] * u[i + 1]);
    }
    for i in 1..nn - 2 {
        face[i] += k4 * (n[i + 2] - 3.0 * n[i + 1] + 3.0 * n[i] - n[i - 1]);
    }
    let mut rhs = vec![0.0; nn];
    for i in 1..nn - 1 {
        rhs[i] = -(face[i] - face[i - 1]) / dx;
    }
    (rhs, face[0], face[nn - 2])
}

/// theta-implicit viscous update: solves
/// `(I - dt theta diag(coef_new) D2) u_new = u_old + dt explicit + dt (1-theta) coef_old D2 u_old`
/// with the boundary rows pinned to the far-field velocities.
pub(crate) fn viscous_theta_solve(
    u_old: &[f64],
    explicit: &[f64],
    coef_new: &[f64],
    coef_old: &[f64],
    dt: f64,
    theta: f64,
    dx: f64,
    u_bc: (f64, f64),
) -> Result<Vec<f64>> {
    let nn = u_old.len();
    let inv_dx2 = 1.0 / (dx * dx);
    let mut lower = vec![0.0; nn - 1];
    let mut upper = vec![0.0; nn - 1];
    let mut diag = vec![1.0; nn];
    let mut rhs = vec![0.0; nn];

    for i in 1..nn - 1 {
        let a = dt * theta * coef_new[i] * inv_dx2;
        lower[i - 1] = -a;
        diag[i] = 1.0 + 2.0 * a;
        upper[i] = -a;
        let lap_old = (u_old[i + 1] - 2.0 * u_old[i] + u_old[i - 1]) * inv_dx2;
        rhs[i] = u_old[i] + dt * explicit[i] + dt * (1.0 - theta) * coef_old[i] * lap_old;
    }
    upper[0] = 0.0;
    lower[nn - 2] = 0.0;
    rhs[0] = u_bc.0;
    rhs[nn - 1] = u_bc.1;

    poisson::tridiag_solve(&lower, &diag, &upper, &rhs)
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

pub(crate) fn check_positive(n: &[f64], time: f64) -> Result<()> {
    for (i, v) in n.iter().enumerate() {
        if !(*v > 0.0) {
            return Err(Error::PositivityLoss { time, node: i, value: *v });
        }
    }
    Ok(())
}
