//! The acceptance suite: each function runs one verification scenario at
//! pinned tolerances and reports one pass/fail line per sub-check. The
//! `acceptance` integration test and the `check` CLI subcommand both drive
//! these.

use crate::diagnostics::psi_potential;
use crate::field::Field;
use crate::grid::Grid1D;
use crate::linear::{
    fitted_decay_rate, greens_matrix, linearized_consistency, mat2_apply, mat2_mul,
    mode_energy, CoeffMode, ConsistencyConfig, SpectralMode,
};
use crate::params::{PhysParamsOne, PhysParamsTwo};
use crate::poisson::{solve_poisson_boltzmann, solve_poisson_linear};
use crate::rarewave::{
    profile_onefluid, verify_decay_rates, BurgersWave,
};
use crate::sim::{
    cfl_dt_onefluid, cfl_dt_twofluid, initial_state_twofluid, run_simulation, GridSpec,
    ModelConfig, Perturbation, SimConfig,
};
use crate::Result;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        Self { name, lines: Vec::new() }
    }

    fn push(&mut self, label: &str, passed: bool, detail: String) {
        self.lines.push(CheckLine { label: label.to_string(), passed, detail });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            let status = if line.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("[{status}] {} :: {} ({})\n", self.name, line.label, line.detail));
        }
        out
    }
}

fn standard_params() -> PhysParamsOne {
    PhysParamsOne::new(1.0, 1.0, 2.0, 0.0, 0.1).expect("valid standard parameters")
}

/// Profile gradient decay rates and the analytic envelope.
pub fn profile_rates() -> Result<CheckReport> {
    let started = Instant::now();
    let mut report = CheckReport::new("profile_rates");
    let params = standard_params();
    let wave = crate::rarewave::wave_onefluid(&params)?;
    let delta_r = params.wave_strength();
    let times: Vec<f64> = (0..25).map(|k| 10.0 * 100.0f64.powf(k as f64 / 24.0)).collect();

    for (p, lo, hi) in [
        (f64::INFINITY, -1.1, -0.9),
        (2.0, -0.6, -0.4),
        (1.0, -0.1, 0.05),
    ] {
        let fit = verify_decay_rates(&wave, p, &times)?;
        let label = if p.is_infinite() { "slope p=inf".into() } else { format!("slope p={p}") };
        report.push(
            &label,
            fit.slope >= lo && fit.slope <= hi,
            format!("fitted {:.4}, required [{lo}, {hi}]", fit.slope),
        );
        if p.is_infinite() {
            let mut worst_margin = f64::INFINITY;
            let mut ok = true;
            for (t, norm) in &fit.samples {
                let bound = (2.0 * delta_r * params.eps_smooth).min(2.0 / t);
                ok &= *norm <= bound;
                worst_margin = worst_margin.min(bound - norm);
            }
            report.push(
                "sup-norm envelope min(2 delta_r eps, 2/t)",
                ok,
                format!("smallest margin {worst_margin:.3e}"),
            );
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    report.push("runtime < 10 s", elapsed < 10.0, format!("{elapsed:.2} s"));
    Ok(report)
}

/// Exactness of the constructed profile: Riemann invariant, PDE residual,
/// large-time approach to the sharp fan.
pub fn profile_exactness() -> Result<CheckReport> {
    let mut report = CheckReport::new("profile_exactness");
    let params = standard_params();
    let c = params.sound_speed();
    let riem0 = params.u_minus - c * params.n_minus.ln();

    let grid = Grid1D::with_spacing(-60.0, 120.0, 0.05)?;
    let mut worst_riem: f64 = 0.0;
    for t in [0.0, 1.0, 10.0, 100.0] {
        let prof = profile_onefluid(&params, t, grid)?;
        for i in 0..grid.n_cells {
            let riem = prof.ur.values()[i] - c * prof.nr.values()[i].ln();
            worst_riem = worst_riem.max((riem - riem0).abs() / riem0.abs().max(1.0));
        }
    }
    report.push(
        "Riemann invariant constancy <= 1e-12 relative",
        worst_riem <= 1e-12,
        format!("worst {worst_riem:.3e}"),
    );

    // residual of the quasineutral Euler system with analytic x-derivatives
    let dt = 1e-4;
    let mut worst_res: f64 = 0.0;
    for t in [1.0, 5.0] {
        let before = profile_onefluid(&params, t - dt, grid)?;
        let after = profile_onefluid(&params, t + dt, grid)?;
        let now = profile_onefluid(&params, t, grid)?;
        let c2 = params.a_temp + 1.0;
        for i in 0..grid.n_cells {
            let nt = (after.nr.values()[i] - before.nr.values()[i]) / (2.0 * dt);
            let cont = nt
                + now.dnr.values()[i] * now.ur.values()[i]
                + now.nr.values()[i] * now.dur.values()[i];
            let ut = (after.ur.values()[i] - before.ur.values()[i]) / (2.0 * dt);
            let mom = now.nr.values()[i] * (ut + now.ur.values()[i] * now.dur.values()[i])
                + c2 * now.dnr.values()[i];
            worst_res = worst_res.max(cont.abs().max(mom.abs()));
        }
    }
    report.push(
        "quasineutral Euler residual <= 1e-6",
        worst_res <= 1e-6,
        format!("worst {worst_res:.3e}"),
    );

    // finite-time approach to the self-similar fan
    let fan_wave = BurgersWave::new(0.0, 1.0, 0.1)?;
    let t = 1000.0;
    let mut sup: f64 = 0.0;
    let mut x = -200.0;
    while x <= t + 200.0 {
        let gap = (fan_wave.value(t, x)? - fan_wave.riemann_fan(t, x)?).abs();
        sup = sup.max(gap);
        x += 0.5;
    }
    report.push("sup|w(1000) - fan| <= 0.02", sup <= 0.02, format!("sup {sup:.4}"));
    Ok(report)
}

/// Elliptic solver quality: manufactured solution, Newton quadratic
/// certificate, equilibrium fixed point.
pub fn elliptic_solver() -> Result<CheckReport> {
    let mut report = CheckReport::new("elliptic_solver");

    let grid = Grid1D::with_spacing(-8.0, 8.0, 0.005)?;
    let phi_star = Field::from_fn(grid, f64::tanh);
    let n = phi_star.d2dx2()?.zip_map(&phi_star.map(|p| (-p).exp()), |a, b| a + b)?;
    let cold = Field::zeros(grid);
    let solve =
        solve_poisson_boltzmann(&n, (-8.0f64).tanh(), (8.0f64).tanh(), Some(&cold))?;
    let max_err = grid
        .nodes()
        .zip(solve.phi.values())
        .map(|(x, v)| (v - x.tanh()).abs())
        .fold(0.0f64, f64::max);
    report.push(
        "manufactured tanh recovery <= 1e-8 at dx = 0.005",
        solve.converged && max_err <= 1e-8,
        format!("max error {max_err:.3e}, {} iterations", solve.iterations),
    );

    let floor = 1e3 * solve.residual_history.last().copied().unwrap_or(1e-14).max(1e-14);
    let meaningful: Vec<f64> =
        solve.residual_history.iter().copied().filter(|r| *r > floor).collect();
    let quad_ok = if meaningful.len() >= 3 {
        let k = meaningful.len();
        let (r0, r1, r2) = (meaningful[k - 3], meaningful[k - 2], meaningful[k - 1]);
        r2 <= 10.0 * 0.5 * r1 * r1 / r0
    } else {
        false
    };
    report.push(
        "quadratic Newton certificate on final three residuals",
        quad_ok,
        format!("history {:?}", solve.residual_history),
    );

    let eq_grid = Grid1D::with_spacing(-10.0, 10.0, 0.01)?;
    let eq = solve_poisson_boltzmann(&Field::constant(eq_grid, 1.0), 0.0, 0.0, None)?;
    report.push(
        "constant equilibrium fixed point <= 1e-13",
        eq.phi.max_abs() <= 1e-13,
        format!("sup|phi| = {:.3e}", eq.phi.max_abs()),
    );
    Ok(report)
}

fn stability_config_onefluid() -> SimConfig {
    let params = standard_params();
    let mut config = SimConfig::new(
        ModelConfig::OneFluid(params),
        GridSpec::new(60.0, 0.05),
        200.0,
        Perturbation::gaussian(0.05),
    );
    config.output_stride = 1.0;
    config.dump_times = vec![];
    config
}

fn report_at(reports: &[crate::diagnostics::EnergyReport], t: f64) -> &crate::diagnostics::EnergyReport {
    reports
        .iter()
        .min_by(|a, b| {
            (a.time - t).abs().partial_cmp(&(b.time - t).abs()).unwrap()
        })
        .expect("nonempty reports")
}

/// Long one-fluid run against the profile: sup-distance decay, quasineutral
/// relaxation, Lyapunov envelope, dissipation integrability.
///
/// The decay sub-checks compare the perturbed run against the smooth
/// profile directly. A zero-amplitude reference run is evaluated alongside
/// so the reported numbers separate the perturbation response from the
/// profile's own approximation error (viscous corner layers at the fan
/// edges), which these parameters do not send below its plateau within
/// t = 200.
pub fn onefluid_stability() -> Result<CheckReport> {
    let mut report = CheckReport::new("onefluid_stability");
    let config = stability_config_onefluid();
    let traj = run_simulation(&config)?;
    let reports = &traj.reports;

    let mut baseline_config = config.clone();
    baseline_config.perturbation = Perturbation::none();
    let baseline = run_simulation(&baseline_config)?;

    let early = report_at(reports, 20.0);
    let late = report_at(reports, 200.0);
    let base_early = report_at(&baseline.reports, 20.0);
    let base_late = report_at(&baseline.reports, 200.0);
    report.push(
        "sup|n - n_r| halves between t=20 and t=200",
        late.sup_n <= 0.5 * early.sup_n,
        format!(
            "{:.4e} -> {:.4e} (zero-amplitude reference {:.4e} -> {:.4e})",
            early.sup_n, late.sup_n, base_early.sup_n, base_late.sup_n
        ),
    );
    report.push(
        "sup|phi + ln n| halves between t=20 and t=200",
        late.quasineutral_gap <= 0.5 * early.quasineutral_gap,
        format!(
            "{:.4e} -> {:.4e} (zero-amplitude reference {:.4e} -> {:.4e})",
            early.quasineutral_gap,
            late.quasineutral_gap,
            base_early.quasineutral_gap,
            base_late.quasineutral_gap
        ),
    );

    // non-increasing envelope with 5% slack after the transient
    let mut running_min = f64::INFINITY;
    let mut envelope_ok = true;
    let mut worst_ratio: f64 = 0.0;
    for r in reports.iter().filter(|r| r.time >= 5.0) {
        if running_min.is_finite() {
            let ratio = r.lyapunov / running_min;
            worst_ratio = worst_ratio.max(ratio);
            envelope_ok &= ratio <= 1.05;
        }
        running_min = running_min.min(r.lyapunov);
    }
    report.push(
        "Lyapunov envelope non-increasing within 5% after t=5",
        envelope_ok,
        format!("worst growth over running min: {worst_ratio:.4}"),
    );

    // time-integrated flat dissipation: the tail must carry less than the
    // first half
    let half = config.t_final / 2.0;
    let mut first_half = 0.0;
    let mut second_half = 0.0;
    for pair in reports.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let contribution = 0.5 * (a.d_flat + b.d_flat) * (b.time - a.time);
        if b.time <= half {
            first_half += contribution;
        } else {
            second_half += contribution;
        }
    }
    report.push(
        "time-integrated flat dissipation converges",
        second_half < first_half,
        format!("first half {first_half:.4e}, second half {second_half:.4e}"),
    );

    report.push(
        "discrete mass balance <= 1e-10",
        traj.max_mass_balance_error <= 1e-10,
        format!("worst {:.3e}", traj.max_mass_balance_error),
    );
    Ok(report)
}

/// Two-fluid run with distinct masses plus the exact species-symmetry test.
pub fn twofluid_stability() -> Result<CheckReport> {
    let mut report = CheckReport::new("twofluid_stability");
    let params = PhysParamsTwo::new(2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1)?;
    let mut config = SimConfig::new(
        ModelConfig::TwoFluid(params),
        GridSpec::new(60.0, 0.05),
        200.0,
        Perturbation::gaussian(0.05),
    );
    config.output_stride = 1.0;
    let traj = run_simulation(&config)?;
    let reports = &traj.reports;

    let late = report_at(reports, 200.0);
    let peak_gap = reports
        .iter()
        .filter(|r| r.time >= 5.0)
        .map(|r| r.quasineutral_gap)
        .fold(0.0f64, f64::max);
    report.push(
        "sup|u_i - u_e| halves from post-transient peak",
        late.quasineutral_gap <= 0.5 * peak_gap,
        format!("peak {:.4e} -> final {:.4e}", peak_gap, late.quasineutral_gap),
    );

    let peak_phi = reports
        .iter()
        .filter(|r| r.time >= 5.0)
        .map(|r| r.sup_phi)
        .fold(0.0f64, f64::max);
    report.push(
        "sup|d/dx(phi - phi_r)| halves from post-transient peak",
        late.sup_phi <= 0.5 * peak_phi,
        format!("peak {:.4e} -> final {:.4e}", peak_phi, late.sup_phi),
    );

    let quad_ok = reports.iter().all(|r| r.quad_form.unwrap_or(f64::NAN) >= 0.0);
    let quad_min = reports
        .iter()
        .filter_map(|r| r.quad_form)
        .fold(f64::INFINITY, f64::min);
    report.push(
        "quad form nonnegative at every output",
        quad_ok,
        format!("minimum {quad_min:.3e}"),
    );

    // exact species symmetry under symmetric parameters
    let sym = PhysParamsTwo::new(1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1)?;
    let sym_grid = {
        let mut cfg = SimConfig::new(
            ModelConfig::TwoFluid(sym),
            GridSpec::new(60.0, 0.1),
            240.0,
            Perturbation::gaussian(0.05),
        );
        cfg.grid.fan_margin = 80.0;
        cfg.validate()?
    };
    let mut state = initial_state_twofluid(&sym, &Perturbation::gaussian(0.05), sym_grid)?;
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let dt = cfl_dt_twofluid(&state, &sym, 0.4);
        crate::sim::step_twofluid(&mut state, &sym, dt, 0.5)?;
        if !state.time.is_finite() {
            break;
        }
    }
    for i in 0..sym_grid.n_cells {
        worst = worst
            .max((state.n_ion.values()[i] - state.n_electron.values()[i]).abs())
            .max((state.u_ion.values()[i] - state.u_electron.values()[i]).abs());
    }
    report.push(
        "species symmetry preserved to 1e-12 over 10^4 steps",
        worst <= 1e-12,
        format!("worst gap {worst:.3e} at t = {:.1}", state.time),
    );
    Ok(report)
}

/// Spectral-side identities and rates.
pub fn linear_modes() -> Result<CheckReport> {
    let started = Instant::now();
    let mut report = CheckReport::new("linear_modes");

    let mut vieta_worst: f64 = 0.0;
    let mut proj_worst: f64 = 0.0;
    let mut xi = -100.0;
    while xi <= 100.0 {
        for mode in [CoeffMode::Consistent, CoeffMode::Literal] {
            let m = SpectralMode::new(xi, 1.0, 1.0, mode)?;
            let xi2 = xi * xi;
            let sum = m.lambda_plus + m.lambda_minus;
            let prod = m.lambda_plus * m.lambda_minus;
            let scale = xi2.max(1.0);
            vieta_worst = vieta_worst
                .max((sum + Complex64::new(xi2, 0.0)).norm() / scale)
                .max((prod - Complex64::new(xi2 * m.sigma, 0.0)).norm() / (xi2 * m.sigma).max(1.0));
            if !m.degenerate {
                let (pp, pm) = (m.p_plus.unwrap(), m.p_minus.unwrap());
                for i in 0..2 {
                    for j in 0..2 {
                        let id = if i == j { 1.0 } else { 0.0 };
                        proj_worst = proj_worst.max((pp[i][j] + pm[i][j] - id).norm());
                    }
                }
                let idem = mat2_mul(&pp, &pp);
                for i in 0..2 {
                    for j in 0..2 {
                        proj_worst = proj_worst.max((idem[i][j] - pp[i][j]).norm());
                    }
                }
            }
        }
        xi += 0.5;
    }
    report.push("Vieta identities <= 1e-12", vieta_worst <= 1e-12, format!("worst {vieta_worst:.3e}"));
    report.push("projection algebra <= 1e-10", proj_worst <= 1e-10, format!("worst {proj_worst:.3e}"));

    let m1 = SpectralMode::new(1.7, 1.0, 1.0, CoeffMode::Consistent)?;
    let g0 = greens_matrix(&m1, 0.0)?;
    let exact_identity = (0..2).all(|i| {
        (0..2).all(|j| g0[i][j] == Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    });
    report.push("G(0) = I exactly", exact_identity, format!("{g0:?}"));

    let mut semi_worst: f64 = 0.0;
    for (t, s) in [(0.3, 1.1), (2.0, 2.5), (4.9, 0.05), (5.0, 5.0)] {
        for xi in [0.2, 1.0, 6.0] {
            let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent)?;
            let gts = greens_matrix(&m, t + s)?;
            let prod = mat2_mul(&greens_matrix(&m, t)?, &greens_matrix(&m, s)?);
            for i in 0..2 {
                for j in 0..2 {
                    semi_worst = semi_worst.max((gts[i][j] - prod[i][j]).norm());
                }
            }
        }
    }
    report.push("semigroup property <= 1e-10", semi_worst <= 1e-10, format!("worst {semi_worst:.3e}"));

    // energy identity along the exact propagator
    let mut identity_worst: f64 = 0.0;
    let init = (Complex64::new(1.0, 0.3), Complex64::new(-0.2, 0.5));
    for xi in [0.3, 1.0, 4.0] {
        let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent)?;
        let h = 1e-5;
        for t in [0.2, 1.0, 3.0] {
            let e_at = |tt: f64| -> Result<f64> {
                let (n, u) = mat2_apply(&greens_matrix(&m, tt)?, init);
                Ok(mode_energy(n, u, &m, 0.0)?.e)
            };
            let dedt = (e_at(t + h)? - e_at(t - h)?) / (2.0 * h);
            let (_, u) = mat2_apply(&greens_matrix(&m, t)?, init);
            identity_worst = identity_worst.max((dedt + 2.0 * xi * xi * u.norm_sqr()).abs());
        }
    }
    report.push(
        "mode energy identity <= 1e-8",
        identity_worst <= 1e-8,
        format!("worst {identity_worst:.3e}"),
    );

    // fitted decay rates proportional to xi^2/(1+xi^2) within factor 3
    let mut ratios = Vec::new();
    let mut rates_positive = true;
    for xi in [0.1, 1.0, 10.0] {
        let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent)?;
        let rate = fitted_decay_rate(&m, 0.05, init, 400)?;
        rates_positive &= rate > 0.0;
        ratios.push(rate / (xi * xi / (1.0 + xi * xi)));
    }
    let spread = ratios.iter().cloned().fold(0.0f64, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    report.push(
        "decay rate proportional to xi^2/(1+xi^2) within factor 3",
        rates_positive && spread <= 3.0,
        format!("normalized rates {ratios:?}, spread {spread:.3}"),
    );

    let small = SpectralMode::new(1.0, 1e-6, 1.0, CoeffMode::Consistent)?;
    let limit = SpectralMode::new(1.0, 0.0, 1.0, CoeffMode::Consistent)?;
    let gs = greens_matrix(&small, 1.0)?;
    let gl = greens_matrix(&limit, 1.0)?;
    let mut limit_worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            limit_worst =
                limit_worst.max((gs[i][j] - gl[i][j]).norm() / gl[i][j].norm().max(1e-30));
        }
    }
    report.push(
        "eps = 1e-6 matches the eps -> 0 closed form to 1e-4",
        limit_worst <= 1e-4,
        format!("worst relative gap {limit_worst:.3e}"),
    );

    let elapsed = started.elapsed().as_secs_f64();
    report.push("runtime < 5 s", elapsed < 5.0, format!("{elapsed:.2} s"));
    Ok(report)
}

/// Nonlinear periodic solver against the exact mode propagator.
pub fn cross_validation() -> Result<CheckReport> {
    let mut report = CheckReport::new("cross_validation");

    let cfg = ConsistencyConfig::new(256, 1e-4);
    let errors = linearized_consistency(&cfg)?;
    let worst = errors.iter().map(|e| e.rel_error).fold(0.0f64, f64::max);
    report.push(
        "per-mode relative error <= 1e-3 at amplitude 1e-4",
        worst <= 1e-3,
        format!(
            "errors {:?}",
            errors.iter().map(|e| (e.mode, e.rel_error)).collect::<Vec<_>>()
        ),
    );

    // quadratic amplitude scaling of the quadratically generated modes
    let daughter_err = |amplitude: f64| -> Result<f64> {
        let cfg = ConsistencyConfig::new(256, amplitude);
        let errors = linearized_consistency(&cfg)?;
        Ok(errors
            .iter()
            .filter(|e| e.mode != cfg.seed_mode)
            .map(|e| e.rel_error)
            .fold(0.0f64, f64::max))
    };
    let (e3, e4) = (daughter_err(1e-3)?, daughter_err(1e-4)?);
    let ratio = e3 / e4;
    report.push(
        "error scales quadratically with amplitude (ratio in [8, 12])",
        (8.0..=12.0).contains(&ratio),
        format!("errors {e4:.3e} -> {e3:.3e}, ratio {ratio:.2}"),
    );
    Ok(report)
}

/// Observed convergence order of the one-fluid scheme under refinement.
pub fn scheme_order() -> Result<CheckReport> {
    let mut report = CheckReport::new("scheme_order");
    let params = standard_params();
    let t_final = 5.0;
    let x_min = -50.0;
    let x_max = x_min + 160.0;

    let run_level = |dx: f64| -> Result<(Vec<f64>, Vec<f64>, usize)> {
        let mut config = SimConfig::new(
            ModelConfig::OneFluid(params),
            GridSpec::new(50.0, dx),
            t_final,
            Perturbation::gaussian(0.02),
        );
        config.grid.x_min = Some(x_min);
        config.grid.x_max = Some(x_max);
        config.output_stride = t_final;
        config.dump_times = vec![t_final];
        let traj = run_simulation(&config)?;
        match &traj.dumps.last().expect("final dump").state {
            crate::sim::SimState::One(s) => {
                Ok((s.n.values().to_vec(), s.u.values().to_vec(), s.n.len()))
            }
            _ => unreachable!("one-fluid run"),
        }
    };

    let (n_ref, u_ref, len_ref) = run_level(0.025)?;
    let mut deviations = Vec::new();
    for dx in [0.2, 0.1, 0.05] {
        let (n, u, len) = run_level(dx)?;
        let stride = (len_ref - 1) / (len - 1);
        let mut dev: f64 = 0.0;
        for i in 0..len {
            dev = dev
                .max((n[i] - n_ref[i * stride]).abs())
                .max((u[i] - u_ref[i * stride]).abs());
        }
        deviations.push((dx, dev));
    }
    for pair in deviations.windows(2) {
        let ((dx_c, dev_c), (dx_f, dev_f)) = (pair[0], pair[1]);
        let ratio = dev_c / dev_f;
        let order = ratio.log2();
        report.push(
            &format!("refinement {dx_c} -> {dx_f} cuts deviation by >= 3"),
            ratio >= 3.0,
            format!("{dev_c:.3e} -> {dev_f:.3e}, ratio {ratio:.2}, order {order:.2}"),
        );
    }
    Ok(report)
}

/// Independent-oracle equivalence for the closed forms.
pub fn oracle_equivalence() -> Result<CheckReport> {
    let mut report = CheckReport::new("oracle_equivalence");

    // psi closed form against adaptive Simpson quadrature of the integral
    fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi))
    }
    fn adapt(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, whole: f64, depth: usize) -> f64 {
        let mid = 0.5 * (lo + hi);
        let left = simpson(f, lo, mid);
        let right = simpson(f, mid, hi);
        if depth == 0 || (left + right - whole).abs() < 1e-14 * whole.abs().max(1e-4) {
            left + right + (left + right - whole) / 15.0
        } else {
            adapt(f, lo, mid, left, depth - 1) + adapt(f, mid, hi, right, depth - 1)
        }
    }
    let mut psi_worst: f64 = 0.0;
    let a_temp = 1.0;
    for i in 0..20 {
        for j in 0..20 {
            let n = 0.1 * 100.0f64.powf(i as f64 / 19.0);
            let nr = 0.1 * 100.0f64.powf(j as f64 / 19.0);
            let closed = psi_potential(n, nr, a_temp)?;
            let integrand = move |s: f64| a_temp * (s - nr) / (s * s);
            let oracle = adapt(&integrand, nr, n, simpson(&integrand, nr, n), 48);
            psi_worst = psi_worst.max((closed - oracle).abs() / closed.abs().max(1e-12));
        }
    }
    report.push(
        "psi closed form vs quadrature <= 1e-10 on 20x20 log grid",
        psi_worst <= 1e-10,
        format!("worst relative {psi_worst:.3e}"),
    );

    // Newton characteristic inversion against dense bisection
    let wave = BurgersWave::new(1.4142135623730951, 2.394488700309632, 0.1)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    let mut char_worst: f64 = 0.0;
    for _ in 0..100 {
        let t: f64 = rng.gen_range(0.0..1000.0);
        let x: f64 = rng.gen_range(-500.0..3000.0);
        let newton = wave.value(t, x)?;
        let mut lo = x - t * wave.w_plus - 1.0;
        let mut hi = x - t * wave.w_minus + 1.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid + t * wave.data(mid) - x > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let oracle = wave.data(0.5 * (lo + hi));
        char_worst = char_worst.max((newton - oracle).abs());
    }
    report.push(
        "characteristic solver vs dense bisection <= 1e-10 on 100 random points",
        char_worst <= 1e-10,
        format!("worst {char_worst:.3e}"),
    );
    Ok(report)
}

/// Smoke-level guard used by the CLI `check` subcommand in fast mode: the
/// small-scale variant of the two long stability runs.
pub fn stability_smoke() -> Result<CheckReport> {
    let mut report = CheckReport::new("stability_smoke");
    let params = standard_params();
    let mut config = SimConfig::new(
        ModelConfig::OneFluid(params),
        GridSpec::new(40.0, 0.1),
        20.0,
        Perturbation::gaussian(0.05),
    );
    config.output_stride = 2.0;
    let traj = run_simulation(&config)?;
    report.push(
        "one-fluid short run completes with bounded diagnostics",
        traj.reports.iter().all(|r| r.lyapunov.is_finite() && r.sup_n < 0.5),
        format!("{} steps", traj.steps),
    );
    report.push(
        "mass balance <= 1e-10",
        traj.max_mass_balance_error <= 1e-10,
        format!("worst {:.3e}", traj.max_mass_balance_error),
    );
    let _ = cfl_dt_onefluid(
        match &traj.final_state {
            crate::sim::SimState::One(s) => s,
            _ => unreachable!(),
        },
        &params,
        0.4,
    );
    let _ = solve_poisson_linear(&Field::zeros(traj.grid), 0.0, 0.0)?;
    Ok(report)
}

/// Every acceptance criterion, in order. The two long stability runs are the
/// slow entries; everything else completes in seconds.
pub fn run_all() -> Result<Vec<CheckReport>> {
    Ok(vec![
        profile_rates()?,
        profile_exactness()?,
        elliptic_solver()?,
        onefluid_stability()?,
        twofluid_stability()?,
        linear_modes()?,
        cross_validation()?,
        scheme_order()?,
        oracle_equivalence()?,
    ])
}
