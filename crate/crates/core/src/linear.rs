//! Per-mode analysis of the system linearized around the constant state
//! [n, u] = [1, 0]: coefficients a(xi), eigenvalues, spectral projections,
//! the Green's matrix, the mode energy identity, and a cross-check of the
//! nonlinear solver against the exact propagator on a periodic domain.

use crate::sim::periodic::PeriodicOneFluid;
use crate::{Error, Result};
use num_complex::Complex64;

pub type Mat2 = [[Complex64; 2]; 2];

pub const MAT2_IDENTITY: Mat2 = [
    [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
    [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mat2_apply(m: &Mat2, v: (Complex64, Complex64)) -> (Complex64, Complex64) {
    (m[0][0] * v.0 + m[0][1] * v.1, m[1][0] * v.0 + m[1][1] * v.1)
}

pub fn mat2_max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0f64, |acc, c| acc.max(c.norm()))
}

/// Which density coefficient enters the 2x2 system.
///
/// The energy identity fixes the coefficient `A + 1/a(xi)`; the matrix as
/// printed carries `a(xi)` instead. Both are available, the consistent one
/// is the default, and outputs label which is in use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMode {
    Consistent,
    Literal,
}

impl CoeffMode {
    pub fn label(&self) -> &'static str {
        match self {
            CoeffMode::Consistent => "consistent",
            CoeffMode::Literal => "literal",
        }
    }
}

/// One Fourier mode of the linearized system.
#[derive(Debug, Clone, Copy)]
pub struct SpectralMode {
    pub xi: f64,
    pub eps: f64,
    pub a_temp: f64,
    pub mode: CoeffMode,
    /// a(xi) = eps xi^2 + 1
    pub a_coeff: f64,
    /// effective density coefficient in the characteristic polynomial
    pub sigma: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub degenerate: bool,
    /// spectral projections, absent at a double eigenvalue
    pub p_plus: Option<Mat2>,
    pub p_minus: Option<Mat2>,
}

pub fn a_of_xi(xi: f64, eps: f64) -> f64 {
    eps * xi * xi + 1.0
}

pub fn sigma_of(xi: f64, eps: f64, a_temp: f64, mode: CoeffMode) -> f64 {
    let a = a_of_xi(xi, eps);
    match mode {
        CoeffMode::Consistent => a_temp + 1.0 / a,
        CoeffMode::Literal => a,
    }
}

impl SpectralMode {
    /// Coefficients, eigenvalues (roots of `l^2 + xi^2 l + xi^2 sigma`) and
    /// projections. `eps = 0` is allowed and gives the quasineutral limit.
    pub fn new(xi: f64, eps: f64, a_temp: f64, mode: CoeffMode) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::Parameter(format!("eps = {eps} must be nonnegative")));
        }
        if !(a_temp > 0.0) {
            return Err(Error::Parameter("temperature must be positive".into()));
        }
        let a_coeff = a_of_xi(xi, eps);
        let sigma = sigma_of(xi, eps, a_temp, mode);
        let xi2 = xi * xi;
        let disc = xi2 * xi2 - 4.0 * xi2 * sigma;

        let (lambda_plus, lambda_minus) = if disc >= 0.0 {
            let sq = disc.sqrt();
            // avoid cancellation in the small root
            let lm = 0.5 * (-xi2 - sq);
            let lp = if lm != 0.0 { xi2 * sigma / lm } else { 0.0 };
            (Complex64::new(lp, 0.0), Complex64::new(lm, 0.0))
        } else {
            let im = 0.5 * (-disc).sqrt();
            (Complex64::new(-0.5 * xi2, im), Complex64::new(-0.5 * xi2, -im))
        };

        let degenerate = (lambda_plus - lambda_minus).norm() <= 1e-8 * xi2;
        let (p_plus, p_minus) = if degenerate {
            (None, None)
        } else {
            let m = system_matrix(xi, sigma);
            let gap = lambda_plus - lambda_minus;
            let mut pp = [[Complex64::new(0.0, 0.0); 2]; 2];
            let mut pm = [[Complex64::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                    pp[i][j] = (m[i][j] - lambda_minus * id) / gap;
                    pm[i][j] = (m[i][j] - lambda_plus * id) / (-gap);
                }
            }
            (Some(pp), Some(pm))
        };

        Ok(Self {
            xi,
            eps,
            a_temp,
            mode,
            a_coeff,
            sigma,
            lambda_plus,
            lambda_minus,
            degenerate,
            p_plus,
            p_minus,
        })
    }
}

/// Coefficient matrix `M = [[0, -i xi], [-i xi sigma, -xi^2]]`.
pub fn system_matrix(xi: f64, sigma: f64) -> Mat2 {
    [
        [Complex64::new(0.0, 0.0), Complex64::new(0.0, -xi)],
        [Complex64::new(0.0, -xi * sigma), Complex64::new(-xi * xi, 0.0)],
    ]
}

/// Solution operator `G(t, xi) = e^(lambda+ t) P+ + e^(lambda- t) P-`,
/// evaluated through the closed-form entries; at a double eigenvalue the
/// Jordan limit `e^(lambda t)(I + t(M - lambda I))` is used instead. The
/// closed form is the matrix exponential, valid for any finite t.
pub fn greens_matrix(mode: &SpectralMode, t: f64) -> Result<Mat2> {
    if !t.is_finite() {
        return Err(Error::Parameter(format!("greens matrix needs finite t, got {t}")));
    }
    let xi = mode.xi;
    let m = system_matrix(xi, mode.sigma);
    if mode.degenerate {
        let lambda = 0.5 * (mode.lambda_plus + mode.lambda_minus);
        let e = (lambda * t).exp();
        let mut g = [[Complex64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                let id = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                g[i][j] = e * (id + t * (m[i][j] - lambda * id));
            }
        }
        return Ok(g);
    }
    let (lp, lm) = (mode.lambda_plus, mode.lambda_minus);
    let gap = lp - lm;
    let (ep, em) = ((lp * t).exp(), (lm * t).exp());
    let slope = (ep - em) / gap;
    Ok([
        [(lp * em - lm * ep) / gap, Complex64::new(0.0, -xi) * slope],
        [Complex64::new(0.0, -xi * mode.sigma) * slope, (lp * ep - lm * em) / gap],
    ])
}

/// Mode energy and dissipation of the weighted identity.
#[derive(Debug, Clone, Copy)]
pub struct ModeEnergy {
    pub e: f64,
    pub d: f64,
}

/// `E = (A + 1/a)|n|^2 + |u|^2 + kappa Re<i xi n, u>/(1 + xi^2)` and
/// `D = xi^2 |u|^2 + xi^2/(1+xi^2) (A + 1/a) |n|^2`.
pub fn mode_energy(
    n_hat: Complex64,
    u_hat: Complex64,
    mode: &SpectralMode,
    kappa: f64,
) -> Result<ModeEnergy> {
    if !(0.0..=0.1).contains(&kappa) {
        return Err(Error::Parameter(format!(
            "kappa = {kappa} outside [0, 0.1]; positive definiteness is lost"
        )));
    }
    let weight = mode.a_temp + 1.0 / mode.a_coeff;
    let xi = mode.xi;
    let cross = (Complex64::new(0.0, xi) * n_hat * u_hat.conj()).re;
    let e = weight * n_hat.norm_sqr() + u_hat.norm_sqr() + kappa * cross / (1.0 + xi * xi);
    let d = xi * xi * u_hat.norm_sqr() + xi * xi / (1.0 + xi * xi) * weight * n_hat.norm_sqr();
    Ok(ModeEnergy { e, d })
}

/// Least-squares decay rate of the mode energy along the exact propagator,
/// fitted on `ln E(t)` over a window scaled to the expected rate.
pub fn fitted_decay_rate(
    mode: &SpectralMode,
    kappa: f64,
    initial: (Complex64, Complex64),
    samples: usize,
) -> Result<f64> {
    let expected = mode.xi * mode.xi / (1.0 + mode.xi * mode.xi);
    let t_max = 6.0 / expected.max(1e-12);
    let mut pts = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = t_max * k as f64 / (samples - 1) as f64;
        let g = greens_matrix(mode, t)?;
        let (n, u) = mat2_apply(&g, initial);
        let e = mode_energy(n, u, mode, kappa)?.e;
        if e > 0.0 {
            pts.push((t, e.ln()));
        }
    }
    if pts.len() < 8 {
        return Err(Error::Parameter("energy vanished too quickly to fit".into()));
    }
    let n = pts.len() as f64;
    let tm = pts.iter().map(|(t, _)| t).sum::<f64>() / n;
    let em = pts.iter().map(|(_, e)| e).sum::<f64>() / n;
    let mut stt = 0.0;
    let mut ste = 0.0;
    for (t, e) in &pts {
        stt += (t - tm) * (t - tm);
        ste += (t - tm) * (e - em);
    }
    Ok(-ste / stt)
}

/// Setup for the periodic cross-validation of the nonlinear stepper against
/// the exact per-mode propagator.
#[derive(Debug, Clone)]
pub struct ConsistencyConfig {
    pub n_cells: usize,
    pub a_temp: f64,
    pub eps_poisson: f64,
    pub amplitude: f64,
    /// integer mode index seeded as `1 + amplitude cos(k x)` on [0, 2 pi)
    pub seed_mode: usize,
    /// integer mode indices compared against the propagator
    pub retained_modes: Vec<usize>,
    pub t_final: f64,
    pub cfl: f64,
}

impl ConsistencyConfig {
    pub fn new(n_cells: usize, amplitude: f64) -> Self {
        Self {
            n_cells,
            a_temp: 1.0,
            eps_poisson: 1.0,
            amplitude,
            seed_mode: 1,
            retained_modes: vec![0, 1, 2],
            t_final: 10.0,
            cfl: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ModeErrorReport {
    pub mode: usize,
    /// max over snapshots of |(n, u) - G(t) (n, u)(0)|, relative to the
    /// seeded coefficient amplitude/2
    pub rel_error: f64,
}

/// Run the nonlinear periodic solver at small amplitude and compare each
/// retained Fourier mode against the exact linear propagator.
pub fn linearized_consistency(cfg: &ConsistencyConfig) -> Result<Vec<ModeErrorReport>> {
    let max_mode = cfg.retained_modes.iter().copied().max().unwrap_or(0).max(cfg.seed_mode);
    if max_mode > cfg.n_cells / 8 {
        return Err(Error::Validation(format!(
            "mode {max_mode} too close to the grid Nyquist ({} cells): aliasing",
            cfg.n_cells
        )));
    }
    let length = 2.0 * std::f64::consts::PI;
    let nn = cfg.n_cells;
    let n0: Vec<f64> = (0..nn)
        .map(|j| {
            let x = length * j as f64 / nn as f64;
            1.0 + cfg.amplitude * (cfg.seed_mode as f64 * x).cos()
        })
        .collect();
    let u0 = vec![0.0; nn];
    let mut sim = PeriodicOneFluid::new(nn, length, cfg.a_temp, cfg.eps_poisson, n0, u0)?;

    let modes: Vec<SpectralMode> = cfg
        .retained_modes
        .iter()
        .map(|&k| SpectralMode::new(k as f64, cfg.eps_poisson, cfg.a_temp, CoeffMode::Consistent))
        .collect::<Result<_>>()?;
    let init = sim.mode_coefficients(&cfg.retained_modes);

    let c = (cfg.a_temp + 1.0).sqrt();
    let dt = cfg.cfl * sim.dx / c;
    let snapshot_every = ((0.25 / dt).ceil() as usize).max(1);

    let mut worst = vec![0.0f64; cfg.retained_modes.len()];
    let mut step = 0usize;
    while sim.time < cfg.t_final - 1e-12 {
        let dt_step = dt.min(cfg.t_final - sim.time);
        sim.step(dt_step, 0.5)?;
        step += 1;
        if step % snapshot_every == 0 || sim.time >= cfg.t_final - 1e-12 {
            let coeffs = sim.mode_coefficients(&cfg.retained_modes);
            for (idx, mode) in modes.iter().enumerate() {
                let g = greens_matrix(mode, sim.time)?;
                let pred = mat2_apply(&g, init[idx]);
                let (sn, su) = coeffs[idx];
                let err =
                    ((sn - pred.0).norm_sqr() + (su - pred.1).norm_sqr()).sqrt();
                worst[idx] = worst[idx].max(err);
            }
        }
    }

    let norm = 0.5 * cfg.amplitude;
    Ok(cfg
        .retained_modes
        .iter()
        .zip(worst)
        .map(|(&mode, err)| ModeErrorReport {
            mode,
            rel_error: if norm > 0.0 { err / norm } else { err },
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coefficient_examples() {
        assert_eq!(a_of_xi(0.0, 1.0), 1.0);
        assert_eq!(sigma_of(0.0, 1.0, 1.0, CoeffMode::Consistent), 2.0);
        assert_eq!(a_of_xi(1.0, 1.0), 2.0);
        assert_eq!(sigma_of(1.0, 1.0, 1.0, CoeffMode::Consistent), 1.5);
        assert_eq!(sigma_of(1.0, 1.0, 1.0, CoeffMode::Literal), 2.0);
        // 1/a -> 0 as xi grows
        let s = sigma_of(1e6, 1.0, 1.0, CoeffMode::Consistent);
        assert!((s - 1.0).abs() < 1e-11);
    }

    #[test]
    fn eigenvalue_examples() {
        let zero = SpectralMode::new(0.0, 1.0, 1.0, CoeffMode::Consistent).unwrap();
        assert!(zero.degenerate);
        assert_eq!(zero.lambda_plus, Complex64::new(0.0, 0.0));

        let lit = SpectralMode::new(1.0, 1.0, 1.0, CoeffMode::Literal).unwrap();
        assert!((lit.lambda_plus.re + 0.5).abs() < 1e-14);
        assert!((lit.lambda_plus.im - 7.0f64.sqrt() / 2.0).abs() < 1e-14);

        let cons = SpectralMode::new(1.0, 1.0, 1.0, CoeffMode::Consistent).unwrap();
        assert!((cons.lambda_plus.re + 0.5).abs() < 1e-14);
        assert!((cons.lambda_plus.im - 5.0f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn projection_algebra() {
        for xi in [0.3, 1.0, 2.5, 10.0, 50.0] {
            let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent).unwrap();
            if m.degenerate {
                continue;
            }
            let (pp, pm) = (m.p_plus.unwrap(), m.p_minus.unwrap());
            let mut sum_err: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    sum_err = sum_err.max((pp[i][j] + pm[i][j] - id).norm());
                }
            }
            assert!(sum_err <= 1e-12, "P+ + P- != I at xi = {xi}");

            for (p, name) in [(pp, "P+"), (pm, "P-")] {
                let sq = mat2_mul(&p, &p);
                let mut err: f64 = 0.0;
                for i in 0..2 {
                    for j in 0..2 {
                        err = err.max((sq[i][j] - p[i][j]).norm());
                    }
                }
                assert!(err <= 1e-10, "{name}^2 != {name} at xi = {xi}: {err:e}");
            }
            let prod = mat2_mul(&pp, &pm);
            assert!(mat2_max_abs(&prod) <= 1e-10, "P+ P- != 0 at xi = {xi}");
        }
    }

    #[test]
    fn greens_identity_at_zero_and_generator() {
        for (xi, mode) in [(0.7, CoeffMode::Consistent), (3.0, CoeffMode::Literal)] {
            let m = SpectralMode::new(xi, 1.0, 1.0, mode).unwrap();
            let g0 = greens_matrix(&m, 0.0).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(g0[i][j], Complex64::new(id, 0.0), "G(0) entry ({i},{j})");
                }
            }
            // dG/dt at 0 equals the system matrix (centered difference)
            let h = 1e-6;
            let gp = greens_matrix(&m, h).unwrap();
            let gm = greens_matrix(&m, -h).unwrap();
            let sys = system_matrix(xi, m.sigma);
            for i in 0..2 {
                for j in 0..2 {
                    let fd = (gp[i][j] - gm[i][j]) / (2.0 * h);
                    assert!(
                        (fd - sys[i][j]).norm() < 1e-6,
                        "generator mismatch at ({i},{j}): {fd} vs {}",
                        sys[i][j]
                    );
                }
            }
        }
    }

    #[test]
    fn greens_degenerate_jordan_block() {
        // xi^2 = 4 sigma exactly: literal mode with eps = 0 has sigma = 1,
        // so xi = 2 yields a double eigenvalue with zero discriminant
        let m = SpectralMode::new(2.0, 0.0, 1.0, CoeffMode::Literal).unwrap();
        assert!(m.degenerate);
        let g = greens_matrix(&m, 1.3).unwrap();
        // Jordan form must still satisfy the semigroup property
        let g2 = greens_matrix(&m, 2.6).unwrap();
        let gg = mat2_mul(&g, &g);
        for i in 0..2 {
            for j in 0..2 {
                assert!((gg[i][j] - g2[i][j]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn quasineutral_limit_of_greens_matrix() {
        let small = SpectralMode::new(1.0, 1e-6, 1.0, CoeffMode::Consistent).unwrap();
        let limit = SpectralMode::new(1.0, 0.0, 1.0, CoeffMode::Consistent).unwrap();
        let gs = greens_matrix(&small, 1.0).unwrap();
        let gl = greens_matrix(&limit, 1.0).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let rel = (gs[i][j] - gl[i][j]).norm() / gl[i][j].norm().max(1e-30);
                assert!(rel <= 1e-4, "entry ({i},{j}) differs by {rel:e}");
            }
        }
    }

    #[test]
    fn mode_energy_identity_along_flow() {
        let m = SpectralMode::new(1.0, 1.0, 1.0, CoeffMode::Consistent).unwrap();
        let init = (Complex64::new(1.0, 0.3), Complex64::new(-0.2, 0.5));
        let h = 1e-5;
        for t in [0.1, 0.5, 2.0, 5.0] {
            let state = |tt: f64| {
                let g = greens_matrix(&m, tt).unwrap();
                mat2_apply(&g, init)
            };
            let e = |tt: f64| {
                let (n, u) = state(tt);
                mode_energy(n, u, &m, 0.0).unwrap().e
            };
            let dedt = (e(t + h) - e(t - h)) / (2.0 * h);
            let (_, u) = state(t);
            let residual = dedt + 2.0 * m.xi * m.xi * u.norm_sqr();
            assert!(residual.abs() < 1e-8, "identity residual {residual:e} at t = {t}");
        }
    }

    #[test]
    fn mode_energy_trivial_and_kappa_guard() {
        let m = SpectralMode::new(1.0, 1.0, 1.0, CoeffMode::Consistent).unwrap();
        let z = Complex64::new(0.0, 0.0);
        let me = mode_energy(z, z, &m, 0.05).unwrap();
        assert_eq!((me.e, me.d), (0.0, 0.0));
        assert!(mode_energy(z, z, &m, 0.2).is_err());
    }

    #[test]
    fn fitted_decay_is_positive_and_tracks_expected_rate() {
        let init = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5));
        for xi in [0.1, 1.0, 10.0] {
            let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent).unwrap();
            let rate = fitted_decay_rate(&m, 0.05, init, 200).unwrap();
            assert!(rate > 0.0, "rate {rate} at xi = {xi}");
            let expected = xi * xi / (1.0 + xi * xi);
            let ratio = rate / expected;
            assert!(ratio > 0.3 && ratio < 3.0, "ratio {ratio} at xi = {xi}");
        }
    }

    #[test]
    fn consistency_zero_amplitude() {
        let cfg = ConsistencyConfig { amplitude: 0.0, t_final: 1.0, ..ConsistencyConfig::new(64, 0.0) };
        let errors = linearized_consistency(&cfg).unwrap();
        for e in errors {
            assert_eq!(e.rel_error, 0.0);
        }
    }

    #[test]
    fn consistency_rejects_aliasing() {
        let mut cfg = ConsistencyConfig::new(64, 1e-4);
        cfg.retained_modes = vec![0, 1, 20];
        assert!(linearized_consistency(&cfg).is_err());
    }

    proptest! {
        #[test]
        fn vieta_identities(xi in -100.0f64..100.0, literal in proptest::bool::ANY) {
            let mode = if literal { CoeffMode::Literal } else { CoeffMode::Consistent };
            let m = SpectralMode::new(xi, 1.0, 1.0, mode).unwrap();
            let sum = m.lambda_plus + m.lambda_minus;
            let prod = m.lambda_plus * m.lambda_minus;
            let xi2 = xi * xi;
            prop_assert!((sum.re + xi2).abs() <= 1e-12 * xi2.max(1.0));
            prop_assert!(sum.im.abs() <= 1e-12 * xi2.max(1.0));
            prop_assert!((prod.re - xi2 * m.sigma).abs() <= 1e-12 * (xi2 * m.sigma).max(1.0));
            prop_assert!(prod.im.abs() <= 1e-12 * (xi2 * m.sigma).max(1.0));
        }

        #[test]
        fn spectral_stability(xi in -100.0f64..100.0) {
            let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent).unwrap();
            prop_assert!(m.lambda_plus.re <= 0.0);
            prop_assert!(m.lambda_minus.re <= 0.0);
            if xi.abs() >= 0.1 {
                prop_assert!(m.lambda_plus.re < -1e-4);
                prop_assert!(m.lambda_minus.re < -1e-4);
            }
        }

        #[test]
        fn semigroup_property(t in 0.0f64..5.0, s in 0.0f64..5.0, xi in 0.05f64..20.0) {
            let m = SpectralMode::new(xi, 1.0, 1.0, CoeffMode::Consistent).unwrap();
            let gts = greens_matrix(&m, t + s).unwrap();
            let gt = greens_matrix(&m, t).unwrap();
            let gs = greens_matrix(&m, s).unwrap();
            let prod = mat2_mul(&gt, &gs);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((gts[i][j] - prod[i][j]).norm() <= 1e-10);
                }
            }
        }
    }
}
