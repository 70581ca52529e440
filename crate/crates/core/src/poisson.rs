//! Elliptic solves for the self-consistent potential on the truncated domain:
//! the nonlinear Poisson-Boltzmann equation of the one-fluid model and the
//! plain Poisson equation of the two-fluid model, both with Dirichlet data
//! pinned to the far-field potentials.

use crate::field::Field;
use crate::{Error, Result};

/// Newton/solve telemetry returned alongside the potential.
#[derive(Debug, Clone)]
pub struct EllipticSolveReport {
    pub phi: Field,
    pub iterations: usize,
    /// max-norm of the discrete residual on interior nodes
    pub final_residual: f64,
    /// residual after each Newton step, starting with the initial guess
    pub residual_history: Vec<f64>,
    pub converged: bool,
}

const NEWTON_MAX_ITER: usize = 50;
const DAMPING_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;

/// Smallest residual the three-point stencil can certify in f64: forming
/// `(phi[i+1] - 2 phi[i] + phi[i-1]) / dx^2` from O(1) values cannot
/// resolve below roughly `eps * |phi| / dx^2`.
fn residual_floor(phi_max: f64, dx: f64) -> f64 {
    8.0 * f64::EPSILON * (1.0 + phi_max) / (dx * dx)
}

/// Thomas algorithm for `lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
///
/// `lower` and `upper` have length `n - 1`.
pub fn tridiag_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(lower.len(), n - 1, "lower diagonal length");
    assert_eq!(upper.len(), n - 1, "upper diagonal length");
    assert_eq!(rhs.len(), n, "rhs length");

    let mut c = vec![0.0; n - 1];
    let mut d = vec![0.0; n];
    if diag[0] == 0.0 {
        return Err(Error::ZeroPivot { row: 0 });
    }
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - lower[i - 1] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::ZeroPivot { row: i });
        }
        if i < n - 1 {
            c[i] = upper[i] / denom;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / denom;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Periodic (cyclic) tridiagonal solve via the Sherman-Morrison correction.
///
/// Row i couples x[(i-1) mod n], x[i], x[(i+1) mod n] with constant corner
/// coefficients `corner_lower` (row 0, column n-1) and `corner_upper`
/// (row n-1, column 0).
pub fn cyclic_tridiag_solve(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    corner_lower: f64,
    corner_upper: f64,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    let gamma = -diag[0];
    let mut diag_mod = diag.to_vec();
    diag_mod[0] -= gamma;
    diag_mod[n - 1] -= corner_lower * corner_upper / gamma;

    let y = tridiag_solve(lower, &diag_mod, upper, rhs)?;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = corner_upper;
    let z = tridiag_solve(lower, &diag_mod, upper, &u)?;

    let fact = (y[0] + corner_lower * y[n - 1] / gamma)
        / (1.0 + z[0] + corner_lower * z[n - 1] / gamma);
    Ok(y.iter().zip(&z).map(|(yi, zi)| yi - fact * zi).collect())
}

/// Single tridiagonal solve of `phi_xx = rhs` with Dirichlet boundary values.
pub fn solve_poisson_linear(
    rhs: &Field,
    phi_bc_left: f64,
    phi_bc_right: f64,
) -> Result<EllipticSolveReport> {
    rhs.ensure_finite("poisson rhs")?;
    if !(phi_bc_left.is_finite() && phi_bc_right.is_finite()) {
        return Err(Error::NonFinite { context: "poisson boundary values" });
    }
    let grid = rhs.grid();
    let n = grid.n_cells;
    let inv_dx2 = 1.0 / (grid.dx * grid.dx);

    let mut lower = vec![inv_dx2; n - 1];
    let mut upper = vec![inv_dx2; n - 1];
    let mut diag = vec![-2.0 * inv_dx2; n];
    let mut b = rhs.values().to_vec();
    diag[0] = 1.0;
    diag[n - 1] = 1.0;
    upper[0] = 0.0;
    lower[n - 2] = 0.0;
    b[0] = phi_bc_left;
    b[n - 1] = phi_bc_right;

    let phi = Field::new(grid, tridiag_solve(&lower, &diag, &upper, &b)?)?;
    let residual = poisson_linear_residual(&phi, rhs);
    let tol = (1e-12 * (1.0 + rhs.max_abs())).max(residual_floor(phi.max_abs(), grid.dx));
    Ok(EllipticSolveReport {
        phi,
        iterations: 1,
        final_residual: residual,
        residual_history: vec![residual],
        converged: residual <= tol,
    })
}

/// Interior max-norm of `phi_xx - rhs`.
pub fn poisson_linear_residual(phi: &Field, rhs: &Field) -> f64 {
    let v = phi.values();
    let r = rhs.values();
    let inv_dx2 = 1.0 / (phi.grid().dx * phi.grid().dx);
    let mut worst: f64 = 0.0;
    for i in 1..v.len() - 1 {
        let lap = (v[i + 1] - 2.0 * v[i] + v[i - 1]) * inv_dx2;
        worst = worst.max((lap - r[i]).abs());
    }
    worst
}

/// Interior max-norm of `phi_xx - n + e^(-phi)`.
pub fn poisson_boltzmann_residual(phi: &[f64], n: &[f64], dx: f64) -> f64 {
    let inv_dx2 = 1.0 / (dx * dx);
    let mut worst: f64 = 0.0;
    for i in 1..phi.len() - 1 {
        let lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_dx2;
        worst = worst.max((lap - n[i] + (-phi[i]).exp()).abs());
    }
    worst
}

/// Damped Newton iteration for `phi_xx - n + e^(-phi) = 0` with Dirichlet
/// boundary values.
///
/// The residual map is monotone decreasing in phi, so each Newton system is
/// an M-matrix (diagonal `-2/dx^2 - e^(-phi_i)`) and halving the step until
/// the residual norm drops converges from any starting point. No sign
/// condition on `n` is needed for solvability; the fluid layer enforces
/// density positivity where it is physical.
pub fn solve_poisson_boltzmann(
    n: &Field,
    phi_bc_left: f64,
    phi_bc_right: f64,
    initial_guess: Option<&Field>,
) -> Result<EllipticSolveReport> {
    n.ensure_finite("poisson-boltzmann density")?;
    if !(phi_bc_left.is_finite() && phi_bc_right.is_finite()) {
        return Err(Error::NonFinite { context: "poisson boundary values" });
    }
    let grid = n.grid();
    let nn = grid.n_cells;
    let dx = grid.dx;
    let inv_dx2 = 1.0 / (dx * dx);
    let base_tol = 1e-12 * (1.0 + n.max_abs());

    let mut phi: Vec<f64> = match initial_guess {
        Some(g) if g.grid() == grid => g.values().to_vec(),
        _ => n.values().iter().map(|v| -v.max(1e-8).ln()).collect(),
    };
    phi[0] = phi_bc_left;
    phi[nn - 1] = phi_bc_right;

    let phi_sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut residual = poisson_boltzmann_residual(&phi, n.values(), dx);
    let mut history = vec![residual];
    let mut iterations = 0;
    let mut tol = base_tol.max(residual_floor(phi_sup(&phi), dx));

    while residual > tol && iterations < NEWTON_MAX_ITER {
        // Newton system J delta = -R with Dirichlet rows pinned
        let mut lower = vec![inv_dx2; nn - 1];
        let mut upper = vec![inv_dx2; nn - 1];
        let mut diag = vec![0.0; nn];
        let mut rhs = vec![0.0; nn];
        for i in 1..nn - 1 {
            let expm = (-phi[i]).exp();
            diag[i] = -2.0 * inv_dx2 - expm;
            let lap = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) * inv_dx2;
            rhs[i] = -(lap - n.values()[i] + expm);
        }
        diag[0] = 1.0;
        diag[nn - 1] = 1.0;
        upper[0] = 0.0;
        lower[nn - 2] = 0.0;

        let delta = tridiag_solve(&lower, &diag, &upper, &rhs)?;

        // halve the step until the residual norm decreases
        let mut alpha = 1.0;
        loop {
            let candidate: Vec<f64> =
                phi.iter().zip(&delta).map(|(p, d)| p + alpha * d).collect();
            let cand_res = poisson_boltzmann_residual(&candidate, n.values(), dx);
            if cand_res < residual || alpha < DAMPING_FLOOR {
                phi = candidate;
                residual = cand_res;
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        history.push(residual);
        tol = base_tol.max(residual_floor(phi_sup(&phi), dx));
    }

    Ok(EllipticSolveReport {
        phi: Field::new(grid, phi)?,
        iterations,
        final_residual: residual,
        residual_history: history,
        converged: residual <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1D;
    use proptest::prelude::*;

    #[test]
    fn tridiag_identity_and_hand_case() {
        let x = tridiag_solve(&[0.0, 0.0], &[1.0, 1.0, 1.0], &[0.0, 0.0], &[3.0, -1.0, 2.5])
            .unwrap();
        assert_eq!(x, vec![3.0, -1.0, 2.5]);

        // hand elimination: diag 2, off-diagonals -1, rhs (1, 0, 0)
        let x = tridiag_solve(&[-1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0], &[1.0, 0.0, 0.0])
            .unwrap();
        for (got, want) in x.iter().zip([0.75, 0.5, 0.25]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn tridiag_random_diagonally_dominant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 100;
        let lower: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let upper: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            let l = if i > 0 { lower[i - 1].abs() } else { 0.0 };
            let u = if i < n - 1 { upper[i].abs() } else { 0.0 };
            diag[i] = l + u + 1.0 + rng.gen_range(0.0..1.0);
        }
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let x = tridiag_solve(&lower, &diag, &upper, &b).unwrap();
        let b_max = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            let mut ax = diag[i] * x[i];
            if i > 0 {
                ax += lower[i - 1] * x[i - 1];
            }
            if i < n - 1 {
                ax += upper[i] * x[i + 1];
            }
            assert!((ax - b[i]).abs() <= 1e-12 * b_max);
        }
    }

    #[test]
    fn cyclic_solve_residual() {
        let n = 64;
        let lower = vec![1.0; n - 1];
        let upper = vec![1.0; n - 1];
        let diag = vec![-2.5; n];
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let x = cyclic_tridiag_solve(&lower, &diag, &upper, 1.0, 1.0, &rhs).unwrap();
        for i in 0..n {
            let ax = x[(i + n - 1) % n] + x[(i + 1) % n] - 2.5 * x[i];
            assert!((ax - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_poisson_trivial_and_harmonic() {
        let grid = Grid1D::new(0.0, 1.0, 101).unwrap();
        let zero = Field::zeros(grid);

        let rep = solve_poisson_linear(&zero, 0.0, 0.0).unwrap();
        assert!(rep.converged);
        assert!(rep.phi.max_abs() < 1e-14);

        // harmonic interpolant of the boundary data is exact
        let rep = solve_poisson_linear(&zero, 0.0, 1.0).unwrap();
        for (x, v) in grid.nodes().zip(rep.phi.values()) {
            assert!((v - x).abs() < 1e-12);
        }
    }

    #[test]
    fn linear_poisson_sin_source() {
        let grid = Grid1D::with_spacing(0.0, std::f64::consts::PI, 0.005).unwrap();
        let rhs = Field::from_fn(grid, |x| -x.sin());
        let rep = solve_poisson_linear(&rhs, 0.0, 0.0).unwrap();
        assert!(rep.converged);
        let max_err = grid
            .nodes()
            .zip(rep.phi.values())
            .map(|(x, v)| (v - x.sin()).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= 5.0 * grid.dx * grid.dx, "err = {max_err:e}");
    }

    #[test]
    fn boltzmann_constant_equilibrium() {
        let grid = Grid1D::new(-10.0, 10.0, 401).unwrap();
        let n = Field::constant(grid, 1.0);
        let rep = solve_poisson_boltzmann(&n, 0.0, 0.0, None).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 1);
        assert!(rep.phi.max_abs() < 1e-13);
    }

    /// Manufactured density for phi* = tanh: the discrete operator applied
    /// to the exact potential plus the Boltzmann term, so the discrete
    /// problem has phi* as its exact solution.
    fn manufactured_tanh_density(grid: Grid1D) -> Field {
        let phi_star = Field::from_fn(grid, f64::tanh);
        let lap = phi_star.d2dx2().unwrap();
        lap.zip_map(&phi_star.map(|p| (-p).exp()), |a, b| a + b).unwrap()
    }

    #[test]
    fn boltzmann_manufactured_tanh() {
        let grid = Grid1D::with_spacing(-8.0, 8.0, 0.005).unwrap();
        let n = manufactured_tanh_density(grid);
        let rep =
            solve_poisson_boltzmann(&n, grid.x_min.tanh(), grid.x_max.tanh(), None).unwrap();
        assert!(rep.converged, "residual {}", rep.final_residual);
        let max_err = grid
            .nodes()
            .zip(rep.phi.values())
            .map(|(x, v)| (v - x.tanh()).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err <= 1e-8, "max_err = {max_err:e}");
    }

    #[test]
    fn boltzmann_newton_is_superlinear() {
        let grid = Grid1D::with_spacing(-8.0, 8.0, 0.01).unwrap();
        let n = manufactured_tanh_density(grid);
        // start far away so the history has several meaningful steps
        let guess = Field::zeros(grid);
        let rep =
            solve_poisson_boltzmann(&n, (-8.0f64).tanh(), 8.0f64.tanh(), Some(&guess)).unwrap();
        let floor = 1e3 * rep.residual_history.last().unwrap().max(1e-14);
        let meaningful: Vec<f64> =
            rep.residual_history.iter().copied().filter(|r| *r > floor).collect();
        assert!(meaningful.len() >= 3, "history too short: {:?}", rep.residual_history);
        let k = meaningful.len();
        let (r0, r1, r2) = (meaningful[k - 3], meaningful[k - 2], meaningful[k - 1]);
        assert!(
            r2 <= 10.0 * 0.5 * r1 * r1 / r0,
            "not quadratic: {r0:e} {r1:e} {r2:e}"
        );
    }

    #[test]
    fn boltzmann_handles_sign_changing_source() {
        // no sign condition is needed on the source term
        let grid = Grid1D::with_spacing(-4.0, 4.0, 0.02).unwrap();
        let n = Field::from_fn(grid, |x| x * (-x * x).exp());
        let rep = solve_poisson_boltzmann(&n, 0.0, 0.0, None).unwrap();
        assert!(rep.converged, "residual {}", rep.final_residual);
    }

    #[test]
    fn comparison_principle() {
        // larger density pushes the potential down: n1 <= n2 => phi1 >= phi2
        let grid = Grid1D::with_spacing(-10.0, 10.0, 0.02).unwrap();
        let n1 = Field::from_fn(grid, |x| 1.0 + 0.2 * (-x * x).exp());
        let n2 = Field::from_fn(grid, |x| 1.0 + 0.5 * (-x * x).exp());
        let p1 = solve_poisson_boltzmann(&n1, 0.0, 0.0, None).unwrap();
        let p2 = solve_poisson_boltzmann(&n2, 0.0, 0.0, None).unwrap();
        for (a, b) in p1.phi.values().iter().zip(p2.phi.values()) {
            assert!(a >= &(b - 1e-11), "phi1 = {a}, phi2 = {b}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn boltzmann_converges_from_rough_data(amp in 0.0f64..0.8, width in 0.5f64..4.0) {
            let grid = Grid1D::with_spacing(-15.0, 15.0, 0.05).unwrap();
            let n = Field::from_fn(grid, |x| 1.0 + amp * (-(x / width).powi(2)).exp());
            let rep = solve_poisson_boltzmann(&n, 0.0, 0.0, None).unwrap();
            prop_assert!(rep.converged);
            prop_assert!(rep.final_residual <= 1e-10 * (1.0 + n.max_abs()));
        }
    }
}
