//! Computable versions of the energy functionals, dissipation integrals and
//! convergence metrics that control the stability of the rarefaction wave,
//! evaluated on simulation snapshots.

use crate::field::{trapezoid, Field};
use crate::params::{PhysParamsOne, PhysParamsTwo};
use crate::rarewave::RarefactionProfile;
use crate::sim::{FluidState, TwoFluidState};
use crate::{Error, Result};

/// Relative pressure potential `psi(n, n^r) = A [ln(n/n^r) + n^r/n - 1]`,
/// the closed form of `A int_{n^r}^{n} (s - n^r)/s^2 ds`; locally equivalent
/// to `(n - n^r)^2`.
pub fn psi_potential(n: f64, nr: f64, a_or_t: f64) -> Result<f64> {
    if !(n > 0.0 && nr > 0.0) {
        return Err(Error::Parameter(format!(
            "psi potential needs positive densities, got n = {n}, nr = {nr}"
        )));
    }
    if !(a_or_t > 0.0) {
        return Err(Error::Parameter("temperature must be positive".into()));
    }
    Ok(a_or_t * ((n / nr).ln() + nr / n - 1.0))
}

/// Contributions to the zero-order part of the Lyapunov functional.
#[derive(Debug, Clone, Copy)]
pub struct ZeroOrderEnergy {
    /// (u~, n u~)
    pub kinetic: f64,
    /// 2 (n, psi)
    pub pressure: f64,
    /// (phi~^2, n^r)
    pub potential_quad: f64,
    /// ||d/dx phi~||^2
    pub potential_grad: f64,
    /// -(2/3)(phi~^3, n^r)
    pub potential_cubic: f64,
}

impl ZeroOrderEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.pressure + self.potential_quad + self.potential_grad
            + self.potential_cubic
    }
}

/// Contributions to the first-order additions.
#[derive(Debug, Clone, Copy)]
pub struct FirstOrderEnergy {
    /// ((d/dx n~)^2, n^-2)
    pub density_grad: f64,
    /// 2 (u~, d/dx n~)
    pub cross: f64,
    /// (d/dx u~, d/dx u~)
    pub velocity_grad: f64,
}

impl FirstOrderEnergy {
    pub fn total(&self) -> f64 {
        self.density_grad + self.cross + self.velocity_grad
    }
}

/// Weight on the zero-order group making the combined functional positive
/// definite. Pointwise definiteness of `C1 n u~^2 - 2 u~ dn~ + dn~^2/n^2`
/// needs `C1 > n` at every node, which `4 max(1, 1/n_minus^2)` covers for
/// the density ranges run here; the startup self-check verifies it
/// numerically.
pub fn lyapunov_weight(n_minus: f64) -> f64 {
    4.0 * (1.0f64).max(1.0 / (n_minus * n_minus))
}

/// Two-fluid variant: the first-order cross terms carry the species mass,
/// so the weight has to dominate `m_alpha n` rather than `n`.
pub fn lyapunov_weight_two(params: &PhysParamsTwo) -> f64 {
    lyapunov_weight(params.n_minus) * (1.0f64).max(params.m_ion).max(params.m_electron)
}

/// Perturbation fields of a one-fluid state relative to the profile.
pub struct PerturbationOne {
    pub ntilde: Field,
    pub utilde: Field,
    pub phitilde: Field,
    pub dn: Field,
    pub du: Field,
    pub dphi: Field,
    pub d2phi: Field,
    pub d2u: Field,
}

impl PerturbationOne {
    pub fn new(state: &FluidState, profile: &RarefactionProfile) -> Result<Self> {
        if state.n.grid() != profile.nr.grid() {
            return Err(Error::GridMismatch);
        }
        let ntilde = state.n.zip_map(&profile.nr, |a, b| a - b)?;
        let utilde = state.u.zip_map(&profile.ur, |a, b| a - b)?;
        let phitilde = state.phi.zip_map(&profile.phir, |a, b| a - b)?;
        let dn = ntilde.ddx()?;
        let du = utilde.ddx()?;
        let dphi = phitilde.ddx()?;
        let d2phi = phitilde.d2dx2()?;
        let d2u = utilde.d2dx2()?;
        Ok(Self { ntilde, utilde, phitilde, dn, du, dphi, d2phi, d2u })
    }
}

pub fn zero_order_energy(
    state: &FluidState,
    profile: &RarefactionProfile,
    params: &PhysParamsOne,
) -> Result<ZeroOrderEnergy> {
    let p = PerturbationOne::new(state, profile)?;
    zero_order_from_parts(state, profile, params, &p)
}

fn zero_order_from_parts(
    state: &FluidState,
    profile: &RarefactionProfile,
    params: &PhysParamsOne,
    p: &PerturbationOne,
) -> Result<ZeroOrderEnergy> {
    let grid = state.n.grid();
    let dx = grid.dx;
    let nn = grid.n_cells;

    let mut kin = Vec::with_capacity(nn);
    let mut press = Vec::with_capacity(nn);
    let mut quad = Vec::with_capacity(nn);
    let mut cubic = Vec::with_capacity(nn);
    for i in 0..nn {
        let n = state.n.values()[i];
        let nr = profile.nr.values()[i];
        let ut = p.utilde.values()[i];
        let pt = p.phitilde.values()[i];
        kin.push(n * ut * ut);
        press.push(2.0 * n * psi_potential(n, nr, params.a_temp)?);
        quad.push(nr * pt * pt);
        cubic.push(-(2.0 / 3.0) * nr * pt * pt * pt);
    }
    Ok(ZeroOrderEnergy {
        kinetic: trapezoid(&kin, dx),
        pressure: trapezoid(&press, dx),
        potential_quad: trapezoid(&quad, dx),
        potential_grad: p.dphi.inner(&p.dphi)?,
        potential_cubic: trapezoid(&cubic, dx),
    })
}

pub fn first_order_energy(
    state: &FluidState,
    profile: &RarefactionProfile,
) -> Result<FirstOrderEnergy> {
    let p = PerturbationOne::new(state, profile)?;
    first_order_from_parts(state, &p)
}

fn first_order_from_parts(state: &FluidState, p: &PerturbationOne) -> Result<FirstOrderEnergy> {
    let dx = state.n.grid().dx;
    let nn = state.n.len();
    let mut dens = Vec::with_capacity(nn);
    let mut cross = Vec::with_capacity(nn);
    for i in 0..nn {
        let n = state.n.values()[i];
        let dni = p.dn.values()[i];
        dens.push(dni * dni / (n * n));
        cross.push(2.0 * p.utilde.values()[i] * dni);
    }
    Ok(FirstOrderEnergy {
        density_grad: trapezoid(&dens, dx),
        cross: trapezoid(&cross, dx),
        velocity_grad: p.du.inner(&p.du)?,
    })
}

/// Dissipation integrands of the one-fluid estimate.
#[derive(Debug, Clone, Copy)]
pub struct DissipationRates {
    /// sum of (sqrt(d/dx u^r) [u~, d/dx n~, d/dx u~])^2
    pub wave_weighted: f64,
    /// || [d/dx n~, d/dx u~, d/dx phi~, d2/dx2 phi~, d2/dx2 u~] ||^2
    pub flat: f64,
    /// ||d/dx u~||^2 + (n^-1, (d2/dx2 u~)^2)
    pub viscous: f64,
    /// (n^-1, (d/dx n~)^2)
    pub density: f64,
    /// (n^r e^-phi~ d/dx phi~, d/dx phi~) + ||d2/dx2 phi~||^2
    pub potential: f64,
}

pub fn dissipation_rates(
    state: &FluidState,
    profile: &RarefactionProfile,
) -> Result<DissipationRates> {
    let p = PerturbationOne::new(state, profile)?;
    dissipation_from_parts(state, profile, &p)
}

fn dissipation_from_parts(
    state: &FluidState,
    profile: &RarefactionProfile,
    p: &PerturbationOne,
) -> Result<DissipationRates> {
    let dx = state.n.grid().dx;
    let nn = state.n.len();
    let mut wave = Vec::with_capacity(nn);
    let mut flat = Vec::with_capacity(nn);
    let mut visc = Vec::with_capacity(nn);
    let mut dens = Vec::with_capacity(nn);
    let mut pot = Vec::with_capacity(nn);
    for i in 0..nn {
        let n = state.n.values()[i];
        let nr = profile.nr.values()[i];
        let durv = profile.dur.values()[i];
        let (ut, dn, du) = (p.utilde.values()[i], p.dn.values()[i], p.du.values()[i]);
        let (dphi, d2phi, d2u) = (p.dphi.values()[i], p.d2phi.values()[i], p.d2u.values()[i]);
        let pt = p.phitilde.values()[i];
        wave.push(durv * (ut * ut + dn * dn + du * du));
        flat.push(dn * dn + du * du + dphi * dphi + d2phi * d2phi + d2u * d2u);
        visc.push(du * du + d2u * d2u / n);
        dens.push(dn * dn / n);
        pot.push(nr * (-pt).exp() * dphi * dphi + d2phi * d2phi);
    }
    Ok(DissipationRates {
        wave_weighted: trapezoid(&wave, dx),
        flat: trapezoid(&flat, dx),
        viscous: trapezoid(&visc, dx),
        density: trapezoid(&dens, dx),
        potential: trapezoid(&pot, dx),
    })
}

/// One row of diagnostics along a trajectory.
#[derive(Debug, Clone)]
pub struct EnergyReport {
    pub time: f64,
    pub e_zero: f64,
    pub e_first: f64,
    /// weighted combination `C1 e_zero + e_first`
    pub lyapunov: f64,
    pub d_wave: f64,
    pub d_flat: f64,
    pub d_visc: f64,
    pub d_density: f64,
    pub d_potential: f64,
    pub sup_n: f64,
    pub sup_u: f64,
    /// one-fluid: sup|phi - phi^r|; two-fluid: sup|d/dx(phi - phi^r)|
    pub sup_phi: f64,
    /// one-fluid: sup|phi + ln n|; two-fluid: sup|u_i - u_e|
    pub quasineutral_gap: f64,
    /// two-fluid only: the beta/gamma-weighted square against d/dx u^r
    pub quad_form: Option<f64>,
}

impl EnergyReport {
    /// sup-norm of [n - n^r, u - u^r]
    pub fn sup_distance(&self) -> f64 {
        self.sup_n.max(self.sup_u)
    }
}

pub fn energy_report_onefluid(
    state: &FluidState,
    profile: &RarefactionProfile,
    params: &PhysParamsOne,
) -> Result<EnergyReport> {
    let p = PerturbationOne::new(state, profile)?;
    let zero = zero_order_from_parts(state, profile, params, &p)?;
    let first = first_order_from_parts(state, &p)?;
    let diss = dissipation_from_parts(state, profile, &p)?;
    let c1 = lyapunov_weight(params.n_minus);

    let quasi = state
        .phi
        .values()
        .iter()
        .zip(state.n.values())
        .map(|(phi, n)| (phi + n.ln()).abs())
        .fold(0.0f64, f64::max);

    Ok(EnergyReport {
        time: state.time,
        e_zero: zero.total(),
        e_first: first.total(),
        lyapunov: c1 * zero.total() + first.total(),
        d_wave: diss.wave_weighted,
        d_flat: diss.flat,
        d_visc: diss.viscous,
        d_density: diss.density,
        d_potential: diss.potential,
        sup_n: p.ntilde.max_abs(),
        sup_u: p.utilde.max_abs(),
        sup_phi: p.phitilde.max_abs(),
        quasineutral_gap: quasi,
        quad_form: None,
    })
}

/// Weights balancing the two species' masses: `m_i beta = m_e gamma`.
#[derive(Debug, Clone, Copy)]
pub struct TwoFluidWeights {
    pub beta: f64,
    pub gamma: f64,
}

impl TwoFluidWeights {
    pub fn new(beta: f64, gamma: f64, params: &PhysParamsTwo) -> Result<Self> {
        if !(beta > 0.0 && gamma > 0.0) {
            return Err(Error::Parameter("weights must be positive".into()));
        }
        let lhs = params.m_ion * beta;
        let rhs = params.m_electron * gamma;
        if (lhs - rhs).abs() > 1e-14 * lhs {
            return Err(Error::Parameter(format!(
                "weights must satisfy m_i beta = m_e gamma, got {lhs} vs {rhs}"
            )));
        }
        Ok(Self { beta, gamma })
    }

    /// Minimal normalized solution `beta = m_e`, `gamma = m_i`.
    pub fn default_for(params: &PhysParamsTwo) -> Self {
        Self { beta: params.m_electron, gamma: params.m_ion }
    }
}

/// Contributions to the two-fluid functional.
#[derive(Debug, Clone, Copy)]
pub struct TwoFluidEnergy {
    pub kinetic_ion: f64,
    pub kinetic_electron: f64,
    pub pressure_ion: f64,
    pub pressure_electron: f64,
    pub potential_grad: f64,
    /// the C2-weighted mixed terms (u~_alpha, d/dx phi~ d/dx u^r)
    pub cross_beta_gamma: f64,
    pub density_grad_ion: f64,
    pub density_grad_electron: f64,
    pub cross_first_ion: f64,
    pub cross_first_electron: f64,
    pub velocity_grad_ion: f64,
    pub velocity_grad_electron: f64,
    /// ((sqrt(gamma m_i) u~_i + sqrt(beta m_e) u~_e)^2, d/dx u^r) / (2(beta+gamma))
    pub quad_form: f64,
    /// same square weighted by the profile density n^r
    pub quad_form_density_weighted: f64,
    /// n~-weighted remainder of the quad-form identity
    pub correction_density: f64,
    /// profile-drift remainder carrying dt dx phi^r
    pub correction_profile_drift: f64,
    /// the weight C2 applied to the zero-order group
    pub c2: f64,
}

impl TwoFluidEnergy {
    pub fn zero_order_total(&self) -> f64 {
        self.kinetic_ion + self.kinetic_electron + self.pressure_ion + self.pressure_electron
            + self.potential_grad
    }

    pub fn first_order_total(&self) -> f64 {
        self.density_grad_ion
            + self.density_grad_electron
            + self.cross_first_ion
            + self.cross_first_electron
    }

    pub fn combined(&self) -> f64 {
        self.c2 * self.zero_order_total() + self.cross_beta_gamma + self.first_order_total()
    }
}

pub fn twofluid_energy(
    state: &TwoFluidState,
    profile: &RarefactionProfile,
    params: &PhysParamsTwo,
    weights: TwoFluidWeights,
) -> Result<TwoFluidEnergy> {
    // re-validate: callers may construct weights directly
    let w = TwoFluidWeights::new(weights.beta, weights.gamma, params)?;
    if state.n_ion.grid() != profile.nr.grid() {
        return Err(Error::GridMismatch);
    }
    let grid = state.n_ion.grid();
    let dx = grid.dx;
    let nn = grid.n_cells;

    let ut_i = state.u_ion.zip_map(&profile.ur, |a, b| a - b)?;
    let ut_e = state.u_electron.zip_map(&profile.ur, |a, b| a - b)?;
    let nt_i = state.n_ion.zip_map(&profile.nr, |a, b| a - b)?;
    let nt_e = state.n_electron.zip_map(&profile.nr, |a, b| a - b)?;
    let phit = state.phi.zip_map(&profile.phir, |a, b| a - b)?;
    let dn_i = nt_i.ddx()?;
    let dn_e = nt_e.ddx()?;
    let du_i = ut_i.ddx()?;
    let du_e = ut_e.ddx()?;
    let dphi = phit.ddx()?;
    let dt_dphir = profile.dt_dphir();

    let (mi, me) = (params.m_ion, params.m_electron);
    let (beta, gamma) = (w.beta, w.gamma);
    let norm = 1.0 / (2.0 * (beta + gamma));
    let c2 = lyapunov_weight_two(params);

    let mut kin_i = Vec::with_capacity(nn);
    let mut kin_e = Vec::with_capacity(nn);
    let mut press_i = Vec::with_capacity(nn);
    let mut press_e = Vec::with_capacity(nn);
    let mut cross_bg = Vec::with_capacity(nn);
    let mut dens_i = Vec::with_capacity(nn);
    let mut dens_e = Vec::with_capacity(nn);
    let mut cf_i = Vec::with_capacity(nn);
    let mut cf_e = Vec::with_capacity(nn);
    let mut quad = Vec::with_capacity(nn);
    let mut quad_nr = Vec::with_capacity(nn);
    let mut corr_n = Vec::with_capacity(nn);
    let mut corr_p = Vec::with_capacity(nn);

    for i in 0..nn {
        let (ni, ne) = (state.n_ion.values()[i], state.n_electron.values()[i]);
        let nr = profile.nr.values()[i];
        let durv = profile.dur.values()[i];
        let (ui, ue) = (ut_i.values()[i], ut_e.values()[i]);
        let (dni, dne) = (dn_i.values()[i], dn_e.values()[i]);
        let dph = dphi.values()[i];

        kin_i.push(mi * ni * ui * ui);
        kin_e.push(me * ne * ue * ue);
        press_i.push(2.0 * ni * psi_potential(ni, nr, params.t_ion)?);
        press_e.push(2.0 * ne * psi_potential(ne, nr, params.t_electron)?);
        cross_bg.push(
            -c2 * beta * mi * 2.0 * norm * ui * dph * durv
                + c2 * gamma * me * 2.0 * norm * ue * dph * durv,
        );
        dens_i.push(dni * dni / (ni * ni));
        dens_e.push(dne * dne / (ne * ne));
        cf_i.push(2.0 * mi * ui * dni);
        cf_e.push(2.0 * me * ue * dne);

        let s = (gamma * mi).sqrt() * ui + (beta * me).sqrt() * ue;
        quad.push(norm * s * s * durv);
        quad_nr.push(norm * nr * s * s * durv);
        corr_n.push(
            norm * (gamma * mi * nt_i.values()[i] * ui * ui
                + (beta * mi * nt_e.values()[i] + gamma * me * nt_i.values()[i]) * ui * ue
                + beta * me * nt_e.values()[i] * ue * ue)
                * durv,
        );
        corr_p.push(-norm * (beta * mi * ui - gamma * me * ue) * dt_dphir.values()[i] * durv);
    }

    Ok(TwoFluidEnergy {
        kinetic_ion: trapezoid(&kin_i, dx),
        kinetic_electron: trapezoid(&kin_e, dx),
        pressure_ion: trapezoid(&press_i, dx),
        pressure_electron: trapezoid(&press_e, dx),
        potential_grad: dphi.inner(&dphi)?,
        cross_beta_gamma: trapezoid(&cross_bg, dx),
        density_grad_ion: trapezoid(&dens_i, dx),
        density_grad_electron: trapezoid(&dens_e, dx),
        cross_first_ion: trapezoid(&cf_i, dx),
        cross_first_electron: trapezoid(&cf_e, dx),
        velocity_grad_ion: du_i.inner(&du_i)?,
        velocity_grad_electron: du_e.inner(&du_e)?,
        quad_form: trapezoid(&quad, dx),
        quad_form_density_weighted: trapezoid(&quad_nr, dx),
        correction_density: trapezoid(&corr_n, dx),
        correction_profile_drift: trapezoid(&corr_p, dx),
        c2,
    })
}

pub fn energy_report_twofluid(
    state: &TwoFluidState,
    profile: &RarefactionProfile,
    params: &PhysParamsTwo,
) -> Result<EnergyReport> {
    let weights = TwoFluidWeights::default_for(params);
    let e = twofluid_energy(state, profile, params, weights)?;

    let nt_i = state.n_ion.zip_map(&profile.nr, |a, b| a - b)?;
    let nt_e = state.n_electron.zip_map(&profile.nr, |a, b| a - b)?;
    let ut_i = state.u_ion.zip_map(&profile.ur, |a, b| a - b)?;
    let ut_e = state.u_electron.zip_map(&profile.ur, |a, b| a - b)?;
    let phit = state.phi.zip_map(&profile.phir, |a, b| a - b)?;
    let dphi = phit.ddx()?;
    let d2phi = phit.d2dx2()?;
    let velocity_gap = state.u_ion.zip_map(&state.u_electron, |a, b| a - b)?;
    let dn_i = nt_i.ddx()?;
    let dn_e = nt_e.ddx()?;
    let du_i = ut_i.ddx()?;
    let du_e = ut_e.ddx()?;

    let dx = state.n_ion.grid().dx;
    let nn = state.n_ion.len();
    let mut wave = Vec::with_capacity(nn);
    let mut flat = Vec::with_capacity(nn);
    for i in 0..nn {
        let durv = profile.dur.values()[i];
        let dni = dn_i.values()[i];
        let dne = dn_e.values()[i];
        let dui = du_i.values()[i];
        let due = du_e.values()[i];
        let (ui, ue) = (ut_i.values()[i], ut_e.values()[i]);
        wave.push(durv * (ui * ui + ue * ue + dni * dni + dne * dne + dui * dui + due * due));
        flat.push(
            dni * dni
                + dne * dne
                + dui * dui
                + due * due
                + d2phi.values()[i] * d2phi.values()[i],
        );
    }

    Ok(EnergyReport {
        time: state.time,
        e_zero: e.zero_order_total(),
        e_first: e.first_order_total(),
        lyapunov: e.combined(),
        d_wave: trapezoid(&wave, dx),
        d_flat: trapezoid(&flat, dx),
        d_visc: e.velocity_grad_ion + e.velocity_grad_electron,
        d_density: e.density_grad_ion + e.density_grad_electron,
        d_potential: d2phi.inner(&d2phi)?,
        sup_n: nt_i.max_abs().max(nt_e.max_abs()),
        sup_u: ut_i.max_abs().max(ut_e.max_abs()),
        sup_phi: dphi.max_abs(),
        quasineutral_gap: velocity_gap.max_abs(),
        quad_form: Some(e.quad_form),
    })
}

/// One row of the sup-distance table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub time: f64,
    pub sup_n: f64,
    pub sup_u: f64,
    pub sup_phi: f64,
}

/// Sup-distances to the smooth profile at snapshot times; the potential
/// column is gradient-level for the two-fluid model.
pub fn convergence_report(reports: &[EnergyReport]) -> Result<Vec<ConvergenceRow>> {
    if reports.len() < 2 {
        return Err(Error::Parameter("need at least two snapshots".into()));
    }
    Ok(reports
        .iter()
        .map(|r| ConvergenceRow { time: r.time, sup_n: r.sup_n, sup_u: r.sup_u, sup_phi: r.sup_phi })
        .collect())
}

/// Least-squares slope and multiplier of `value ~ constant * t^slope`.
pub fn fit_loglog_slope(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::Parameter("need at least two samples to fit".into()));
    }
    if samples.iter().any(|(t, v)| !(*t > 0.0) || !(*v > 0.0)) {
        return Err(Error::Parameter("log-log fit needs positive times and values".into()));
    }
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|(t, _)| t.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|(_, v)| v.ln()).collect();
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    if sxx == 0.0 {
        return Err(Error::Parameter("degenerate time samples".into()));
    }
    let slope = sxy / sxx;
    let constant = (ym - slope * xm).exp();
    Ok((slope, constant))
}

/// Fitted decay estimate over the trailing decade of a series.
#[derive(Debug, Clone)]
pub struct DecayEstimate {
    pub slope: f64,
    pub constant: f64,
    /// time window actually fitted
    pub window: (f64, f64),
}

pub fn fit_decay(series: &[(f64, f64)]) -> Result<DecayEstimate> {
    if series.len() < 10 {
        return Err(Error::Parameter("need at least 10 samples".into()));
    }
    if series.iter().any(|(t, v)| !(*t > 0.0) || !(*v > 0.0)) {
        return Err(Error::Parameter("decay fit needs positive times and values".into()));
    }
    let t_max = series.iter().map(|(t, _)| *t).fold(0.0f64, f64::max);
    let t_min = series.iter().map(|(t, _)| *t).fold(f64::INFINITY, f64::min);
    if t_max / t_min < 9.99 {
        return Err(Error::Parameter("samples must span at least a decade".into()));
    }
    let window: Vec<(f64, f64)> =
        series.iter().copied().filter(|(t, _)| *t >= t_max / 10.0).collect();
    let (slope, constant) = fit_loglog_slope(&window)?;
    Ok(DecayEstimate { slope, constant, window: (t_max / 10.0, t_max) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn psi_vanishes_on_the_diagonal() {
        for nr in [0.1, 1.0, 7.3] {
            for a in [0.5, 1.0, 4.0] {
                assert_eq!(psi_potential(nr, nr, a).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn psi_closed_form_value() {
        let v = psi_potential(2.0, 1.0, 1.0).unwrap();
        assert!((v - (2.0f64.ln() + 0.5 - 1.0)).abs() < 1e-15);
        assert!((v - 0.193_147_180_559_945_3).abs() < 1e-12);
    }

    #[test]
    fn psi_quadratic_near_diagonal() {
        for h in [1e-3, -1e-3] {
            let n = 1.0 + h;
            let ratio = psi_potential(n, 1.0, 1.0).unwrap() / (h * h);
            assert!((ratio - 0.5).abs() < 1e-3, "ratio = {ratio}");
        }
    }

    #[test]
    fn psi_rejects_nonpositive() {
        assert!(psi_potential(-1.0, 1.0, 1.0).is_err());
        assert!(psi_potential(1.0, 0.0, 1.0).is_err());
    }

    /// Adaptive Simpson quadrature of the defining integral, the
    /// implementation-independent oracle for the closed form.
    pub(crate) fn psi_by_quadrature(n: f64, nr: f64, a: f64) -> f64 {
        fn simpson(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
            (hi - lo) / 6.0 * (f(lo) + 4.0 * f(0.5 * (lo + hi)) + f(hi))
        }
        fn adapt(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, whole: f64, depth: usize) -> f64 {
            let mid = 0.5 * (lo + hi);
            let left = simpson(f, lo, mid);
            let right = simpson(f, mid, hi);
            if depth == 0 || (left + right - whole).abs() < 1e-13 * whole.abs().max(1e-3) {
                left + right + (left + right - whole) / 15.0
            } else {
                adapt(f, lo, mid, left, depth - 1) + adapt(f, mid, hi, right, depth - 1)
            }
        }
        let integrand = move |s: f64| a * (s - nr) / (s * s);
        let whole = simpson(&integrand, nr, n);
        adapt(&integrand, nr, n, whole, 40)
    }

    #[test]
    fn psi_matches_quadrature_on_log_grid() {
        for i in 0..20 {
            for j in 0..20 {
                let n = 0.1 * 100.0f64.powf(i as f64 / 19.0);
                let nr = 0.1 * 100.0f64.powf(j as f64 / 19.0);
                let closed = psi_potential(n, nr, 1.7).unwrap();
                let oracle = psi_by_quadrature(n, nr, 1.7);
                let scale = closed.abs().max(1e-12);
                assert!(
                    (closed - oracle).abs() <= 1e-10 * scale,
                    "psi({n}, {nr}): {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn loglog_fits() {
        let series: Vec<(f64, f64)> = (1..=40).map(|k| {
            let t = k as f64;
            (t, 1.0 / t)
        }).collect();
        let est = fit_decay(&series).unwrap();
        assert!((est.slope + 1.0).abs() < 1e-10);

        let series: Vec<(f64, f64)> = (1..=40).map(|k| {
            let t = k as f64;
            (t, 3.0 / t.sqrt())
        }).collect();
        let est = fit_decay(&series).unwrap();
        assert!((est.slope + 0.5).abs() < 1e-10);
        assert!((est.constant - 3.0).abs() < 1e-8);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let short = vec![(1.0, 1.0); 5];
        assert!(fit_decay(&short).is_err());
        let negative: Vec<(f64, f64)> = (1..=20).map(|k| (k as f64, -1.0)).collect();
        assert!(fit_decay(&negative).is_err());
    }

    proptest! {
        #[test]
        fn psi_nonnegative_and_definite(n in 0.05f64..20.0, nr in 0.05f64..20.0) {
            let v = psi_potential(n, nr, 1.0).unwrap();
            prop_assert!(v >= 0.0);
            if (n - nr).abs() > 1e-9 {
                prop_assert!(v > 0.0);
            }
        }
    }
}
