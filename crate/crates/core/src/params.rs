//! Model constants and far-field states for the one- and two-fluid systems.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One-fluid model: ion temperature `A`, Boltzmann electrons, sound speed
/// `c = sqrt(A + 1)`. Far-field states sit on the 2-rarefaction curve
/// `u - c ln n = u_minus - c ln n_minus`, so `u_plus` is always derived.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysParamsOne {
    pub a_temp: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    pub u_minus: f64,
    /// tanh steepness of the smoothed Riemann data
    pub eps_smooth: f64,
}

impl PhysParamsOne {
    pub fn new(a_temp: f64, n_minus: f64, n_plus: f64, u_minus: f64, eps_smooth: f64) -> Result<Self> {
        let p = Self { a_temp, n_minus, n_plus, u_minus, eps_smooth };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_temp > 0.0) {
            return Err(Error::Parameter(format!("A = {} must be positive", self.a_temp)));
        }
        if !(self.n_minus > 0.0 && self.n_plus > 0.0) {
            return Err(Error::Parameter("far-field densities must be positive".into()));
        }
        if !(self.n_plus > self.n_minus) {
            return Err(Error::Parameter(format!(
                "2-rarefaction connection needs n_plus > n_minus, got {} <= {}",
                self.n_plus, self.n_minus
            )));
        }
        if !(self.eps_smooth > 0.0) {
            return Err(Error::Parameter("smoothing parameter must be positive".into()));
        }
        if !self.u_minus.is_finite() {
            return Err(Error::Parameter("u_minus must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn sound_speed(&self) -> f64 {
        (self.a_temp + 1.0).sqrt()
    }

    /// Right velocity on the 2-rarefaction curve through the left state.
    #[inline]
    pub fn u_plus(&self) -> f64 {
        self.u_minus + self.sound_speed() * (self.n_plus / self.n_minus).ln()
    }

    /// Far-field potentials from the quasineutral condition `n = e^{-phi}`.
    #[inline]
    pub fn phi_minus(&self) -> f64 {
        -self.n_minus.ln()
    }

    #[inline]
    pub fn phi_plus(&self) -> f64 {
        -self.n_plus.ln()
    }

    /// Wave strength `|n_plus - n_minus| + |u_plus - u_minus|`.
    pub fn wave_strength(&self) -> f64 {
        (self.n_plus - self.n_minus).abs() + (self.u_plus() - self.u_minus).abs()
    }
}

/// Two-fluid model: per-species mass, temperature and viscosity, with the
/// quasineutral sound speed `c = sqrt((T_i + T_e) / (m_i + m_e))` and the
/// potential coefficient `(T_i m_e - T_e m_i) / (m_i + m_e)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PhysParamsTwo {
    pub m_ion: f64,
    pub m_electron: f64,
    pub t_ion: f64,
    pub t_electron: f64,
    #[serde(default = "unit_viscosity")]
    pub mu_ion: f64,
    #[serde(default = "unit_viscosity")]
    pub mu_electron: f64,
    pub n_minus: f64,
    pub n_plus: f64,
    pub u_minus: f64,
    pub eps_smooth: f64,
}

fn unit_viscosity() -> f64 {
    1.0
}

impl PhysParamsTwo {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        m_ion: f64,
        m_electron: f64,
        t_ion: f64,
        t_electron: f64,
        n_minus: f64,
        n_plus: f64,
        u_minus: f64,
        eps_smooth: f64,
    ) -> Result<Self> {
        let p = Self {
            m_ion,
            m_electron,
            t_ion,
            t_electron,
            mu_ion: 1.0,
            mu_electron: 1.0,
            n_minus,
            n_plus,
            u_minus,
            eps_smooth,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("m_ion", self.m_ion),
            ("m_electron", self.m_electron),
            ("t_ion", self.t_ion),
            ("t_electron", self.t_electron),
            ("mu_ion", self.mu_ion),
            ("mu_electron", self.mu_electron),
            ("n_minus", self.n_minus),
            ("n_plus", self.n_plus),
            ("eps_smooth", self.eps_smooth),
        ] {
            if !(v > 0.0) {
                return Err(Error::Parameter(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.n_plus > self.n_minus) {
            return Err(Error::Parameter(format!(
                "2-rarefaction connection needs n_plus > n_minus, got {} <= {}",
                self.n_plus, self.n_minus
            )));
        }
        if !self.u_minus.is_finite() {
            return Err(Error::Parameter("u_minus must be finite".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn sound_speed(&self) -> f64 {
        ((self.t_ion + self.t_electron) / (self.m_ion + self.m_electron)).sqrt()
    }

    /// Coefficient of `ln n` in the large-time potential; vanishes exactly
    /// when `T_i / m_i = T_e / m_e`.
    #[inline]
    pub fn phi_coeff(&self) -> f64 {
        (self.t_ion * self.m_electron - self.t_electron * self.m_ion)
            / (self.m_ion + self.m_electron)
    }

    #[inline]
    pub fn u_plus(&self) -> f64 {
        self.u_minus + self.sound_speed() * (self.n_plus / self.n_minus).ln()
    }

    #[inline]
    pub fn phi_minus(&self) -> f64 {
        self.phi_coeff() * self.n_minus.ln()
    }

    #[inline]
    pub fn phi_plus(&self) -> f64 {
        self.phi_coeff() * self.n_plus.ln()
    }

    pub fn wave_strength(&self) -> f64 {
        (self.n_plus - self.n_minus).abs() + (self.u_plus() - self.u_minus).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_fluid_sound_speed_and_curve() {
        let p = PhysParamsOne::new(3.0, 1.0, std::f64::consts::E, 0.0, 0.1).unwrap();
        assert_eq!(p.sound_speed(), 2.0);
        assert!((p.sound_speed().powi(2) - (p.a_temp + 1.0)).abs() < 1e-15);
        // u_plus = u_minus + c ln(e/1) = 2
        assert!((p.u_plus() - 2.0).abs() < 1e-14);
        assert!(p.u_plus() > p.u_minus);
    }

    #[test]
    fn rejects_non_rarefaction_data() {
        assert!(PhysParamsOne::new(1.0, 2.0, 1.0, 0.0, 0.1).is_err());
        assert!(PhysParamsOne::new(-1.0, 1.0, 2.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn two_fluid_derived_constants() {
        let p = PhysParamsTwo::new(2.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        let c2 = p.sound_speed().powi(2);
        assert!((c2 - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.phi_coeff() - (-1.0 / 3.0)).abs() < 1e-15);

        // symmetric plasma has no large-time potential
        let sym = PhysParamsTwo::new(1.0, 1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        assert_eq!(sym.phi_coeff(), 0.0);

        // matched temperature-to-mass ratio, asymmetric masses
        let matched = PhysParamsTwo::new(2.0, 1.0, 2.0, 1.0, 1.0, 2.0, 0.0, 0.1).unwrap();
        assert_eq!(matched.phi_coeff(), 0.0);
    }
}
