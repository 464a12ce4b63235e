//! Model constants and the figure-level normalized parameterization.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Vec2, ONE, ZERO};

/// Raw model constants in units with ħ = 1.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Excitation energy of the neighbor atom.
    pub e_a: f64,
    /// Pump frequency.
    pub e_l: f64,
    /// Dipole moment for direct optical excitation of the continuum.
    pub mu: C64,
    /// Dipole moment of the neighbor two-level atom.
    pub mu_a: C64,
    /// Energy-transfer (dipole-dipole) constant.
    pub j: C64,
    /// Pump amplitude.
    pub alpha: C64,
}

impl PhysicalParams {
    /// γ_a = π|J|².
    pub fn gamma_a(&self) -> f64 {
        PI * self.j.norm_sqr()
    }

    /// ΔE_a = E_a − E_L.
    pub fn detuning(&self) -> f64 {
        self.e_a - self.e_l
    }

    /// Asymmetry parameter q_a = μ_a / (π μ J*). Complex in general.
    pub fn q_a(&self) -> C64 {
        self.mu_a / (PI * self.mu * self.j.conj())
    }

    /// Direct-ionization rate π|μα_L|².
    pub fn direct_rate(&self) -> f64 {
        PI * (self.mu * self.alpha).norm_sqr()
    }

    /// M_a = μ_a − iπμJ*.
    pub fn m_a(&self) -> C64 {
        self.mu_a - C64::i() * PI * self.mu * self.j.conj()
    }

    /// M_a^c = μ_a* − iπμ*J.
    pub fn m_a_c(&self) -> C64 {
        self.mu_a.conj() - C64::i() * PI * self.mu.conj() * self.j
    }

    pub fn is_finite(&self) -> bool {
        self.e_a.is_finite()
            && self.e_l.is_finite()
            && self.mu.is_finite()
            && self.mu_a.is_finite()
            && self.j.is_finite()
            && self.alpha.is_finite()
    }

    /// Recover the normalized (q_a, γ_a, Ω) triple; inverse of
    /// [`NormalizedParams::to_physical`] for the neighbor model.
    pub fn normalized(&self) -> NormalizedParams {
        let gamma_a = self.gamma_a();
        let q = self.q_a();
        let q_a = if q.is_finite() { q.re } else { 0.0 };
        let big_gamma = gamma_a;
        let scale = (4.0 * PI * big_gamma * (q_a * q_a + 1.0)).sqrt();
        // The sign of Ω follows the real part of μα_L in the real gauge.
        let mu_alpha = self.mu * self.alpha;
        let sign = if mu_alpha.re < 0.0 { -1.0 } else { 1.0 };
        NormalizedParams {
            q_a,
            gamma_a,
            q_b: 0.0,
            gamma_b: 0.0,
            omega: sign * scale * mu_alpha.norm(),
            e_a: self.e_a,
            e_b: self.e_a,
            e_l: self.e_l,
        }
    }
}

/// Figure-level parameters.
///
/// The pump parameter is the real, signed Ω with
/// |Ω|² = 4πΓ(Q²+1)|μα_L|², Γ = γ_a + γ_b and Q = (γ_a q_a + γ_b q_b)/Γ.
/// The neighbor model uses q_b = γ_b = 0, the Fano reference q_a = γ_a = 0.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams {
    pub q_a: f64,
    pub gamma_a: f64,
    pub q_b: f64,
    pub gamma_b: f64,
    pub omega: f64,
    pub e_a: f64,
    pub e_b: f64,
    pub e_l: f64,
}

impl Default for NormalizedParams {
    fn default() -> Self {
        NormalizedParams {
            q_a: 1.0,
            gamma_a: 1.0,
            q_b: 0.0,
            gamma_b: 0.0,
            omega: 1.0,
            e_a: 1.0,
            e_b: 1.0,
            e_l: 1.0,
        }
    }
}

impl NormalizedParams {
    /// Neighbor-model parameters with E_b = E_a.
    pub fn neighbor(q_a: f64, gamma_a: f64, omega: f64, e_a: f64, e_l: f64) -> Self {
        NormalizedParams {
            q_a,
            gamma_a,
            q_b: 0.0,
            gamma_b: 0.0,
            omega,
            e_a,
            e_b: e_a,
            e_l,
        }
    }

    /// Fano-reference parameters with E_a = E_b.
    pub fn fano(q_b: f64, gamma_b: f64, omega: f64, e_b: f64, e_l: f64) -> Self {
        NormalizedParams {
            q_a: 0.0,
            gamma_a: 0.0,
            q_b,
            gamma_b,
            omega,
            e_a: e_b,
            e_b,
            e_l,
        }
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn is_resonant(&self) -> bool {
        self.e_a == self.e_l
    }

    /// Combined width Γ = γ_a + γ_b.
    pub fn big_gamma(&self) -> f64 {
        self.gamma_a + self.gamma_b
    }

    /// Combined asymmetry Q = (γ_a q_a + γ_b q_b)/Γ.
    pub fn big_q(&self) -> f64 {
        let g = self.big_gamma();
        if g == 0.0 {
            0.0
        } else {
            (self.gamma_a * self.q_a + self.gamma_b * self.q_b) / g
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("q_a", self.q_a),
            ("gamma_a", self.gamma_a),
            ("q_b", self.q_b),
            ("gamma_b", self.gamma_b),
            ("omega", self.omega),
            ("e_a", self.e_a),
            ("e_b", self.e_b),
            ("e_l", self.e_l),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Domain(format!("{name} = {v} is not finite")));
        }
        if self.gamma_a < 0.0 {
            return Err(Error::Domain(format!("gamma_a = {} < 0", self.gamma_a)));
        }
        if self.gamma_b < 0.0 {
            return Err(Error::Domain(format!("gamma_b = {} < 0", self.gamma_b)));
        }
        Ok(())
    }

    /// Pump amplitude α_L in the real gauge μ = 1.
    pub fn pump_amplitude(&self) -> Result<f64> {
        self.validate()?;
        let g = self.big_gamma();
        if g == 0.0 {
            if self.omega != 0.0 {
                return Err(Error::InvalidNormalization(
                    "gamma_a + gamma_b = 0 leaves Omega undefined".into(),
                ));
            }
            return Ok(0.0);
        }
        let q = self.big_q();
        Ok(self.omega / (4.0 * PI * g * (q * q + 1.0)).sqrt())
    }

    /// Gauge completion for the neighbor model: μ = 1, J = √(γ_a/π) ≥ 0,
    /// μ_a = q_a π μ J, α_L real with the sign of Ω.
    pub fn to_physical(&self) -> Result<PhysicalParams> {
        let alpha = self.pump_amplitude()?;
        let mu = 1.0;
        let j = (self.gamma_a / PI).sqrt();
        let mu_a = self.q_a * PI * mu * j;
        Ok(PhysicalParams {
            e_a: self.e_a,
            e_l: self.e_l,
            mu: C64::new(mu, 0.0),
            mu_a: C64::new(mu_a, 0.0),
            j: C64::new(j, 0.0),
            alpha: C64::new(alpha, 0.0),
        })
    }

    /// Maps a normalized frequency (E − E_a)/γ_a back to an energy.
    pub fn energy_from_reduced(&self, x: f64) -> f64 {
        self.e_a + self.gamma_a * x
    }

    pub fn reduced_energy(&self, e: f64) -> f64 {
        (e - self.e_a) / self.gamma_a
    }
}

/// Initial bound amplitudes (c00, c10); the continuum starts empty.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialState {
    pub c00: C64,
    pub c10: C64,
}

impl InitialState {
    /// Both electrons in their ground states.
    pub fn ground() -> Self {
        InitialState { c00: ONE, c10: ZERO }
    }

    pub fn new(c00: C64, c10: C64) -> Result<Self> {
        let norm = c00.norm_sqr() + c10.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "initial bound amplitudes must be normalized, |c00|^2 + |c10|^2 = {norm}"
            )));
        }
        Ok(InitialState { c00, c10 })
    }

    pub fn is_ground(&self) -> bool {
        self.c10 == ZERO && (self.c00.norm_sqr() - 1.0).abs() < 1e-15
    }

    pub fn as_vec(&self) -> Vec2 {
        Vec2::new(self.c00, self.c10)
    }
}

impl Default for InitialState {
    fn default() -> Self {
        Self::ground()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_pump_gauge() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 0.0, 1.0, 1.0)
            .to_physical()
            .unwrap();
        assert_eq!(p.alpha, ZERO);
        assert!((p.j.re - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert!((p.mu_a.re - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn fig4_pump_amplitude() {
        let p = NormalizedParams::neighbor(1.0, 1.0, 2.0, 1.0, 0.8)
            .to_physical()
            .unwrap();
        let expected = 2.0 / (8.0 * PI).sqrt();
        assert!((p.alpha.re - expected).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        for &(q, g, om) in &[(1.0, 1.0, 2.0), (100.0, 1e-4, -5e-4), (0.1, 3.0, 0.7), (-2.0, 0.5, -1.5)] {
            let n = NormalizedParams::neighbor(q, g, om, 1.0, 0.9);
            let back = n.to_physical().unwrap().normalized();
            assert!((back.q_a - q).abs() < 1e-12 * q.abs().max(1.0));
            assert!((back.gamma_a - g).abs() < 1e-12 * g);
            assert!((back.omega - om).abs() < 1e-12 * om.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_widths() {
        let n = NormalizedParams::neighbor(1.0, -1.0, 1.0, 1.0, 1.0);
        assert!(matches!(n.to_physical(), Err(Error::Domain(_))));
        let n = NormalizedParams::neighbor(1.0, 0.0, 1.0, 1.0, 1.0);
        assert!(matches!(n.to_physical(), Err(Error::InvalidNormalization(_))));
        let n = NormalizedParams::neighbor(1.0, 0.0, 0.0, 1.0, 1.0);
        assert!(n.to_physical().is_ok());
        let n = NormalizedParams::neighbor(f64::NAN, 1.0, 0.0, 1.0, 1.0);
        assert!(matches!(n.to_physical(), Err(Error::Domain(_))));
    }

    #[test]
    fn initial_state_normalization() {
        assert!(InitialState::new(ONE, ONE).is_err());
        let s = 0.5_f64.sqrt();
        assert!(InitialState::new(C64::new(s, 0.0), C64::new(0.0, s)).is_ok());
    }
}
