//! Physical parameters of the driven qubits+cavity system and the
//! geometry-derived coupling rates.
//!
//! Every rate and detuning is expressed in units of the local spontaneous
//! decay rate γ (γ = 1 by convention); inputs are therefore dimensionless
//! ratios and the numerics stay well conditioned even though the underlying
//! scales span many orders of magnitude.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::HilbertSpace;

fn one() -> f64 {
    1.0
}

fn default_n_max() -> usize {
    3
}

/// All rates and detunings of the driven two-qubit + cavity system.
///
/// Serde names follow the conventional symbols (`Delta`, `Omega`, `J`, ...)
/// so the same spellings work in TOML configs and as sweep-axis names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Qubit–qubit half-detuning δ: the emitter frequencies are ω₀ ∓ δ.
    #[serde(default)]
    pub delta: f64,
    /// Laser–qubit detuning Δ = ω₀ − ω_L (0 at the two-photon resonance).
    #[serde(rename = "Delta", default)]
    pub laser_detuning: f64,
    /// Laser–cavity detuning Δ_a = ω_a − ω_L.
    #[serde(rename = "Delta_a", default)]
    pub cavity_detuning: f64,
    /// Drive Rabi frequency Ω.
    #[serde(rename = "Omega", default)]
    pub drive: f64,
    /// Coherent qubit–qubit coupling J.
    #[serde(rename = "J", default)]
    pub j_coupling: f64,
    /// Local spontaneous decay rate γ (the unit of every other rate).
    #[serde(default = "one")]
    pub gamma: f64,
    /// Local decay of qubit 1; defaults to γ.
    #[serde(default)]
    pub gamma1: Option<f64>,
    /// Local decay of qubit 2; defaults to γ.
    #[serde(default)]
    pub gamma2: Option<f64>,
    /// Collective (dissipative) coupling rate γ₁₂.
    #[serde(default)]
    pub gamma12: f64,
    /// Cavity leakage rate κ.
    #[serde(default)]
    pub kappa: f64,
    /// Qubit–cavity coupling g.
    #[serde(default)]
    pub g: f64,
    /// Additional local decay rate Γ.
    #[serde(rename = "Gamma_extra", default)]
    pub extra_decay: f64,
    /// Local pure-dephasing rate γ_φ.
    #[serde(rename = "gamma_phi", default)]
    pub local_dephasing: f64,
    /// Collective pure-dephasing rate Γ_φ.
    #[serde(rename = "Gamma_phi", default)]
    pub collective_dephasing: f64,
    /// Cavity Fock cutoff (the cavity factor has dimension n_max + 1).
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            delta: 0.0,
            laser_detuning: 0.0,
            cavity_detuning: 0.0,
            drive: 0.0,
            j_coupling: 0.0,
            gamma: 1.0,
            gamma1: None,
            gamma2: None,
            gamma12: 0.0,
            kappa: 0.0,
            g: 0.0,
            extra_decay: 0.0,
            local_dephasing: 0.0,
            collective_dephasing: 0.0,
            n_max: 3,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::InvalidParam(format!("gamma must be positive, got {}", self.gamma)));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParam(format!("kappa must be >= 0, got {}", self.kappa)));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParam("n_max must be >= 1".into()));
        }
        let (g1, g2) = (self.gamma_1(), self.gamma_2());
        if !(g1 > 0.0 && g2 > 0.0) {
            return Err(Error::InvalidParam("local decay rates must be positive".into()));
        }
        // Cauchy–Schwarz bound on the collective decay rate.
        if self.gamma12.abs() > (g1 * g2).sqrt() * (1.0 + 1e-12) {
            return Err(Error::InvalidParam(format!(
                "|gamma12| = {} exceeds sqrt(gamma1*gamma2) = {}",
                self.gamma12.abs(),
                (g1 * g2).sqrt()
            )));
        }
        for (name, v) in [
            ("g", self.g),
            ("Gamma_extra", self.extra_decay),
            ("gamma_phi", self.local_dephasing),
            ("Gamma_phi", self.collective_dephasing),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParam(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn gamma_1(&self) -> f64 {
        self.gamma1.unwrap_or(self.gamma)
    }

    pub fn gamma_2(&self) -> f64 {
        self.gamma2.unwrap_or(self.gamma)
    }

    /// Purcell rate Γ_P = 4g²/κ.
    pub fn purcell_rate(&self) -> f64 {
        if self.kappa > 0.0 {
            4.0 * self.g * self.g / self.kappa
        } else if self.g == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// Cavity cooperativity C = 4g²/(κγ).
    pub fn cooperativity(&self) -> f64 {
        self.purcell_rate() / self.gamma
    }

    /// √(J² + δ²), the splitting of the one-excitation eigenstates.
    pub fn rabi_r(&self) -> f64 {
        self.j_coupling.hypot(self.delta)
    }

    /// The composite qubits ⊗ cavity space at this cutoff.
    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::qubits_cavity(self.n_max)
    }

    /// Set a parameter by its config/sweep-axis name. `n_max` is integer-only
    /// and deliberately not addressable here.
    pub fn set_field(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "delta" => self.delta = value,
            "Delta" => self.laser_detuning = value,
            "Delta_a" => self.cavity_detuning = value,
            "Omega" => self.drive = value,
            "J" => self.j_coupling = value,
            "gamma" => self.gamma = value,
            "gamma1" => self.gamma1 = Some(value),
            "gamma2" => self.gamma2 = Some(value),
            "gamma12" => self.gamma12 = value,
            "kappa" => self.kappa = value,
            "g" => self.g = value,
            "Gamma_extra" => self.extra_decay = value,
            "gamma_phi" => self.local_dephasing = value,
            "Gamma_phi" => self.collective_dephasing = value,
            other => {
                return Err(Error::Config(format!(
                    "unknown parameter name \"{other}\" (expected a SystemParams field)"
                )))
            }
        }
        Ok(())
    }
}

/// Geometry of two dipoles coupled through the free-space vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleGeometry {
    /// Dimensionless product k·r₁₂ of wavenumber and separation.
    pub kr12: f64,
    /// Cosine of the angle between the dipole direction and the separation
    /// axis; 0 for the H-aggregate arrangement.
    pub mu_dot_r: f64,
    /// Local decay rates of the two emitters, in units of γ.
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for DipoleGeometry {
    fn default() -> Self {
        Self { kr12: 1.0, mu_dot_r: 0.0, gamma1: 1.0, gamma2: 1.0 }
    }
}

impl DipoleGeometry {
    pub fn h_aggregate(kr12: f64) -> Self {
        Self { kr12, ..Self::default() }
    }
}

/// Coherent and dissipative dipole–dipole coupling rates (J, γ₁₂) from the
/// free-space Green's function:
///
///   J   = (3/4)√(γ₁γ₂) { −p cos(x)/x + q [ sin(x)/x² + cos(x)/x³ ] }
///   γ₁₂ = (3/2)√(γ₁γ₂) {  p sin(x)/x + q [ cos(x)/x² − sin(x)/x³ ] }
///
/// with x = k·r₁₂, p = 1 − (μ̄·r̄)², q = 1 − 3(μ̄·r̄)².
pub fn dipole_coupling(geom: &DipoleGeometry) -> Result<(f64, f64)> {
    if !(geom.kr12 > 0.0) {
        return Err(Error::InvalidParam(
            "kr12 must be positive (the near-field terms diverge at zero separation)".into(),
        ));
    }
    if geom.mu_dot_r.abs() > 1.0 {
        return Err(Error::InvalidParam("|mu_dot_r| must be <= 1".into()));
    }
    if !(geom.gamma1 > 0.0 && geom.gamma2 > 0.0) {
        return Err(Error::InvalidParam("decay rates must be positive".into()));
    }
    let x = geom.kr12;
    let p = 1.0 - geom.mu_dot_r * geom.mu_dot_r;
    let q = 1.0 - 3.0 * geom.mu_dot_r * geom.mu_dot_r;
    let (s, c) = (x.sin(), x.cos());
    let root = (geom.gamma1 * geom.gamma2).sqrt();
    let j = 0.75 * root * (-p * c / x + q * (s / (x * x) + c / (x * x * x)));
    let gamma12 = 1.5 * root * (p * s / x + q * (c / (x * x) - s / (x * x * x)));
    Ok((j, gamma12))
}

/// Collective decay through a waveguide: γ₁₂/γ = β̃ · exp[−d/(2L)], where β̃
/// is the captured fraction of the emission, d the emitter separation and L
/// the propagation length.
pub fn waveguide_gamma12(beta_factor: f64, d_over_l: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&beta_factor) {
        return Err(Error::InvalidParam(format!(
            "beta_factor must be in [0, 1], got {beta_factor}"
        )));
    }
    if d_over_l < 0.0 {
        return Err(Error::InvalidParam(format!("d_over_L must be >= 0, got {d_over_l}")));
    }
    Ok(beta_factor * (-0.5 * d_over_l).exp())
}
