//! Photon fluxes at the absorber and per-pulse absorption rates.
//!
//! Absorption rates are instantaneous rates during a pump pulse [s⁻¹], before
//! detection efficiency. Multiplying by the pulse duration gives events per
//! pulse.

use crate::config::ExperimentConfig;
use crate::units::CrossSection;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Signal,
    Idler,
}

/// Single-photon flux of one arm [photons cm⁻² s⁻¹].
pub fn single_photon_flux(config: &ExperimentConfig, arm: Arm) -> f64 {
    let eta = match arm {
        Arm::Signal => config.eta_s,
        Arm::Idler => config.eta_i,
    };
    eta * config.pairs_per_pulse / (config.beam_area * config.pulse_duration)
}

/// Flux of correlated pairs within one entangled mode volume.
pub fn pair_flux(config: &ExperimentConfig) -> f64 {
    config.eta_s * config.eta_i * config.pairs_per_pulse
        / (config.beam_area * config.entanglement_area * config.pulse_duration * config.entanglement_time)
}

/// Enhancement of pair-driven over uncorrelated absorption,
/// `(A T) / (A_e T_e)` times the optional extra factor.
pub fn quantum_advantage(config: &ExperimentConfig) -> f64 {
    config.beam_area * config.pulse_duration / (config.entanglement_area * config.entanglement_time)
        * config.extra_enhancement
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorptionCoefficients {
    /// Uncorrelated (classical) two-photon absorption coefficient.
    pub epsilon_c: f64,
    /// Entangled two-photon absorption coefficient.
    pub epsilon_e: f64,
    /// Hot-band (one-photon) absorption coefficient.
    pub epsilon_h: f64,
}

pub fn coefficients(config: &ExperimentConfig, sigma_c: CrossSection) -> AbsorptionCoefficients {
    let n_t = config.molecule_count();
    let a = config.beam_area;
    let t = config.pulse_duration;
    let sigma = sigma_c.cm4_s();
    AbsorptionCoefficients {
        epsilon_c: n_t * sigma / (a * a * t * t),
        epsilon_e: n_t * sigma / (a * t * config.entanglement_area * config.entanglement_time)
            * config.extra_enhancement,
        epsilon_h: n_t * config.hba_cross_section / (a * t),
    }
}

/// Absorption rates during a pump pulse [s⁻¹].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerPulseRates {
    /// Uncorrelated two-photon absorption, ∝ N_P².
    pub ctpa: f64,
    /// Entangled two-photon absorption, ∝ N_P.
    pub etpa: f64,
    /// Hot-band absorption, ∝ N_P.
    pub hba: f64,
}

pub fn per_pulse_rates(config: &ExperimentConfig, sigma_c: CrossSection) -> PerPulseRates {
    let k = coefficients(config, sigma_c);
    let n_p = config.pairs_per_pulse;
    let pair_loss = config.eta_s * config.eta_i;
    PerPulseRates {
        ctpa: k.epsilon_c * pair_loss * n_p * n_p,
        etpa: k.epsilon_e * pair_loss * n_p,
        hba: k.epsilon_h * (config.eta_s + config.eta_i) * n_p,
    }
}
