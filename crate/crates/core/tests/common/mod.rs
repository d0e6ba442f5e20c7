#![allow(dead_code)]

use etpa_core::config::builtin;
use etpa_core::{ExperimentConfig, PumpMode, Scheme};

/// Maps a log-uniform draw `u ∈ [0, 1]` onto `[lo, hi]`.
pub fn log_uniform(u: f64, lo: f64, hi: f64) -> f64 {
    (lo.ln() + u * (hi.ln() - lo.ln())).exp()
}

/// Number of unit draws consumed by [`config_from_unit`].
pub const DRAWS: usize = 16;

/// Builds a valid experiment from `DRAWS` numbers in [0, 1]. The ranges
/// cover the published experiments with a few decades of margin on either
/// side.
pub fn config_from_unit(u: &[f64; DRAWS]) -> ExperimentConfig {
    let mut c = builtin("geneva").expect("bundled config");
    c.label = "random".into();
    c.integration_time = log_uniform(u[0], 1.0, 1e5);
    c.eta_s = log_uniform(u[1], 1e-2, 1.0);
    c.eta_i = log_uniform(u[2], 1e-2, 1.0);
    c.eta_d = log_uniform(u[3], 1e-2, 1.0);
    c.beam_area = log_uniform(u[4], 1e-8, 1e-4);
    c.pulse_duration = log_uniform(u[5], 1e-13, 1e-6);
    c.entanglement_area = c.beam_area * log_uniform(u[6], 1e-2, 1.0);
    c.entanglement_time = log_uniform(u[7], 1e-15, 1e-12);
    c.pairs_per_pulse = log_uniform(u[8], 1e-4, 1e16);
    c.dark_count_rate = if u[9] < 0.15 { 0.0 } else { log_uniform(u[9], 1e-2, 1e6) };
    c.hba_cross_section = if u[10] < 0.15 { 0.0 } else { log_uniform(u[10], 1e-32, 1e-20) };
    c.illuminated_amount = log_uniform(u[11], 1e-18, 1e-12);
    c.n_sigma = 1.0 + 4.0 * u[12];
    if u[13] < 0.3 {
        c.pump_mode = PumpMode::ContinuousWave;
    } else {
        c.pump_mode = PumpMode::Pulsed;
        let max_rate = (0.5 / c.pulse_duration).min(1e9);
        c.repetition_rate = log_uniform(u[14], 1e3_f64.min(max_rate), max_rate);
    }
    c.extra_enhancement = 1.0;
    c.normalize();
    c.validate().expect("generated config is valid");
    c
}

/// Attenuation value drawn from the same unit number.
pub fn eta_from_unit(u: f64) -> f64 {
    0.02 + 0.96 * u
}

pub fn schemes(eta: f64) -> [Scheme; 3] {
    [Scheme::SeparationDeterministic, Scheme::SeparationProbabilistic, Scheme::Attenuation { eta }]
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
