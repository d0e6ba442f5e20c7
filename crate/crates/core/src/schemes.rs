//! Expected counts of the signal and background measurements and the
//! detection rule that compares them.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::ModelError;
use crate::rates::per_pulse_rates;
use crate::units::CrossSection;

/// How the pair correlations are spoiled for the background measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Signal: pump attenuated by `eta`. Background: signal and idler beams
    /// attenuated by `eta`, which removes pairs quadratically.
    Attenuation { eta: f64 },
    /// Background with the idler delayed by one repetition period.
    SeparationDeterministic,
    /// Background with half of both beams delayed; half the pairs survive.
    SeparationProbabilistic,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Attenuation { .. } => "attenuation",
            Scheme::SeparationDeterministic => "separation",
            Scheme::SeparationProbabilistic => "probabilistic",
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match *self {
            Scheme::Attenuation { eta } => Some(eta),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match *self {
            Scheme::Attenuation { eta } if !(eta > 0.0 && eta <= 1.0) => {
                Err(ModelError::InvalidAttenuation(eta))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Attenuation { eta } => write!(f, "attenuation@{eta}"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    /// Accepts `separation`, `probabilistic` and `attenuation@<eta>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "separation" | "sep" | "split" => Ok(Scheme::SeparationDeterministic),
            "probabilistic" | "prob" => Ok(Scheme::SeparationProbabilistic),
            _ => {
                let eta = s
                    .strip_prefix("attenuation@")
                    .or_else(|| s.strip_prefix("att@"))
                    .ok_or_else(|| format!("unknown scheme `{s}`"))?;
                let eta: f64 = eta.parse().map_err(|_| format!("bad attenuation value `{eta}`"))?;
                let scheme = Scheme::Attenuation { eta };
                scheme.validate().map_err(|e| e.to_string())?;
                Ok(scheme)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Signal,
    Background,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub role: Role,
}

/// Expected counts over the whole integration, split by origin.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ExpectedCounts {
    pub etpa: f64,
    pub ctpa: f64,
    pub hba: f64,
    pub dark: f64,
    pub total: f64,
}

impl ExpectedCounts {
    pub fn new(etpa: f64, ctpa: f64, hba: f64, dark: f64) -> Self {
        ExpectedCounts { etpa, ctpa, hba, dark, total: etpa + ctpa + hba + dark }
    }

    /// Counts consisting of a single total, used when only the sum is known.
    pub fn from_total(total: f64) -> Self {
        ExpectedCounts { total, ..Default::default() }
    }
}

/// Expected counts for one measurement of a scheme.
///
/// Fluorescence terms carry the detection efficiency; dark counts do not.
pub fn expected_counts(
    config: &ExperimentConfig,
    spec: SchemeSpec,
    sigma_c: CrossSection,
) -> Result<ExpectedCounts, ModelError> {
    spec.scheme.validate()?;
    let sigma = sigma_c.cm4_s();
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(ModelError::InvalidCrossSection(sigma));
    }
    let rates = per_pulse_rates(config, sigma_c);
    // exposure: number of pulses times the duration of each
    let exposure = config.integration_time * config.repetition_rate * config.pulse_duration;
    let detected = |rate: f64| rate * config.eta_d * exposure;

    // (etpa, ctpa, hba) multipliers
    let (e, c, h) = match (spec.scheme, spec.role) {
        (Scheme::SeparationDeterministic | Scheme::SeparationProbabilistic, Role::Signal) => (1.0, 1.0, 1.0),
        (Scheme::SeparationDeterministic, Role::Background) => (0.0, 1.0, 1.0),
        (Scheme::SeparationProbabilistic, Role::Background) => (0.5, 1.0, 1.0),
        (Scheme::Attenuation { eta }, Role::Signal) => (eta, eta * eta, eta),
        (Scheme::Attenuation { eta }, Role::Background) => (eta * eta, eta * eta, eta),
    };
    Ok(ExpectedCounts::new(
        detected(rates.etpa) * e,
        detected(rates.ctpa) * c,
        detected(rates.hba) * h,
        config.integration_time * config.dark_count_rate,
    ))
}

/// Poisson uncertainty `n_σ √counts`.
pub fn uncertainty(counts: f64, n_sigma: f64) -> f64 {
    n_sigma * counts.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detection {
    pub detectable: bool,
    /// `(S − B) − n_σ(√S + √B)` [counts].
    pub margin: f64,
}

/// Applies `S − B ≥ u(S) + u(B)`. A margin of exactly zero counts as
/// detectable.
///
/// The difference is accumulated per component so terms shared by both
/// measurements cancel exactly instead of through the totals.
pub fn detectable(signal: &ExpectedCounts, background: &ExpectedCounts, n_sigma: f64) -> Detection {
    let components = (signal.etpa - background.etpa)
        + (signal.ctpa - background.ctpa)
        + (signal.hba - background.hba)
        + (signal.dark - background.dark);
    let component_total = signal.etpa + signal.ctpa + signal.hba + signal.dark;
    let diff = if component_total == signal.total
        && background.etpa + background.ctpa + background.hba + background.dark == background.total
    {
        components
    } else {
        signal.total - background.total
    };
    let margin = diff - (uncertainty(signal.total, n_sigma) + uncertainty(background.total, n_sigma));
    Detection { detectable: margin >= 0.0, margin }
}

/// Convenience: signal and background counts of `scheme` at `sigma_c`.
pub fn counts_pair(
    config: &ExperimentConfig,
    scheme: Scheme,
    sigma_c: CrossSection,
) -> Result<(ExpectedCounts, ExpectedCounts), ModelError> {
    Ok((
        expected_counts(config, SchemeSpec { scheme, role: Role::Signal }, sigma_c)?,
        expected_counts(config, SchemeSpec { scheme, role: Role::Background }, sigma_c)?,
    ))
}
