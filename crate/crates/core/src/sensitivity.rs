//! Minimum detectable cross-section of a measurement.
//!
//! The closed forms come from inserting the expected counts into the
//! detection rule `S − B >= n_σ(√S + √B)` and solving the resulting quadratic
//! for σ_c. [`solve_bound_numeric`] solves the same rule by bisection on the
//! counts themselves and serves as an independent check of the algebra.
//!
//! With the shorthands
//!
//! ```text
//! C = n_σ² (A_e T_e)² / (T_int f_rep T η_s η_i η_d N_t)
//! q = A T / (A_e T_e N_P)
//! X = (A T)² T_int / ((A_e T_e)² n_σ²)
//! h = X · f_rep T η_d (η_s + η_i) ε_h / N_P
//! d = X · f_dark / N_P²
//! ```
//!
//! the three bounds read
//!
//! ```text
//! separation     C (2 + q + 2√(1 + q + h + d))
//! probabilistic 2C (4 + 3q + 2√(4 + 6q + 2q² + h + d))
//! attenuation    C/(η−1)² (2 + (η+1)q/η + 2√(1 + (η+1)q/η + q²/η + (η−1)²(h/η + d/η²)))
//! ```
//!
//! An extra enhancement factor κ enters through `A_e T_e → A_e T_e / κ`.

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::ModelError;
use crate::optimize::{bisect, golden_section};
use crate::rates::coefficients;
use crate::schemes::{counts_pair, detectable, Scheme};
use crate::units::CrossSection;

/// Lower end of the attenuation search interval.
pub const ETA_MIN: f64 = 1e-6;
/// Upper end of the attenuation search interval.
pub const ETA_MAX: f64 = 1.0 - 1e-6;

/// Initial bisection bracket [GM].
const BRACKET_GM: (f64, f64) = (1e-10, 1e12);

#[derive(Debug, Clone, Copy)]
struct Shorthand {
    c: f64,
    q: f64,
    hba: f64,
    dark: f64,
}

impl Shorthand {
    fn new(config: &ExperimentConfig) -> Self {
        let n2 = config.n_sigma * config.n_sigma;
        let at = config.beam_area * config.pulse_duration;
        let ae_te = config.entanglement_area * config.entanglement_time / config.extra_enhancement;
        let exposure = config.integration_time * config.repetition_rate * config.pulse_duration;
        let n_p = config.pairs_per_pulse;
        let c = n2 * ae_te * ae_te
            / (exposure * config.eta_s * config.eta_i * config.eta_d * config.molecule_count());
        let q = at / (ae_te * n_p);
        let x = at * at * config.integration_time / (ae_te * ae_te * n2);
        let eps_h = coefficients(config, CrossSection::ZERO).epsilon_h;
        let hba = x
            * config.repetition_rate
            * config.pulse_duration
            * config.eta_d
            * (config.eta_s + config.eta_i)
            * eps_h
            / n_p;
        let dark = x * config.dark_count_rate / (n_p * n_p);
        Shorthand { c, q, hba, dark }
    }
}

/// Deterministic separation bound.
pub fn bound_separation(config: &ExperimentConfig) -> CrossSection {
    let Shorthand { c, q, hba, dark } = Shorthand::new(config);
    CrossSection::from_cm4_s(c * (2.0 + q + 2.0 * (1.0 + q + hba + dark).sqrt()))
}

/// Infinite-flux limit of the separation bound, `4C`.
pub fn bound_separation_highflux(config: &ExperimentConfig) -> CrossSection {
    CrossSection::from_cm4_s(4.0 * Shorthand::new(config).c)
}

/// Attenuation bound at transmittance `eta`. At `eta = 1` signal and
/// background coincide and the bound is infinite.
pub fn bound_attenuation(config: &ExperimentConfig, eta: f64) -> Result<CrossSection, ModelError> {
    Scheme::Attenuation { eta }.validate()?;
    if eta == 1.0 {
        return Ok(CrossSection::INFINITE);
    }
    let Shorthand { c, q, hba, dark } = Shorthand::new(config);
    let lin = (eta + 1.0) / eta * q;
    let gap2 = (eta - 1.0) * (eta - 1.0);
    let radicand = 1.0 + lin + q * q / eta + gap2 * (hba / eta + dark / (eta * eta));
    Ok(CrossSection::from_cm4_s(c / gap2 * (2.0 + lin + 2.0 * radicand.sqrt())))
}

/// Probabilistic separation bound.
pub fn bound_probabilistic(config: &ExperimentConfig) -> CrossSection {
    let Shorthand { c, q, hba, dark } = Shorthand::new(config);
    let radicand = 4.0 + 6.0 * q + 2.0 * q * q + hba + dark;
    CrossSection::from_cm4_s(2.0 * c * (4.0 + 3.0 * q + 2.0 * radicand.sqrt()))
}

/// Closed-form bound of any scheme.
pub fn bound(config: &ExperimentConfig, scheme: Scheme) -> Result<CrossSection, ModelError> {
    match scheme {
        Scheme::SeparationDeterministic => Ok(bound_separation(config)),
        Scheme::SeparationProbabilistic => Ok(bound_probabilistic(config)),
        Scheme::Attenuation { eta } => bound_attenuation(config, eta),
    }
}

fn margin(config: &ExperimentConfig, scheme: Scheme, sigma: CrossSection) -> Result<f64, ModelError> {
    let (s, b) = counts_pair(config, scheme, sigma)?;
    Ok(detectable(&s, &b, config.n_sigma).margin)
}

/// Smallest positive σ_c at which the detection rule holds, found by
/// bisection on the expected counts.
///
/// The margin is convex in σ_c and non-positive at zero, so it crosses zero
/// at most once on (0, ∞). With no dark or hot-band counts the margin is
/// exactly zero at σ_c = 0; that trivial root is skipped.
pub fn solve_bound_numeric(config: &ExperimentConfig, scheme: Scheme) -> Result<CrossSection, ModelError> {
    scheme.validate()?;
    let f = |gm: f64| margin(config, scheme, CrossSection::from_gm(gm));
    let (mut lo, mut hi) = BRACKET_GM;
    while f(lo)? >= 0.0 {
        lo *= 1e-3;
        if lo < 1e-60 {
            return Err(ModelError::NoSignChange { lo_gm: lo, hi_gm: hi });
        }
    }
    while f(hi)? < 0.0 {
        hi *= 1e3;
        if hi > 1e60 {
            return Err(ModelError::NoSignChange { lo_gm: lo, hi_gm: hi });
        }
    }
    // the margin function cannot fail inside a bracket whose ends evaluated
    let root = bisect(|gm| f(gm).unwrap_or(f64::NAN), lo, hi, true, 1e-13, 400);
    for factor in [1.0 + 1e-6, 2.0, 10.0, 1e3] {
        if f(root * factor)? < 0.0 {
            return Err(ModelError::NonMonotoneMargin { at_gm: root * factor });
        }
    }
    Ok(CrossSection::from_gm(root))
}

/// Result of the attenuation optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaOptimum {
    pub eta: f64,
    pub bound: CrossSection,
    /// The minimum sits at [`ETA_MIN`]: the optimum tends to η → 0.
    pub at_lower_clip: bool,
    pub at_upper_clip: bool,
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

/// Minimizes the attenuation bound over η ∈ [`ETA_MIN`], [`ETA_MAX`].
///
/// A grid in logit(η) seeds the bracket, golden-section search refines it.
pub fn optimize_eta(config: &ExperimentConfig) -> EtaOptimum {
    let objective = |eta: f64| {
        bound_attenuation(config, eta.clamp(ETA_MIN, ETA_MAX)).map(|b| b.cm4_s()).unwrap_or(f64::INFINITY)
    };
    const GRID: usize = 161;
    let (u_min, u_max) = (logit(ETA_MIN), logit(ETA_MAX));
    let u_at = |i: usize| u_min + (u_max - u_min) * i as f64 / (GRID - 1) as f64;
    let best = (0..GRID)
        .map(|i| (i, objective(logistic(u_at(i)))))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let lo = u_at(best.0.saturating_sub(1));
    let hi = u_at((best.0 + 1).min(GRID - 1));
    let refined = golden_section(|u| objective(logistic(u)), lo, hi, 1e-9, 200);

    let mut eta = logistic(refined.x).clamp(ETA_MIN, ETA_MAX);
    let mut value = refined.value;
    let mut at_lower_clip = false;
    let mut at_upper_clip = false;
    let (v_min, v_max) = (objective(ETA_MIN), objective(ETA_MAX));
    if v_min <= value {
        (eta, value, at_lower_clip) = (ETA_MIN, v_min, true);
    }
    if v_max < value {
        (eta, value, at_upper_clip) = (ETA_MAX, v_max, true);
        at_lower_clip = false;
    }
    EtaOptimum { eta, bound: CrossSection::from_cm4_s(value), at_lower_clip, at_upper_clip }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSource {
    Dark,
    Hba,
    ShotCtpa,
    Constant,
    Mixed,
}

impl NoiseSource {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseSource::Dark => "dark",
            NoiseSource::Hba => "hba",
            NoiseSource::ShotCtpa => "shot_ctpa",
            NoiseSource::Constant => "constant",
            NoiseSource::Mixed => "mixed",
        }
    }
}

/// The additive groups under the square root of a bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseTerms {
    pub constant: f64,
    pub shot_ctpa: f64,
    pub hba: f64,
    pub dark: f64,
}

impl NoiseTerms {
    pub fn of(config: &ExperimentConfig, scheme: Scheme) -> Self {
        let Shorthand { q, hba, dark, .. } = Shorthand::new(config);
        match scheme {
            Scheme::SeparationDeterministic => NoiseTerms { constant: 1.0, shot_ctpa: q, hba, dark },
            Scheme::SeparationProbabilistic => {
                NoiseTerms { constant: 4.0, shot_ctpa: 6.0 * q + 2.0 * q * q, hba, dark }
            }
            Scheme::Attenuation { eta } => {
                let gap2 = (eta - 1.0) * (eta - 1.0);
                NoiseTerms {
                    constant: 1.0,
                    shot_ctpa: (eta + 1.0) / eta * q + q * q / eta,
                    hba: gap2 * hba / eta,
                    dark: gap2 * dark / (eta * eta),
                }
            }
        }
    }

    /// Largest group, or `Mixed` when the runner-up is within a factor 2.
    pub fn dominant(&self) -> NoiseSource {
        let mut groups = [
            (self.dark, NoiseSource::Dark),
            (self.hba, NoiseSource::Hba),
            (self.shot_ctpa, NoiseSource::ShotCtpa),
            (self.constant, NoiseSource::Constant),
        ];
        groups.sort_by(|a, b| b.0.total_cmp(&a.0));
        if groups[1].0 * 2.0 >= groups[0].0 {
            NoiseSource::Mixed
        } else {
            groups[0].1
        }
    }
}

/// Dominant noise source of the attenuation bound at `eta`.
pub fn classify_noise(config: &ExperimentConfig, eta: f64) -> NoiseSource {
    NoiseTerms::of(config, Scheme::Attenuation { eta }).dominant()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SensitivityResult {
    pub sigma_c_min: CrossSection,
    #[serde(serialize_with = "serialize_scheme")]
    pub scheme: Scheme,
    pub eta_used: Option<f64>,
    pub dominant_noise: NoiseSource,
    pub meets_target: Option<bool>,
}

fn serialize_scheme<S: serde::Serializer>(scheme: &Scheme, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(scheme.name())
}

impl SensitivityResult {
    pub fn is_infinite(&self) -> bool {
        !self.sigma_c_min.is_finite()
    }
}

/// Closed-form bound with its noise classification and target comparison.
pub fn evaluate(config: &ExperimentConfig, scheme: Scheme) -> Result<SensitivityResult, ModelError> {
    let sigma_c_min = bound(config, scheme)?;
    Ok(SensitivityResult {
        sigma_c_min,
        scheme,
        eta_used: scheme.eta(),
        dominant_noise: NoiseTerms::of(config, scheme).dominant(),
        meets_target: config.reference.target_sigma_gm.map(|t| sigma_c_min.gm() <= t),
    })
}
