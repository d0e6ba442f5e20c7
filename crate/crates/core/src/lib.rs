//! Sensitivity model for entangled two-photon absorption (ETPA) fluorescence
//! measurements.
//!
//! Given the optical and detector parameters of an experiment, the model
//! predicts the expected fluorescence counts of a signal and a background
//! measurement and derives the smallest two-photon cross-section that would
//! produce a statistically significant difference between them. Three
//! measurement schemes are covered: attenuation, deterministic separation and
//! probabilistic separation of the photon pairs.
//!
//! Module map:
//!
//! - [`config`]: experiment parameters, unit handling, the bundled data set
//! - [`rates`]: photon fluxes and per-pulse absorption rates
//! - [`schemes`]: expected signal/background counts and the detection rule
//! - [`sensitivity`]: closed-form bounds, numeric solver, attenuation optimizer
//! - [`gating`]: time-gated detection
//! - [`ladder`]: successive idealizations of an experiment
//! - [`montecarlo`]: Poisson sampling of the detection rule
//! - [`optimize`]: bisection and golden-section primitives

pub mod config;
pub mod error;
pub mod gating;
pub mod ladder;
pub mod montecarlo;
pub mod optimize;
pub mod rates;
pub mod schemes;
pub mod sensitivity;
pub mod units;

pub use config::{builtin_table, parse_config, ExperimentConfig, PumpMode, ReferenceData};
pub use error::{ConfigError, ModelError};
pub use gating::{GateModel, GateOptimum, PulseShape};
pub use ladder::{run_ladder, Ladder, LadderOptions, LadderStep, StepKind};
pub use montecarlo::{detection_curve, simulate, CurvePoint, SimulationReport};
pub use rates::{AbsorptionCoefficients, Arm, PerPulseRates};
pub use schemes::{
    detectable, expected_counts, uncertainty, Detection, ExpectedCounts, Role, Scheme, SchemeSpec,
};
pub use sensitivity::{
    bound, bound_attenuation, bound_probabilistic, bound_separation, bound_separation_highflux,
    classify_noise, evaluate, optimize_eta, solve_bound_numeric, EtaOptimum, NoiseSource, SensitivityResult,
};
pub use units::CrossSection;
