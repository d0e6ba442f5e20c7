use thiserror::Error;

/// Errors raised while reading or validating an experiment configuration.
///
/// Every variant names the offending key using its canonical spelling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: &'static str },
    #[error("line {line}: expected `key = value [unit]`")]
    Malformed { line: usize },
    #[error("{key}: cannot parse number `{value}`")]
    InvalidNumber { key: &'static str, value: String },
    #[error("{key}: unknown unit `{unit}`")]
    UnknownUnit { key: &'static str, unit: String },
    #[error("{key}: a unit is required")]
    MissingUnit { key: &'static str },
    #[error("{key} {reason}")]
    OutOfRange { key: &'static str, reason: String },
    #[error("unknown configuration field `{0}`")]
    UnknownField(String),
}

/// Errors raised by the model computations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("attenuation transmittance must lie in (0, 1], got {0}")]
    InvalidAttenuation(f64),
    #[error("cross-section must be finite and non-negative, got {0} cm^4 s")]
    InvalidCrossSection(f64),
    #[error("margin has no sign change between {lo_gm:e} GM and {hi_gm:e} GM")]
    NoSignChange { lo_gm: f64, hi_gm: f64 },
    #[error("detection margin is not monotone above {at_gm:e} GM")]
    NonMonotoneMargin { at_gm: f64 },
    #[error("gate width must lie in (0, 1], got {0}")]
    InvalidGate(f64),
    #[error("fluorescence lifetime must be positive, got {0} s")]
    InvalidLifetime(f64),
    #[error("time gating is not applicable to continuous-wave pumps: the chopper needed to gate a CW beam reduces the effective acquisition time by more than gating gains")]
    GatingOnContinuousWave,
    #[error("spill-over sum did not converge after {periods} repetition periods")]
    NonConvergentTail { periods: usize },
    #[error("Fourier-limited entanglement time is not set for `{0}`")]
    MissingFourierLimit(String),
    #[error("Poisson mean {0} is outside the sampler range")]
    PoissonRange(f64),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("cross-section grid must be sorted ascending")]
    UnsortedGrid,
    #[error(transparent)]
    Config(#[from] ConfigError),
}
