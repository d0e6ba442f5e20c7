//! Successive idealizations of an experiment.
//!
//! Starting from the published method, the ladder switches to the best
//! scheme, adds time gating (pulsed pumps only), assumes Fourier-limited
//! photon pairs and finally removes detector dark counts. Every step keeps
//! the modifications of the previous ones.

use std::fmt;

use serde::Serialize;

use crate::config::{ExperimentConfig, PumpMode};
use crate::error::ModelError;
use crate::gating::{default_shape, optimize_gate, DEFAULT_LIFETIME};
use crate::schemes::Scheme;
use crate::sensitivity::{bound, bound_probabilistic, bound_separation, optimize_eta};
use crate::units::CrossSection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    BestMethod,
    TimeGating,
    FourierLimit,
    ZeroDark,
}

impl StepKind {
    pub const ORDER: [StepKind; 4] =
        [StepKind::BestMethod, StepKind::TimeGating, StepKind::FourierLimit, StepKind::ZeroDark];

    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::BestMethod => "best_method",
            StepKind::TimeGating => "time_gating",
            StepKind::FourierLimit => "fourier_limit",
            StepKind::ZeroDark => "zero_dark",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderOptions {
    /// Fluorescence lifetime for the gating step when the config has none.
    pub default_lifetime: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        LadderOptions { default_lifetime: DEFAULT_LIFETIME }
    }
}

/// Experiment and chosen scheme between two steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderState {
    pub config: ExperimentConfig,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderStep {
    pub kind: StepKind,
    pub applied: bool,
    #[serde(serialize_with = "crate::ladder::scheme_name")]
    pub scheme: Scheme,
    pub resulting_bound: CrossSection,
    pub meets_target: Option<bool>,
    pub notes: String,
}

fn scheme_name<S: serde::Serializer>(scheme: &Scheme, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&scheme.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ladder {
    pub label: String,
    #[serde(serialize_with = "crate::ladder::scheme_name")]
    pub baseline_scheme: Scheme,
    pub baseline_bound: CrossSection,
    pub baseline_meets_target: Option<bool>,
    pub steps: Vec<LadderStep>,
}

impl Ladder {
    /// Target status after the last step.
    pub fn final_meets_target(&self) -> Option<bool> {
        self.steps.last().and_then(|s| s.meets_target)
    }

    /// First step after which the target is met, if any.
    pub fn first_success(&self) -> Option<StepKind> {
        self.steps.iter().find(|s| s.meets_target == Some(true)).map(|s| s.kind)
    }
}

fn meets(config: &ExperimentConfig, bound: CrossSection) -> Option<bool> {
    config.reference.target_sigma_gm.map(|t| bound.gm() <= t)
}

/// Scheme of the published measurement: attenuation at the tabulated η, or
/// at the optimal η when none is given.
pub fn baseline_scheme(config: &ExperimentConfig) -> Scheme {
    let eta = config.reference.eta.unwrap_or_else(|| optimize_eta(config).eta);
    Scheme::Attenuation { eta }
}

/// Applies one idealization and returns the new state with its bound.
pub fn apply_step(
    state: &LadderState,
    kind: StepKind,
    options: &LadderOptions,
) -> Result<(LadderState, LadderStep), ModelError> {
    let mut next = state.clone();
    let mut applied = true;
    let notes;
    match kind {
        StepKind::BestMethod => {
            let eta_opt = optimize_eta(&state.config);
            let candidates = [
                (Scheme::SeparationDeterministic, bound_separation(&state.config)),
                (Scheme::SeparationProbabilistic, bound_probabilistic(&state.config)),
                (Scheme::Attenuation { eta: eta_opt.eta }, eta_opt.bound),
            ];
            let (scheme, _) = candidates
                .into_iter()
                .min_by(|a, b| a.1.cm4_s().total_cmp(&b.1.cm4_s()))
                .expect("three candidates");
            next.scheme = scheme;
            notes =
                format!("selected {scheme}; attenuation compared at re-optimized eta = {:.4}", eta_opt.eta);
        }
        StepKind::TimeGating => {
            if state.config.pump_mode == PumpMode::ContinuousWave {
                applied = false;
                notes = "continuous-wave pump: not gated".to_string();
            } else {
                let (lifetime, assumed) = match state.config.fluorescence_lifetime {
                    Some(t) => (t, false),
                    None => (options.default_lifetime, true),
                };
                let shape = default_shape(&state.config, lifetime);
                let opt = optimize_gate(&state.config, lifetime, shape, state.scheme)?;
                next.config = opt.config;
                notes = format!(
                    "gate width {:.4}, lifetime {:.3e} s{}",
                    opt.width,
                    lifetime,
                    if assumed { " (assumed)" } else { "" }
                );
            }
        }
        StepKind::FourierLimit => {
            let t_min = state
                .config
                .fourier_limited_entanglement_time
                .ok_or_else(|| ModelError::MissingFourierLimit(state.config.label.clone()))?;
            notes = format!("T_e {:.4e} s -> {:.4e} s", state.config.entanglement_time, t_min);
            next.config.entanglement_time = t_min;
        }
        StepKind::ZeroDark => {
            next.config.dark_count_rate = 0.0;
            notes = "dark counts removed".to_string();
        }
    }
    let resulting_bound = bound(&next.config, next.scheme)?;
    let step = LadderStep {
        kind,
        applied,
        scheme: next.scheme,
        resulting_bound,
        meets_target: meets(&next.config, resulting_bound),
        notes,
    };
    Ok((next, step))
}

/// Runs the baseline followed by all four steps in order.
pub fn run_ladder(config: &ExperimentConfig, options: &LadderOptions) -> Result<Ladder, ModelError> {
    let baseline_scheme = baseline_scheme(config);
    let baseline_bound = bound(config, baseline_scheme)?;
    let mut state = LadderState { config: config.clone(), scheme: baseline_scheme };
    let mut steps = Vec::with_capacity(StepKind::ORDER.len());
    for kind in StepKind::ORDER {
        let (next, step) = apply_step(&state, kind, options)?;
        state = next;
        steps.push(step);
    }
    Ok(Ladder {
        label: config.label.clone(),
        baseline_scheme,
        baseline_bound,
        baseline_meets_target: meets(config, baseline_bound),
        steps,
    })
}
