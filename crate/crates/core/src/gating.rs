//! Time-gated fluorescence detection.
//!
//! The detector only counts during a window of relative width `g` that opens
//! with every excitation pulse. Dark counts are uniform in time and drop to
//! `g f_dark`; fluorescence decays exponentially with lifetime τ and loses
//! only the part of its decay (including spill-over into later periods) that
//! falls outside the windows.

use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::config::{ExperimentConfig, PumpMode};
use crate::error::ModelError;
use crate::optimize::golden_section;
use crate::schemes::Scheme;
use crate::sensitivity::bound;
use crate::units::CrossSection;

/// Fluorescence lifetime assumed when a config does not provide one [s].
pub const DEFAULT_LIFETIME: f64 = 4e-9;

/// Temporal profile of the excitation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Delta,
    /// Gaussian intensity profile with the given FWHM, peak at t = 0.
    Gaussian {
        fwhm: f64,
    },
    /// Flat-top pulse occupying [0, duration].
    Square {
        duration: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateModel {
    /// Relative gate width g ∈ (0, 1].
    pub width: f64,
    /// Fluorescence decay time τ [s].
    pub lifetime: f64,
    pub pulse_shape: PulseShape,
}

impl GateModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.width > 0.0 && self.width <= 1.0) {
            return Err(ModelError::InvalidGate(self.width));
        }
        if !(self.lifetime.is_finite() && self.lifetime > 0.0) {
            return Err(ModelError::InvalidLifetime(self.lifetime));
        }
        Ok(())
    }
}

pub fn gated_dark_rate(dark_count_rate: f64, width: f64) -> f64 {
    width * dark_count_rate
}

/// Gated detection efficiency for delta-like pulses,
/// `η_d (1 − e^{−g/(f_rep τ)}) / (1 − e^{−1/(f_rep τ)})`.
pub fn gated_efficiency_analytic(eta_d: f64, width: f64, repetition_rate: f64, lifetime: f64) -> f64 {
    let x = repetition_rate * lifetime;
    eta_d * ((-width / x).exp_m1() / (-1.0 / x).exp_m1())
}

/// Quadrature settings for [`gated_efficiency_numeric_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationOptions {
    /// Trapezoid steps per characteristic time of the pulse.
    pub steps_per_scale: usize,
    /// Give up on the spill-over sum after this many repetition periods.
    pub max_periods: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { steps_per_scale: 4000, max_periods: 10_000_000 }
    }
}

/// Fluorescence emission density after one pulse, normalized to unit area.
#[derive(Debug, Clone, Copy)]
struct Emission {
    shape: PulseShape,
    tau: f64,
}

impl Emission {
    fn density(&self, t: f64) -> f64 {
        let tau = self.tau;
        match self.shape {
            PulseShape::Delta => {
                if t < 0.0 {
                    0.0
                } else {
                    (-t / tau).exp() / tau
                }
            }
            PulseShape::Square { duration } => {
                if t < 0.0 {
                    0.0
                } else if t <= duration {
                    -(-t / tau).exp_m1() / duration
                } else {
                    (-(t - duration) / tau).exp() * -(-duration / tau).exp_m1() / duration
                }
            }
            PulseShape::Gaussian { fwhm } => {
                // exponentially modified Gaussian
                let s = fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
                let z = (s * s / tau - t) / (SQRT_2 * s);
                if z < 8.0 {
                    0.5 / tau * (s * s / (2.0 * tau * tau) - t / tau).exp() * erfc(z)
                } else {
                    let z2 = z * z;
                    let series = 1.0 - 1.0 / (2.0 * z2) + 3.0 / (4.0 * z2 * z2) - 15.0 / (8.0 * z2 * z2 * z2);
                    0.5 / tau * (-t * t / (2.0 * s * s)).exp() / (z * PI.sqrt()) * series
                }
            }
        }
    }

    /// Interval outside of which the density is zero (before) or a pure
    /// exponential decay (after).
    fn active(&self) -> (f64, f64) {
        match self.shape {
            PulseShape::Delta => (0.0, 0.0),
            PulseShape::Square { duration } => (0.0, duration),
            PulseShape::Gaussian { fwhm } => {
                let s = fwhm / (2.0 * (2.0 * std::f64::consts::LN_2).sqrt());
                // past s²/τ the decay is exponential; for s ≫ τ the density
                // is negligible well before that
                (-10.0 * s, (s * s / self.tau).min(10.0 * s) + 10.0 * s)
            }
        }
    }

    /// Length over which the density changes while the pulse is on.
    fn pulse_scale(&self) -> f64 {
        match self.shape {
            PulseShape::Delta => self.tau,
            PulseShape::Square { duration } => duration.min(self.tau),
            PulseShape::Gaussian { fwhm } => fwhm,
        }
    }
}

fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, h: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    let step = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|i| f(a + i as f64 * step)).sum();
    step * (0.5 * (f(a) + f(b)) + inner)
}

/// Integral of the density over `[a, b]`: trapezoid while the pulse is
/// active, closed form over the pure exponential decay after it.
fn segment_integral(em: &Emission, a: f64, b: f64, h: f64) -> f64 {
    let (_, act_hi) = em.active();
    if a >= act_hi {
        em.density(a) * em.tau * -(-(b - a) / em.tau).exp_m1()
    } else {
        trapezoid(|t| em.density(t), a, b, h)
    }
}

/// Gated and total emission within one repetition period starting at `start`.
fn period_integrals(
    em: &Emission,
    start: f64,
    period: f64,
    width: f64,
    opts: &IntegrationOptions,
) -> (f64, f64) {
    let (act_lo, act_hi) = em.active();
    let h = em.pulse_scale() / opts.steps_per_scale as f64;
    // beyond this the decay is below e^-60 of its value at the pulse end
    let horizon = act_hi + 60.0 * em.tau;
    let end = start + period;
    let gate_end = start + width * period;

    let mut cuts = vec![start, gate_end, end];
    for c in [act_lo, act_hi, horizon] {
        if c > start && c < end {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut gated = 0.0;
    let mut rest = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a >= horizon || b <= act_lo {
            continue;
        }
        let value = segment_integral(em, a, b, h);
        if b <= gate_end {
            gated += value;
        } else {
            rest += value;
        }
    }
    (gated, gated + rest)
}

/// Gated detection efficiency by numerical integration of the pulse shape
/// convolved with the exponential decay.
pub fn gated_efficiency_numeric(
    eta_d: f64,
    gate: &GateModel,
    repetition_rate: f64,
) -> Result<f64, ModelError> {
    gated_efficiency_numeric_with(eta_d, gate, repetition_rate, &IntegrationOptions::default())
}

pub fn gated_efficiency_numeric_with(
    eta_d: f64,
    gate: &GateModel,
    repetition_rate: f64,
    opts: &IntegrationOptions,
) -> Result<f64, ModelError> {
    gate.validate()?;
    let em = Emission { shape: gate.pulse_shape, tau: gate.lifetime };
    let period = 1.0 / repetition_rate;
    let (act_lo, act_hi) = em.active();
    let first = (act_lo / period).floor() as i64;
    let last = (act_hi / period).floor() as i64;

    let mut gated = 0.0;
    let mut total = 0.0;
    for k in first..=last {
        let (g, f) = period_integrals(&em, k as f64 * period, period, gate.width, opts);
        gated += g;
        total += f;
    }
    // From here on every period is the previous one scaled by e^{-P/τ}.
    let (mut g, mut f) = period_integrals(&em, (last + 1) as f64 * period, period, gate.width, opts);
    let decay = (-period / gate.lifetime).exp();
    let mut periods = 0;
    while f > 1e-12 * total {
        gated += g;
        total += f;
        g *= decay;
        f *= decay;
        periods += 1;
        if periods > opts.max_periods {
            return Err(ModelError::NonConvergentTail { periods });
        }
    }
    Ok(eta_d * (gated / total))
}

/// Analytic efficiency for delta pulses, numeric otherwise.
pub fn gated_efficiency(eta_d: f64, gate: &GateModel, repetition_rate: f64) -> Result<f64, ModelError> {
    gate.validate()?;
    match gate.pulse_shape {
        PulseShape::Delta => Ok(gated_efficiency_analytic(eta_d, gate.width, repetition_rate, gate.lifetime)),
        _ => gated_efficiency_numeric(eta_d, gate, repetition_rate),
    }
}

/// Pulse shape used when the caller does not choose one: delta for pulses
/// at least a hundred times shorter than the lifetime, Gaussian otherwise.
pub fn default_shape(config: &ExperimentConfig, lifetime: f64) -> PulseShape {
    if config.pulse_duration * 100.0 <= lifetime {
        PulseShape::Delta
    } else {
        PulseShape::Gaussian { fwhm: config.pulse_duration }
    }
}

/// Copy of `config` as seen through a gate.
pub fn gated_config(config: &ExperimentConfig, gate: &GateModel) -> Result<ExperimentConfig, ModelError> {
    let mut gated = config.clone();
    gated.eta_d = gated_efficiency(config.eta_d, gate, config.repetition_rate)?;
    gated.dark_count_rate = gated_dark_rate(config.dark_count_rate, gate.width);
    Ok(gated)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GateOptimum {
    pub width: f64,
    pub efficiency: f64,
    pub bound: CrossSection,
    pub ungated_bound: CrossSection,
    pub lifetime: f64,
    #[serde(skip)]
    pub config: ExperimentConfig,
}

/// Finds the gate width minimizing the bound of `scheme`.
///
/// Only pulsed pumps can be gated. A grid over g seeds a golden-section
/// refinement; the ungated case g = 1 is kept unless something is strictly
/// better.
pub fn optimize_gate(
    config: &ExperimentConfig,
    lifetime: f64,
    shape: PulseShape,
    scheme: Scheme,
) -> Result<GateOptimum, ModelError> {
    if config.pump_mode == PumpMode::ContinuousWave {
        return Err(ModelError::GatingOnContinuousWave);
    }
    let evaluate = |width: f64| -> Result<(f64, ExperimentConfig), ModelError> {
        let gate = GateModel { width, lifetime, pulse_shape: shape };
        let gated = gated_config(config, &gate)?;
        Ok((bound(&gated, scheme)?.cm4_s(), gated))
    };
    let (ungated, _) = evaluate(1.0)?;

    const GRID: usize = 100;
    let mut best = (1.0, ungated);
    for i in (1..GRID).rev() {
        let width = i as f64 / GRID as f64;
        let (value, _) = evaluate(width)?;
        if value < best.1 {
            best = (width, value);
        }
    }
    if best.0 < 1.0 {
        let lo = (best.0 - 1.0 / GRID as f64).max(1e-4);
        let hi = (best.0 + 1.0 / GRID as f64).min(1.0);
        let refined =
            golden_section(|w| evaluate(w).map(|(v, _)| v).unwrap_or(f64::INFINITY), lo, hi, 1e-7, 200);
        if refined.value < best.1 {
            best = (refined.x, refined.value);
        }
    }
    let (value, gated) = evaluate(best.0)?;
    Ok(GateOptimum {
        width: best.0,
        efficiency: gated.eta_d,
        bound: CrossSection::from_cm4_s(value),
        ungated_bound: CrossSection::from_cm4_s(ungated),
        lifetime,
        config: gated,
    })
}
