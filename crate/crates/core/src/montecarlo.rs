//! Poisson sampling of the signal and background measurements.
//!
//! Each trial draws its counts from a ChaCha8 stream keyed by
//! `(seed, trial, role)`, so results do not depend on thread scheduling and
//! any single trial can be reproduced on its own.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::config::ExperimentConfig;
use crate::error::ModelError;
use crate::schemes::{counts_pair, detectable, uncertainty, ExpectedCounts, Role, Scheme};
use crate::units::CrossSection;

/// Largest mean the sampler accepts. Above 2^53 draws are rounded to the
/// f64 spacing, which stays far below the Poisson spread `√λ`.
pub const MAX_POISSON_MEAN: f64 = 1e18;

const INVERSION_LIMIT: f64 = 30.0;

/// Generator for one measurement of one trial.
pub fn trial_rng(seed: u64, trial: u64, role: Role) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let role_bit = match role {
        Role::Signal => 0,
        Role::Background => 1,
    };
    rng.set_stream((trial << 1) | role_bit);
    rng
}

/// Draws from Poisson(`lambda`): inversion below 30, transformed rejection
/// (PTRS) above.
pub fn sample_poisson<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> Result<u64, ModelError> {
    if !(0.0..=MAX_POISSON_MEAN).contains(&lambda) {
        return Err(ModelError::PoissonRange(lambda));
    }
    if lambda == 0.0 {
        return Ok(0);
    }
    if lambda < INVERSION_LIMIT {
        Ok(poisson_inversion(rng, lambda))
    } else {
        Ok(poisson_ptrs(rng, lambda))
    }
}

fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut p = (-lambda).exp();
    let mut cdf = p;
    while u > cdf {
        k += 1;
        p *= lambda / k as f64;
        cdf += p;
        if p == 0.0 && cdf < u {
            // rounding left the cdf short of u deep in the tail
            break;
        }
    }
    k
}

fn poisson_ptrs<R: Rng + ?Sized>(rng: &mut R, lambda: f64) -> u64 {
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v = 1.0 - rng.random::<f64>();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = ln_poisson_pmf(k, lambda, loglam);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

/// `ln(λ^k e^{−λ}/k!)` without the cancellation of the naive form at large
/// `λ`, using the saddle-point expansion of the Poisson mass function.
fn ln_poisson_pmf(k: f64, lambda: f64, loglam: f64) -> f64 {
    if k == 0.0 {
        return -lambda;
    }
    if k < 16.0 {
        return -lambda + k * loglam - ln_gamma(k + 1.0);
    }
    -stirling_error(k) - deviance(k, lambda) - 0.5 * (2.0 * PI * k).ln()
}

/// `ln k! − [(k + ½) ln k − k + ½ ln 2π]` for `k ≥ 16`.
fn stirling_error(k: f64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    let kk = k * k;
    if k > 500.0 {
        (S0 - S1 / kk) / k
    } else if k > 80.0 {
        (S0 - (S1 - S2 / kk) / kk) / k
    } else if k > 35.0 {
        (S0 - (S1 - (S2 - S3 / kk) / kk) / kk) / k
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / kk) / kk) / kk) / kk) / k
    }
}

/// `k ln(k/λ) + λ − k`, summed as a series when `k` is close to `λ`.
fn deviance(k: f64, lambda: f64) -> f64 {
    if (k - lambda).abs() < 0.1 * (k + lambda) {
        let v = (k - lambda) / (k + lambda);
        let mut sum = (k - lambda) * v;
        let mut term = 2.0 * k * v;
        let v2 = v * v;
        for j in 1..1000 {
            term *= v2;
            let next = sum + term / (2 * j + 1) as f64;
            if next == sum {
                break;
            }
            sum = next;
        }
        sum
    } else {
        k * (k / lambda).ln() + lambda - k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    #[serde(serialize_with = "crate::montecarlo::scheme_name")]
    pub scheme: Scheme,
    pub sigma_c: CrossSection,
    pub trials: u64,
    pub seed: u64,
    pub detections: u64,
    pub detect_fraction: f64,
    pub mean_s: f64,
    pub mean_b: f64,
    pub analytic_s: f64,
    pub analytic_b: f64,
    /// Sample mean of `S − B`.
    pub mean_diff: f64,
    /// Standard error of `mean_diff`.
    pub diff_std_error: f64,
    /// `n_σ(√λ_S + √λ_B)`, the difference required at the bound.
    pub analytic_threshold: f64,
}

fn scheme_name<S: serde::Serializer>(scheme: &Scheme, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&scheme.to_string())
}

#[derive(Debug, Clone, Copy, Default)]
struct Tally {
    detections: u64,
    sum_s: u128,
    sum_b: u128,
    sum_d: i128,
    sum_d2: u128,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            detections: self.detections + o.detections,
            sum_s: self.sum_s + o.sum_s,
            sum_b: self.sum_b + o.sum_b,
            sum_d: self.sum_d + o.sum_d,
            sum_d2: self.sum_d2 + o.sum_d2,
        }
    }
}

fn check_lambda(lambda: f64) -> Result<(), ModelError> {
    if (0.0..=MAX_POISSON_MEAN).contains(&lambda) {
        Ok(())
    } else {
        Err(ModelError::PoissonRange(lambda))
    }
}

/// Runs `trials` independent signal/background measurements at `sigma_c`
/// and applies the detection rule to the sampled counts.
pub fn simulate(
    config: &ExperimentConfig,
    scheme: Scheme,
    sigma_c: CrossSection,
    trials: u64,
    seed: u64,
) -> Result<SimulationReport, ModelError> {
    if trials == 0 {
        return Err(ModelError::NoTrials);
    }
    let (signal, background) = counts_pair(config, scheme, sigma_c)?;
    let (lambda_s, lambda_b) = (signal.total, background.total);
    check_lambda(lambda_s)?;
    check_lambda(lambda_b)?;
    let n_sigma = config.n_sigma;

    let tally = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let s =
                sample_poisson(&mut trial_rng(seed, trial, Role::Signal), lambda_s).expect("mean checked");
            let b = sample_poisson(&mut trial_rng(seed, trial, Role::Background), lambda_b)
                .expect("mean checked");
            let detected = detectable(
                &ExpectedCounts::from_total(s as f64),
                &ExpectedCounts::from_total(b as f64),
                n_sigma,
            )
            .detectable;
            let d = s as i128 - b as i128;
            Tally {
                detections: detected as u64,
                sum_s: s as u128,
                sum_b: b as u128,
                sum_d: d,
                sum_d2: (d * d) as u128,
            }
        })
        .reduce(Tally::default, Tally::merge);

    let n = trials as f64;
    let mean_diff = tally.sum_d as f64 / n;
    let diff_std_error = if trials > 1 {
        let mean_sq = tally.sum_d2 as f64 / n;
        let var = (mean_sq - mean_diff * mean_diff).max(0.0) * n / (n - 1.0);
        (var / n).sqrt()
    } else {
        f64::NAN
    };
    Ok(SimulationReport {
        scheme,
        sigma_c,
        trials,
        seed,
        detections: tally.detections,
        detect_fraction: tally.detections as f64 / n,
        mean_s: tally.sum_s as f64 / n,
        mean_b: tally.sum_b as f64 / n,
        analytic_s: lambda_s,
        analytic_b: lambda_b,
        mean_diff,
        diff_std_error,
        analytic_threshold: uncertainty(lambda_s, n_sigma) + uncertainty(lambda_b, n_sigma),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub sigma_c: CrossSection,
    pub detect_fraction: f64,
    /// Binomial standard error of `detect_fraction`.
    pub std_error: f64,
}

/// Detection fraction at every point of an ascending grid. All points use
/// the same seed.
pub fn detection_curve(
    config: &ExperimentConfig,
    scheme: Scheme,
    grid: &[CrossSection],
    trials: u64,
    seed: u64,
) -> Result<Vec<CurvePoint>, ModelError> {
    if grid.windows(2).any(|w| !matches!(w[0].partial_cmp(&w[1]), Some(Ordering::Less | Ordering::Equal))) {
        return Err(ModelError::UnsortedGrid);
    }
    grid.iter()
        .map(|&sigma_c| {
            let r = simulate(config, scheme, sigma_c, trials, seed)?;
            let p = r.detect_fraction;
            Ok(CurvePoint { sigma_c, detect_fraction: p, std_error: (p * (1.0 - p) / trials as f64).sqrt() })
        })
        .collect()
}

/// True when no point falls below an earlier one by more than `k` combined
/// standard errors.
pub fn is_nondecreasing_within(curve: &[CurvePoint], k: f64) -> bool {
    curve.iter().enumerate().all(|(j, pj)| {
        curve[..j].iter().all(|pi| {
            let tol = k * (pi.std_error.powi(2) + pj.std_error.powi(2)).sqrt();
            pj.detect_fraction >= pi.detect_fraction - tol
        })
    })
}
