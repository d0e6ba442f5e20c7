use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use etpa_core::config::{builtin, field_dimension, BUILTIN_FILES};
use etpa_core::gating::{default_shape, optimize_gate, PulseShape};
use etpa_core::montecarlo::is_nondecreasing_within;
use etpa_core::units::Dimension;
use etpa_core::{
    bound, bound_attenuation, bound_separation, builtin_table, detection_curve, evaluate, optimize_eta,
    parse_config, run_ladder, simulate, CrossSection, ExperimentConfig, LadderOptions, Scheme,
};

use crate::args::{OptimizeTarget, Sources};
use crate::error::CliError;

pub fn load(sources: &Sources) -> Result<Vec<ExperimentConfig>, CliError> {
    let mut configs = Vec::new();
    for path in &sources.configs {
        configs.push(load_file(path)?);
    }
    for name in &sources.builtins {
        configs.push(builtin(name).ok_or_else(|| {
            let known: Vec<_> = BUILTIN_FILES.iter().map(|(stem, _)| *stem).collect();
            CliError::Input(format!("unknown builtin `{name}`; available: {}", known.join(", ")))
        })?);
    }
    if sources.all_builtin {
        configs.extend(builtin_table());
    }
    if configs.is_empty() {
        return Err(CliError::Input("no experiment given; use --config, --builtin or --all-builtin".into()));
    }
    Ok(configs)
}

fn load_file(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Parses `4ns`, `4 ns`, `5%` or a bare number (taken in base units).
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64, CliError> {
    let text = text.trim();
    let bad = || CliError::Input(format!("cannot parse `{text}` as a {dim:?} value"));
    if let Ok(v) = text.parse::<f64>() {
        return Ok(v);
    }
    let split = text
        .char_indices()
        .map(|(i, _)| i)
        .rev()
        .find(|&i| text[..i].trim().parse::<f64>().is_ok())
        .ok_or_else(bad)?;
    let value: f64 = text[..split].trim().parse().map_err(|_| bad())?;
    let factor = dim.factor(text[split..].trim()).ok_or_else(bad)?;
    Ok(value * factor)
}

/// A scheme as requested on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchemeChoice {
    Fixed(Scheme),
    /// Attenuation at the optimal transmittance of each experiment.
    OptimalAttenuation,
}

impl SchemeChoice {
    pub fn parse(text: &str, default_eta: Option<f64>) -> Result<Self, CliError> {
        match text {
            "attenuation" | "att" => Ok(match default_eta {
                Some(eta) => SchemeChoice::Fixed(Scheme::Attenuation { eta }),
                None => SchemeChoice::OptimalAttenuation,
            }),
            "attenuation@opt" | "att@opt" => Ok(SchemeChoice::OptimalAttenuation),
            other => other.parse().map(SchemeChoice::Fixed).map_err(CliError::Input),
        }
    }

    fn resolve(self, config: &ExperimentConfig) -> Scheme {
        match self {
            SchemeChoice::Fixed(s) => s,
            SchemeChoice::OptimalAttenuation => Scheme::Attenuation { eta: optimize_eta(config).eta },
        }
    }
}

fn scheme_choices(texts: &[String], eta: Option<f64>) -> Result<Vec<SchemeChoice>, CliError> {
    if let Some(eta) = eta {
        Scheme::Attenuation { eta }.validate().map_err(|e| CliError::Input(e.to_string()))?;
    }
    if texts.is_empty() {
        return Ok(vec![
            SchemeChoice::Fixed(Scheme::SeparationDeterministic),
            SchemeChoice::Fixed(Scheme::SeparationProbabilistic),
            SchemeChoice::parse("attenuation", eta)?,
        ]);
    }
    texts.iter().map(|t| SchemeChoice::parse(t, eta)).collect()
}

#[derive(Debug, Serialize)]
pub struct SensitivityRow {
    pub label: String,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub sigma_c_gm: f64,
    pub dominant_noise: &'static str,
    pub target_gm: Option<f64>,
    pub meets_target: Option<bool>,
}

pub fn sensitivity(
    configs: &[ExperimentConfig],
    schemes: &[String],
    eta: Option<f64>,
) -> Result<Vec<SensitivityRow>, CliError> {
    let choices = scheme_choices(schemes, eta)?;
    let mut rows = Vec::new();
    for c in configs {
        for choice in &choices {
            let r = evaluate(c, choice.resolve(c))?;
            rows.push(SensitivityRow {
                label: c.label.clone(),
                scheme: r.scheme.name(),
                eta: r.eta_used,
                sigma_c_gm: r.sigma_c_min.gm(),
                dominant_noise: r.dominant_noise.as_str(),
                target_gm: c.reference.target_sigma_gm,
                meets_target: r.meets_target,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
pub struct TableRow {
    pub label: String,
    pub eta: f64,
    pub computed_att_gm: f64,
    pub published_att_gm: f64,
    pub deviation_att: f64,
    pub computed_split_gm: f64,
    pub published_split_gm: f64,
    pub deviation_split: f64,
    pub within_tolerance: bool,
}

/// Rows of the reproduced table and whether every deviation is within
/// `tolerance`.
pub fn table(tolerance: f64) -> Result<(Vec<TableRow>, bool), CliError> {
    let mut rows = Vec::new();
    for c in builtin_table() {
        let r = c.reference;
        let missing = || CliError::Input(format!("{} lacks published reference values", c.label));
        let eta = r.eta.ok_or_else(missing)?;
        let published_att_gm = r.sigma_att_gm.ok_or_else(missing)?;
        let published_split_gm = r.sigma_split_gm.ok_or_else(missing)?;
        let computed_att_gm = bound_attenuation(&c, eta)?.gm();
        let computed_split_gm = bound_separation(&c).gm();
        let deviation_att = computed_att_gm / published_att_gm - 1.0;
        let deviation_split = computed_split_gm / published_split_gm - 1.0;
        rows.push(TableRow {
            label: c.label.clone(),
            eta,
            computed_att_gm,
            published_att_gm,
            deviation_att,
            computed_split_gm,
            published_split_gm,
            deviation_split,
            within_tolerance: deviation_att.abs() <= tolerance && deviation_split.abs() <= tolerance,
        });
    }
    let ok = rows.iter().all(|r| r.within_tolerance);
    Ok((rows, ok))
}

/// Sweep values from an explicit list or a `FROM:TO:POINTS` range.
pub fn sweep_values(
    param: &str,
    values: &[String],
    log_range: Option<&str>,
    range: Option<&str>,
) -> Result<Vec<f64>, CliError> {
    let dim = field_dimension(param)
        .filter(|d| *d != Dimension::CrossSection)
        .ok_or_else(|| CliError::Input(format!("`{param}` is not a sweepable numeric field")))?;
    let parse_range = |spec: &str| -> Result<(f64, f64, usize), CliError> {
        let parts: Vec<&str> = spec.split(':').collect();
        let [from, to, points] = parts[..] else {
            return Err(CliError::Input(format!("range `{spec}` must be FROM:TO:POINTS")));
        };
        let points: usize =
            points.trim().parse().map_err(|_| CliError::Input(format!("bad point count `{points}`")))?;
        if points < 2 {
            return Err(CliError::Input("a range needs at least 2 points".into()));
        }
        Ok((parse_quantity(from, dim)?, parse_quantity(to, dim)?, points))
    };
    if let Some(spec) = log_range {
        let (from, to, n) = parse_range(spec)?;
        if !(from > 0.0 && to > 0.0) {
            return Err(CliError::Input("a logarithmic range needs positive ends".into()));
        }
        let (a, b) = (from.ln(), to.ln());
        return Ok((0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect());
    }
    if let Some(spec) = range {
        let (from, to, n) = parse_range(spec)?;
        return Ok((0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect());
    }
    if values.is_empty() {
        return Err(CliError::Input("give --values, --log-range or --range".into()));
    }
    values.iter().map(|v| parse_quantity(v, dim)).collect()
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub label: String,
    pub parameter: String,
    pub value: f64,
    pub unit: &'static str,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub sigma_c_gm: f64,
}

/// Evaluates every (config, value, scheme) combination in parallel; rows
/// keep the input order.
pub fn sweep(
    configs: &[ExperimentConfig],
    param: &str,
    values: &[f64],
    schemes: &[String],
) -> Result<Vec<SweepRow>, CliError> {
    let choices = scheme_choices(schemes, None)?;
    let unit = field_dimension(param).map(Dimension::base_unit).unwrap_or("");
    let points: Vec<(&ExperimentConfig, f64)> =
        configs.iter().flat_map(|c| values.iter().map(move |&v| (c, v))).collect();
    let chunks: Vec<Vec<SweepRow>> = points
        .par_iter()
        .map(|&(base, value)| -> Result<Vec<SweepRow>, CliError> {
            let c = base.with_field(param, value)?;
            choices
                .iter()
                .map(|choice| {
                    let scheme = choice.resolve(&c);
                    Ok(SweepRow {
                        label: c.label.clone(),
                        parameter: param.to_string(),
                        value,
                        unit,
                        scheme: scheme.name(),
                        eta: scheme.eta(),
                        sigma_c_gm: bound(&c, scheme)?.gm(),
                    })
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(chunks.into_iter().flatten().collect())
}

#[derive(Debug, Serialize)]
pub struct LadderRow {
    pub label: String,
    pub step: &'static str,
    pub applied: bool,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub sigma_c_gm: f64,
    pub target_gm: Option<f64>,
    pub meets_target: Option<bool>,
    pub notes: String,
}

pub fn ladder(configs: &[ExperimentConfig], lifetime: &str) -> Result<Vec<LadderRow>, CliError> {
    let options = LadderOptions { default_lifetime: parse_quantity(lifetime, Dimension::Time)? };
    let mut rows = Vec::new();
    for c in configs {
        let l = run_ladder(c, &options)?;
        let target_gm = c.reference.target_sigma_gm;
        rows.push(LadderRow {
            label: l.label.clone(),
            step: "baseline",
            applied: true,
            scheme: l.baseline_scheme.name(),
            eta: l.baseline_scheme.eta(),
            sigma_c_gm: l.baseline_bound.gm(),
            target_gm,
            meets_target: l.baseline_meets_target,
            notes: "published method".into(),
        });
        for s in l.steps {
            rows.push(LadderRow {
                label: l.label.clone(),
                step: s.kind.as_str(),
                applied: s.applied,
                scheme: s.scheme.name(),
                eta: s.scheme.eta(),
                sigma_c_gm: s.resulting_bound.gm(),
                target_gm,
                meets_target: s.meets_target,
                notes: s.notes,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
pub struct EtaRow {
    pub label: String,
    pub eta_opt: f64,
    pub sigma_c_gm: f64,
    pub at_lower_clip: bool,
    pub at_upper_clip: bool,
    pub dominant_noise: &'static str,
}

#[derive(Debug, Serialize)]
pub struct GateRow {
    pub label: String,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub lifetime_s: f64,
    pub lifetime_assumed: bool,
    pub pulse_shape: &'static str,
    pub gate_width: f64,
    pub efficiency: f64,
    pub sigma_c_gm: f64,
    pub ungated_sigma_c_gm: f64,
}

pub enum OptimizeRows {
    Eta(Vec<EtaRow>),
    Gate(Vec<GateRow>),
}

pub fn optimize(
    configs: &[ExperimentConfig],
    target: OptimizeTarget,
    scheme: &str,
    lifetime: &str,
) -> Result<OptimizeRows, CliError> {
    match target {
        OptimizeTarget::Eta => Ok(OptimizeRows::Eta(
            configs
                .iter()
                .map(|c| {
                    let o = optimize_eta(c);
                    let r = evaluate(c, Scheme::Attenuation { eta: o.eta })?;
                    Ok(EtaRow {
                        label: c.label.clone(),
                        eta_opt: o.eta,
                        sigma_c_gm: o.bound.gm(),
                        at_lower_clip: o.at_lower_clip,
                        at_upper_clip: o.at_upper_clip,
                        dominant_noise: r.dominant_noise.as_str(),
                    })
                })
                .collect::<Result<_, CliError>>()?,
        )),
        OptimizeTarget::Gate => {
            let choice = SchemeChoice::parse(scheme, None)?;
            let default_lifetime = parse_quantity(lifetime, Dimension::Time)?;
            let mut rows = Vec::new();
            for c in configs {
                let scheme = choice.resolve(c);
                let (lifetime_s, lifetime_assumed) = match c.fluorescence_lifetime {
                    Some(t) => (t, false),
                    None => (default_lifetime, true),
                };
                let shape = default_shape(c, lifetime_s);
                let o = optimize_gate(c, lifetime_s, shape, scheme)?;
                rows.push(GateRow {
                    label: c.label.clone(),
                    scheme: scheme.name(),
                    eta: scheme.eta(),
                    lifetime_s,
                    lifetime_assumed,
                    pulse_shape: match shape {
                        PulseShape::Delta => "delta",
                        PulseShape::Gaussian { .. } => "gaussian",
                        PulseShape::Square { .. } => "square",
                    },
                    gate_width: o.width,
                    efficiency: o.efficiency,
                    sigma_c_gm: o.bound.gm(),
                    ungated_sigma_c_gm: o.ungated_bound.gm(),
                });
            }
            Ok(OptimizeRows::Gate(rows))
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateRow {
    pub label: String,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub sigma_c_gm: f64,
    pub trials: u64,
    pub seed: u64,
    pub detections: u64,
    pub detect_fraction: f64,
    pub mean_s: f64,
    pub mean_b: f64,
    pub analytic_s: f64,
    pub analytic_b: f64,
    pub mean_diff: f64,
    pub diff_std_error: f64,
    pub analytic_threshold: f64,
}

fn sigma_at(c: &ExperimentConfig, scheme: Scheme, text: &str) -> Result<CrossSection, CliError> {
    if text == "bound" {
        return Ok(bound(c, scheme)?);
    }
    let gm: f64 = text
        .parse()
        .map_err(|_| CliError::Input(format!("--sigma-c must be a number in GM or `bound`, got `{text}`")))?;
    Ok(CrossSection::from_gm(gm))
}

pub fn simulate_rows(
    configs: &[ExperimentConfig],
    scheme: &str,
    sigma_c: &str,
    trials: u64,
    seed: u64,
) -> Result<Vec<SimulateRow>, CliError> {
    let choice = SchemeChoice::parse(scheme, None)?;
    configs
        .iter()
        .map(|c| {
            let scheme = choice.resolve(c);
            let r = simulate(c, scheme, sigma_at(c, scheme, sigma_c)?, trials, seed)?;
            Ok(SimulateRow {
                label: c.label.clone(),
                scheme: scheme.name(),
                eta: scheme.eta(),
                sigma_c_gm: r.sigma_c.gm(),
                trials: r.trials,
                seed: r.seed,
                detections: r.detections,
                detect_fraction: r.detect_fraction,
                mean_s: r.mean_s,
                mean_b: r.mean_b,
                analytic_s: r.analytic_s,
                analytic_b: r.analytic_b,
                mean_diff: r.mean_diff,
                diff_std_error: r.diff_std_error,
                analytic_threshold: r.analytic_threshold,
            })
        })
        .collect()
}

#[derive(Debug, Serialize)]
pub struct CurveRow {
    pub label: String,
    pub scheme: &'static str,
    pub eta: Option<f64>,
    pub sigma_c_gm: f64,
    pub sigma_over_bound: f64,
    pub detect_fraction: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
}

pub struct CurveSpec<'a> {
    pub scheme: &'a str,
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub trials: u64,
    pub seed: u64,
}

/// Detection curves plus the configs whose curve is not monotone within
/// three standard errors.
pub fn curve(
    configs: &[ExperimentConfig],
    spec: &CurveSpec,
) -> Result<(Vec<CurveRow>, Vec<String>), CliError> {
    if !(spec.from > 0.0 && spec.to > spec.from && spec.points >= 2) {
        return Err(CliError::Input("curve needs 0 < --from < --to and --points >= 2".into()));
    }
    let choice = SchemeChoice::parse(spec.scheme, None)?;
    let mut rows = Vec::new();
    let mut irregular = Vec::new();
    for c in configs {
        let scheme = choice.resolve(c);
        let b = bound(c, scheme)?.gm();
        let n = spec.points;
        let factors: Vec<f64> = (0..n)
            .map(|i| (spec.from.ln() + (spec.to.ln() - spec.from.ln()) * i as f64 / (n - 1) as f64).exp())
            .collect();
        let grid: Vec<_> = factors.iter().map(|f| CrossSection::from_gm(b * f)).collect();
        let points = detection_curve(c, scheme, &grid, spec.trials, spec.seed)?;
        if !is_nondecreasing_within(&points, 3.0) {
            irregular.push(c.label.clone());
        }
        rows.extend(points.iter().zip(&factors).map(|(p, f)| CurveRow {
            label: c.label.clone(),
            scheme: scheme.name(),
            eta: scheme.eta(),
            sigma_c_gm: p.sigma_c.gm(),
            sigma_over_bound: *f,
            detect_fraction: p.detect_fraction,
            std_error: p.std_error,
            trials: spec.trials,
            seed: spec.seed,
        }));
    }
    Ok((rows, irregular))
}
