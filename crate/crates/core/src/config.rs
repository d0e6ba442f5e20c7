//! Experiment parameters, the `key = value unit` file format and the bundled
//! data set of published experiments.
//!
//! A config file is line oriented:
//!
//! ```text
//! # comment
//! label = Geneva
//! pump_mode = continuous_wave
//! T_int = 5.56 h
//! A = 15.9 um2
//! N_t = 1.6e-15 mol
//! ```
//!
//! Every key has a long name and a short symbol (`integration_time` and
//! `T_int` are the same key). Dimensioned values require a unit; values are
//! normalized to centimeters and seconds on ingest.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::ConfigError;
use crate::units::{Dimension, AVOGADRO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PumpMode {
    Pulsed,
    ContinuousWave,
}

impl PumpMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PumpMode::Pulsed => "pulsed",
            PumpMode::ContinuousWave => "continuous_wave",
        }
    }
}

/// Published values attached to a configuration. They never enter the model;
/// they are what the model output is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ReferenceData {
    /// Attenuator transmittance used by the published measurement.
    pub eta: Option<f64>,
    /// Published attenuation-scheme sensitivity [GM].
    pub sigma_att_gm: Option<f64>,
    /// Published separation-scheme sensitivity [GM].
    pub sigma_split_gm: Option<f64>,
    /// Cross-section of the absorber under study [GM].
    pub target_sigma_gm: Option<f64>,
}

/// All physical parameters of one experiment, in cm and s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub label: String,
    /// Integration time [s].
    pub integration_time: f64,
    pub eta_s: f64,
    pub eta_i: f64,
    /// Detection efficiency of the fluorescence detector.
    pub eta_d: f64,
    /// Illuminated beam area [cm²].
    pub beam_area: f64,
    /// Single-photon wavepacket duration [s]; pump coherence time for CW.
    pub pulse_duration: f64,
    /// Entanglement area [cm²].
    pub entanglement_area: f64,
    /// Entanglement time [s].
    pub entanglement_time: f64,
    /// Entanglement time of Fourier-limited pairs [s].
    pub fourier_limited_entanglement_time: Option<f64>,
    pub pairs_per_pulse: f64,
    /// [Hz]
    pub repetition_rate: f64,
    /// [Hz]
    pub dark_count_rate: f64,
    /// Hot-band absorption cross-section [cm²], shared by both arms.
    pub hba_cross_section: f64,
    /// Illuminated amount of absorber [mol].
    pub illuminated_amount: f64,
    pub pump_mode: PumpMode,
    /// Accuracy multiplier on the Poisson uncertainties.
    pub n_sigma: f64,
    /// Fluorescence decay time [s].
    pub fluorescence_lifetime: Option<f64>,
    /// Additional multiplier on the quantum enhancement.
    pub extra_enhancement: f64,
    pub reference: ReferenceData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Field {
    Label,
    PumpMode,
    IntegrationTime,
    EtaS,
    EtaI,
    EtaSI,
    EtaD,
    BeamArea,
    PulseDuration,
    EntanglementArea,
    EntanglementTime,
    FourierLimit,
    PairsPerPulse,
    RepetitionRate,
    DarkCountRate,
    HbaCrossSection,
    IlluminatedAmount,
    NSigma,
    Lifetime,
    ExtraEnhancement,
    RefEta,
    RefAtt,
    RefSplit,
    RefTarget,
}

struct Key {
    name: &'static str,
    symbol: &'static str,
    dim: Option<Dimension>,
    field: Field,
}

const fn key(name: &'static str, symbol: &'static str, dim: Option<Dimension>, field: Field) -> Key {
    Key { name, symbol, dim, field }
}

use Dimension::*;

const KEYS: &[Key] = &[
    key("label", "label", None, Field::Label),
    key("pump_mode", "pump_mode", None, Field::PumpMode),
    key("integration_time", "T_int", Some(Time), Field::IntegrationTime),
    key("signal_transmission", "eta_s", Some(Dimensionless), Field::EtaS),
    key("idler_transmission", "eta_i", Some(Dimensionless), Field::EtaI),
    key("arm_transmission", "eta_si", Some(Dimensionless), Field::EtaSI),
    key("detection_efficiency", "eta_d", Some(Dimensionless), Field::EtaD),
    key("beam_area", "A", Some(Area), Field::BeamArea),
    key("pulse_duration", "T", Some(Time), Field::PulseDuration),
    key("entanglement_area", "A_e", Some(Area), Field::EntanglementArea),
    key("entanglement_time", "T_e", Some(Time), Field::EntanglementTime),
    key("fourier_limited_entanglement_time", "T_e_min", Some(Time), Field::FourierLimit),
    key("pairs_per_pulse", "N_P", Some(Dimensionless), Field::PairsPerPulse),
    key("repetition_rate", "f_rep", Some(Frequency), Field::RepetitionRate),
    key("dark_count_rate", "f_dark", Some(Frequency), Field::DarkCountRate),
    key("hba_cross_section", "sigma_h", Some(Area), Field::HbaCrossSection),
    key("illuminated_amount", "N_t", Some(Amount), Field::IlluminatedAmount),
    key("accuracy", "n_sigma", Some(Dimensionless), Field::NSigma),
    key("fluorescence_lifetime", "tau", Some(Time), Field::Lifetime),
    key("extra_enhancement", "extra_enhancement", Some(Dimensionless), Field::ExtraEnhancement),
    key("attenuation", "eta", Some(Dimensionless), Field::RefEta),
    key("published_sigma_att", "sigma_c_att", Some(CrossSection), Field::RefAtt),
    key("published_sigma_split", "sigma_c_split", Some(CrossSection), Field::RefSplit),
    key("target_sigma", "target_sigma_c", Some(CrossSection), Field::RefTarget),
];

fn lookup(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name || k.symbol == name)
}

/// Dimension of a numeric field, looked up by long name or symbol.
pub fn field_dimension(name: &str) -> Option<Dimension> {
    lookup(name).and_then(|k| k.dim)
}

fn key_of(field: Field) -> &'static Key {
    KEYS.iter().find(|k| k.field == field).expect("every field has a key")
}

/// Parses a configuration document into a validated, unit-normalized config.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut values: HashMap<Field, f64> = HashMap::new();
    let mut label: Option<String> = None;
    let mut pump_mode: Option<PumpMode> = None;
    let mut seen: HashMap<Field, usize> = HashMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, rest) = line.split_once('=').ok_or(ConfigError::Malformed { line: line_no })?;
        let name = name.trim();
        let rest = rest.trim();
        let key =
            lookup(name).ok_or_else(|| ConfigError::UnknownKey { line: line_no, key: name.to_string() })?;
        if seen.insert(key.field, line_no).is_some() {
            return Err(ConfigError::DuplicateKey { line: line_no, key: key.name });
        }
        match key.field {
            Field::Label => label = Some(rest.trim_matches('"').to_string()),
            Field::PumpMode => {
                pump_mode = Some(match rest {
                    "pulsed" => PumpMode::Pulsed,
                    "continuous_wave" | "cw" | "CW" => PumpMode::ContinuousWave,
                    other => {
                        return Err(ConfigError::OutOfRange {
                            key: key.name,
                            reason: format!("must be `pulsed` or `continuous_wave`, got `{other}`"),
                        })
                    }
                })
            }
            _ => {
                let dim = key.dim.expect("numeric key");
                values.insert(key.field, parse_quantity(key.name, dim, rest)?);
            }
        }
    }

    let get = |field: Field| values.get(&field).copied();
    let require = |field: Field| get(field).ok_or(ConfigError::MissingKey(key_of(field).name));

    let (eta_s, eta_i) = match (get(Field::EtaSI), get(Field::EtaS), get(Field::EtaI)) {
        (Some(both), None, None) => (both, both),
        (None, Some(s), Some(i)) => (s, i),
        (None, None, _) => return Err(ConfigError::MissingKey("signal_transmission")),
        (None, Some(_), None) => return Err(ConfigError::MissingKey("idler_transmission")),
        (Some(_), _, _) => {
            return Err(ConfigError::OutOfRange {
                key: "arm_transmission",
                reason: "cannot be combined with signal_transmission/idler_transmission".into(),
            })
        }
    };

    let pump_mode = pump_mode.ok_or(ConfigError::MissingKey("pump_mode"))?;
    let pulse_duration = require(Field::PulseDuration)?;
    let repetition_rate = match pump_mode {
        PumpMode::Pulsed => require(Field::RepetitionRate)?,
        // Placeholder; `normalize` sets f_rep = 1/T.
        PumpMode::ContinuousWave => get(Field::RepetitionRate).unwrap_or(f64::NAN),
    };

    let mut config = ExperimentConfig {
        label: label.unwrap_or_else(|| "unnamed".to_string()),
        integration_time: require(Field::IntegrationTime)?,
        eta_s,
        eta_i,
        eta_d: require(Field::EtaD)?,
        beam_area: require(Field::BeamArea)?,
        pulse_duration,
        entanglement_area: require(Field::EntanglementArea)?,
        entanglement_time: require(Field::EntanglementTime)?,
        fourier_limited_entanglement_time: get(Field::FourierLimit),
        pairs_per_pulse: require(Field::PairsPerPulse)?,
        repetition_rate,
        dark_count_rate: require(Field::DarkCountRate)?,
        hba_cross_section: require(Field::HbaCrossSection)?,
        illuminated_amount: require(Field::IlluminatedAmount)?,
        pump_mode,
        n_sigma: get(Field::NSigma).unwrap_or(1.0),
        fluorescence_lifetime: get(Field::Lifetime),
        extra_enhancement: get(Field::ExtraEnhancement).unwrap_or(1.0),
        reference: ReferenceData {
            eta: get(Field::RefEta),
            sigma_att_gm: get(Field::RefAtt),
            sigma_split_gm: get(Field::RefSplit),
            target_sigma_gm: get(Field::RefTarget),
        },
    };
    if pump_mode == PumpMode::ContinuousWave && config.repetition_rate.is_finite() {
        let expected = 1.0 / pulse_duration;
        if ((config.repetition_rate - expected) / expected).abs() > 1e-9 {
            return Err(ConfigError::OutOfRange {
                key: "repetition_rate",
                reason: format!("must equal 1/pulse_duration = {expected:e} Hz for a continuous-wave pump"),
            });
        }
    }
    config.normalize();
    config.validate()?;
    Ok(config)
}

fn parse_quantity(key: &'static str, dim: Dimension, text: &str) -> Result<f64, ConfigError> {
    let mut parts = text.split_whitespace();
    let number = parts.next().ok_or(ConfigError::InvalidNumber { key, value: String::new() })?;
    let unit: String = parts.collect::<Vec<_>>().join("");
    // `5%` written without a space
    let (number, unit) = match number.strip_suffix('%') {
        Some(n) if unit.is_empty() => (n, "%".to_string()),
        _ => (number, unit),
    };
    let value: f64 =
        number.parse().map_err(|_| ConfigError::InvalidNumber { key, value: number.to_string() })?;
    if unit.is_empty() && dim != Dimensionless {
        return Err(ConfigError::MissingUnit { key });
    }
    let factor = dim.factor(&unit).ok_or(ConfigError::UnknownUnit { key, unit })?;
    Ok(value * factor)
}

impl ExperimentConfig {
    /// Number of illuminated molecules: the tabulated amount in mol times the
    /// Avogadro constant.
    pub fn molecule_count(&self) -> f64 {
        self.illuminated_amount * AVOGADRO
    }

    /// Reapplies derived parameters. For a CW pump the coherence time stands
    /// in for the pulse duration and f_rep = 1/T.
    pub fn normalize(&mut self) {
        if self.pump_mode == PumpMode::ContinuousWave {
            self.repetition_rate = 1.0 / self.pulse_duration;
        }
    }

    /// Checks every range invariant of the parameter model.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { key, reason: format!("must be positive, got {v}") })
            }
        }
        fn non_negative(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { key, reason: format!("must be non-negative, got {v}") })
            }
        }
        fn unit_interval(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange { key, reason: "out of [0,1]".into() })
            }
        }

        positive("integration_time", self.integration_time)?;
        unit_interval("signal_transmission", self.eta_s)?;
        unit_interval("idler_transmission", self.eta_i)?;
        unit_interval("detection_efficiency", self.eta_d)?;
        positive("beam_area", self.beam_area)?;
        positive("pulse_duration", self.pulse_duration)?;
        positive("entanglement_area", self.entanglement_area)?;
        positive("entanglement_time", self.entanglement_time)?;
        if let Some(t) = self.fourier_limited_entanglement_time {
            positive("fourier_limited_entanglement_time", t)?;
        }
        non_negative("pairs_per_pulse", self.pairs_per_pulse)?;
        positive("repetition_rate", self.repetition_rate)?;
        non_negative("dark_count_rate", self.dark_count_rate)?;
        non_negative("hba_cross_section", self.hba_cross_section)?;
        positive("illuminated_amount", self.illuminated_amount)?;
        positive("accuracy", self.n_sigma)?;
        if let Some(t) = self.fluorescence_lifetime {
            positive("fluorescence_lifetime", t)?;
        }
        non_negative("extra_enhancement", self.extra_enhancement)?;
        if let Some(eta) = self.reference.eta {
            if !(eta > 0.0 && eta <= 1.0) {
                return Err(ConfigError::OutOfRange { key: "attenuation", reason: "out of (0,1]".into() });
            }
        }
        Ok(())
    }

    /// Names accepted by [`with_field`](Self::with_field) and
    /// [`field`](Self::field), in both long and symbol form.
    pub fn numeric_field_names() -> impl Iterator<Item = (&'static str, &'static str)> {
        KEYS.iter()
            .filter(|k| !matches!(k.field, Field::Label | Field::PumpMode | Field::EtaSI))
            .filter(|k| !matches!(k.field, Field::RefAtt | Field::RefSplit | Field::RefTarget))
            .map(|k| (k.name, k.symbol))
    }

    fn slot(&mut self, field: Field) -> Option<&mut f64> {
        Some(match field {
            Field::IntegrationTime => &mut self.integration_time,
            Field::EtaS => &mut self.eta_s,
            Field::EtaI => &mut self.eta_i,
            Field::EtaD => &mut self.eta_d,
            Field::BeamArea => &mut self.beam_area,
            Field::PulseDuration => &mut self.pulse_duration,
            Field::EntanglementArea => &mut self.entanglement_area,
            Field::EntanglementTime => &mut self.entanglement_time,
            Field::PairsPerPulse => &mut self.pairs_per_pulse,
            Field::RepetitionRate => &mut self.repetition_rate,
            Field::DarkCountRate => &mut self.dark_count_rate,
            Field::HbaCrossSection => &mut self.hba_cross_section,
            Field::IlluminatedAmount => &mut self.illuminated_amount,
            Field::NSigma => &mut self.n_sigma,
            Field::ExtraEnhancement => &mut self.extra_enhancement,
            Field::FourierLimit => self.fourier_limited_entanglement_time.get_or_insert(0.0),
            Field::Lifetime => self.fluorescence_lifetime.get_or_insert(0.0),
            Field::RefEta => self.reference.eta.get_or_insert(0.0),
            _ => return None,
        })
    }

    /// Returns a copy with one numeric field replaced (value in internal
    /// units), renormalized and revalidated.
    pub fn with_field(&self, name: &str, value: f64) -> Result<ExperimentConfig, ConfigError> {
        let key = lookup(name).ok_or_else(|| ConfigError::UnknownField(name.to_string()))?;
        let mut next = self.clone();
        if key.field == Field::EtaSI {
            next.eta_s = value;
            next.eta_i = value;
        } else {
            let slot = next.slot(key.field).ok_or_else(|| ConfigError::UnknownField(name.to_string()))?;
            *slot = value;
        }
        if key.field == Field::RepetitionRate && next.pump_mode == PumpMode::ContinuousWave {
            next.pulse_duration = 1.0 / value;
        }
        next.normalize();
        next.validate()?;
        Ok(next)
    }

    /// Reads a numeric field by long name or symbol (internal units).
    pub fn field(&self, name: &str) -> Result<f64, ConfigError> {
        let key = lookup(name).ok_or_else(|| ConfigError::UnknownField(name.to_string()))?;
        if key.field == Field::EtaSI {
            return Ok(self.eta_s);
        }
        let mut copy = self.clone();
        let value = copy.slot(key.field).map(|v| *v);
        value.ok_or_else(|| ConfigError::UnknownField(name.to_string()))
    }

    /// Writes the config in the file format, in base units with shortest
    /// round-trip number formatting. Parsing the output reproduces `self`.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        let mut line = |field: Field, value: f64| {
            let k = key_of(field);
            let unit = k.dim.map(Dimension::base_unit).unwrap_or("");
            let _ = writeln!(out, "{} = {:e} {}", k.name, value, unit);
        };
        line(Field::IntegrationTime, self.integration_time);
        line(Field::EtaS, self.eta_s);
        line(Field::EtaI, self.eta_i);
        line(Field::EtaD, self.eta_d);
        line(Field::BeamArea, self.beam_area);
        line(Field::PulseDuration, self.pulse_duration);
        line(Field::EntanglementArea, self.entanglement_area);
        line(Field::EntanglementTime, self.entanglement_time);
        if let Some(v) = self.fourier_limited_entanglement_time {
            line(Field::FourierLimit, v);
        }
        line(Field::PairsPerPulse, self.pairs_per_pulse);
        if self.pump_mode == PumpMode::Pulsed {
            line(Field::RepetitionRate, self.repetition_rate);
        }
        line(Field::DarkCountRate, self.dark_count_rate);
        line(Field::HbaCrossSection, self.hba_cross_section);
        line(Field::IlluminatedAmount, self.illuminated_amount);
        line(Field::NSigma, self.n_sigma);
        if let Some(v) = self.fluorescence_lifetime {
            line(Field::Lifetime, v);
        }
        line(Field::ExtraEnhancement, self.extra_enhancement);
        let r = self.reference;
        for (field, value) in [
            (Field::RefEta, r.eta),
            (Field::RefAtt, r.sigma_att_gm),
            (Field::RefSplit, r.sigma_split_gm),
            (Field::RefTarget, r.target_sigma_gm),
        ] {
            if let Some(v) = value {
                line(field, v);
            }
        }
        format!("label = {}\npump_mode = {}\n{}", self.label, self.pump_mode.as_str(), out)
    }
}

/// Bundled configuration files, in table order.
pub const BUILTIN_FILES: &[(&str, &str)] = &[
    ("geneva", include_str!("../data/geneva.cfg")),
    ("oregon", include_str!("../data/oregon.cfg")),
    ("oregon_cw", include_str!("../data/oregon_cw.cfg")),
    ("oregon_sq", include_str!("../data/oregon_sq.cfg")),
    ("boulder_fs", include_str!("../data/boulder_fs.cfg")),
    ("boulder_fibre", include_str!("../data/boulder_fibre.cfg")),
    ("this_work", include_str!("../data/this_work.cfg")),
];

/// The seven published parameter sets: six experiments (a)–(f) followed by
/// the reference configuration used for the method comparison.
pub fn builtin_table() -> Vec<ExperimentConfig> {
    BUILTIN_FILES
        .iter()
        .map(|(name, text)| {
            parse_config(text).unwrap_or_else(|e| panic!("bundled config `{name}` is invalid: {e}"))
        })
        .collect()
}

/// Looks up a bundled config by file stem (`geneva`) or label (`Geneva`).
pub fn builtin(name: &str) -> Option<ExperimentConfig> {
    let wanted = name.to_ascii_lowercase().replace([' ', '-'], "_");
    BUILTIN_FILES.iter().position(|(stem, _)| *stem == wanted).map(|i| builtin_table().swap_remove(i))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geneva_text() -> &'static str {
        BUILTIN_FILES[0].1
    }

    #[test]
    fn parses_geneva() {
        let c = parse_config(geneva_text()).unwrap();
        assert_eq!(c.label, "Geneva");
        assert!((c.pulse_duration - 2.0e-7).abs() < 1e-20);
        assert!((c.beam_area - 1.59e-7).abs() < 1e-20);
        assert_eq!(c.pairs_per_pulse, 1.9e5);
        assert_eq!(c.dark_count_rate, 215.0);
        assert_eq!(c.reference.target_sigma_gm, Some(9.9));
    }

    #[test]
    fn detection_efficiency_out_of_range() {
        let text = geneva_text().replace("eta_d = 5.18 %", "eta_d = 1.5");
        let err = parse_config(&text).unwrap_err();
        assert_eq!(err.to_string(), "detection_efficiency out of [0,1]");
    }

    #[test]
    fn cw_repetition_rate_defaults_to_inverse_duration() {
        let text = geneva_text().replace("T = 200.0 ns", "T = 100 ns").replace("f_rep = 5.0 MHz\n", "");
        let c = parse_config(&text).unwrap();
        assert!((c.repetition_rate - 1.0e7).abs() < 1e-6);
    }

    #[test]
    fn cw_repetition_rate_must_match() {
        let text = geneva_text().replace("f_rep = 5.0 MHz", "f_rep = 4.0 MHz");
        assert!(matches!(parse_config(&text), Err(ConfigError::OutOfRange { key: "repetition_rate", .. })));
    }

    #[test]
    fn pulsed_requires_repetition_rate() {
        let text = BUILTIN_FILES[4].1.replace("f_rep = 80.0 MHz\n", "");
        assert_eq!(parse_config(&text), Err(ConfigError::MissingKey("repetition_rate")));
    }

    #[test]
    fn error_paths_name_the_key() {
        let cases = [
            (geneva_text().replace("T_int = 5.56 h\n", ""), "integration_time"),
            (geneva_text().replace("T_int = 5.56 h", "T_int = 5.5.6 h"), "integration_time"),
            (geneva_text().replace("T_int = 5.56 h", "T_int = 5.56 fortnights"), "integration_time"),
            (geneva_text().replace("T_int = 5.56 h", "T_int = 5.56"), "integration_time"),
            (geneva_text().replace("f_dark = 215 Hz", "f_dark = -1 Hz"), "dark_count_rate"),
        ];
        for (text, key) in cases {
            let msg = parse_config(&text).unwrap_err().to_string();
            assert!(msg.contains(key), "`{msg}` should mention {key}");
        }
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        let text = format!("{}\nwavelength = 1064 nm\n", geneva_text());
        assert!(matches!(parse_config(&text), Err(ConfigError::UnknownKey { .. })));
        let text = format!("{}\nf_dark = 3 Hz\n", geneva_text());
        assert!(matches!(parse_config(&text), Err(ConfigError::DuplicateKey { key: "dark_count_rate", .. })));
        assert!(matches!(parse_config("just words"), Err(ConfigError::Malformed { line: 1 })));
    }

    #[test]
    fn builtin_table_contents() {
        let table = builtin_table();
        assert_eq!(table.len(), 7);
        assert_eq!(table[0].label, "Geneva");
        assert_eq!(table[0].dark_count_rate, 215.0);
        assert!((table[4].entanglement_area - 1.7e-8).abs() < 1e-22);
        for c in &table {
            if c.pump_mode == PumpMode::ContinuousWave {
                assert!((c.repetition_rate * c.pulse_duration - 1.0).abs() <= 2.0 * f64::EPSILON);
            }
        }
        assert_eq!(builtin("Boulder FS").unwrap().label, "Boulder FS");
        assert!(builtin("nowhere").is_none());
    }

    #[test]
    fn molecule_count_uses_avogadro() {
        let c = parse_config(geneva_text()).unwrap();
        assert!((c.molecule_count() / 9.635_425e8 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn with_field_revalidates() {
        let c = parse_config(geneva_text()).unwrap();
        let d = c.with_field("N_P", 10.0).unwrap();
        assert_eq!(d.pairs_per_pulse, 10.0);
        assert_eq!(d.field("pairs_per_pulse").unwrap(), 10.0);
        assert!(c.with_field("eta_d", 2.0).is_err());
        assert!(matches!(c.with_field("colour", 1.0), Err(ConfigError::UnknownField(_))));
        // CW: changing T moves f_rep along with it
        let e = c.with_field("T", 1e-6).unwrap();
        assert!((e.repetition_rate - 1e6).abs() < 1e-6);
    }
}
