//! Unit conversions. Internally every quantity uses centimeters and seconds.

use std::fmt;

use serde::{Deserialize, Serialize};

pub const AVOGADRO: f64 = 6.022_140_76e23;

/// One Göppert-Mayer in cm⁴·s.
pub const GM: f64 = 1e-50;

pub const SQUARE_MICROMETER: f64 = 1e-8;

/// Physical dimension of a configuration value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    Area,
    Frequency,
    Amount,
    /// Two-photon cross-section, written in GM.
    CrossSection,
    Dimensionless,
}

impl Dimension {
    /// Base unit used when writing a value back out.
    pub fn base_unit(self) -> &'static str {
        match self {
            Dimension::Time => "s",
            Dimension::Area => "cm2",
            Dimension::Frequency => "Hz",
            Dimension::Amount => "mol",
            Dimension::CrossSection => "GM",
            Dimension::Dimensionless => "",
        }
    }

    /// Multiplier taking a value in `unit` to the internal unit, or `None`
    /// if the unit does not belong to this dimension.
    pub fn factor(self, unit: &str) -> Option<f64> {
        let f = match self {
            Dimension::Time => match unit {
                "s" => 1.0,
                "ms" => 1e-3,
                "us" | "µs" | "μs" => 1e-6,
                "ns" => 1e-9,
                "ps" => 1e-12,
                "fs" => 1e-15,
                "min" => 60.0,
                "h" => 3600.0,
                _ => return None,
            },
            Dimension::Area => match unit {
                "m2" => 1e4,
                "cm2" => 1.0,
                "mm2" => 1e-2,
                "um2" | "µm2" | "μm2" => SQUARE_MICROMETER,
                "nm2" => 1e-14,
                _ => return None,
            },
            Dimension::Frequency => match unit {
                "Hz" => 1.0,
                "kHz" => 1e3,
                "MHz" => 1e6,
                "GHz" => 1e9,
                _ => return None,
            },
            Dimension::Amount => match unit {
                "mol" => 1.0,
                "mmol" => 1e-3,
                "umol" | "µmol" => 1e-6,
                "nmol" => 1e-9,
                "pmol" => 1e-12,
                "fmol" => 1e-15,
                _ => return None,
            },
            // Cross-sections are stored in GM; callers convert with `CrossSection`.
            Dimension::CrossSection => match unit {
                "GM" => 1.0,
                _ => return None,
            },
            Dimension::Dimensionless => match unit {
                "" => 1.0,
                "%" => 1e-2,
                "PpP" => 1.0,
                _ => return None,
            },
        };
        Some(f)
    }
}

/// A two-photon absorption cross-section.
///
/// Stored in cm⁴·s; displayed and serialized in GM.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct CrossSection(f64);

impl CrossSection {
    pub const ZERO: CrossSection = CrossSection(0.0);
    pub const INFINITE: CrossSection = CrossSection(f64::INFINITY);

    pub fn from_cm4_s(value: f64) -> Self {
        CrossSection(value)
    }

    pub fn from_gm(value: f64) -> Self {
        CrossSection(value * GM)
    }

    pub fn cm4_s(self) -> f64 {
        self.0
    }

    pub fn gm(self) -> f64 {
        self.0 / GM
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl fmt::Display for CrossSection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_finite() {
            write!(f, "{:.3e} GM", self.gm())
        } else {
            f.write_str("inf GM")
        }
    }
}

impl Serialize for CrossSection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.gm())
    }
}

impl<'de> Deserialize<'de> for CrossSection {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        f64::deserialize(d).map(CrossSection::from_gm)
    }
}
