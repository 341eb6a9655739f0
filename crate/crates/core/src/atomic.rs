//! Physical constants, strontium level data and the rate/intensity arithmetic
//! that turns them into model parameters.
//!
//! Every rate is stored as an angular frequency (rad/s). The constants file
//! uses ordinary frequencies (Hz); the loader multiplies by 2π.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// Watts per square metre in one mW/cm².
pub const MW_PER_CM2: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Planck constant (J s).
    pub h: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Speed of light (m/s).
    pub c: f64,
    /// Bohr magneton as an angular frequency per field (rad/s per gauss).
    pub mu_b: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
}

pub const SI: PhysicalConstants = PhysicalConstants {
    h: 6.626_070_15e-34,
    hbar: 6.626_070_15e-34 / TAU,
    c: 299_792_458.0,
    mu_b: TAU * 1.399_624_493_6e6,
    k_b: 1.380_649e-23,
};

/// Angular decay rate in rad/s. Always finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DecayRate(f64);

impl DecayRate {
    pub const ZERO: DecayRate = DecayRate(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::Domain(format!(
                "decay rate must be finite and >= 0, got {value}"
            )));
        }
        Ok(DecayRate(value))
    }

    /// From an ordinary frequency in Hz.
    pub fn from_hz(hz: f64) -> Result<Self> {
        Self::new(TAU * hz)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// Ordinary frequency in Hz.
    pub fn hz(self) -> f64 {
        self.0 / TAU
    }
}

impl TryFrom<f64> for DecayRate {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        DecayRate::new(v)
    }
}

impl From<DecayRate> for f64 {
    fn from(r: DecayRate) -> f64 {
        r.0
    }
}

/// Combines decay steps in series: `(Σ Γ_i⁻¹)⁻¹`.
pub fn parallel_combine(rates: &[DecayRate]) -> Result<DecayRate> {
    if rates.is_empty() {
        return Err(Error::Domain("parallel_combine of an empty list".into()));
    }
    let mut inv = 0.0;
    for r in rates {
        if r.0 <= 0.0 {
            return Err(Error::Domain(format!(
                "parallel_combine needs strictly positive rates, got {}",
                r.0
            )));
        }
        inv += 1.0 / r.0;
    }
    DecayRate::new(1.0 / inv)
}

/// Adds independent decay branches.
pub fn branch_sum(rates: &[DecayRate]) -> Result<DecayRate> {
    if rates.is_empty() {
        return Err(Error::Domain("branch_sum of an empty list".into()));
    }
    DecayRate::new(rates.iter().map(|r| r.0).sum())
}

/// Arithmetic over branch rates as stored in the constants file.
///
/// A bare number is a rate in Hz; `{"parallel": [...]}` and `{"sum": [...]}`
/// nest arbitrarily.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RateExpr {
    Hz(f64),
    Parallel { parallel: Vec<RateExpr> },
    Sum { sum: Vec<RateExpr> },
}

impl RateExpr {
    pub fn evaluate(&self) -> Result<DecayRate> {
        match self {
            RateExpr::Hz(hz) => DecayRate::from_hz(*hz),
            RateExpr::Parallel { parallel } => {
                let rates = parallel.iter().map(RateExpr::evaluate).collect::<Result<Vec<_>>>()?;
                parallel_combine(&rates)
            }
            RateExpr::Sum { sum } => {
                let rates = sum.iter().map(RateExpr::evaluate).collect::<Result<Vec<_>>>()?;
                branch_sum(&rates)
            }
        }
    }
}

/// On-disk layout of a constants file. Frequencies in Hz, wavelengths in m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsFile {
    pub gamma_12_hz: f64,
    pub gamma_34_hz: f64,
    pub gamma_56_hz: f64,
    pub gamma_36_hz: f64,
    pub gamma_15_hz: f64,
    pub gamma_23_hz: f64,
    pub gamma_25_hz: f64,
    pub gamma_45_hz: f64,
    pub lambda_12_m: f64,
    pub lambda_34_m: f64,
    pub lambda_56_m: f64,
    pub lambda_15_m: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub decay_chains: BTreeMap<String, RateExpr>,
}

const BUNDLED: &str = include_str!("../data/sr88.json");

impl ConstantsFile {
    pub fn bundled() -> Self {
        serde_json::from_str(BUNDLED).expect("bundled constants file is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    /// Replaces individual numeric entries by key.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        let mut value = serde_json::to_value(self).expect("constants serialize");
        let obj = value.as_object_mut().expect("object");
        for (key, v) in overrides {
            if key == "decay_chains" || !obj.contains_key(key) {
                return Err(Error::Config {
                    path: format!("constants_overrides.{key}"),
                    message: "unknown constant".into(),
                });
            }
            obj.insert(key.clone(), serde_json::json!(v));
        }
        serde_json::from_value(value).map_err(|e| Error::Config {
            path: "constants_overrides".into(),
            message: e.to_string(),
        })
    }
}

/// Level and decay data of ⁸⁸Sr for the six-level model.
///
/// Levels: |1⟩ 5s² ¹S₀, |2⟩ 5s5p ¹P₁, |3⟩ 5s5p ³P₂, |4⟩ 5s5d ³D₃,
/// |5⟩ 5s5p ³P₁, |6⟩ 5s6s ³S₁. `gamma_ij` is the decay |j⟩ → |i⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SrConstants {
    pub gamma_12: DecayRate,
    pub gamma_34: DecayRate,
    pub gamma_56: DecayRate,
    pub gamma_36: DecayRate,
    pub gamma_15: DecayRate,
    pub gamma_23: DecayRate,
    pub gamma_25: DecayRate,
    pub gamma_45: DecayRate,
    pub lambda_12: f64,
    pub lambda_34: f64,
    pub lambda_56: f64,
    pub lambda_15: f64,
    #[serde(default)]
    pub decay_chains: BTreeMap<String, RateExpr>,
}

impl Default for SrConstants {
    fn default() -> Self {
        Self::bundled()
    }
}

impl SrConstants {
    /// The constants shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_json_str(BUNDLED).expect("bundled constants file is valid")
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ConstantsFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        Self::from_file(file)
    }

    pub fn from_file(f: ConstantsFile) -> Result<Self> {
        let rate = |key: &str, hz: f64| {
            DecayRate::from_hz(hz).map_err(|e| Error::Config { path: key.into(), message: e.to_string() })
        };
        let length = |key: &str, m: f64| {
            if m.is_finite() && m > 0.0 {
                Ok(m)
            } else {
                Err(Error::Config { path: key.into(), message: format!("wavelength must be > 0, got {m}") })
            }
        };
        let c = SrConstants {
            gamma_12: rate("gamma_12_hz", f.gamma_12_hz)?,
            gamma_34: rate("gamma_34_hz", f.gamma_34_hz)?,
            gamma_56: rate("gamma_56_hz", f.gamma_56_hz)?,
            gamma_36: rate("gamma_36_hz", f.gamma_36_hz)?,
            gamma_15: rate("gamma_15_hz", f.gamma_15_hz)?,
            gamma_23: rate("gamma_23_hz", f.gamma_23_hz)?,
            gamma_25: rate("gamma_25_hz", f.gamma_25_hz)?,
            gamma_45: rate("gamma_45_hz", f.gamma_45_hz)?,
            lambda_12: length("lambda_12_m", f.lambda_12_m)?,
            lambda_34: length("lambda_34_m", f.lambda_34_m)?,
            lambda_56: length("lambda_56_m", f.lambda_56_m)?,
            lambda_15: length("lambda_15_m", f.lambda_15_m)?,
            decay_chains: f.decay_chains,
        };
        c.check_hierarchy()?;
        Ok(c)
    }

    pub fn to_file(&self) -> ConstantsFile {
        ConstantsFile {
            gamma_12_hz: self.gamma_12.hz(),
            gamma_34_hz: self.gamma_34.hz(),
            gamma_56_hz: self.gamma_56.hz(),
            gamma_36_hz: self.gamma_36.hz(),
            gamma_15_hz: self.gamma_15.hz(),
            gamma_23_hz: self.gamma_23.hz(),
            gamma_25_hz: self.gamma_25.hz(),
            gamma_45_hz: self.gamma_45.hz(),
            lambda_12_m: self.lambda_12,
            lambda_34_m: self.lambda_34,
            lambda_56_m: self.lambda_56,
            lambda_15_m: self.lambda_15,
            decay_chains: self.decay_chains.clone(),
        }
    }

    /// Replaces individual entries by constants-file key (`gamma_15_hz`, ...).
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        Self::from_file(self.to_file().with_overrides(overrides)?)
    }

    /// Guards against swapped or mistyped rates in a loaded file.
    fn check_hierarchy(&self) -> Result<()> {
        let g12 = self.gamma_12.value();
        let blue_leak = self.gamma_23.value().max(self.gamma_25.value());
        if blue_leak > 0.0 && g12 / blue_leak <= 1e4 {
            return Err(Error::Config {
                path: "gamma_12_hz".into(),
                message: format!("expected gamma_12 > 1e4 x gamma_23, gamma_25 (ratio {:.3e})", g12 / blue_leak),
            });
        }
        let g45 = self.gamma_45.value();
        if g45 > 0.0 && self.gamma_34.value() / g45 <= 1e2 {
            return Err(Error::Config {
                path: "gamma_34_hz".into(),
                message: format!("expected gamma_34 > 1e2 x gamma_45 (ratio {:.3e})", self.gamma_34.value() / g45),
            });
        }
        Ok(())
    }

    /// Evaluates the stored branch chains, keyed like `gamma_25`.
    pub fn combined_chains(&self) -> Result<BTreeMap<String, DecayRate>> {
        self.decay_chains
            .iter()
            .map(|(k, e)| Ok((k.clone(), e.evaluate()?)))
            .collect()
    }

    /// The rate the model uses for a chain key, if it names one.
    pub fn rate_by_key(&self, key: &str) -> Option<DecayRate> {
        Some(match key {
            "gamma_12" => self.gamma_12,
            "gamma_34" => self.gamma_34,
            "gamma_56" => self.gamma_56,
            "gamma_36" => self.gamma_36,
            "gamma_15" => self.gamma_15,
            "gamma_23" => self.gamma_23,
            "gamma_25" => self.gamma_25,
            "gamma_45" => self.gamma_45,
            _ => return None,
        })
    }
}

/// Saturation intensity for a unit Clebsch-Gordan coefficient, `2π²cħΓ/(3λ³)`, in W/m².
pub fn saturation_intensity(gamma: DecayRate, lambda: f64) -> Result<f64> {
    if gamma.value() <= 0.0 || !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!(
            "saturation intensity needs gamma > 0 and lambda > 0 (gamma = {}, lambda = {lambda})",
            gamma.value()
        )));
    }
    let pi = std::f64::consts::PI;
    Ok(2.0 * pi * pi * SI.c * SI.hbar * gamma.value() / (3.0 * lambda.powi(3)))
}

/// Peak intensity of a Gaussian beam, `2P/(πw₀²)`, in W/m².
pub fn beam_intensity(power: f64, waist: f64) -> Result<f64> {
    if !(waist > 0.0) || !waist.is_finite() {
        return Err(Error::Domain(format!("beam waist must be > 0, got {waist}")));
    }
    if !(power >= 0.0) || !power.is_finite() {
        return Err(Error::Domain(format!("beam power must be >= 0, got {power}")));
    }
    Ok(2.0 * power / (std::f64::consts::PI * waist * waist))
}

pub fn saturation_parameter(power: f64, waist: f64, gamma: DecayRate, lambda: f64) -> Result<f64> {
    Ok(beam_intensity(power, waist)? / saturation_intensity(gamma, lambda)?)
}

/// Rabi frequency from a saturation parameter, `Γ·sqrt(s/2)`, so that `s = 2Ω²/Γ²`.
pub fn rabi_from_saturation(s: f64, gamma: DecayRate) -> Result<f64> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("saturation parameter must be >= 0, got {s}")));
    }
    if gamma.value() <= 0.0 {
        return Err(Error::Domain("rabi_from_saturation needs gamma > 0".into()));
    }
    Ok(gamma.value() * (s / 2.0).sqrt())
}

pub fn saturation_from_rabi(omega: f64, gamma: DecayRate) -> f64 {
    2.0 * omega * omega / (gamma.value() * gamma.value())
}
