//! Scenario configuration files.
//!
//! Every numeric key carries its unit in the name (`_hz`, `_m`, `_w`,
//! `_per_s`, `_g_per_cm`, `_gamma` for multiples of the transition linewidth).
//! Unknown keys are rejected with their path. A loaded file is resolved into a
//! [`Scenario`]; [`Scenario::file`] holds the same configuration with every
//! default written out and the constants inlined, which replays bit-exactly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atomic::{saturation_parameter, ConstantsFile, DecayRate, SrConstants, TAU};
use crate::error::{Error, Result};
use crate::hybrid::HybridOptions;
use crate::liouvillian::{DriveParams, SystemParams};
use crate::mot::{ExternalRates, GreenConfig, MotBeam, MotBeams};
use crate::scenarios::Calibration;

fn config_err(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub waist_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalRatesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_load0_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_blue_g_per_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_free_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_trap_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub db_grrd_g_per_cm: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalFile {
    #[serde(default)]
    pub grp: ExternalRatesFile,
    #[serde(default)]
    pub gmot: ExternalRatesFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVar {
    #[serde(rename = "s12")]
    S12,
    #[serde(rename = "s34")]
    S34,
    #[serde(rename = "s56")]
    S56,
    #[serde(rename = "delta12_hz")]
    Delta12Hz,
    #[serde(rename = "delta34_hz")]
    Delta34Hz,
    #[serde(rename = "delta56_hz")]
    Delta56Hz,
    #[serde(rename = "delta12_gamma")]
    Delta12Gamma,
    #[serde(rename = "delta34_gamma")]
    Delta34Gamma,
    #[serde(rename = "delta56_gamma")]
    Delta56Gamma,
    #[serde(rename = "b_grad_g_per_cm")]
    BGrad,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::S12 => "s12",
            SweepVar::S34 => "s34",
            SweepVar::S56 => "s56",
            SweepVar::Delta12Hz => "delta12_hz",
            SweepVar::Delta34Hz => "delta34_hz",
            SweepVar::Delta56Hz => "delta56_hz",
            SweepVar::Delta12Gamma => "delta12_gamma",
            SweepVar::Delta34Gamma => "delta34_gamma",
            SweepVar::Delta56Gamma => "delta56_gamma",
            SweepVar::BGrad => "b_grad_g_per_cm",
        }
    }

    /// Column header of the swept value.
    pub fn header(self) -> &'static str {
        match self {
            SweepVar::S12 => "s12[1]",
            SweepVar::S34 => "s34[1]",
            SweepVar::S56 => "s56[1]",
            SweepVar::Delta12Hz => "delta12[Hz]",
            SweepVar::Delta34Hz => "delta34[Hz]",
            SweepVar::Delta56Hz => "delta56[Hz]",
            SweepVar::Delta12Gamma => "delta12[Gamma12]",
            SweepVar::Delta34Gamma => "delta34[Gamma34]",
            SweepVar::Delta56Gamma => "delta56[Gamma56]",
            SweepVar::BGrad => "b_grad[G/cm]",
        }
    }

    fn default_scale(self) -> Scale {
        match self {
            SweepVar::S56 => Scale::Log,
            _ => Scale::Linear,
        }
    }

    /// Which transition a detuning or saturation variable belongs to.
    pub fn laser(self) -> Option<Laser> {
        match self {
            SweepVar::S12 | SweepVar::Delta12Hz | SweepVar::Delta12Gamma => Some(Laser::Blue),
            SweepVar::S34 | SweepVar::Delta34Hz | SweepVar::Delta34Gamma => Some(Laser::Green),
            SweepVar::S56 | SweepVar::Delta56Hz | SweepVar::Delta56Gamma => Some(Laser::Red),
            SweepVar::BGrad => None,
        }
    }

    pub fn is_detuning(self) -> bool {
        !matches!(self, SweepVar::S12 | SweepVar::S34 | SweepVar::S56 | SweepVar::BGrad)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub variable: SweepVar,
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisFile {
    pub start: f64,
    pub stop: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    /// Gradient of the `V(z)` profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_grad_g_per_cm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z_count: Option<usize>,
    /// Gradient axis of the depth table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_b_grad_g_per_cm: Option<AxisFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelChoice {
    Full,
    Hybrid,
    #[default]
    Both,
}

impl std::str::FromStr for ModelChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(ModelChoice::Full),
            "hybrid" => Ok(ModelChoice::Hybrid),
            "both" => Ok(ModelChoice::Both),
            _ => Err(Error::Domain(format!("model must be full, hybrid or both, got `{s}`"))),
        }
    }
}

impl ModelChoice {
    pub fn full(self) -> bool {
        matches!(self, ModelChoice::Full | ModelChoice::Both)
    }
    pub fn hybrid(self) -> bool {
        matches!(self, ModelChoice::Hybrid | ModelChoice::Both)
    }
}

/// The on-disk scenario. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub constants_overrides: BTreeMap<String, f64>,
    #[serde(default)]
    pub blue: LaserFile,
    #[serde(default)]
    pub green: LaserFile,
    #[serde(default)]
    pub red: LaserFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_blue_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_grrd_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_load_per_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub green_config: Option<GreenConfig>,
    #[serde(default)]
    pub external: ExternalFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hybrid: Option<HybridOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelChoice>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times_s: Option<AxisFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_n11: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    #[serde(default)]
    pub potential: PotentialFile,
    /// Offset added to the reported Δ34/Γ34 axis for overlays with measured data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlay_delta34_gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Laser {
    Blue,
    Green,
    Red,
}

impl Laser {
    pub fn key(self) -> &'static str {
        match self {
            Laser::Blue => "blue",
            Laser::Green => "green",
            Laser::Red => "red",
        }
    }

    pub fn gamma(self, c: &SrConstants) -> DecayRate {
        match self {
            Laser::Blue => c.gamma_12,
            Laser::Green => c.gamma_34,
            Laser::Red => c.gamma_56,
        }
    }

    pub fn lambda(self, c: &SrConstants) -> f64 {
        match self {
            Laser::Blue => c.lambda_12,
            Laser::Green => c.lambda_34,
            Laser::Red => c.lambda_56,
        }
    }

    /// `(s, Δ/Γ, waist)` of the balancing-measurement defaults.
    fn defaults(self) -> (f64, f64, f64) {
        match self {
            Laser::Blue => (1.3, -0.5, 6.0e-3),
            Laser::Green => (2.1, 0.0, 2.3e-3),
            Laser::Red => (25.0, 0.0, 1.8e-3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolvedLaser {
    pub s: f64,
    /// rad/s
    pub delta: f64,
    /// m
    pub waist: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub variable: SweepVar,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub b_grad: f64,
    pub z_count: usize,
    pub depth_b_grad: Vec<f64>,
}

pub const DEFAULT_AXIS_COUNT: usize = 101;
pub const DEFAULT_TIME_COUNT: usize = 201;

/// A fully resolved scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// Replayable form: all defaults explicit, constants inlined.
    pub file: ScenarioFile,
    pub constants: SrConstants,
    pub params: SystemParams,
    pub blue: ResolvedLaser,
    pub green: ResolvedLaser,
    pub red: ResolvedLaser,
    pub green_config: GreenConfig,
    pub external_grp: ExternalRates,
    pub external_gmot: ExternalRates,
    pub hybrid: HybridOptions,
    pub model: ModelChoice,
    pub sweeps: Vec<SweepAxis>,
    pub times: Vec<f64>,
    pub initial_n11: f64,
    pub calibration: Option<Calibration>,
    pub potential: PotentialSpec,
    pub overlay_delta34_gamma: Option<f64>,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file = parse_scenario(&text)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Scenario::resolve(file, base)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| config_err(e.path().to_string(), e.inner().to_string()))
}

fn axis_values(path: &str, start: f64, stop: f64, count: usize, scale: Scale) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() {
        return Err(config_err(path, "axis bounds must be finite"));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    if count < 2 {
        return Err(config_err(format!("{path}.count"), "count must be >= 1"));
    }
    if start == stop {
        return Err(config_err(path, "start and stop must differ"));
    }
    let n = (count - 1) as f64;
    match scale {
        Scale::Linear => Ok((0..count)
            .map(|i| if i + 1 == count { stop } else { start + (stop - start) * i as f64 / n })
            .collect()),
        Scale::Log => {
            if !(start > 0.0 && stop > 0.0) {
                return Err(config_err(format!("{path}.scale"), "log axis needs positive start and stop"));
            }
            let (a, b) = (start.ln(), stop.ln());
            Ok((0..count)
                .map(|i| match i {
                    0 => start,
                    _ if i + 1 == count => stop,
                    _ => (a + (b - a) * i as f64 / n).exp(),
                })
                .collect())
        }
    }
}

fn nonneg(path: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(config_err(path, format!("expected a finite value >= 0, got {v}")))
    }
}

fn resolve_laser(f: &mut LaserFile, laser: Laser, c: &SrConstants) -> Result<ResolvedLaser> {
    let key = laser.key();
    let (s0, d0, w0) = laser.defaults();
    let gamma = laser.gamma(c);
    let waist = f.waist_m.unwrap_or(w0);
    if !(waist > 0.0) || !waist.is_finite() {
        return Err(config_err(format!("{key}.waist_m"), format!("waist must be > 0 m, got {waist}")));
    }
    f.waist_m = Some(waist);
    let s = match (f.s, f.power_w) {
        (Some(_), Some(_)) => return Err(config_err(key, "give either `s` or `power_w`, not both")),
        (Some(s), None) => nonneg(&format!("{key}.s"), s)?,
        (None, Some(p)) => {
            nonneg(&format!("{key}.power_w"), p)?;
            saturation_parameter(p, waist, gamma, laser.lambda(c)).map_err(|e| config_err(format!("{key}.power_w"), e.to_string()))?
        }
        (None, None) => {
            f.s = Some(s0);
            s0
        }
    };
    let delta = match (f.detuning_hz, f.detuning_gamma) {
        (Some(_), Some(_)) => return Err(config_err(key, "give either `detuning_hz` or `detuning_gamma`, not both")),
        (Some(hz), None) => TAU * hz,
        (None, Some(g)) => g * gamma.value(),
        (None, None) => {
            f.detuning_gamma = Some(d0);
            d0 * gamma.value()
        }
    };
    if !delta.is_finite() {
        return Err(config_err(format!("{key}.detuning"), "detuning must be finite"));
    }
    Ok(ResolvedLaser { s, delta, waist })
}

fn resolve_external(f: &mut ExternalRatesFile, config: GreenConfig) -> Result<ExternalRates> {
    let d = ExternalRates::defaults(config);
    let key = format!("external.{config}");
    let get = |slot: &mut Option<f64>, name: &str, default: f64| -> Result<f64> {
        let v = nonneg(&format!("{key}.{name}"), slot.unwrap_or(default))?;
        *slot = Some(v);
        Ok(v)
    };
    let r = ExternalRates {
        config,
        r_load0: get(&mut f.r_load0_per_s, "r_load0_per_s", d.r_load0)?,
        db_blue: get(&mut f.db_blue_g_per_cm, "db_blue_g_per_cm", d.db_blue)?,
        gamma_free: get(&mut f.gamma_free_per_s, "gamma_free_per_s", d.gamma_free)?,
        gamma_trap: get(&mut f.gamma_trap_per_s, "gamma_trap_per_s", d.gamma_trap)?,
        db_grrd: get(&mut f.db_grrd_g_per_cm, "db_grrd_g_per_cm", d.db_grrd)?,
    };
    r.validate().map_err(|e| config_err(key, e.to_string()))?;
    Ok(r)
}

impl Scenario {
    /// Resolves a parsed file. Relative constants paths are taken from `base`.
    pub fn resolve(mut f: ScenarioFile, base: &Path) -> Result<Scenario> {
        let mut cfile = match (&f.constants, &f.constants_file) {
            (Some(_), Some(_)) => return Err(config_err("constants", "give either `constants` or `constants_file`, not both")),
            (Some(c), None) => c.clone(),
            (None, Some(p)) => {
                let p = if p.is_absolute() { p.clone() } else { base.join(p) };
                ConstantsFile::from_path(&p).map_err(|e| match e {
                    Error::Config { path, message } => config_err(format!("constants_file:{path}"), message),
                    other => other,
                })?
            }
            (None, None) => ConstantsFile::bundled(),
        };
        cfile = cfile.with_overrides(&f.constants_overrides)?;
        let constants = SrConstants::from_file(cfile.clone()).map_err(|e| match e {
            Error::Config { path, message } => config_err(format!("constants.{path}"), message),
            other => other,
        })?;
        f.constants = Some(cfile);
        f.constants_file = None;
        f.constants_overrides.clear();

        let blue = resolve_laser(&mut f.blue, Laser::Blue, &constants)?;
        let green = resolve_laser(&mut f.green, Laser::Green, &constants)?;
        let red = resolve_laser(&mut f.red, Laser::Red, &constants)?;

        let gamma_blue = nonneg("gamma_blue_per_s", *f.gamma_blue_per_s.get_or_insert(190.0))?;
        let gamma_grrd = nonneg("gamma_grrd_per_s", *f.gamma_grrd_per_s.get_or_insert(2500.0))?;
        let r_load = nonneg("r_load_per_s", *f.r_load_per_s.get_or_insert(1e8))?;

        let params = SystemParams {
            constants: constants.clone(),
            blue: DriveParams::from_saturation(blue.s, blue.delta, constants.gamma_12)?,
            green: DriveParams::from_saturation(green.s, green.delta, constants.gamma_34)?,
            red: DriveParams::from_saturation(red.s, red.delta, constants.gamma_56)?,
            gamma_blue,
            gamma_grrd,
            r_load,
        };

        let green_config = *f.green_config.get_or_insert(GreenConfig::Gmot);
        let external_grp = resolve_external(&mut f.external.grp, GreenConfig::Grp)?;
        let external_gmot = resolve_external(&mut f.external.gmot, GreenConfig::Gmot)?;
        let hybrid = *f.hybrid.get_or_insert_with(HybridOptions::default);
        let model = *f.model.get_or_insert_with(ModelChoice::default);

        let mut sweeps = Vec::new();
        for (i, s) in f.sweep.iter_mut().enumerate() {
            let path = format!("sweep[{i}]");
            let count = *s.count.get_or_insert(DEFAULT_AXIS_COUNT);
            let scale = *s.scale.get_or_insert(s.variable.default_scale());
            let values = axis_values(&path, s.start, s.stop, count, scale)?;
            if matches!(s.variable, SweepVar::S12 | SweepVar::S34 | SweepVar::S56 | SweepVar::BGrad) && values.iter().any(|v| *v < 0.0) {
                return Err(config_err(path, format!("{} must be >= 0", s.variable.name())));
            }
            if sweeps.iter().any(|a: &SweepAxis| a.variable == s.variable) {
                return Err(config_err(path, format!("{} swept twice", s.variable.name())));
            }
            sweeps.push(SweepAxis { variable: s.variable, values });
        }

        let t = f.times_s.get_or_insert(AxisFile { start: 1e-9, stop: 10.0, count: None, scale: None });
        let tc = *t.count.get_or_insert(DEFAULT_TIME_COUNT);
        let ts = *t.scale.get_or_insert(Scale::Log);
        let times = axis_values("times_s", t.start, t.stop, tc, ts)?;
        if times.iter().any(|x| *x < 0.0) {
            return Err(config_err("times_s", "times must be >= 0"));
        }
        if times.windows(2).any(|w| w[1] < w[0]) {
            return Err(config_err("times_s", "times must increase"));
        }

        let initial_n11 = nonneg("initial_n11", *f.initial_n11.get_or_insert(1e6))?;
        if let Some(c) = &f.calibration {
            c.validate().map_err(|e| config_err("calibration", e.to_string()))?;
        }

        let pf = &mut f.potential;
        let pb = *pf.b_grad_g_per_cm.get_or_insert(50.0);
        if !(pb > 0.0) || !pb.is_finite() {
            return Err(config_err("potential.b_grad_g_per_cm", "gradient must be > 0"));
        }
        let zc = *pf.z_count.get_or_insert(201);
        if zc < 2 {
            return Err(config_err("potential.z_count", "need at least 2 points"));
        }
        let da = pf.depth_b_grad_g_per_cm.get_or_insert(AxisFile { start: 1.0, stop: 600.0, count: None, scale: None });
        let dc = *da.count.get_or_insert(DEFAULT_AXIS_COUNT);
        let ds = *da.scale.get_or_insert(Scale::Linear);
        let depth_b_grad = axis_values("potential.depth_b_grad_g_per_cm", da.start, da.stop, dc, ds)?;
        if depth_b_grad.iter().any(|b| !(*b > 0.0)) {
            return Err(config_err("potential.depth_b_grad_g_per_cm", "gradients must be > 0"));
        }
        let potential = PotentialSpec { b_grad: pb, z_count: zc, depth_b_grad };

        if let Some(o) = f.overlay_delta34_gamma {
            if !o.is_finite() {
                return Err(config_err("overlay_delta34_gamma", "must be finite"));
            }
        }

        Ok(Scenario {
            calibration: f.calibration,
            overlay_delta34_gamma: f.overlay_delta34_gamma,
            file: f,
            constants,
            params,
            blue,
            green,
            red,
            green_config,
            external_grp,
            external_gmot,
            hybrid,
            model,
            sweeps,
            times,
            initial_n11,
            potential,
        })
    }

    /// Defaults only.
    pub fn default_scenario() -> Scenario {
        Scenario::resolve(ScenarioFile::default(), Path::new(".")).expect("defaults resolve")
    }

    pub fn external(&self, config: GreenConfig) -> ExternalRates {
        match config {
            GreenConfig::Grp => self.external_grp,
            GreenConfig::Gmot => self.external_gmot,
        }
    }

    pub fn beams(&self) -> Result<MotBeams> {
        let c = &self.constants;
        Ok(MotBeams {
            blue: MotBeam::new(c.gamma_12, c.lambda_12, self.blue.s, self.blue.delta, self.blue.waist)?,
            green: MotBeam::new(c.gamma_34, c.lambda_34, self.green.s, self.green.delta, self.green.waist)?,
        })
    }

    pub fn laser(&self, l: Laser) -> ResolvedLaser {
        match l {
            Laser::Blue => self.blue,
            Laser::Green => self.green,
            Laser::Red => self.red,
        }
    }

    /// Copy with one swept variable set. Gradients are not part of the
    /// scenario state and are rejected here.
    pub fn with_value(&self, var: SweepVar, value: f64) -> Result<Scenario> {
        let laser = var.laser().ok_or_else(|| Error::Domain(format!("{} is not a laser parameter", var.name())))?;
        let mut out = self.clone();
        let gamma = laser.gamma(&self.constants);
        let slot = match laser {
            Laser::Blue => &mut out.blue,
            Laser::Green => &mut out.green,
            Laser::Red => &mut out.red,
        };
        match var {
            SweepVar::S12 | SweepVar::S34 | SweepVar::S56 => slot.s = value,
            SweepVar::Delta12Hz | SweepVar::Delta34Hz | SweepVar::Delta56Hz => slot.delta = TAU * value,
            _ => slot.delta = value * gamma.value(),
        }
        let drive = DriveParams::from_saturation(slot.s, slot.delta, gamma)?;
        match laser {
            Laser::Blue => out.params.blue = drive,
            Laser::Green => out.params.green = drive,
            Laser::Red => out.params.red = drive,
        }
        Ok(out)
    }

    /// Replayable JSON of the resolved configuration.
    pub fn resolved_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.file).expect("scenario serializes")
    }
}
