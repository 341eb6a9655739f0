//! One-dimensional MOT force, trapping potential and the heuristic
//! gradient-dependent loading and loss rates.
//!
//! Gradients cross the public interface in G/cm. Internally the Zeeman shift
//! of an atom at `z` is `μ·B'·z` in rad/s with `B'` in G/m.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::{DecayRate, SI, TAU};
use crate::error::{finite, Error, Result};
use crate::hybrid::{hybrid_steady_state, HybridOptions};
use crate::liouvillian::{build_liouvillian, steady_state, BlochState, Component, SystemParams};

/// G/m per G/cm.
pub const GAUSS_PER_M_PER_G_PER_CM: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotBeam {
    /// Linewidth Γ (rad/s).
    pub gamma: f64,
    /// Wavelength (m).
    pub lambda: f64,
    /// Wavenumber 2π/λ (1/m).
    pub k: f64,
    pub s: f64,
    /// Detuning (rad/s), negative to the red.
    pub delta: f64,
    /// Beam radius (m).
    pub w: f64,
    /// Differential magnetic moment (rad/s per G).
    pub mu: f64,
}

impl MotBeam {
    pub fn new(gamma: DecayRate, lambda: f64, s: f64, delta: f64, w: f64) -> Result<Self> {
        let b = MotBeam { gamma: gamma.value(), lambda, k: TAU / lambda, s, delta, w, mu: SI.mu_b };
        b.validate()?;
        Ok(b)
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("gamma", self.gamma), ("lambda", self.lambda), ("s", self.s), ("delta", self.delta), ("w", self.w), ("mu", self.mu)] {
            finite(name, v)?;
        }
        if !(self.gamma > 0.0 && self.lambda > 0.0 && self.w > 0.0) {
            return Err(Error::Domain("beam needs gamma, lambda and w > 0".into()));
        }
        if self.s < 0.0 {
            return Err(Error::Domain(format!("saturation parameter must be >= 0, got {}", self.s)));
        }
        Ok(())
    }

    /// Zeeman shift gradient `μB'` in rad/s per m.
    fn shift_per_m(&self, b_grad: f64) -> f64 {
        self.mu * b_grad * GAUSS_PER_M_PER_G_PER_CM
    }
}

/// `(F₊, F₋)` in newtons for an atom at `(v, z)`.
pub fn mot_force(v: f64, z: f64, beam: &MotBeam, b_grad: f64) -> Result<(f64, f64)> {
    finite("v", v)?;
    finite("z", z)?;
    finite("b_grad", b_grad)?;
    if z.abs() > beam.w {
        return Ok((0.0, 0.0));
    }
    let amp = SI.hbar * beam.k * beam.gamma / 2.0 * beam.s;
    let x = beam.shift_per_m(b_grad) * z;
    let kv = beam.k * v;
    let lor = |det: f64| {
        let d = 2.0 * det / beam.gamma;
        1.0 / (1.0 + beam.s + d * d)
    };
    Ok((amp * lor(beam.delta + kv - x), -amp * lor(beam.delta - kv + x)))
}

pub fn total_force(v: f64, z: f64, beam: &MotBeam, b_grad: f64) -> Result<f64> {
    let (p, m) = mot_force(v, z, beam, b_grad)?;
    Ok(p + m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialBranch {
    ClosedForm,
    /// `B' = 0`: the two beams cancel and the potential vanishes identically.
    ZeroGradient,
}

pub fn potential_branch(b_grad: f64) -> PotentialBranch {
    if b_grad == 0.0 {
        PotentialBranch::ZeroGradient
    } else {
        PotentialBranch::ClosedForm
    }
}

/// `arctan p − arctan q` without cancellation when `p ≈ q`.
fn atan_diff(p: f64, q: f64) -> f64 {
    (p - q).atan2(1.0 + p * q)
}

/// `V(z) = ∫_{−∞}^{z} F(0, z′) dz′` in joules, zero for `|z| ≥ w`.
pub fn mot_potential(z: f64, beam: &MotBeam, b_grad: f64) -> Result<f64> {
    finite("z", z)?;
    finite("b_grad", b_grad)?;
    beam.validate()?;
    if potential_branch(b_grad) == PotentialBranch::ZeroGradient || z.abs() >= beam.w {
        return Ok(0.0);
    }
    let a = beam.shift_per_m(b_grad);
    let root = (1.0 + beam.s).sqrt();
    let g = beam.gamma * root / 2.0;
    let aw = a * beam.w;
    let az = a * z;
    let sum = atan_diff((beam.delta + aw) / g, (beam.delta + az) / g) + atan_diff((beam.delta - aw) / g, (beam.delta - az) / g);
    Ok(SI.hbar * beam.k * beam.gamma * beam.gamma * beam.s / (4.0 * a * root) * sum)
}

/// Potential depth `V(0)` (J).
pub fn trap_depth(beam: &MotBeam, b_grad: f64) -> Result<f64> {
    if !(b_grad > 0.0) {
        return Err(Error::Domain(format!("trap depth needs a positive gradient, got {b_grad}")));
    }
    mot_potential(0.0, beam, b_grad)
}

/// Detuning of the deepest potential at gradient `b_grad` (rad/s).
pub fn optimal_detuning(beam: &MotBeam, b_grad: f64) -> Result<f64> {
    if !(b_grad >= 0.0) || !b_grad.is_finite() {
        return Err(Error::Domain(format!("gradient must be >= 0, got {b_grad}")));
    }
    let x = beam.w * beam.shift_per_m(b_grad);
    Ok(-(x * x / 3.0 + (1.0 + beam.s) * beam.gamma * beam.gamma / 12.0).sqrt())
}

/// Large-gradient slope of [`optimal_detuning`] in Hz per G/cm.
pub fn optimal_detuning_slope_hz(beam: &MotBeam) -> f64 {
    -beam.w * beam.mu * GAUSS_PER_M_PER_G_PER_CM / 3f64.sqrt() / TAU
}

/// `−√3 Δ/(μw)` in G/cm, without a sign check.
pub fn gradient_center(beam: &MotBeam) -> f64 {
    -(3f64).sqrt() * beam.delta / (beam.mu * beam.w) / GAUSS_PER_M_PER_G_PER_CM
}

/// Gradient (G/cm) maximizing [`trap_depth`] at the beam's own detuning,
/// by golden-section search in log B′.
///
/// [`optimal_gradient`] inverts the large-gradient optimal detuning instead;
/// the two differ by tens of percent at moderate saturation.
pub fn depth_maximizing_gradient(beam: &MotBeam) -> Result<f64> {
    if beam.delta > 0.0 {
        return Err(Error::Domain(format!("no trapping optimum for blue detuning {}", beam.delta)));
    }
    if beam.delta == 0.0 {
        return Ok(0.0);
    }
    let center = gradient_center(beam);
    let f = |lb: f64| trap_depth(beam, lb.exp());
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = ((center * 1e-3).ln(), (center * 1e2).ln());
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d)?;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Gradient (G/cm) at which a red-detuned beam traps best.
pub fn optimal_gradient(beam: &MotBeam) -> Result<f64> {
    if beam.delta > 0.0 {
        return Err(Error::Domain(format!("no trapping optimum for blue detuning {}", beam.delta)));
    }
    if beam.delta == 0.0 {
        return Ok(0.0);
    }
    Ok(gradient_center(beam))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GreenConfig {
    #[serde(rename = "grp")]
    Grp,
    #[serde(rename = "gmot")]
    Gmot,
}

impl std::str::FromStr for GreenConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "grp" => Ok(GreenConfig::Grp),
            "gmot" => Ok(GreenConfig::Gmot),
            _ => Err(Error::Domain(format!("green configuration must be grp or gmot, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for GreenConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GreenConfig::Grp => "grp",
            GreenConfig::Gmot => "gmot",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExternalRates {
    pub config: GreenConfig,
    /// Peak loading rate (atoms/s).
    pub r_load0: f64,
    /// Width of the loading Gaussian (G/cm).
    pub db_blue: f64,
    /// Loss floor (1/s).
    pub gamma_free: f64,
    /// Loss amplitude away from the green optimum (1/s).
    pub gamma_trap: f64,
    /// Width of the loss dip (G/cm).
    pub db_grrd: f64,
}

impl ExternalRates {
    pub fn defaults(config: GreenConfig) -> Self {
        let (gamma_free, gamma_trap) = match config {
            GreenConfig::Gmot => (1.0, 200.0),
            GreenConfig::Grp => (300.0, 1000.0),
        };
        ExternalRates { config, r_load0: 1e8, db_blue: 100.0, gamma_free, gamma_trap, db_grrd: 100.0 }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("r_load0", self.r_load0),
            ("gamma_free", self.gamma_free),
            ("gamma_trap", self.gamma_trap),
            ("db_blue", self.db_blue),
            ("db_grrd", self.db_grrd),
        ] {
            if !(v >= 0.0) {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.db_blue > 0.0 && self.db_grrd > 0.0) {
            return Err(Error::Domain("gradient widths must be > 0".into()));
        }
        Ok(())
    }
}

/// Gaussian loading profile centred on the blue optimal gradient (atoms/s).
pub fn loading_rate(b_grad: f64, beam_blue: &MotBeam, rates: &ExternalRates) -> Result<f64> {
    finite("b_grad", b_grad)?;
    let d = (b_grad - optimal_gradient(beam_blue)?) / rates.db_blue;
    Ok(rates.r_load0 * (-d * d).exp())
}

/// Green-red loss rate, lowest where `b_grad` matches the green optimum for `delta34` (1/s).
pub fn greenred_loss_rate(delta34: f64, b_grad: f64, beam_green: &MotBeam, rates: &ExternalRates) -> Result<f64> {
    finite("delta34", delta34)?;
    finite("b_grad", b_grad)?;
    let center = gradient_center(&beam_green.with_delta(delta34));
    let d = (b_grad - center) / rates.db_grrd;
    Ok(rates.gamma_free + rates.gamma_trap * (-(-d * d).exp_m1()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MotBeams {
    pub blue: MotBeam,
    pub green: MotBeam,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapModel {
    #[default]
    Hybrid,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapValues {
    pub r_load: f64,
    pub gamma_grrd: f64,
    pub n22: f64,
    pub n44: f64,
    pub rho22: f64,
    pub rho44: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapCell {
    /// Green detuning (rad/s).
    pub delta34: f64,
    /// Gradient (G/cm).
    pub b_grad: f64,
    pub values: std::result::Result<MapValues, Error>,
}

/// Evaluates one point of the fluorescence map.
pub fn map_point(delta34: f64, b_grad: f64, params: &SystemParams, beams: &MotBeams, rates: &ExternalRates, model: MapModel, opts: HybridOptions) -> Result<MapValues> {
    let r_load = loading_rate(b_grad, &beams.blue, rates)?;
    let gamma_grrd = greenred_loss_rate(delta34, b_grad, &beams.green, rates)?;
    let mut p = params.clone();
    p.green.delta = delta34;
    p.r_load = r_load;
    p.gamma_grrd = gamma_grrd;
    let (state, rho22, rho44): (BlochState, f64, f64) = match model {
        MapModel::Hybrid => {
            let h = hybrid_steady_state(&p, opts)?;
            (h.state, h.blue.rho22, h.greenred.rho44())
        }
        MapModel::Full => {
            let s = steady_state(&build_liouvillian(&p)?)?;
            let (nb, ng) = (s.n_blue(), s.n_grrd());
            let r22 = if nb > 0.0 { s.pop(Component::N22) / nb } else { 0.0 };
            let r44 = if ng > 0.0 { s.pop(Component::N44) / ng } else { 0.0 };
            (s, r22, r44)
        }
    };
    Ok(MapValues {
        r_load,
        gamma_grrd,
        n22: state.reported_population(Component::N22),
        n44: state.reported_population(Component::N44),
        rho22,
        rho44,
    })
}

/// Evaluates the map on the outer product of the axes, Δ34 varying fastest.
///
/// Cells are independent; the result order is the grid order regardless of
/// how the work is scheduled.
pub fn fluorescence_map(
    delta34: &[f64],
    b_grad: &[f64],
    params: &SystemParams,
    beams: &MotBeams,
    rates: &ExternalRates,
    model: MapModel,
    opts: HybridOptions,
) -> Result<Vec<MapCell>> {
    if delta34.is_empty() || b_grad.is_empty() {
        return Err(Error::Domain("fluorescence map needs non-empty axes".into()));
    }
    params.validate()?;
    rates.validate()?;
    let cells: Vec<(f64, f64)> = b_grad.iter().flat_map(|&b| delta34.iter().map(move |&d| (d, b))).collect();
    Ok(cells
        .par_iter()
        .map(|&(d, b)| MapCell { delta34: d, b_grad: b, values: map_point(d, b, params, beams, rates, model, opts) })
        .collect())
}
