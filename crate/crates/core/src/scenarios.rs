//! Orchestration of the tabulated runs: steady states, sweeps, time traces,
//! fluorescence maps and trap potentials.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atomic::{saturation_intensity, DecayRate, MW_PER_CM2, SI, TAU};
use crate::config::{Laser, ModelChoice, Scenario, SweepAxis, SweepVar};
use crate::error::{Error, Result};
use crate::hybrid::{hybrid_evolve, hybrid_steady_state, SubsystemPopulations};
use crate::liouvillian::{build_liouvillian, evolve, fluorescence, steady_state, BlochState, Component};
use crate::mot::{
    depth_maximizing_gradient, fluorescence_map, mot_potential, optimal_detuning, optimal_detuning_slope_hz,
    optimal_gradient, trap_depth, MapModel,
};
use crate::table::{Failure, ResultTable};

/// Detector efficiencies: counts per emitted photon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub alpha_blue: f64,
    pub alpha_green: f64,
}

impl Calibration {
    pub fn validate(&self) -> Result<()> {
        for (name, a) in [("alpha_blue", self.alpha_blue), ("alpha_green", self.alpha_green)] {
            if !(a > 0.0) || !a.is_finite() {
                return Err(Error::Domain(format!("{name} must be > 0, got {a}")));
            }
        }
        Ok(())
    }

    /// `(blue, green)` detector count rates of a state.
    pub fn apply(&self, state: &BlochState, constants: &crate::atomic::SrConstants) -> Result<(f64, f64)> {
        fluorescence(state, self.alpha_blue, self.alpha_green, constants)
    }
}

/// `α = F/(Γ N ρ_e)`: the collection efficiency that maps `N` atoms with
/// excited fraction `ρ_e` on a transition of width `Γ` (rad/s) onto the
/// measured count rate `F`.
pub fn calibrate(atom_number: f64, excited_fraction: f64, gamma: f64, measured: f64) -> Result<f64> {
    for (name, v) in [("atom_number", atom_number), ("gamma", gamma), ("measured_fluorescence", measured)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    if !(excited_fraction > 0.0) || !excited_fraction.is_finite() {
        return Err(Error::Domain(format!("excited fraction must be > 0 to calibrate, got {excited_fraction}")));
    }
    let alpha = measured / (gamma * atom_number * excited_fraction);
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Domain(format!("calibration underflowed to {alpha}")));
    }
    Ok(alpha)
}

const POP_NAMES: [&str; 9] = ["N11", "N22", "N33", "N44", "N55", "N66", "N_blue", "N_grrd", "N_total"];

fn pop_values(s: &BlochState) -> [f64; 9] {
    let p = |c| s.reported_population(c);
    [
        p(Component::N11),
        p(Component::N22),
        p(Component::N33),
        p(Component::N44),
        p(Component::N55),
        p(Component::N66),
        s.n_blue(),
        s.n_grrd(),
        s.total(),
    ]
}

fn model_columns(prefix: &str, calibrated: bool) -> Vec<String> {
    let mut c: Vec<String> = POP_NAMES.iter().map(|n| format!("{prefix}_{n}[atoms]")).collect();
    if calibrated {
        c.push(format!("{prefix}_F_blue[counts/s]"));
        c.push(format!("{prefix}_F_green[counts/s]"));
    }
    c
}

fn push_state(row: &mut Vec<f64>, s: &BlochState, sc: &Scenario) -> Result<()> {
    row.extend(pop_values(s));
    if let Some(cal) = &sc.calibration {
        let (b, g) = cal.apply(s, &sc.constants)?;
        row.push(b);
        row.push(g);
    }
    Ok(())
}

fn models(sc: &Scenario) -> Vec<&'static str> {
    let mut m = Vec::new();
    if sc.model.full() {
        m.push("full");
    }
    if sc.model.hybrid() {
        m.push("hybrid");
    }
    m
}

fn steady_row(sc: &Scenario) -> Result<Vec<f64>> {
    let mut row = Vec::new();
    if sc.model.full() {
        let s = steady_state(&build_liouvillian(&sc.params)?)?;
        push_state(&mut row, &s, sc)?;
    }
    if sc.model.hybrid() {
        let h = hybrid_steady_state(&sc.params, sc.hybrid)?;
        push_state(&mut row, &h.state, sc)?;
    }
    Ok(row)
}

fn steady_table(name: &str, sc: &Scenario, axis: Option<&SweepAxis>) -> Result<ResultTable> {
    let mut columns = Vec::new();
    if let Some(a) = axis {
        columns.push(a.variable.header().to_string());
    }
    for m in models(sc) {
        columns.extend(model_columns(m, sc.calibration.is_some()));
    }
    let mut table = ResultTable::new(name, columns)?;
    let points: Vec<Option<f64>> = match axis {
        Some(a) => a.values.iter().map(|v| Some(*v)).collect(),
        None => vec![None],
    };
    let results: Vec<Result<Vec<f64>>> = points
        .par_iter()
        .map(|p| {
            let local;
            let s = match (p, axis) {
                (Some(v), Some(a)) => {
                    local = sc.with_value(a.variable, *v)?;
                    &local
                }
                _ => sc,
            };
            steady_row(s)
        })
        .collect();
    for (i, (p, r)) in points.iter().zip(results).enumerate() {
        let mut row: Vec<f64> = p.iter().copied().collect();
        match r.and_then(|vals| {
            row.extend(vals);
            table.push(row.clone())
        }) {
            Ok(()) => {}
            Err(e) => table.failures.push(Failure {
                index: i,
                at: match (p, axis) {
                    (Some(v), Some(a)) => vec![(a.variable.header().to_string(), *v)],
                    _ => Vec::new(),
                },
                message: e.to_string(),
            }),
        }
    }
    Ok(table)
}

/// Steady state of the configured point, or along one laser-parameter sweep.
pub fn run_steady(sc: &Scenario) -> Result<ResultTable> {
    match sc.sweeps.as_slice() {
        [] => steady_table("steady", sc, None),
        [a] if a.variable.laser().is_some() => steady_table("steady", sc, Some(a)),
        [a] => Err(Error::Config { path: "sweep[0].variable".into(), message: format!("{} cannot be swept in a steady-state run", a.variable.name()) }),
        _ => Err(Error::Config { path: "sweep".into(), message: "steady-state runs take at most one sweep axis".into() }),
    }
}

/// Hybrid and full steady states side by side along an s56 or Δ56 sweep.
pub fn run_balance_sweep(sc: &Scenario) -> Result<ResultTable> {
    match sc.sweeps.as_slice() {
        [a] if matches!(a.variable, SweepVar::S56 | SweepVar::Delta56Hz | SweepVar::Delta56Gamma) => steady_table("balance", sc, Some(a)),
        _ => Err(Error::Config {
            path: "sweep".into(),
            message: "balance needs exactly one sweep axis over s56, delta56_hz or delta56_gamma".into(),
        }),
    }
}

/// Populations from the full Bloch propagation and the hybrid rate equations
/// after loading `initial_n11` ground-state atoms at `t = 0`.
pub fn run_time_evolution(sc: &Scenario) -> Result<ResultTable> {
    let mut columns = vec!["t[s]".to_string()];
    for m in models(sc) {
        columns.extend(model_columns(m, sc.calibration.is_some()));
    }
    let mut table = ResultTable::new("evolve", columns)?;
    let full = if sc.model.full() {
        Some(evolve(&build_liouvillian(&sc.params)?, &BlochState::ground(sc.initial_n11), &sc.times)?.states)
    } else {
        None
    };
    let hybrid = if sc.model.hybrid() {
        let init = SubsystemPopulations { n_blue: sc.initial_n11, n_grrd: 0.0 };
        Some(hybrid_evolve(&sc.params, sc.hybrid, init, &sc.times)?.states)
    } else {
        None
    };
    for (i, &t) in sc.times.iter().enumerate() {
        let mut row = vec![t];
        for states in [&full, &hybrid].into_iter().flatten() {
            push_state(&mut row, &states[i], sc)?;
        }
        table.push(row)?;
    }
    Ok(table)
}

fn map_axes(sc: &Scenario) -> Result<(&SweepAxis, &SweepAxis)> {
    let d = sc.sweeps.iter().find(|a| matches!(a.variable, SweepVar::Delta34Hz | SweepVar::Delta34Gamma));
    let b = sc.sweeps.iter().find(|a| a.variable == SweepVar::BGrad);
    match (d, b) {
        (Some(d), Some(b)) if sc.sweeps.len() == 2 => Ok((d, b)),
        _ => Err(Error::Config {
            path: "sweep".into(),
            message: "map needs exactly two sweep axes: delta34_gamma (or delta34_hz) and b_grad_g_per_cm".into(),
        }),
    }
}

/// Fluorescence map over (Δ34, B′), Δ34 varying fastest.
///
/// `ridge` marks the Δ34 maximizing N44 in each gradient row;
/// `delta34_opt` is the optimal-detuning curve at that gradient in the units
/// of the Δ34 axis.
pub fn run_fluorescence_map(sc: &Scenario) -> Result<ResultTable> {
    let (daxis, baxis) = map_axes(sc)?;
    let g34 = sc.constants.gamma_34.value();
    let to_rad = |v: f64| if daxis.variable == SweepVar::Delta34Hz { TAU * v } else { v * g34 };
    let from_rad = |v: f64| if daxis.variable == SweepVar::Delta34Hz { v / TAU } else { v / g34 };
    let delta: Vec<f64> = daxis.values.iter().map(|v| to_rad(*v)).collect();
    let beams = sc.beams()?;
    let rates = sc.external(sc.green_config);
    let model = if sc.model == ModelChoice::Full { MapModel::Full } else { MapModel::Hybrid };
    let cells = fluorescence_map(&delta, &baxis.values, &sc.params, &beams, &rates, model, sc.hybrid)?;

    let unit_col = |name: &str| {
        let unit = if daxis.variable == SweepVar::Delta34Hz { "Hz" } else { "Gamma34" };
        format!("{name}[{unit}]")
    };
    let mut columns = vec![
        daxis.variable.header().to_string(),
        "b_grad[G/cm]".to_string(),
        "N22[atoms]".into(),
        "N44[atoms]".into(),
        "rho22[1]".into(),
        "rho44[1]".into(),
        "r_load[1/s]".into(),
        "gamma_grrd[1/s]".into(),
        "ridge[1]".into(),
        unit_col("delta34_opt"),
    ];
    if sc.overlay_delta34_gamma.is_some() {
        columns.push("delta34_overlay[Gamma34]".into());
    }
    let mut table = ResultTable::new("map", columns)?;

    let nd = delta.len();
    for (row_idx, chunk) in cells.chunks(nd).enumerate() {
        let b = baxis.values[row_idx];
        let ridge = chunk
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.values.as_ref().ok().map(|v| (i, v.n44)))
            .fold(None, |best: Option<(usize, f64)>, (i, v)| match best {
                Some((_, bv)) if bv >= v => best,
                _ => Some((i, v)),
            })
            .map(|(i, _)| i);
        let opt = optimal_detuning(&beams.green, b).map(from_rad);
        for (i, cell) in chunk.iter().enumerate() {
            let index = row_idx * nd + i;
            let at = vec![(daxis.variable.header().to_string(), daxis.values[i]), ("b_grad[G/cm]".to_string(), b)];
            let result = cell.values.clone().and_then(|v| {
                let mut row = vec![
                    daxis.values[i],
                    b,
                    v.n22,
                    v.n44,
                    v.rho22,
                    v.rho44,
                    v.r_load,
                    v.gamma_grrd,
                    if ridge == Some(i) { 1.0 } else { 0.0 },
                    opt.clone()?,
                ];
                if let Some(o) = sc.overlay_delta34_gamma {
                    row.push(cell.delta34 / g34 + o);
                }
                table.push(row)
            });
            if let Err(e) = result {
                table.failures.push(Failure { index, at, message: e.to_string() });
            }
        }
    }
    Ok(table)
}

/// Potential profiles at one gradient, depth against gradient, and the
/// optimal gradient and detuning for both beams. Energies are in kelvin.
pub fn run_potential_report(sc: &Scenario) -> Result<Vec<ResultTable>> {
    let beams = sc.beams()?;
    let pot = &sc.potential;
    let zmax = 1.25 * beams.blue.w.max(beams.green.w);
    let n = pot.z_count;
    let mut profile = ResultTable::new("profile", vec!["z[m]".into(), "V_blue[K]".into(), "V_green[K]".into()])?;
    for i in 0..n {
        let z = if i + 1 == n { zmax } else { -zmax + 2.0 * zmax * i as f64 / (n - 1) as f64 };
        profile.push(vec![
            z,
            mot_potential(z, &beams.blue, pot.b_grad)? / SI.k_b,
            mot_potential(z, &beams.green, pot.b_grad)? / SI.k_b,
        ])?;
    }

    let mut depth = ResultTable::new("depth", vec!["b_grad[G/cm]".into(), "depth_blue[K]".into(), "depth_green[K]".into()])?;
    let rows: Vec<Result<Vec<f64>>> = pot
        .depth_b_grad
        .par_iter()
        .map(|&b| Ok(vec![b, trap_depth(&beams.blue, b)? / SI.k_b, trap_depth(&beams.green, b)? / SI.k_b]))
        .collect();
    for r in rows {
        depth.push(r?)?;
    }

    let mut optimum = ResultTable::new(
        "optimum",
        vec![
            "b_grad[G/cm]".into(),
            "optimal_gradient_blue[G/cm]".into(),
            "optimal_gradient_green[G/cm]".into(),
            "deepest_gradient_blue[G/cm]".into(),
            "deepest_gradient_green[G/cm]".into(),
            "optimal_detuning_blue[Hz]".into(),
            "optimal_detuning_green[Hz]".into(),
            "optimal_detuning_slope_blue[Hz/(G/cm)]".into(),
            "optimal_detuning_slope_green[Hz/(G/cm)]".into(),
        ],
    )?;
    optimum.push(vec![
        pot.b_grad,
        optimal_gradient(&beams.blue)?,
        optimal_gradient(&beams.green)?,
        depth_maximizing_gradient(&beams.blue)?,
        depth_maximizing_gradient(&beams.green)?,
        optimal_detuning(&beams.blue, pot.b_grad)? / TAU,
        optimal_detuning(&beams.green, pot.b_grad)? / TAU,
        optimal_detuning_slope_hz(&beams.blue),
        optimal_detuning_slope_hz(&beams.green),
    ])?;
    Ok(vec![profile, depth, optimum])
}

/// Resolved atomic data: rates, wavelengths, saturation intensities and the
/// evaluated decay chains.
pub fn run_constants(sc: &Scenario) -> Result<ResultTable> {
    let c = &sc.constants;
    let rates: [(&str, DecayRate); 8] = [
        ("12", c.gamma_12),
        ("34", c.gamma_34),
        ("56", c.gamma_56),
        ("36", c.gamma_36),
        ("15", c.gamma_15),
        ("23", c.gamma_23),
        ("25", c.gamma_25),
        ("45", c.gamma_45),
    ];
    let mut columns = Vec::new();
    let mut row = Vec::new();
    for (k, g) in rates {
        columns.push(format!("gamma_{k}[Hz]"));
        row.push(g.hz());
    }
    for (k, g, l) in [("12", c.gamma_12, c.lambda_12), ("34", c.gamma_34, c.lambda_34), ("56", c.gamma_56, c.lambda_56), ("15", c.gamma_15, c.lambda_15)] {
        columns.push(format!("lambda_{k}[m]"));
        row.push(l);
        columns.push(format!("isat_{k}[mW/cm2]"));
        row.push(saturation_intensity(g, l)? / MW_PER_CM2);
    }
    for (k, g) in c.combined_chains()? {
        columns.push(format!("chain_{k}[Hz]"));
        row.push(g.hz());
    }
    let mut t = ResultTable::new("constants", columns)?;
    t.push(row)?;
    Ok(t)
}

/// One-row table of the collection efficiency for a measured count rate.
pub fn run_calibrate(atom_number: f64, excited_fraction: f64, laser: Laser, measured: f64, sc: &Scenario) -> Result<ResultTable> {
    let gamma = laser.gamma(&sc.constants).value();
    let alpha = calibrate(atom_number, excited_fraction, gamma, measured)?;
    let mut t = ResultTable::new(
        "calibrate",
        vec!["atom_number[atoms]".into(), "excited_fraction[1]".into(), "gamma[rad/s]".into(), "measured[counts/s]".into(), "alpha[counts/photon]".into()],
    )?;
    t.push(vec![atom_number, excited_fraction, gamma, measured, alpha])?;
    Ok(t)
}
