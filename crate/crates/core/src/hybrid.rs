//! Hybrid Bloch-rate model: the blue subsystem in its analytic two-level
//! steady state, the green-red subsystem as a reduced 8×8 Bloch system, and
//! the exchange of atoms between the two as 2×2 rate equations.

use serde::Serialize;

use crate::atomic::SrConstants;
use crate::error::{finite, Error, Result};
use crate::linalg::{condition_number, solve, CMat, CVec, Propagator, C64, ONE, ZERO};
use crate::liouvillian::{BlochState, Component, DriveParams, SystemParams};

/// Normalized `ρ22(∞)` of a driven two-level system.
pub fn blue_excited_fraction(s12: f64, delta12: f64, gamma12: f64) -> f64 {
    if s12 <= 0.0 {
        return 0.0;
    }
    if s12.is_infinite() {
        return 0.5;
    }
    let x = 2.0 * delta12 / gamma12;
    0.5 / (1.0 + (1.0 + x * x) / s12)
}

/// Normalized blue block `(ρ11, ρ22, ρ12, ρ21)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlueFractions {
    pub rho11: f64,
    pub rho22: f64,
    #[serde(skip)]
    pub rho12: C64,
    #[serde(skip)]
    pub rho21: C64,
}

impl BlueFractions {
    /// Closed two-level steady state under `drive`, coherences included.
    pub fn steady(drive: &DriveParams, constants: &SrConstants) -> Self {
        let g = constants.gamma_12;
        let rho22 = blue_excited_fraction(drive.saturation(g), drive.delta, g.value());
        let rho11 = 1.0 - rho22;
        let lam = C64::new(g.value() / 2.0, drive.delta);
        let rho12 = C64::new(0.0, drive.omega / 2.0) * (rho11 - rho22) / lam;
        BlueFractions { rho11, rho22, rho12, rho21: rho12.conj() }
    }
}

pub const REDUCED_DIM: usize = 8;

/// Components of the reduced state, in matrix order.
pub const REDUCED_ORDER: [Component; REDUCED_DIM] = [
    Component::N55,
    Component::N66,
    Component::N56,
    Component::N65,
    Component::N33,
    Component::N44,
    Component::N34,
    Component::N43,
];

/// The 8×8 green-red generator, printed order `ρ55 ρ66 ρ56 ρ65 ρ33 ρ44 ρ34 ρ43`.
pub fn build_reduced_liouvillian(p: &SystemParams) -> Result<CMat> {
    p.validate()?;
    let c = &p.constants;
    let (g34, g56, g36, g15, g45) =
        (c.gamma_34.value(), c.gamma_56.value(), c.gamma_36.value(), c.gamma_15.value(), c.gamma_45.value());
    let l56 = C64::new((g56 + g36 + g15) / 2.0, p.red.delta);
    let l34 = C64::new((g34 + g45) / 2.0, p.green.delta);
    let mut m = CMat::zeros(REDUCED_DIM, REDUCED_DIM);
    for (off, omega, lam) in [(0, p.red.omega, l56), (4, p.green.omega, l34)] {
        let w = C64::new(0.0, omega / 2.0);
        let (g, e, ge, eg) = (off, off + 1, off + 2, off + 3);
        m[(g, ge)] = w;
        m[(g, eg)] = -w;
        m[(e, ge)] = -w;
        m[(e, eg)] = w;
        m[(ge, g)] = w;
        m[(ge, e)] = -w;
        m[(ge, ge)] = -lam;
        m[(eg, g)] = -w;
        m[(eg, e)] = w;
        m[(eg, eg)] = -lam.conj();
    }
    let r = C64::from;
    m[(0, 0)] = r(-g15);
    m[(0, 1)] = r(g56);
    m[(0, 5)] = r(g45);
    m[(1, 1)] = r(-g56 - g36);
    m[(4, 1)] = r(g36);
    m[(4, 5)] = r(g34);
    m[(5, 5)] = r(-g34 - g45);
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenRedBranch {
    /// ρ33 row replaced by the trace constraint; unique solution.
    Constrained,
    /// Constrained system degenerate; long-time limit of a start in |3⟩.
    DarkProjection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub components: [C64; REDUCED_DIM],
    pub branch: GreenRedBranch,
}

impl ReducedState {
    pub fn get(&self, c: Component) -> C64 {
        let k = REDUCED_ORDER.iter().position(|&x| x == c).expect("component of the green-red block");
        self.components[k]
    }

    pub fn rho33(&self) -> f64 {
        self.components[4].re
    }
    pub fn rho44(&self) -> f64 {
        self.components[5].re
    }
    pub fn rho55(&self) -> f64 {
        self.components[0].re
    }
    pub fn rho66(&self) -> f64 {
        self.components[1].re
    }

    pub fn trace(&self) -> f64 {
        self.rho33() + self.rho44() + self.rho55() + self.rho66()
    }
}

const TRACE_ROW: usize = 4;
const DEGENERATE_CONDITION: f64 = 1e12;

/// Quasi-steady state of the green-red block normalized to unit trace.
///
/// The ρ33 balance row is replaced by `ρ33 + ρ44 + ρ55 + ρ66 = 1`, so the
/// slow Γ15 leak out of |5⟩ is not allowed to drain the block. If that system
/// is degenerate (several stationary directions), the state reached from |3⟩
/// is returned and flagged; if even that is undefined, an error is returned.
pub fn greenred_steady_state(m: &CMat) -> Result<ReducedState> {
    assert_eq!(m.shape(), (REDUCED_DIM, REDUCED_DIM));
    let mut a = m.clone();
    for j in 0..REDUCED_DIM {
        a[(TRACE_ROW, j)] = if matches!(j, 0 | 1 | 4 | 5) { ONE } else { ZERO };
    }
    let mut rhs = CVec::zeros(REDUCED_DIM);
    rhs[TRACE_ROW] = ONE;
    let mscale = m.norm().max(f64::MIN_POSITIVE);

    let cond = condition_number(&a);
    if cond < DEGENERATE_CONDITION {
        if let Some(x) = solve(&a, &rhs) {
            let mut res = m * &x;
            res[TRACE_ROW] = ZERO;
            let residual = res.norm() / mscale;
            if residual > 1e-9 {
                return Err(Error::Residual { residual, tolerance: 1e-9 });
            }
            return Ok(pack(&x, GreenRedBranch::Constrained));
        }
    }
    dark_projection(m, cond)
}

fn dark_projection(m: &CMat, cond: f64) -> Result<ReducedState> {
    let prop = Propagator::new(m);
    let mut start = CVec::zeros(REDUCED_DIM);
    start[TRACE_ROW] = ONE;
    let tol = 1e-9 * m.norm().max(f64::MIN_POSITIVE);
    let degenerate = || Error::Singular {
        condition: cond,
        reason: "green-red block has no unique quasi-steady state".into(),
    };
    let x = prop.null_projection(&start, tol).ok_or_else(degenerate)?;
    let tr = (x[0] + x[1] + x[4] + x[5]).re;
    if !(tr > 1e-6) {
        return Err(degenerate());
    }
    Ok(pack(&(x / C64::from(tr)), GreenRedBranch::DarkProjection))
}

fn pack(x: &CVec, branch: GreenRedBranch) -> ReducedState {
    let mut components = [ZERO; REDUCED_DIM];
    components.copy_from_slice(x.as_slice());
    ReducedState { components, branch }
}

/// Inter-subsystem transfer rates (1/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpRates {
    pub r_23: f64,
    pub r_25: f64,
    pub r_15: f64,
}

pub fn pump_rates(rho22: f64, rho55: f64, constants: &SrConstants) -> PumpRates {
    PumpRates {
        r_23: constants.gamma_23.value() * rho22,
        r_25: constants.gamma_25.value() * rho22,
        r_15: constants.gamma_15.value() * rho55,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsystemPopulations {
    pub n_blue: f64,
    pub n_grrd: f64,
}

impl SubsystemPopulations {
    pub fn total(&self) -> f64 {
        self.n_blue + self.n_grrd
    }
}

/// Where the R25 (|2⟩ → |5⟩) transfer lands in the rate matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Routing {
    /// R25 leaves the blue subsystem and enters the green-red one.
    #[default]
    Conserving,
    /// R25 leaves the blue subsystem and is lost: `A21 = R23`.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RateBranch {
    Distinct,
    /// Repeated eigenvalue of A; closed-form Jordan solution.
    Repeated,
}

/// The 2×2 rate equations `Ṅ = AN + a` with `a = (R_load, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateModel {
    pub rates: PumpRates,
    pub gamma_blue: f64,
    pub gamma_grrd: f64,
    pub r_load: f64,
    pub routing: Routing,
}

impl RateModel {
    pub fn new(rates: PumpRates, gamma_blue: f64, gamma_grrd: f64, r_load: f64) -> Self {
        RateModel { rates, gamma_blue, gamma_grrd, r_load, routing: Routing::default() }
    }

    pub fn with_routing(mut self, routing: Routing) -> Self {
        self.routing = routing;
        self
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        let PumpRates { r_23, r_25, r_15 } = self.rates;
        let feed = match self.routing {
            Routing::Conserving => r_23 + r_25,
            Routing::AsPrinted => r_23,
        };
        [[-self.gamma_blue - r_23 - r_25, r_15], [feed, -self.gamma_grrd - r_15]]
    }

    fn validate(&self) -> Result<()> {
        let PumpRates { r_23, r_25, r_15 } = self.rates;
        for (name, v) in [
            ("r_23", r_23),
            ("r_25", r_25),
            ("r_15", r_15),
            ("gamma_blue", self.gamma_blue),
            ("gamma_grrd", self.gamma_grrd),
            ("r_load", self.r_load),
        ] {
            finite(name, v)?;
            if v < 0.0 {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn determinant(&self) -> f64 {
        let PumpRates { r_23, r_25, r_15 } = self.rates;
        let (gb, gg) = (self.gamma_blue, self.gamma_grrd);
        // expanded so that no cancellation occurs
        match self.routing {
            Routing::Conserving => gb * (gg + r_15) + gg * (r_23 + r_25),
            Routing::AsPrinted => gb * (gg + r_15) + gg * (r_23 + r_25) + r_25 * r_15,
        }
    }

    pub fn steady_state(&self) -> Result<SubsystemPopulations> {
        self.validate()?;
        let det = self.determinant();
        if !(det > 0.0) {
            return Err(Error::SingularBalance(format!(
                "rate matrix determinant is {det}; at least one loss rate must be positive"
            )));
        }
        let feed = self.matrix()[1][0];
        Ok(SubsystemPopulations {
            n_blue: self.r_load * (self.gamma_grrd + self.rates.r_15) / det,
            n_grrd: self.r_load * feed / det,
        })
    }

    /// Exact solution `e^{At}(N0 − N∞) + N∞` at each time.
    pub fn evolve(&self, initial: SubsystemPopulations, times: &[f64]) -> Result<(Vec<SubsystemPopulations>, RateBranch)> {
        let ss = self.steady_state()?;
        let a = self.matrix();
        let s = (a[0][0] + a[1][1]) / 2.0;
        let d = (a[0][0] - a[1][1]) / 2.0;
        // discriminant of λ² − 2sλ + det, written without cancellation
        let q2 = d * d + a[0][1] * a[1][0];
        let q = C64::from(q2).sqrt();
        let branch = if q.norm() <= 1e-12 * s.abs().max(f64::MIN_POSITIVE) {
            RateBranch::Repeated
        } else {
            RateBranch::Distinct
        };
        let x0 = [initial.n_blue - ss.n_blue, initial.n_grrd - ss.n_grrd];
        let mut out = Vec::with_capacity(times.len());
        let mut prev = 0.0;
        for &t in times {
            if !t.is_finite() || t < prev {
                return Err(Error::Domain(format!("times must be finite, >= 0 and sorted; got {t}")));
            }
            prev = t;
            let (c, k) = exp_coefficients(s, q, t);
            // e^{At} = c·I + k·(A − sI)
            let m00 = c + k * (a[0][0] - s);
            let m11 = c + k * (a[1][1] - s);
            let m01 = k * a[0][1];
            let m10 = k * a[1][0];
            out.push(SubsystemPopulations {
                n_blue: m00 * x0[0] + m01 * x0[1] + ss.n_blue,
                n_grrd: m10 * x0[0] + m11 * x0[1] + ss.n_grrd,
            });
        }
        Ok((out, branch))
    }
}

/// `(e^{st}cosh(qt), e^{st}sinh(qt)/q)`, real for real 2×2 generators.
fn exp_coefficients(s: f64, q: C64, t: f64) -> (f64, f64) {
    let qt = q * t;
    if qt.norm() < 0.5 {
        let est = (s * t).exp();
        let z2 = qt * qt;
        // Taylor series of cosh(x) and sinh(x)/x in x²
        let mut ch = ONE;
        let mut sh = ONE;
        let mut term_c = ONE;
        let mut term_s = ONE;
        for k in 1..12 {
            let kf = k as f64;
            term_c = term_c * z2 / ((2.0 * kf - 1.0) * (2.0 * kf));
            term_s = term_s * z2 / ((2.0 * kf) * (2.0 * kf + 1.0));
            ch += term_c;
            sh += term_s;
        }
        (est * ch.re, est * t * sh.re)
    } else {
        let e1 = ((C64::from(s) + q) * t).exp();
        let e2 = ((C64::from(s) - q) * t).exp();
        (((e1 + e2) / 2.0).re, ((e1 - e2) / (q * 2.0)).re)
    }
}

pub fn subsystem_steady_state(rates: PumpRates, gamma_blue: f64, gamma_grrd: f64, r_load: f64) -> Result<SubsystemPopulations> {
    RateModel::new(rates, gamma_blue, gamma_grrd, r_load).steady_state()
}

/// Scales the separately normalized blocks by their subsystem atom numbers.
pub fn assemble_populations(pops: SubsystemPopulations, blue: &BlueFractions, greenred: &ReducedState) -> Result<BlochState> {
    let blue_sum = blue.rho11 + blue.rho22;
    if (blue_sum - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization { block: "blue", sum: blue_sum });
    }
    let gr_sum = greenred.trace();
    if (gr_sum - 1.0).abs() > 1e-6 {
        return Err(Error::Normalization { block: "green-red", sum: gr_sum });
    }
    let mut s = BlochState::zeros();
    s.set(Component::N11, C64::from(pops.n_blue * blue.rho11));
    s.set(Component::N22, C64::from(pops.n_blue * blue.rho22));
    s.set(Component::N12, blue.rho12 * pops.n_blue);
    s.set(Component::N21, blue.rho21 * pops.n_blue);
    for (k, c) in REDUCED_ORDER.iter().enumerate() {
        s.set(*c, greenred.components[k] * pops.n_grrd);
    }
    Ok(s)
}

/// `N_gr:rd/N_blue ≈ Γ23 ρ22 / (Γ_gr:rd + Γ15 ρ55)`.
///
/// This drops the R25 terms of the full rate balance.
pub fn balance_ratio(rho22: f64, rho55: f64, constants: &SrConstants, gamma_grrd: f64) -> Result<f64> {
    let den = gamma_grrd + constants.gamma_15.value() * rho55;
    if !(den > 0.0) {
        return Err(Error::SingularBalance(format!("balance denominator is {den}")));
    }
    Ok(constants.gamma_23.value() * rho22 / den)
}

/// Upper bound of [`balance_ratio`] over `ρ22 ≤ 1/2`.
pub fn balance_bound(constants: &SrConstants, gamma_grrd: f64, rho55: f64) -> Result<f64> {
    let g23 = constants.gamma_23.value();
    let den = 2.0 * gamma_grrd / g23 + 2.0 * constants.gamma_15.value() / g23 * rho55;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::SingularBalance(format!("bound denominator is {den}")));
    }
    Ok(1.0 / den)
}

/// How the subsystem losses enter the rate matrix when composing the hybrid
/// model from a full parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossPlacement {
    /// Γ_blue and Γ_gr:rd act on the whole subsystem populations.
    Subsystem,
    /// Γ_blue acts on ρ11 only and Γ_gr:rd on ρ33 + ρ55 only, as in the 12×12 generator.
    #[default]
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, serde::Deserialize)]
pub struct HybridOptions {
    #[serde(default)]
    pub routing: Routing,
    #[serde(default)]
    pub losses: LossPlacement,
}

#[derive(Debug, Clone)]
pub struct HybridSolution {
    pub blue: BlueFractions,
    pub greenred: ReducedState,
    pub rates: RateModel,
    pub populations: SubsystemPopulations,
    pub state: BlochState,
}

/// Blue fractions, green-red quasi-steady state and the resulting rate model.
pub fn hybrid_parts(p: &SystemParams, opts: HybridOptions) -> Result<(BlueFractions, ReducedState, RateModel)> {
    p.validate()?;
    let blue = BlueFractions::steady(&p.blue, &p.constants);
    let gr = greenred_steady_state(&build_reduced_liouvillian(p)?)?;
    let rates = pump_rates(blue.rho22, gr.rho55(), &p.constants);
    let (gb, gg) = match opts.losses {
        LossPlacement::Subsystem => (p.gamma_blue, p.gamma_grrd),
        LossPlacement::Level => (p.gamma_blue * blue.rho11, p.gamma_grrd * (gr.rho33() + gr.rho55())),
    };
    let model = RateModel::new(rates, gb, gg, p.r_load).with_routing(opts.routing);
    Ok((blue, gr, model))
}

pub fn hybrid_steady_state(p: &SystemParams, opts: HybridOptions) -> Result<HybridSolution> {
    let (blue, greenred, rates) = hybrid_parts(p, opts)?;
    let populations = rates.steady_state()?;
    let state = assemble_populations(populations, &blue, &greenred)?;
    Ok(HybridSolution { blue, greenred, rates, populations, state })
}

#[derive(Debug, Clone)]
pub struct HybridEvolution {
    pub populations: Vec<SubsystemPopulations>,
    pub states: Vec<BlochState>,
    pub branch: RateBranch,
}

/// Rate-equation evolution with both subsystems held at their internal equilibria.
pub fn hybrid_evolve(p: &SystemParams, opts: HybridOptions, initial: SubsystemPopulations, times: &[f64]) -> Result<HybridEvolution> {
    let (blue, gr, model) = hybrid_parts(p, opts)?;
    let (populations, branch) = model.evolve(initial, times)?;
    let states = populations
        .iter()
        .map(|n| assemble_populations(*n, &blue, &gr))
        .collect::<Result<Vec<_>>>()?;
    Ok(HybridEvolution { populations, states, branch })
}
