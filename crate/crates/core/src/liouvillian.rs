//! The 12×12 open Bloch generator of the blue, red and green two-level
//! subsystems and its stationary and time-dependent solutions.
//!
//! State ordering (blue, red, green):
//! `N11 N22 N12 N21 | N55 N66 N56 N65 | N33 N44 N34 N43`.

use std::fmt;

use serde::Serialize;

use crate::atomic::{rabi_from_saturation, saturation_from_rabi, DecayRate, SrConstants};
use crate::error::{finite, Error, Result};
use crate::linalg::{check_finite_matrix, condition_number, solve, CMat, CVec, ExpMethod, Propagator, C64, ONE, ZERO};

pub const DIM: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Component {
    N11,
    N22,
    N12,
    N21,
    N55,
    N66,
    N56,
    N65,
    N33,
    N44,
    N34,
    N43,
}

impl Component {
    pub const ALL: [Component; DIM] = [
        Component::N11,
        Component::N22,
        Component::N12,
        Component::N21,
        Component::N55,
        Component::N66,
        Component::N56,
        Component::N65,
        Component::N33,
        Component::N44,
        Component::N34,
        Component::N43,
    ];

    pub const POPULATIONS: [Component; 6] =
        [Component::N11, Component::N22, Component::N55, Component::N66, Component::N33, Component::N44];

    /// `(Nij, Nji)` coherence pairs.
    pub const CONJUGATE_PAIRS: [(Component, Component); 3] =
        [(Component::N12, Component::N21), (Component::N56, Component::N65), (Component::N34, Component::N43)];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Component::N11 => "N11",
            Component::N22 => "N22",
            Component::N12 => "N12",
            Component::N21 => "N21",
            Component::N55 => "N55",
            Component::N66 => "N66",
            Component::N56 => "N56",
            Component::N65 => "N65",
            Component::N33 => "N33",
            Component::N44 => "N44",
            Component::N34 => "N34",
            Component::N43 => "N43",
        }
    }

    pub fn is_population(self) -> bool {
        Self::POPULATIONS.contains(&self)
    }

    /// Density-matrix indices `(i, j)` on the six levels, zero based.
    pub fn levels(self) -> (usize, usize) {
        match self {
            Component::N11 => (0, 0),
            Component::N22 => (1, 1),
            Component::N12 => (0, 1),
            Component::N21 => (1, 0),
            Component::N55 => (4, 4),
            Component::N66 => (5, 5),
            Component::N56 => (4, 5),
            Component::N65 => (5, 4),
            Component::N33 => (2, 2),
            Component::N44 => (3, 3),
            Component::N34 => (2, 3),
            Component::N43 => (3, 2),
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Component {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Component::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Domain(format!("unknown state component `{s}`")))
    }
}

/// Drive of one two-level transition. Both fields in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveParams {
    pub omega: f64,
    pub delta: f64,
}

impl DriveParams {
    pub const OFF: DriveParams = DriveParams { omega: 0.0, delta: 0.0 };

    pub fn new(omega: f64, delta: f64) -> Result<Self> {
        let d = DriveParams { omega, delta };
        d.validate()?;
        Ok(d)
    }

    pub fn from_saturation(s: f64, delta: f64, gamma: DecayRate) -> Result<Self> {
        Self::new(rabi_from_saturation(s, gamma)?, delta)
    }

    pub fn saturation(&self, gamma: DecayRate) -> f64 {
        saturation_from_rabi(self.omega, gamma)
    }

    pub fn validate(&self) -> Result<()> {
        finite("omega", self.omega)?;
        finite("delta", self.delta)?;
        if self.omega < 0.0 {
            return Err(Error::Domain(format!("Rabi frequency must be >= 0, got {}", self.omega)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemParams {
    #[serde(skip)]
    pub constants: SrConstants,
    pub blue: DriveParams,
    pub green: DriveParams,
    pub red: DriveParams,
    /// Loss from the blue subsystem (1/s).
    pub gamma_blue: f64,
    /// Loss from the green-red subsystem (1/s).
    pub gamma_grrd: f64,
    /// Loading into |1⟩ (atoms/s).
    pub r_load: f64,
}

impl SystemParams {
    /// The parameter set fitted to the balancing measurement:
    /// s12 = 1.3, s34 = 2.1, s56 = 25, Δ12 = −Γ12/2, Δ34 = Δ56 = 0,
    /// R_load = 1e8/s, Γ_blue = 190/s, Γ_gr:rd = 2500/s.
    pub fn baseline(constants: SrConstants) -> Self {
        let blue = DriveParams::from_saturation(1.3, -constants.gamma_12.value() / 2.0, constants.gamma_12).unwrap();
        let green = DriveParams::from_saturation(2.1, 0.0, constants.gamma_34).unwrap();
        let red = DriveParams::from_saturation(25.0, 0.0, constants.gamma_56).unwrap();
        SystemParams { constants, blue, green, red, gamma_blue: 190.0, gamma_grrd: 2500.0, r_load: 1e8 }
    }

    pub fn validate(&self) -> Result<()> {
        self.blue.validate()?;
        self.green.validate()?;
        self.red.validate()?;
        for (name, v) in [("gamma_blue", self.gamma_blue), ("gamma_grrd", self.gamma_grrd), ("r_load", self.r_load)] {
            finite(name, v)?;
            if v < 0.0 {
                return Err(Error::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Same internal dynamics with loading and both losses switched off.
    pub fn closed(&self) -> Self {
        SystemParams { gamma_blue: 0.0, gamma_grrd: 0.0, r_load: 0.0, ..self.clone() }
    }

    pub fn is_closed(&self) -> bool {
        self.gamma_blue == 0.0 && self.gamma_grrd == 0.0 && self.r_load == 0.0
    }
}

/// Populations and coherences in the ordering of [`Component::ALL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    pub components: [C64; DIM],
}

impl BlochState {
    pub fn zeros() -> Self {
        BlochState { components: [ZERO; DIM] }
    }

    /// All atoms in |1⟩.
    pub fn ground(n: f64) -> Self {
        let mut s = Self::zeros();
        s.components[0] = C64::from(n);
        s
    }

    pub fn from_cvec(v: &CVec) -> Self {
        assert_eq!(v.len(), DIM);
        let mut s = Self::zeros();
        s.components.copy_from_slice(v.as_slice());
        s
    }

    pub fn to_cvec(&self) -> CVec {
        CVec::from_column_slice(&self.components)
    }

    #[inline]
    pub fn get(&self, c: Component) -> C64 {
        self.components[c.index()]
    }

    pub fn set(&mut self, c: Component, v: C64) {
        self.components[c.index()] = v;
    }

    /// Real part of a population entry.
    #[inline]
    pub fn pop(&self, c: Component) -> f64 {
        self.get(c).re
    }

    pub fn total(&self) -> f64 {
        Component::POPULATIONS.iter().map(|&c| self.pop(c)).sum()
    }

    pub fn n_blue(&self) -> f64 {
        self.pop(Component::N11) + self.pop(Component::N22)
    }

    pub fn n_grrd(&self) -> f64 {
        self.pop(Component::N33) + self.pop(Component::N44) + self.pop(Component::N55) + self.pop(Component::N66)
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest violation of the real/nonnegative diagonal and conjugate-pair
    /// structure, relative to the state norm.
    pub fn structure_defect(&self) -> f64 {
        let n = self.norm().max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for c in Component::POPULATIONS {
            let z = self.get(c);
            worst = worst.max(z.im.abs()).max(-z.re);
        }
        for (a, b) in Component::CONJUGATE_PAIRS {
            worst = worst.max((self.get(a) - self.get(b).conj()).norm());
        }
        worst / n
    }

    pub fn check_structure(&self, tol: f64) -> Result<()> {
        let d = self.structure_defect();
        if d > tol {
            return Err(Error::Domain(format!("state violates population/coherence structure by {d:.3e}")));
        }
        Ok(())
    }

    /// Populations with round-off negatives clamped to zero, for reporting only.
    pub fn reported_population(&self, c: Component) -> f64 {
        self.pop(c).max(0.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = *self;
        for z in s.components.iter_mut() {
            *z *= factor;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    pub matrix: CMat,
    pub inhomogeneity: CVec,
    pub gamma_blue: f64,
    pub gamma_grrd: f64,
}

impl Liouvillian {
    pub fn entry(&self, row: Component, col: Component) -> C64 {
        self.matrix[(row.index(), col.index())]
    }

    pub fn is_closed(&self) -> bool {
        self.gamma_blue == 0.0 && self.gamma_grrd == 0.0 && self.inhomogeneity.iter().all(|z| *z == ZERO)
    }
}

fn im_half(omega: f64) -> C64 {
    C64::new(0.0, omega / 2.0)
}

pub fn build_liouvillian(p: &SystemParams) -> Result<Liouvillian> {
    use Component::*;
    p.validate()?;
    let c = &p.constants;
    let (g12, g34, g56, g36) = (c.gamma_12.value(), c.gamma_34.value(), c.gamma_56.value(), c.gamma_36.value());
    let (g15, g23, g25, g45) = (c.gamma_15.value(), c.gamma_23.value(), c.gamma_25.value(), c.gamma_45.value());
    let l12 = C64::new((g12 + g25 + g23) / 2.0, p.blue.delta);
    let l34 = C64::new((g34 + g45) / 2.0, p.green.delta);
    let l56 = C64::new((g56 + g36 + g15) / 2.0, p.red.delta);

    let mut b = CMat::zeros(DIM, DIM);
    let mut set = |r: Component, col: Component, v: C64| b[(r.index(), col.index())] = v;

    // two-level block with ground g, excited e and coherences ge, eg
    let mut block = |g: Component, e: Component, ge: Component, eg: Component, omega: f64, lam: C64| {
        let w = im_half(omega);
        set(g, ge, w);
        set(g, eg, -w);
        set(e, ge, -w);
        set(e, eg, w);
        set(ge, g, w);
        set(ge, e, -w);
        set(ge, ge, -lam);
        set(eg, g, -w);
        set(eg, e, w);
        set(eg, eg, -lam.conj());
    };
    block(N11, N22, N12, N21, p.blue.omega, l12);
    block(N55, N66, N56, N65, p.red.omega, l56);
    block(N33, N44, N34, N43, p.green.omega, l34);

    let r = |x: f64| C64::from(x);
    set(N11, N11, r(-p.gamma_blue));
    set(N11, N22, r(g12));
    set(N11, N55, r(g15));
    set(N22, N22, r(-g12 - g23 - g25));

    set(N55, N22, r(g25));
    set(N55, N55, r(-g15 - p.gamma_grrd));
    set(N55, N66, r(g56));
    set(N55, N44, r(g45));
    set(N66, N66, r(-g56 - g36));

    set(N33, N22, r(g23));
    set(N33, N66, r(g36));
    set(N33, N33, r(-p.gamma_grrd));
    set(N33, N44, r(g34));
    set(N44, N44, r(-g34 - g45));

    check_finite_matrix("liouvillian", &b)?;
    let mut inh = CVec::zeros(DIM);
    inh[0] = r(p.r_load);
    Ok(Liouvillian { matrix: b, inhomogeneity: inh, gamma_blue: p.gamma_blue, gamma_grrd: p.gamma_grrd })
}

/// Generators with a 2-norm condition estimate above this are treated as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

/// `N(∞) = −B⁻¹b`.
pub fn steady_state(l: &Liouvillian) -> Result<BlochState> {
    let cond = condition_number(&l.matrix);
    if !(cond < SINGULAR_CONDITION) {
        let reason = if l.gamma_blue == 0.0 || l.gamma_grrd == 0.0 {
            "zero-loss generator has a conserved population and no unique stationary state"
        } else {
            "generator is numerically singular"
        };
        return Err(Error::Singular { condition: cond, reason: reason.into() });
    }
    let rhs = -&l.inhomogeneity;
    let n = solve(&l.matrix, &rhs).ok_or_else(|| Error::Singular {
        condition: cond,
        reason: "LU factorization failed".into(),
    })?;
    let residual = (&l.matrix * &n - &rhs).norm();
    // rounding floor of the residual evaluation itself
    let floor = 64.0 * f64::EPSILON * l.matrix.norm() * n.norm();
    let tolerance = 1e-9 * l.inhomogeneity.norm() + floor;
    if !(residual <= tolerance) {
        return Err(Error::Residual { residual, tolerance });
    }
    Ok(BlochState::from_cvec(&n))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveBranch {
    /// `e^{Bt}(N0 − N∞) + N∞`.
    Relaxation,
    /// Closed system propagated in coordinates that hold the total population fixed.
    Conserving,
    /// Singular open generator, `e^{Bt}N0 + ∫e^{Bs}ds·b`.
    Affine,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub states: Vec<BlochState>,
    pub method: ExpMethod,
    pub branch: EvolveBranch,
}

fn check_times(times: &[f64]) -> Result<()> {
    let mut prev = 0.0;
    for &t in times {
        if !t.is_finite() || t < prev {
            return Err(Error::Domain(format!("times must be finite, >= 0 and sorted; got {t} after {prev}")));
        }
        prev = t;
    }
    Ok(())
}

pub fn evolve(l: &Liouvillian, initial: &BlochState, times: &[f64]) -> Result<Evolution> {
    check_times(times)?;
    if l.is_closed() {
        return evolve_conserving(l, initial, times);
    }
    let n0 = initial.to_cvec();
    match steady_state(l) {
        Ok(ss) => {
            let ninf = ss.to_cvec();
            let prop = Propagator::new(&l.matrix);
            let d0 = &n0 - &ninf;
            let states = times
                .iter()
                .map(|&t| if t == 0.0 { *initial } else { BlochState::from_cvec(&(prop.apply(t, &d0) + &ninf)) })
                .collect();
            Ok(Evolution { times: times.to_vec(), states, method: prop.method(), branch: EvolveBranch::Relaxation })
        }
        Err(Error::Singular { .. }) => {
            let prop = Propagator::new(&l.matrix);
            let states = times
                .iter()
                .map(|&t| if t == 0.0 { *initial } else { BlochState::from_cvec(&prop.apply_affine(t, &n0, &l.inhomogeneity)) })
                .collect();
            Ok(Evolution { times: times.to_vec(), states, method: prop.method(), branch: EvolveBranch::Affine })
        }
        Err(e) => Err(e),
    }
}

/// Closed-system propagation with `y0 = Σ populations` replacing `N11`.
///
/// In these coordinates the first row of the generator vanishes identically,
/// so the total population is carried exactly instead of drifting by
/// `ε‖B‖t`.
fn evolve_conserving(l: &Liouvillian, initial: &BlochState, times: &[f64]) -> Result<Evolution> {
    let pops: Vec<usize> = Component::POPULATIONS.iter().map(|c| c.index()).collect();
    let mut t_fwd = CMat::identity(DIM, DIM);
    let mut t_inv = CMat::identity(DIM, DIM);
    for &k in &pops {
        t_fwd[(0, k)] = ONE;
        if k != 0 {
            t_inv[(0, k)] = -ONE;
        }
    }
    let transformed = &t_fwd * &l.matrix * &t_inv;
    let d = transformed.view((1, 1), (DIM - 1, DIM - 1)).into_owned();
    let c: CVec = transformed.column(0).rows(1, DIM - 1).into_owned();

    let n0 = initial.to_cvec();
    let y0 = (&t_fwd * &n0)[0];
    let z0 = n0.rows(1, DIM - 1).into_owned();
    let forcing = &c * y0;
    let prop = Propagator::new(&d);
    let states = times
        .iter()
        .map(|&t| {
            if t == 0.0 {
                return *initial;
            }
            let z = prop.apply_affine(t, &z0, &forcing);
            let mut n = CVec::zeros(DIM);
            n.rows_mut(1, DIM - 1).copy_from(&z);
            let others: C64 = pops.iter().filter(|&&k| k != 0).map(|&k| n[k]).sum();
            n[0] = y0 - others;
            BlochState::from_cvec(&n)
        })
        .collect();
    Ok(Evolution { times: times.to_vec(), states, method: prop.method(), branch: EvolveBranch::Conserving })
}

/// `(α_blue Γ12 N22, α_green Γ34 N44)` in detector units.
pub fn fluorescence(state: &BlochState, alpha_blue: f64, alpha_green: f64, constants: &SrConstants) -> Result<(f64, f64)> {
    for (name, a) in [("alpha_blue", alpha_blue), ("alpha_green", alpha_green)] {
        finite(name, a)?;
        if a < 0.0 {
            return Err(Error::Domain(format!("{name} must be >= 0, got {a}")));
        }
    }
    Ok((
        alpha_blue * constants.gamma_12.value() * state.pop(Component::N22),
        alpha_green * constants.gamma_34.value() * state.pop(Component::N44),
    ))
}
