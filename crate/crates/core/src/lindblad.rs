//! Generic construction of the same generator from the master equation
//! `ρ̇ = −i[H, ρ] + Σ γ (σρσ† − ½{σ†σ, ρ})`, vectorized column-wise on the
//! six-level density matrix and projected onto the twelve tracked entries.
//!
//! This path shares no matrix entries with [`crate::liouvillian`] and is used
//! to cross-check it.

use crate::error::Result;
use crate::linalg::{check_finite_matrix, CMat, CVec, C64, ONE};
use crate::liouvillian::{Component, Liouvillian, SystemParams, DIM};

const LEVELS: usize = 6;
const SUPER: usize = LEVELS * LEVELS;

/// Column-stacked index of ρ_ij.
fn vec_index(i: usize, j: usize) -> usize {
    j * LEVELS + i
}

/// `|i⟩⟨j|` on the six levels.
fn ket_bra(i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(LEVELS, LEVELS);
    m[(i, j)] = ONE;
    m
}

fn hamiltonian(p: &SystemParams) -> CMat {
    let mut h = CMat::zeros(LEVELS, LEVELS);
    // (ground, excited, drive); each subspace is [[0, Ω/2], [Ω/2, −Δ]]
    for (g, e, d) in [(0, 1, p.blue), (2, 3, p.green), (4, 5, p.red)] {
        h[(g, e)] = C64::from(d.omega / 2.0);
        h[(e, g)] = C64::from(d.omega / 2.0);
        h[(e, e)] = C64::from(-d.delta);
    }
    h
}

/// Superoperator of `X ↦ A X B` under column stacking: `Bᵀ ⊗ A`.
fn sandwich(a: &CMat, b: &CMat) -> CMat {
    b.transpose().kronecker(a)
}

fn full_superoperator(p: &SystemParams) -> CMat {
    let id = CMat::identity(LEVELS, LEVELS);
    let h = hamiltonian(p);
    let i = C64::new(0.0, 1.0);
    // −i(Hρ − ρH)
    let mut l = (sandwich(&h, &id) - sandwich(&id, &h)) * (-i);

    let c = &p.constants;
    // (rate, from, to) with levels |1⟩..|6⟩ at indices 0..5
    let jumps = [
        (c.gamma_12.value(), 1, 0),
        (c.gamma_23.value(), 1, 2),
        (c.gamma_25.value(), 1, 4),
        (c.gamma_34.value(), 3, 2),
        (c.gamma_45.value(), 3, 4),
        (c.gamma_56.value(), 5, 4),
        (c.gamma_36.value(), 5, 2),
        (c.gamma_15.value(), 4, 0),
    ];
    for (gamma, from, to) in jumps {
        let s = ket_bra(to, from);
        let sd = s.adjoint();
        let sds = &sd * &s;
        let d = sandwich(&s, &sd) - (sandwich(&sds, &id) + sandwich(&id, &sds)) * C64::from(0.5);
        l += d * C64::from(gamma);
    }

    // trap losses act on populations of |1⟩, |3⟩ and |5⟩ only
    for (gamma, k) in [(p.gamma_blue, 0), (p.gamma_grrd, 2), (p.gamma_grrd, 4)] {
        let idx = vec_index(k, k);
        l[(idx, idx)] -= C64::from(gamma);
    }
    l
}

pub fn build_lindblad_liouvillian(p: &SystemParams) -> Result<Liouvillian> {
    p.validate()?;
    let full = full_superoperator(p);
    debug_assert_eq!(full.nrows(), SUPER);
    let idx: Vec<usize> = Component::ALL
        .iter()
        .map(|c| {
            let (i, j) = c.levels();
            vec_index(i, j)
        })
        .collect();
    let matrix = CMat::from_fn(DIM, DIM, |r, col| full[(idx[r], idx[col])]);
    check_finite_matrix("lindblad liouvillian", &matrix)?;
    let mut inhomogeneity = CVec::zeros(DIM);
    inhomogeneity[0] = C64::from(p.r_load);
    Ok(Liouvillian { matrix, inhomogeneity, gamma_blue: p.gamma_blue, gamma_grrd: p.gamma_grrd })
}

/// Largest coupling from a tracked entry into an untracked one; zero when the
/// twelve-entry subspace is invariant.
pub fn leakage_out_of_tracked(p: &SystemParams) -> f64 {
    let full = full_superoperator(p);
    let tracked: Vec<usize> = Component::ALL
        .iter()
        .map(|c| {
            let (i, j) = c.levels();
            vec_index(i, j)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for r in 0..SUPER {
        if tracked.contains(&r) {
            continue;
        }
        for &c in &tracked {
            worst = worst.max(full[(r, c)].norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atomic::{DecayRate, SrConstants};
    use crate::liouvillian::{build_liouvillian, DriveParams};

    #[test]
    fn matches_hand_built_on_baseline() {
        let p = SystemParams::baseline(SrConstants::bundled());
        let a = build_liouvillian(&p).unwrap();
        let b = build_lindblad_liouvillian(&p).unwrap();
        let scale = p.constants.gamma_12.value();
        let diff = (&a.matrix - &b.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        assert!(diff <= 1e-12, "{diff}");
        assert_eq!(a.inhomogeneity, b.inhomogeneity);
    }

    #[test]
    fn tracked_subspace_is_invariant() {
        let p = SystemParams::baseline(SrConstants::bundled());
        assert_eq!(leakage_out_of_tracked(&p), 0.0);
    }

    #[test]
    fn two_level_textbook_limit() {
        let mut c = SrConstants::bundled();
        for g in [&mut c.gamma_23, &mut c.gamma_25, &mut c.gamma_15] {
            *g = DecayRate::ZERO;
        }
        let (omega, delta) = (1.0e7, -3.0e6);
        let p = SystemParams {
            constants: c.clone(),
            blue: DriveParams::new(omega, delta).unwrap(),
            green: DriveParams::OFF,
            red: DriveParams::OFF,
            gamma_blue: 0.0,
            gamma_grrd: 0.0,
            r_load: 0.0,
        };
        let l = build_lindblad_liouvillian(&p).unwrap();
        let g = c.gamma_12.value();
        let w = C64::new(0.0, omega / 2.0);
        let lam = C64::new(g / 2.0, delta);
        #[rustfmt::skip]
        let expect = [
            [C64::from(0.0), C64::from(g), w, -w],
            [C64::from(0.0), C64::from(-g), -w, w],
            [w, -w, -lam, C64::from(0.0)],
            [-w, w, C64::from(0.0), -lam.conj()],
        ];
        for r in 0..4 {
            for col in 0..4 {
                assert!((l.matrix[(r, col)] - expect[r][col]).norm() < 1e-6, "({r},{col})");
            }
        }
    }
}
