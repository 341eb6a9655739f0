//! Dense complex helpers: LU solves, condition estimates and an exact
//! propagator `e^{Mt}` for small generators.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Eigenbasis reconstructions worse than this fall back to scaling and squaring.
const EIGEN_COND_LIMIT: f64 = 1e8;
const EIGEN_RESIDUAL_LIMIT: f64 = 1e-11;

/// 2-norm condition number from singular values; infinite if the matrix is singular.
pub fn condition_number(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn solve(m: &CMat, rhs: &CVec) -> Option<CVec> {
    m.clone().lu().solve(rhs)
}

/// `(e^z − 1)/z`, accurate near zero.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 0.1 {
        // Horner form of Σ z^k/(k+1)!
        let mut acc = ONE;
        for k in (1..=16).rev() {
            acc = ONE + z * acc / (k as f64 + 1.0);
        }
        acc
    } else {
        (z.exp() - ONE) / z
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpMethod {
    Eigen,
    ScalingSquaring,
}

impl std::fmt::Display for ExpMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ExpMethod::Eigen => "eigen",
            ExpMethod::ScalingSquaring => "scaling_squaring",
        })
    }
}

#[derive(Debug, Clone)]
struct Eigenbasis {
    values: Vec<C64>,
    vectors: CMat,
    inverse: CMat,
}

/// Exact time propagation under a fixed generator `M`.
///
/// The generator is diagonalized once through its complex Schur form.
/// Spectra that come out too close to defective are propagated with the
/// Padé scaling-and-squaring exponential instead.
#[derive(Debug, Clone)]
pub struct Propagator {
    m: CMat,
    eig: Option<Eigenbasis>,
}

impl Propagator {
    pub fn new(m: &CMat) -> Self {
        assert!(m.is_square());
        Propagator { m: m.clone(), eig: eigenbasis(m) }
    }

    /// Skips the eigendecomposition.
    pub fn scaling_squaring(m: &CMat) -> Self {
        Propagator { m: m.clone(), eig: None }
    }

    pub fn method(&self) -> ExpMethod {
        if self.eig.is_some() {
            ExpMethod::Eigen
        } else {
            ExpMethod::ScalingSquaring
        }
    }

    pub fn eigenvalues(&self) -> Option<&[C64]> {
        self.eig.as_ref().map(|e| e.values.as_slice())
    }

    /// Component of `x` along eigenvectors with `|λ| ≤ tol`, i.e. the `t → ∞`
    /// limit of `e^{Mt}x` when the rest of the spectrum decays.
    pub fn null_projection(&self, x: &CVec, tol: f64) -> Option<CVec> {
        let e = self.eig.as_ref()?;
        let mut c = &e.inverse * x;
        for (ci, lam) in c.iter_mut().zip(&e.values) {
            if lam.norm() > tol {
                *ci = ZERO;
            }
        }
        Some(&e.vectors * c)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn exp(&self, t: f64) -> CMat {
        match &self.eig {
            Some(e) => {
                let mut scaled = e.vectors.clone();
                for (j, lam) in e.values.iter().enumerate() {
                    let f = (lam * t).exp();
                    for i in 0..scaled.nrows() {
                        scaled[(i, j)] *= f;
                    }
                }
                scaled * &e.inverse
            }
            None => (&self.m * C64::from(t)).exp(),
        }
    }

    /// `e^{Mt} x`.
    pub fn apply(&self, t: f64, x: &CVec) -> CVec {
        match &self.eig {
            Some(e) => {
                let mut c = &e.inverse * x;
                for (ci, lam) in c.iter_mut().zip(&e.values) {
                    *ci *= (lam * t).exp();
                }
                &e.vectors * c
            }
            None => self.exp(t) * x,
        }
    }

    /// `e^{Mt} x + ∫₀ᵗ e^{Ms} ds · f`, the solution of `ẋ = Mx + f`.
    pub fn apply_affine(&self, t: f64, x: &CVec, f: &CVec) -> CVec {
        match &self.eig {
            Some(e) => {
                let mut cx = &e.inverse * x;
                let cf = &e.inverse * f;
                for ((ci, fi), lam) in cx.iter_mut().zip(cf.iter()).zip(&e.values) {
                    let z = lam * t;
                    *ci = *ci * z.exp() + fi * phi1(z) * t;
                }
                &e.vectors * cx
            }
            None => {
                let n = self.dim();
                let mut aug = CMat::zeros(n + 1, n + 1);
                aug.view_mut((0, 0), (n, n)).copy_from(&self.m);
                aug.view_mut((0, n), (n, 1)).copy_from(f);
                let big = (aug * C64::from(t)).exp();
                let mut xt = CVec::zeros(n + 1);
                xt.rows_mut(0, n).copy_from(x);
                xt[n] = ONE;
                (big * xt).rows(0, n).into_owned()
            }
        }
    }
}

fn eigenbasis(m: &CMat) -> Option<Eigenbasis> {
    let n = m.nrows();
    if n == 0 {
        return None;
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), f64::EPSILON, 0)?;
    let (q, t) = schur.unpack();
    let tnorm = t.norm().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * tnorm;

    // Eigenvectors of the triangular factor by back substitution.
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in (i + 1)..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < tiny {
                d = C64::new(tiny, 0.0);
            }
            y[(i, k)] = -s / d;
        }
        let nrm = y.column(k).norm();
        y.column_mut(k).unscale_mut(nrm);
    }
    let vectors = &q * &y;
    let inverse = vectors.clone().lu().try_inverse()?;
    if !inverse.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        return None;
    }
    let cond = vectors.norm() * inverse.norm() / n as f64;
    if cond > EIGEN_COND_LIMIT {
        return None;
    }
    let values: Vec<C64> = (0..n).map(|k| t[(k, k)]).collect();
    let mut recon = vectors.clone();
    for (j, lam) in values.iter().enumerate() {
        for i in 0..n {
            recon[(i, j)] *= lam;
        }
    }
    let residual = (recon * &inverse - m).norm() / m.norm().max(f64::MIN_POSITIVE);
    if residual > EIGEN_RESIDUAL_LIMIT {
        return None;
    }
    Some(Eigenbasis { values, vectors, inverse })
}

pub(crate) fn check_finite_matrix(name: &'static str, m: &CMat) -> Result<()> {
    for z in m.iter() {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite { name, value: if z.re.is_finite() { z.im } else { z.re } });
        }
    }
    Ok(())
}
