//! The circle problem: minimize
//!
//! ```text
//! E(ζ; S¹) = ∫ (1-δ)/2 |∂θζ|² + δ (∂θζ · e_θ)² dθ
//! ```
//!
//! over `μ_d^±`-equivariant maps `ζ = α e^{iψ}` with `α = 1` (plus) or `i`
//! (minus). Writing `ψ = dθ + φ`, the density becomes
//! `(ψ'²/2)(1 ± δ cos(2θ - 2ψ))` and equivariance says `φ` is `π/n`-periodic
//! and odd. The minimum value is the constant `C_{δ,d}^±` and the minimizer
//! is the Dirichlet datum of the disk problem.
//!
//! The discrete energy uses one-sided slopes on each interval `[θₘ, θₘ₊₁]`
//! with the cosine evaluated at the midpoint, which makes `ψ = dθ` integrate
//! the oscillatory term exactly to zero.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symmetry::{CircleTrace, Sign, SymmetryClass};
use crate::Vec2;

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPhase {
    psi: Vec<f64>,
    d: i64,
    sign: Sign,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleEnergyValue {
    pub value: f64,
    pub el_residual: f64,
}

impl BoundaryPhase {
    pub fn new(d: i64, sign: Sign, psi: Vec<f64>) -> Result<Self> {
        if psi.len() < 8 {
            return Err(Error::invalid("phase needs at least 8 samples"));
        }
        Ok(BoundaryPhase { psi, d, sign })
    }

    /// `ψ(θₘ) = dθₘ + φ(θₘ)`.
    pub fn from_correction(d: i64, sign: Sign, m: usize, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let psi = (0..m)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / m as f64;
                d as f64 * t + phi(t)
            })
            .collect();
        Self::new(d, sign, psi)
    }

    /// The unperturbed phase `ψ = dθ`.
    pub fn linear(d: i64, sign: Sign, m: usize) -> Result<Self> {
        Self::from_correction(d, sign, m, |_| 0.0)
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn alpha(&self) -> Vec2 {
        self.sign.alpha()
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn psi(&self) -> &[f64] {
        &self.psi
    }

    pub fn theta(&self, m: usize) -> f64 {
        2.0 * PI * m as f64 / self.psi.len() as f64
    }

    /// `φ = ψ - dθ` at the samples.
    pub fn correction(&self) -> Vec<f64> {
        (0..self.len())
            .map(|m| self.psi[m] - self.d as f64 * self.theta(m))
            .collect()
    }

    /// `ψ` at sample `m` for any integer `m`, continued with total winding `d`.
    fn psi_at(&self, m: i64) -> f64 {
        let len = self.psi.len() as i64;
        let k = m.div_euclid(len);
        self.psi[m.rem_euclid(len) as usize] + 2.0 * PI * (self.d * k) as f64
    }

    /// Largest violation of `φ(θ + π/n) = φ(θ)` and `φ(-θ) = -φ(θ)` on the
    /// samples; zero for an equivariant boundary map.
    pub fn symmetry_defect(&self) -> Result<f64> {
        let class = SymmetryClass::new(self.d, self.sign)?;
        let m = self.len();
        let period = m / (2 * class.n());
        if !m.is_multiple_of(2 * class.n()) {
            return Err(Error::GridGroupMismatch(format!(
                "{m} samples is not a multiple of 2n = {}",
                2 * class.n()
            )));
        }
        let phi = self.correction();
        let mut worst = 0.0f64;
        for k in 0..m {
            worst = worst.max((phi[(k + period) % m] - phi[k]).abs());
            worst = worst.max((phi[(m - k) % m] + phi[k]).abs());
        }
        Ok(worst)
    }
}

fn sample_floor(d: i64) -> usize {
    8 * (1 - d).max(1) as usize
}

/// Per-interval quantities `(p, a, S, C)` with `p = ψ'`, `a = 1 + C`,
/// `C = ±δ cos(2θ̄ - 2ψ̄)`, `S = ±δ sin(2θ̄ - 2ψ̄)`.
#[inline]
fn interval(phase: &BoundaryPhase, delta: f64, m: usize, h: f64) -> (f64, f64, f64, f64) {
    let (p0, p1) = (phase.psi_at(m as i64), phase.psi_at(m as i64 + 1));
    let p = (p1 - p0) / h;
    let arg = 2.0 * (phase.theta(m) + 0.5 * h) - (p0 + p1);
    let sd = phase.sign.factor() * delta;
    let c = sd * arg.cos();
    let s = sd * arg.sin();
    (p, 1.0 + c, s, c)
}

fn check(phase: &BoundaryPhase, delta: f64) -> Result<()> {
    if phase.len() < sample_floor(phase.d) {
        return Err(Error::invalid(format!(
            "undersampled phase: {} samples, need at least {}",
            phase.len(),
            sample_floor(phase.d)
        )));
    }
    if !(delta.abs() < 1.0) {
        return Err(Error::invalid(format!("|delta| must be < 1, got {delta}")));
    }
    Ok(())
}

/// `E(ζ; S¹)` for `ζ = α e^{iψ}`.
pub fn circle_energy(phase: &BoundaryPhase, delta: f64) -> Result<f64> {
    check(phase, delta)?;
    let h = 2.0 * PI / phase.len() as f64;
    Ok((0..phase.len())
        .map(|m| {
            let (p, a, _, _) = interval(phase, delta, m, h);
            0.5 * h * p * p * a
        })
        .sum())
}

/// `∂E/∂ψₘ` for every sample, plus the cyclic tridiagonal Hessian
/// `(diag, upper)` with `upper[m] = ∂²E/∂ψₘ∂ψₘ₊₁`.
fn full_derivatives(phase: &BoundaryPhase, delta: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let len = phase.len();
    let h = 2.0 * PI / len as f64;
    let mut grad = vec![0.0; len];
    let mut diag = vec![0.0; len];
    let mut upper = vec![0.0; len];
    for m in 0..len {
        let (p, a, s, c) = interval(phase, delta, m, h);
        let next = (m + 1) % len;
        let shared = 0.5 * h * p * p * s;
        grad[m] += -p * a + shared;
        grad[next] += p * a + shared;
        let curv = 0.5 * h * p * p * c;
        diag[m] += a / h - 2.0 * p * s - curv;
        diag[next] += a / h + 2.0 * p * s - curv;
        upper[m] += -a / h - curv;
    }
    (grad, diag, upper)
}

/// Sup over samples of the discrete Euler–Lagrange residual
/// `∂θ[(1 ± δcos(2θ-2ψ))ψ'] ∓ δ sin(2θ-2ψ)ψ'²`, i.e. `-(1/h)∂E/∂ψₘ`.
pub fn circle_el_residual(phase: &BoundaryPhase, delta: f64) -> Result<f64> {
    check(phase, delta)?;
    let h = 2.0 * PI / phase.len() as f64;
    let (grad, _, _) = full_derivatives(phase, delta);
    Ok(grad.iter().fold(0.0f64, |acc, g| acc.max(g.abs())) / h)
}

/// `ζ(θₘ) = α e^{iψ(θₘ)}` on the unit circle.
pub fn boundary_field(phase: &BoundaryPhase) -> CircleTrace {
    let alpha = phase.alpha();
    let samples = phase.psi.iter().map(|&p| alpha * Vec2::from_polar(1.0, p)).collect();
    CircleTrace::new(samples, 1.0).expect("phase has at least 8 samples")
}

/// Outcome of [`minimize_circle`].
#[derive(Clone, Debug)]
pub struct CircleSolution {
    pub phase: BoundaryPhase,
    pub energy: CircleEnergyValue,
    /// `(start amplitude, C)` of every start that converged.
    pub starts: Vec<(f64, f64)>,
    /// Converged starts disagree on `C` by more than the tolerance.
    pub disagreement: bool,
    pub iterations: usize,
}

impl CircleSolution {
    pub fn c(&self) -> f64 {
        self.energy.value
    }
}

/// Reduction between the free unknowns and the full sample vector.
struct OddPeriodic {
    period: usize,
    len: usize,
}

impl OddPeriodic {
    fn nfree(&self) -> usize {
        self.period / 2 - 1
    }

    /// `(free index, sign)` feeding sample `m`, or `None` for pinned zeros.
    fn source(&self, m: usize) -> Option<(usize, f64)> {
        let k = m % self.period;
        let half = self.period / 2;
        if k == 0 || k == half {
            None
        } else if k < half {
            Some((k - 1, 1.0))
        } else {
            Some((self.period - k - 1, -1.0))
        }
    }

    fn expand(&self, x: &[f64]) -> Vec<f64> {
        (0..self.len)
            .map(|m| self.source(m).map_or(0.0, |(k, s)| s * x[k]))
            .collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn run_newton(
    d: i64,
    sign: Sign,
    delta: f64,
    len: usize,
    tol: f64,
    map: &OddPeriodic,
    mut x: Vec<f64>,
    max_iters: usize,
) -> Result<(BoundaryPhase, f64, f64, usize)> {
    let h = 2.0 * PI / len as f64;
    let nf = map.nfree();
    let make = |x: &[f64]| {
        let phi = map.expand(x);
        let psi = (0..len)
            .map(|m| d as f64 * 2.0 * PI * m as f64 / len as f64 + phi[m])
            .collect();
        BoundaryPhase { psi, d, sign }
    };
    let reduce = |phase: &BoundaryPhase| {
        let (g, diag, upper) = full_derivatives(phase, delta);
        let mut gr = DVector::<f64>::zeros(nf);
        let mut hr = DMatrix::<f64>::zeros(nf, nf);
        for m in 0..len {
            if let Some((k, s)) = map.source(m) {
                gr[k] += s * g[m];
                hr[(k, k)] += diag[m];
                if let Some((l, t)) = map.source((m + 1) % len) {
                    hr[(k, l)] += s * t * upper[m];
                    hr[(l, k)] += s * t * upper[m];
                }
            }
        }
        let resid = g.iter().fold(0.0f64, |a, v| a.max(v.abs())) / h;
        (gr, hr, resid)
    };

    let mut phase = make(&x);
    let mut energy = circle_energy(&phase, delta)?;
    let (mut g, mut hess, mut resid) = reduce(&phase);
    for iter in 0..max_iters {
        if resid <= tol {
            return Ok((phase, energy, resid, iter));
        }
        let mut lambda = 0.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut shifted = hess.clone();
            for k in 0..nf {
                shifted[(k, k)] += lambda;
            }
            let step = match shifted.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
                    continue;
                }
            };
            let mut t = 1.0;
            for _ in 0..40 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + t * b).collect();
                let tp = make(&trial);
                let te = circle_energy(&tp, delta)?;
                let (tg, th, tr) = reduce(&tp);
                let slack = 1e-13 * energy.abs().max(1.0);
                if te < energy || (te <= energy + slack && tg.norm() < g.norm()) {
                    x = trial;
                    phase = tp;
                    energy = te;
                    g = tg;
                    hess = th;
                    resid = tr;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if accepted {
                break;
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
        }
        if !accepted {
            break;
        }
    }
    if resid <= tol {
        return Ok((phase, energy, resid, max_iters));
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        residual: resid,
        best: phase.psi.clone(),
    })
}

/// Minimize the circle energy over odd, `π/n`-periodic corrections `φ`.
///
/// Starts from `φ = 0` and from `φ = ±0.2 sin(2nθ)`; the lowest converged
/// minimum is returned and the others are reported in `starts`.
pub fn minimize_circle(d: i64, sign: Sign, delta: f64, m: usize, tol: f64) -> Result<CircleSolution> {
    let class = SymmetryClass::new(d, sign)?;
    let n = class.n();
    if !m.is_multiple_of(class.order()) {
        return Err(Error::invalid(format!(
            "sample count {m} must be a multiple of 4n = {}",
            class.order()
        )));
    }
    if m < sample_floor(d) {
        return Err(Error::invalid(format!(
            "undersampled phase: {m} samples, need at least {}",
            sample_floor(d)
        )));
    }
    if !(delta.abs() < 1.0) {
        return Err(Error::invalid(format!("|delta| must be < 1, got {delta}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let map = OddPeriodic {
        period: m / (2 * n),
        len: m,
    };
    let mut best: Option<CircleSolution> = None;
    let mut starts = Vec::new();
    let mut first_err = None;
    let mut iterations = 0;
    for amp in [0.0, 0.2, -0.2] {
        let x0: Vec<f64> = (0..map.nfree())
            .map(|k| {
                let t = 2.0 * PI * (k + 1) as f64 / m as f64;
                amp * (2.0 * n as f64 * t).sin()
            })
            .collect();
        match run_newton(d, sign, delta, m, tol, &map, x0, 200) {
            Ok((phase, value, resid, iters)) => {
                iterations += iters;
                starts.push((amp, value));
                if best.as_ref().is_none_or(|b| value < b.energy.value) {
                    best = Some(CircleSolution {
                        phase,
                        energy: CircleEnergyValue {
                            value,
                            el_residual: resid,
                        },
                        starts: Vec::new(),
                        disagreement: false,
                        iterations: 0,
                    });
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match best {
        Some(mut sol) => {
            let lo = starts.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
            let hi = starts.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
            sol.disagreement = hi - lo > tol.max(1e-10);
            sol.starts = starts;
            sol.iterations = iterations;
            Ok(sol)
        }
        None => Err(first_err.expect("at least one start ran")),
    }
}
