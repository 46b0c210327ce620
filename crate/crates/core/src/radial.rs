//! Isotropic radial vortex profiles.
//!
//! `v_d(re^{iθ}) = η(r) e^{idθ}` solves `Δu = (|u|²-1)u` when
//!
//! ```text
//! η'' + η'/r - d²η/r² + (1-η²)η = 0,   η(0) = 0,   η(∞) = 1.
//! ```
//!
//! The far field is truncated to `η(R_max) = 1` and the two-point problem is
//! solved by damped Newton on the centered three-point scheme.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub d: i64,
    pub r_nodes: Vec<f64>,
    pub eta: Vec<f64>,
    /// `|1 - η(R_max)|`; zero by construction.
    pub boundary_defect: f64,
    /// Sup-norm of the discrete ODE residual on interior nodes.
    pub residual: f64,
    pub tol: f64,
}

fn residual(d2: f64, h: f64, r: &[f64], eta: &[f64]) -> Vec<f64> {
    let n = eta.len() - 1;
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        let (a, b, c) = (eta[i - 1], eta[i], eta[i + 1]);
        out[i] = (c - 2.0 * b + a) / (h * h) + (c - a) / (2.0 * h * r[i]) - d2 * b / (r[i] * r[i])
            + (1.0 - b * b) * b;
    }
    out
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
}

/// Thomas algorithm for `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]`.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = upper[i] / m;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

pub fn solve_radial_profile(d: i64, r_max: f64, n: usize, tol: f64) -> Result<RadialProfile> {
    if !(d <= -1 || d == 1) {
        return Err(Error::invalid(format!("radial profile needs d <= -1 or d = 1, got {d}")));
    }
    if !(r_max >= 20.0 * d.abs() as f64) {
        return Err(Error::invalid(format!("R_max must be at least 20|d|, got {r_max}")));
    }
    if n < 512 {
        return Err(Error::invalid(format!("need N >= 512 intervals, got {n}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let h = r_max / n as f64;
    let r: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let d2 = (d * d) as f64;
    let mut eta: Vec<f64> = r.iter().map(|&x| x / (x * x + d2).sqrt()).collect();
    eta[0] = 0.0;
    eta[n] = 1.0;
    let mut res = residual(d2, h, &r, &eta);
    let mut norm = sup(&res);
    let mut iters = 0;
    while norm > tol {
        iters += 1;
        if iters > 100 {
            return Err(Error::NoConvergence {
                iterations: 100,
                residual: norm,
                best: eta,
            });
        }
        let m = n - 1;
        let mut lower = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            lower[k] = 1.0 / (h * h) - 1.0 / (2.0 * h * r[i]);
            upper[k] = 1.0 / (h * h) + 1.0 / (2.0 * h * r[i]);
            diag[k] = -2.0 / (h * h) - d2 / (r[i] * r[i]) + 1.0 - 3.0 * eta[i] * eta[i];
            rhs[k] = -res[i];
        }
        let step = solve_tridiagonal(&lower, &diag, &upper, &rhs);
        let mut t = 1.0;
        loop {
            let mut trial = eta.clone();
            for k in 0..m {
                trial[k + 1] += t * step[k];
            }
            let tr = residual(d2, h, &r, &trial);
            let tn = sup(&tr);
            if tn < norm || t < 1e-6 {
                eta = trial;
                res = tr;
                norm = tn;
                break;
            }
            t *= 0.5;
        }
    }
    let slack = 1e-12;
    if eta.iter().any(|&v| v < -slack || v > 1.0 + slack) || eta.windows(2).any(|w| w[1] < w[0] - slack) {
        return Err(Error::invalid("radial profile left [0, 1] or is not monotone"));
    }
    Ok(RadialProfile {
        d,
        boundary_defect: (1.0 - eta[n]).abs(),
        r_nodes: r,
        eta,
        residual: norm,
        tol,
    })
}

impl RadialProfile {
    pub fn r_max(&self) -> f64 {
        *self.r_nodes.last().unwrap()
    }

    pub fn intervals(&self) -> usize {
        self.r_nodes.len() - 1
    }

    /// `|η(R_max) - (1 - d²/(2R_max²))|`, the distance from the formal far-field
    /// balance; a soft diagnostic for the truncation.
    pub fn far_field_gap(&self) -> f64 {
        let r = self.r_max();
        let model = 1.0 - (self.d * self.d) as f64 / (2.0 * r * r);
        (self.eta[self.intervals()] - model).abs()
    }

    /// Sup-norm of the discrete ODE residual on interior nodes.
    pub fn ode_residual(&self) -> f64 {
        let h = self.r_max() / self.intervals() as f64;
        sup(&residual((self.d * self.d) as f64, h, &self.r_nodes, &self.eta))
    }

    /// Cubic interpolation on the uniform grid.
    pub fn eval(&self, r: f64) -> Result<f64> {
        let rmax = self.r_max();
        if !(0.0..=rmax * (1.0 + 1e-12)).contains(&r) {
            return Err(Error::RadiusOutOfRange { radius: r, domain: rmax });
        }
        let n = self.intervals();
        let h = rmax / n as f64;
        let s = (r / h).min(n as f64);
        let i = (s.floor() as usize).min(n - 1);
        let base = i.saturating_sub(1).min(n - 3);
        let xs = [base, base + 1, base + 2, base + 3];
        let mut out = 0.0;
        for (a, &ia) in xs.iter().enumerate() {
            let mut w = 1.0;
            for (b, &ib) in xs.iter().enumerate() {
                if a != b {
                    w *= (s - ib as f64) / (ia as f64 - ib as f64);
                }
            }
            out += w * self.eta[ia];
        }
        Ok(out)
    }

    /// Richardson extrapolation against a profile on twice as many intervals,
    /// returned on this profile's nodes.
    pub fn extrapolate(&self, fine: &RadialProfile) -> Result<RadialProfile> {
        if fine.intervals() != 2 * self.intervals() || fine.r_max() != self.r_max() || fine.d != self.d {
            return Err(Error::invalid("extrapolation needs the same problem on 2N intervals"));
        }
        let eta = self
            .eta
            .iter()
            .enumerate()
            .map(|(i, c)| (4.0 * fine.eta[2 * i] - c) / 3.0)
            .collect();
        Ok(RadialProfile {
            eta,
            residual: f64::NAN,
            ..self.clone()
        })
    }
}

/// `u(re^{iθ}) = α η(r/s) e^{idθ}` on the given grid.
pub fn radial_field(
    profile: &RadialProfile,
    d: i64,
    alpha: Vec2,
    scale: f64,
    layout: Layout,
    radii: Vec<f64>,
    ntheta: usize,
) -> Result<PolarField> {
    if !(scale > 0.0) {
        return Err(Error::invalid("scale must be positive"));
    }
    let rmax = radii.iter().cloned().fold(0.0, f64::max);
    if rmax > scale * profile.r_max() * (1.0 + 1e-12) {
        return Err(Error::RadiusOutOfRange {
            radius: rmax,
            domain: scale * profile.r_max(),
        });
    }
    let eval = |r: f64, t: f64| {
        let eta = profile.eval((r / scale).min(profile.r_max())).expect("radius checked");
        alpha * Vec2::from_polar(eta, d as f64 * t)
    };
    Ok(match layout {
        Layout::Disk => PolarField::disk(radii, ntheta, eval),
        Layout::Sector(c) => PolarField::sector(c, radii, ntheta, eval),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::uniform_radii;
    use crate::symmetry::{equivariance_residual, Sign, SymmetryClass};

    #[test]
    fn degree_sign_does_not_matter() {
        let a = solve_radial_profile(1, 20.0, 512, 1e-10).unwrap();
        let b = solve_radial_profile(-1, 20.0, 512, 1e-10).unwrap();
        assert_eq!(a.eta, b.eta);
        assert!(a.residual <= 1e-10 && a.ode_residual() <= 1e-10);
        assert_eq!(a.boundary_defect, 0.0);
    }

    #[test]
    fn mesh_refinement_is_second_order() {
        let p1 = solve_radial_profile(-1, 20.0, 512, 1e-10).unwrap();
        let p2 = solve_radial_profile(-1, 20.0, 1024, 1e-10).unwrap();
        let p4 = solve_radial_profile(-1, 20.0, 2048, 1e-10).unwrap();
        let diff = |a: &RadialProfile, b: &RadialProfile| {
            (0..=a.intervals()).fold(0.0f64, |m, i| m.max((a.eta[i] - b.eta[2 * i]).abs()))
        };
        let (e1, e2) = (diff(&p1, &p2), diff(&p2, &p4));
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{e1} {e2}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(solve_radial_profile(0, 40.0, 1024, 1e-8).is_err());
        assert!(solve_radial_profile(2, 40.0, 1024, 1e-8).is_err());
        assert!(solve_radial_profile(-3, 40.0, 1024, 1e-8).is_err());
        assert!(solve_radial_profile(-1, 40.0, 256, 1e-8).is_err());
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let p = solve_radial_profile(-2, 40.0, 1024, 1e-10).unwrap();
        for i in [0usize, 1, 17, 500, 1023, 1024] {
            assert!((p.eval(p.r_nodes[i]).unwrap() - p.eta[i]).abs() < 1e-14);
        }
        assert!(p.eval(40.5).is_err());
    }

    #[test]
    fn radial_field_is_equivariant() {
        let p = solve_radial_profile(-1, 20.0, 1024, 1e-10).unwrap();
        for sign in [Sign::Plus, Sign::Minus] {
            let class = SymmetryClass::new(-1, sign).unwrap();
            let u = radial_field(&p, -1, sign.alpha(), 1.0, Layout::Sector(class), uniform_radii(10.0, 17), 16)
                .unwrap();
            assert!(equivariance_residual(class, &u).unwrap() < 1e-14);
        }
        let class = SymmetryClass::new(-1, Sign::Plus).unwrap();
        assert!(radial_field(&p, -1, Vec2::new(1.0, 0.0), 1.0, Layout::Sector(class), uniform_radii(30.0, 9), 8)
            .is_err());
    }
}
