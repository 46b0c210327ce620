//! Discrete energies, their exact gradient, and the Euler–Lagrange residual.
//!
//! Each cell `[rᵢ, rᵢ₊₁] × [θⱼ, θⱼ₊₁]` carries the bilinear interpolant of its
//! four corner values; densities are evaluated at the 2×2 Gauss points with
//! the polar Jacobian `r`. Full 2×2 integration has no hourglass modes, and
//! the Gauss points are mirror-symmetric inside each cell, so the discrete
//! energy keeps the grid's reflection symmetry. Sector fields are integrated
//! over the stored sector and multiplied by `2n`.
//!
//! [`energy_gradient`] differentiates this quadrature exactly, including the
//! twisted gluing of the last column, so it is the gradient the minimizer
//! needs. [`el_residual`] is a separate finite-difference diagnostic of the
//! PDE `(1-δ)Δu + 2δ∇(div u) = (|u|²-1)u`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lagrange_deriv_weights, PolarField};
use crate::Vec2;

const GAUSS: [f64; 2] = [
    0.211_324_865_405_187_1, // (1 - 1/√3)/2
    0.788_675_134_594_812_9,
];

/// `W(u) = ¼(1-|u|²)²`.
#[inline]
pub fn potential(u: Vec2) -> f64 {
    let s = 1.0 - u.norm_sqr();
    0.25 * s * s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `(1-δ)/2 ∫|∇u|²`
    pub dirichlet: f64,
    /// `δ ∫(div u)²`
    pub div_term: f64,
    /// `∫W(u)`
    pub potential: f64,
    pub total: f64,
    pub delta: f64,
}

impl EnergyBreakdown {
    /// `2∫W(u)`, the quantity bounded by the circle constant.
    pub fn potential_mass(&self) -> f64 {
        2.0 * self.potential
    }
}

/// Raw integrals over the domain.
#[derive(Clone, Copy, Debug, Default)]
pub struct Integrals {
    pub grad_sq: f64,
    pub div_sq: f64,
    pub curl_sq: f64,
    pub det: f64,
    pub potential: f64,
    pub div_curl: f64,
}

impl std::ops::AddAssign for Integrals {
    fn add_assign(&mut self, o: Self) {
        self.grad_sq += o.grad_sq;
        self.div_sq += o.div_sq;
        self.curl_sq += o.curl_sq;
        self.det += o.det;
        self.potential += o.potential;
        self.div_curl += o.div_curl;
    }
}

/// Values and derivatives of one Gauss point.
struct GaussPoint {
    /// Cartesian derivatives ∂₁u, ∂₂u.
    a: Vec2,
    b: Vec2,
    uc: Vec2,
    weight: f64,
    cos: f64,
    sin: f64,
    r: f64,
}

struct Cell {
    corners: [Vec2; 4], // 00, 10 (outer ring), 01 (next column), 11
    dr: f64,
    r0: f64,
    t0: f64,
}

fn check_grid(field: &PolarField) -> Result<()> {
    if field.nrings() < 5 || field.ntheta() < 4 {
        return Err(Error::invalid(format!(
            "degenerate grid: {} radial intervals, {} angular intervals (need at least 4 each)",
            field.nrings() - 1,
            field.ntheta()
        )));
    }
    Ok(())
}

impl Cell {
    fn new(field: &PolarField, i: usize, j: usize) -> Self {
        let jj = j as i64;
        Cell {
            corners: [
                field.get(i, jj),
                field.get(i + 1, jj),
                field.get(i, jj + 1),
                field.get(i + 1, jj + 1),
            ],
            dr: field.radii()[i + 1] - field.radii()[i],
            r0: field.radii()[i],
            t0: field.theta(jj),
        }
    }

    #[inline]
    fn point(&self, a: f64, b: f64, dt: f64, copies: f64) -> GaussPoint {
        let [u00, u10, u01, u11] = self.corners;
        let ur = ((u10 - u00) * (1.0 - b) + (u11 - u01) * b) / self.dr;
        let ut = ((u01 - u00) * (1.0 - a) + (u11 - u10) * a) / dt;
        let uc = u00 * ((1.0 - a) * (1.0 - b)) + u10 * (a * (1.0 - b)) + u01 * ((1.0 - a) * b) + u11 * (a * b);
        let r = self.r0 + a * self.dr;
        let th = self.t0 + b * dt;
        let (sin, cos) = th.sin_cos();
        GaussPoint {
            a: ur * cos - ut * (sin / r),
            b: ur * sin + ut * (cos / r),
            uc,
            weight: 0.25 * r * self.dr * dt * copies,
            cos,
            sin,
            r,
        }
    }
}

/// All raw integrals, reduced ring by ring in a fixed order.
pub fn integrals(field: &PolarField) -> Result<Integrals> {
    check_grid(field)?;
    let nt = field.ntheta();
    let dt = field.dtheta();
    let copies = field.layout().copies() as f64;
    let rings: Vec<Integrals> = (0..field.nrings() - 1)
        .into_par_iter()
        .map(|i| {
            let mut acc = Integrals::default();
            for j in 0..nt {
                let cell = Cell::new(field, i, j);
                for &a in &GAUSS {
                    for &b in &GAUSS {
                        let g = cell.point(a, b, dt, copies);
                        let div = g.a.re + g.b.im;
                        let curl = g.a.im - g.b.re;
                        let w = g.weight;
                        acc.grad_sq += w * (g.a.norm_sqr() + g.b.norm_sqr());
                        acc.div_sq += w * div * div;
                        acc.curl_sq += w * curl * curl;
                        acc.det += w * (g.a.re * g.b.im - g.b.re * g.a.im);
                        acc.potential += w * potential(g.uc);
                        acc.div_curl += w * div * curl;
                    }
                }
            }
            acc
        })
        .collect();
    let mut total = Integrals::default();
    for r in rings {
        total += r;
    }
    Ok(total)
}

/// `E(u) = ∫ (1-δ)/2|∇u|² + δ(div u)² + W(u)`.
pub fn energy_e(field: &PolarField, delta: f64) -> Result<EnergyBreakdown> {
    let s = integrals(field)?;
    let dirichlet = 0.5 * (1.0 - delta) * s.grad_sq;
    let div_term = delta * s.div_sq;
    Ok(EnergyBreakdown {
        dirichlet,
        div_term,
        potential: s.potential,
        total: dirichlet + div_term + s.potential,
        delta,
    })
}

/// `F(u) = ∫ ½|∇u|² + δ/2((div u)² - (curl u)²) + W(u)`.
pub fn energy_f(field: &PolarField, delta: f64) -> Result<f64> {
    let s = integrals(field)?;
    Ok(0.5 * s.grad_sq + 0.5 * delta * (s.div_sq - s.curl_sq) + s.potential)
}

/// `∫ det ∇u`; depends only on the boundary trace.
pub fn null_lagrangian(field: &PolarField) -> Result<f64> {
    Ok(integrals(field)?.det)
}

/// Per-cell corner contributions `[g00, g10, g01, g11]`.
fn cell_gradients(field: &PolarField, delta: f64) -> Vec<[Vec2; 4]> {
    let nt = field.ntheta();
    let dt = field.dtheta();
    let copies = field.layout().copies() as f64;
    (0..(field.nrings() - 1) * nt)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nt, k % nt);
            let cell = Cell::new(field, i, j);
            let mut out = [Vec2::new(0.0, 0.0); 4];
            for &a in &GAUSS {
                for &b in &GAUSS {
                    let g = cell.point(a, b, dt, copies);
                    let div = g.a.re + g.b.im;
                    let ga = g.a * (1.0 - delta) + Vec2::new(2.0 * delta * div, 0.0);
                    let gb = g.b * (1.0 - delta) + Vec2::new(0.0, 2.0 * delta * div);
                    let gw = g.uc * (g.uc.norm_sqr() - 1.0);
                    let gr = (ga * g.cos + gb * g.sin) / cell.dr;
                    let gt = (gb * g.cos - ga * g.sin) / (g.r * dt);
                    let w = g.weight;
                    out[0] += (-gr * (1.0 - b) - gt * (1.0 - a) + gw * ((1.0 - a) * (1.0 - b))) * w;
                    out[1] += (gr * (1.0 - b) - gt * a + gw * (a * (1.0 - b))) * w;
                    out[2] += (-gr * b + gt * (1.0 - a) + gw * ((1.0 - a) * b)) * w;
                    out[3] += (gr * b + gt * a + gw * (a * b)) * w;
                }
            }
            out
        })
        .collect()
}

/// Sum corner contributions onto the stored nodes of the free rings,
/// pulling the glued column back through the conjugate wrap factor.
fn gather(field: &PolarField, cells: &[[Vec2; 4]]) -> Vec<f64> {
    let nt = field.ntheta();
    let back = field.layout().wrap_power(1).conj();
    let (lo, hi) = field.free_ring_range();
    let nodes: Vec<Vec2> = (lo * nt..hi * nt)
        .into_par_iter()
        .map(|k| {
            let (i, m) = (k / nt, k % nt);
            let (jl, wl) = if m == 0 { (nt - 1, back) } else { (m - 1, Vec2::new(1.0, 0.0)) };
            cells[i * nt + m][0]
                + cells[(i - 1) * nt + m][1]
                + wl * cells[i * nt + jl][2]
                + wl * cells[(i - 1) * nt + jl][3]
        })
        .collect();
    let mut out = Vec::with_capacity(2 * nodes.len());
    for v in nodes {
        out.push(v.re);
        out.push(v.im);
    }
    out
}

/// Exact gradient of `energy_e(field, delta).total` with respect to
/// [`PolarField::free_dofs`].
pub fn energy_gradient(field: &PolarField, delta: f64) -> Result<Vec<f64>> {
    check_grid(field)?;
    let cells = cell_gradients(field, delta);
    Ok(gather(field, &cells))
}

/// Energy and gradient in one pass.
pub fn energy_and_gradient(field: &PolarField, delta: f64) -> Result<(f64, Vec<f64>)> {
    let e = energy_e(field, delta)?.total;
    Ok((e, energy_gradient(field, delta)?))
}

/// Diagonal approximation of the Hessian over the free DOFs, used as a
/// preconditioner.
pub fn hessian_diagonal(field: &PolarField, delta: f64) -> Vec<f64> {
    let nt = field.ntheta();
    let dt = field.dtheta();
    let copies = field.layout().copies() as f64;
    let cells: Vec<[f64; 4]> = (0..(field.nrings() - 1) * nt)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / nt, k % nt);
            let cell = Cell::new(field, i, j);
            let mut out = [0.0; 4];
            for &a in &GAUSS {
                for &b in &GAUSS {
                    let g = cell.point(a, b, dt, copies);
                    let cr = [-(1.0 - b), 1.0 - b, -b, b].map(|c| c / cell.dr);
                    let ct = [-(1.0 - a), -a, 1.0 - a, a].map(|c| c / (dt * g.r));
                    let phi = [(1.0 - a) * (1.0 - b), a * (1.0 - b), (1.0 - a) * b, a * b];
                    for c in 0..4 {
                        out[c] += g.weight
                            * ((1.0 + delta.abs()) * (cr[c] * cr[c] + ct[c] * ct[c]) + 2.0 * phi[c] * phi[c]);
                    }
                }
            }
            out
        })
        .collect();
    let (lo, hi) = field.free_ring_range();
    let mut out = Vec::with_capacity(2 * (hi - lo) * nt);
    for i in lo..hi {
        for m in 0..nt {
            let jl = if m == 0 { nt - 1 } else { m - 1 };
            let v = cells[i * nt + m][0] + cells[(i - 1) * nt + m][1] + cells[i * nt + jl][2] + cells[(i - 1) * nt + jl][3];
            out.push(v);
            out.push(v);
        }
    }
    out
}

/// Second-derivative weights for the quadratic through three points.
fn lagrange_second_weights(xs: [f64; 3]) -> [f64; 3] {
    let [a, b, c] = xs;
    [
        2.0 / ((a - b) * (a - c)),
        2.0 / ((b - a) * (b - c)),
        2.0 / ((c - a) * (c - b)),
    ]
}

/// Nodewise residual of `(1-δ)Δu + 2δ∇(div u) - (|u|²-1)u` by centered
/// differences in `(r, θ)` converted to Cartesian second derivatives. Zero on
/// the origin and on the outer ring.
pub fn el_residual(field: &PolarField, delta: f64) -> Result<PolarField> {
    check_grid(field)?;
    let nt = field.ntheta();
    let dt = field.dtheta();
    let radii = field.radii();
    let mut out = field.map(|_, _, _| Vec2::new(0.0, 0.0));
    let rows: Vec<(usize, Vec<Vec2>)> = (1..field.nrings() - 1)
        .into_par_iter()
        .map(|i| {
            let r = radii[i];
            let xs = [radii[i - 1], radii[i], radii[i + 1]];
            let w1 = lagrange_deriv_weights(xs, r);
            let w2 = lagrange_second_weights(xs);
            let row = (0..nt as i64)
                .map(|j| {
                    let col = |jj: i64| [field.get(i - 1, jj), field.get(i, jj), field.get(i + 1, jj)];
                    let c0 = col(j);
                    let cp = col(j + 1);
                    let cm = col(j - 1);
                    let u = c0[1];
                    let ur = c0[0] * w1[0] + c0[1] * w1[1] + c0[2] * w1[2];
                    let urr = c0[0] * w2[0] + c0[1] * w2[1] + c0[2] * w2[2];
                    let ut = (cp[1] - cm[1]) / (2.0 * dt);
                    let utt = (cp[1] - u * 2.0 + cm[1]) / (dt * dt);
                    let urt = ((cp[0] - cm[0]) * w1[0] + (cp[1] - cm[1]) * w1[1] + (cp[2] - cm[2]) * w1[2]) / (2.0 * dt);
                    let th = field.theta(j);
                    let (s, c) = th.sin_cos();
                    let (cc, ss, cs) = (c * c, s * s, c * s);
                    let uxx = urr * cc - urt * (2.0 * cs / r) + ut * (2.0 * cs / (r * r)) + ur * (ss / r) + utt * (ss / (r * r));
                    let uyy = urr * ss + urt * (2.0 * cs / r) - ut * (2.0 * cs / (r * r)) + ur * (cc / r) + utt * (cc / (r * r));
                    let uxy = urr * cs + urt * ((cc - ss) / r) - ut * ((cc - ss) / (r * r)) - ur * (cs / r) - utt * (cs / (r * r));
                    let lap = uxx + uyy;
                    let grad_div = Vec2::new(uxx.re + uxy.im, uxy.re + uyy.im);
                    lap * (1.0 - delta) + grad_div * (2.0 * delta) - u * (u.norm_sqr() - 1.0)
                })
                .collect();
            (i, row)
        })
        .collect();
    for (i, row) in rows {
        for (j, v) in row.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::uniform_radii;
    use crate::symmetry::{Sign, SymmetryClass};
    use std::f64::consts::PI;

    fn identity_map(nr: usize, m: usize) -> PolarField {
        PolarField::disk(uniform_radii(1.0, nr), m, Vec2::from_polar)
    }

    #[test]
    fn constant_unit_field_has_zero_energy() {
        let u = PolarField::disk(uniform_radii(3.0, 8), 16, |_, _| Vec2::new(1.0, 0.0));
        let e = energy_e(&u, 0.3).unwrap();
        assert!(e.total.abs() < 1e-15);
        assert!(energy_f(&u, 0.3).unwrap().abs() < 1e-15);
        let g = energy_gradient(&u, 0.3).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn identity_map_energy_converges_to_closed_form() {
        // π(1-δ) + 4πδ + π/12 on the unit disk
        for &delta in &[0.0, 0.2] {
            let exact = PI * (1.0 + 3.0 * delta) + PI / 12.0;
            let e1 = (energy_e(&identity_map(32, 64), delta).unwrap().total - exact).abs();
            let e2 = (energy_e(&identity_map(64, 128), delta).unwrap().total - exact).abs();
            assert!(e1 < 1e-2, "{e1}");
            assert!(e1 / e2 > 3.5, "order check {e1} {e2}");
        }
        let e = energy_e(&identity_map(256, 512), 0.0).unwrap().total;
        assert!((e - 3.403_392_0).abs() < 1e-4);
    }

    #[test]
    fn e_minus_f_is_delta_times_null_lagrangian() {
        let u = PolarField::disk(uniform_radii(1.5, 12), 24, |r, t| {
            Vec2::new(r * (2.0 * t).cos() + 0.3 * r * r, (r * t.sin()).tanh())
        });
        let delta = 0.37;
        let e = energy_e(&u, delta).unwrap().total;
        let f = energy_f(&u, delta).unwrap();
        let det = null_lagrangian(&u).unwrap();
        assert!((e - f - delta * det).abs() < 1e-12);
    }

    #[test]
    fn el_residual_vanishes_on_trivial_solutions() {
        let one = PolarField::disk(uniform_radii(2.0, 8), 16, |_, _| Vec2::new(1.0, 0.0));
        assert!(el_residual(&one, 0.4).unwrap().max_abs() < 1e-13);
        let zero = PolarField::disk(uniform_radii(2.0, 8), 16, |_, _| Vec2::new(0.0, 0.0));
        assert_eq!(el_residual(&zero, 0.4).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn sector_energy_equals_unfolded_energy() {
        let c = SymmetryClass::new(-2, Sign::Plus).unwrap();
        let s = PolarField::sector(c, uniform_radii(3.0, 10), 8, |r, t| {
            Vec2::from_polar(r.tanh(), -2.0 * t) * (1.0 + 0.1 * (6.0 * t).cos())
        });
        let a = energy_e(&s, 0.2).unwrap().total;
        let b = energy_e(&s.unfold(), 0.2).unwrap().total;
        assert!((a - b).abs() < 1e-12 * a.abs());
    }

    #[test]
    fn degenerate_grid_rejected() {
        let u = PolarField::disk(uniform_radii(1.0, 3), 16, |_, _| Vec2::new(1.0, 0.0));
        assert!(energy_e(&u, 0.0).is_err());
    }
}
