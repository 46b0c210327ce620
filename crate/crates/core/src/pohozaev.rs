//! Both Pohozaev identities on a disk `D_r(x₀)` inside the grid:
//!
//! ```text
//! 2∫W = r∮ W + (1+δ)/2 (∂τu·e_θ)² + (1-δ)/2 (∂τu·e_r)²
//!             - (1+δ)/2 (∂ᵣu·e_r)² - (1-δ)/2 (∂ᵣu·e_θ)² ds
//! 2δ∫div u curl u = r∮ δ div u curl u - δ ∇(u·e_r)·∇(u·e_θ) - ∂ᵣu·∂τu ds
//! ```
//!
//! Values and nodal gradients are interpolated bilinearly in `(r, θ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::potential;
use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::Vec2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub center: [f64; 2],
    pub radius: f64,
    pub lhs1: f64,
    pub rhs1: f64,
    pub residual1: f64,
    /// `residual1` over `|lhs1|` plus the circle integral of the absolute
    /// integrand; zero when that scale is below `1e-10`.
    pub relative1: f64,
    pub lhs2: f64,
    pub rhs2: f64,
    pub residual2: f64,
    pub relative2: f64,
    pub quadrature_order: usize,
}

fn dot(a: Vec2, b: Vec2) -> f64 {
    a.re * b.re + a.im * b.im
}

struct Sampler {
    u: PolarField,
    dx: PolarField,
    dy: PolarField,
}

impl Sampler {
    fn new(field: &PolarField) -> Self {
        let u = field.to_disk();
        let g = u.nodal_gradients();
        let wrap = |v: Vec<Vec2>| {
            PolarField::from_values(Layout::Disk, u.radii().to_vec(), u.ntheta(), v).expect("same shape")
        };
        Sampler {
            dx: wrap(g.dx),
            dy: wrap(g.dy),
            u,
        }
    }

    fn at(&self, z: Vec2) -> Result<(Vec2, Vec2, Vec2)> {
        Ok((self.u.interpolate(z)?, self.dx.interpolate(z)?, self.dy.interpolate(z)?))
    }
}

fn relative(residual: f64, scale: f64) -> f64 {
    if scale < 1e-10 {
        0.0
    } else {
        residual / scale
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]` with four points.
const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

/// Evaluate both identities. `quadrature_order` is the number of points on
/// the circle; the disk integral uses the same angular count and
/// `quadrature_order / 4` Gauss panels in the radius.
pub fn pohozaev(
    field: &PolarField,
    delta: f64,
    center: Vec2,
    radius: f64,
    quadrature_order: usize,
) -> Result<PohozaevReport> {
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    if quadrature_order < 8 {
        return Err(Error::invalid("quadrature order must be at least 8"));
    }
    let outer = field.outer_radius();
    if center.norm() + radius > outer * (1.0 + 1e-12) || !field.has_origin() {
        return Err(Error::RadiusOutOfRange {
            radius: center.norm() + radius,
            domain: outer,
        });
    }
    let s = Sampler::new(field);
    let m = quadrature_order;
    let dphi = 2.0 * PI / m as f64;
    let ds = radius * dphi;

    let (mut rhs1, mut abs1, mut rhs2, mut abs2) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..m {
        let phi = k as f64 * dphi;
        let er = Vec2::from_polar(1.0, phi);
        let et = Vec2::new(-er.im, er.re);
        let (u, a, b) = s.at(center + er * radius)?;
        let dr = a * er.re + b * er.im;
        let dtau = a * et.re + b * et.im;
        let t1 = [
            potential(u),
            0.5 * (1.0 + delta) * dot(dtau, et).powi(2),
            0.5 * (1.0 - delta) * dot(dtau, er).powi(2),
            -0.5 * (1.0 + delta) * dot(dr, er).powi(2),
            -0.5 * (1.0 - delta) * dot(dr, et).powi(2),
        ];
        let div = a.re + b.im;
        let curl = a.im - b.re;
        let grad_r = (dot(a, er), dot(b, er));
        let grad_t = (dot(a, et), dot(b, et));
        let t2 = [
            delta * div * curl,
            -delta * (grad_r.0 * grad_t.0 + grad_r.1 * grad_t.1),
            -dot(dr, dtau),
        ];
        rhs1 += t1.iter().sum::<f64>() * ds;
        abs1 += t1.iter().map(|v| v.abs()).sum::<f64>() * ds;
        rhs2 += t2.iter().sum::<f64>() * ds;
        abs2 += t2.iter().map(|v| v.abs()).sum::<f64>() * ds;
    }
    rhs1 *= radius;
    abs1 *= radius;
    rhs2 *= radius;
    abs2 *= radius;

    let panels = (m / 4).max(2);
    let h = radius / panels as f64;
    let (mut w_int, mut dc_int) = (0.0, 0.0);
    for p in 0..panels {
        for &(x, w) in &GAUSS4 {
            let rho = (p as f64 + x) * h;
            let weight = w * h * rho * dphi;
            for k in 0..m {
                let z = center + Vec2::from_polar(rho, k as f64 * dphi);
                let (u, a, b) = s.at(z)?;
                w_int += potential(u) * weight;
                dc_int += (a.re + b.im) * (a.im - b.re) * weight;
            }
        }
    }
    let lhs1 = 2.0 * w_int;
    let lhs2 = 2.0 * delta * dc_int;
    let residual1 = (lhs1 - rhs1).abs();
    let residual2 = (lhs2 - rhs2).abs();
    Ok(PohozaevReport {
        center: [center.re, center.im],
        radius,
        lhs1,
        rhs1,
        residual1,
        relative1: relative(residual1, lhs1.abs() + abs1),
        lhs2,
        rhs2,
        residual2,
        relative2: relative(residual2, lhs2.abs() + abs2),
        quadrature_order,
    })
}
