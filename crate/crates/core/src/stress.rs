//! The stress-energy tensor of the anisotropic system.
//!
//! With `A = ∂₁u`, `B = ∂₂u`:
//!
//! ```text
//! T₁₁ = ½|A|² - ½|B|² + δ/2 |∇u₁|² - δ/2 |∇u₂|² - W(u)
//! T₁₂ = A·B + δ ∇u₁·∇u₂ + δ (div u)(curl u)
//! T₂₁ = A·B + δ ∇u₁·∇u₂ - δ (div u)(curl u)
//! T₂₂ = -T₁₁ - 2W(u)
//! ```
//!
//! Its row divergence `(∂₁T₁₁ + ∂₂T₁₂, ∂₁T₂₁ + ∂₂T₂₂)` vanishes on solutions.

use rayon::prelude::*;

use crate::energy::potential;
use crate::error::{Error, Result};
use crate::field::{lagrange_deriv_weights, PolarField};
use crate::Vec2;

/// `[T₁₁, T₁₂, T₂₁, T₂₂]` from the value and Cartesian derivatives.
pub fn stress_components(u: Vec2, a: Vec2, b: Vec2, delta: f64) -> [f64; 4] {
    let w = potential(u);
    let grad1 = a.re * a.re + b.re * b.re;
    let grad2 = a.im * a.im + b.im * b.im;
    let t11 = 0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + 0.5 * delta * (grad1 - grad2) - w;
    let cross = a.re * b.re + a.im * b.im + delta * (a.re * a.im + b.re * b.im);
    let dc = delta * (a.re + b.im) * (a.im - b.re);
    let t22 = 0.5 * b.norm_sqr() - 0.5 * a.norm_sqr() + 0.5 * delta * (grad2 - grad1) - w;
    [t11, cross + dc, cross - dc, t22]
}

/// Per-node tensor on the grid of `field`.
#[derive(Clone, Debug)]
pub struct StressTensorField {
    pub field: PolarField,
    pub t: Vec<[f64; 4]>,
}

pub fn stress_tensor(field: &PolarField, delta: f64) -> StressTensorField {
    let g = field.nodal_gradients();
    let t = field
        .values()
        .par_iter()
        .enumerate()
        .map(|(k, &u)| stress_components(u, g.dx[k], g.dy[k], delta))
        .collect();
    StressTensorField {
        field: field.clone(),
        t,
    }
}

impl StressTensorField {
    /// Largest `|T₁₁ + T₂₂ + 2W|` and `|T₂₁ - T₁₂ + 2δ div curl|` over nodes.
    pub fn identity_defects(&self, delta: f64) -> (f64, f64) {
        let g = self.field.nodal_gradients();
        let mut tr = 0.0f64;
        let mut anti = 0.0f64;
        for (k, t) in self.t.iter().enumerate() {
            let w = potential(self.field.values()[k]);
            tr = tr.max((t[0] + t[3] + 2.0 * w).abs());
            let (dv, cu) = g.div_curl(k);
            anti = anti.max((t[2] - t[1] + 2.0 * delta * dv * cu).abs());
        }
        (tr, anti)
    }
}

/// Sup-norm of the discrete row divergence of `T` over rings `2..nr-2`
/// whose radius lies in `[r_min, r_max]`.
pub fn divergence_sup(field: &PolarField, delta: f64, r_min: f64, r_max: f64) -> Result<f64> {
    let disk = field.to_disk();
    let nr = disk.nrings();
    if nr < 5 {
        return Err(Error::invalid("need at least 5 rings for the stress divergence"));
    }
    let st = stress_tensor(&disk, delta);
    let nt = disk.ntheta();
    let dt = disk.dtheta();
    let radii = disk.radii();
    let t_at = |i: usize, j: i64| st.t[i * nt + j.rem_euclid(nt as i64) as usize];
    let rows: Vec<f64> = (2..nr - 2)
        .into_par_iter()
        .map(|i| {
            let r = radii[i];
            if r < r_min || r > r_max {
                return 0.0;
            }
            let w = lagrange_deriv_weights([radii[i - 1], radii[i], radii[i + 1]], r);
            let mut worst = 0.0f64;
            for j in 0..nt as i64 {
                let (lo, mid, hi) = (t_at(i - 1, j), t_at(i, j), t_at(i + 1, j));
                let (prev, next) = (t_at(i, j - 1), t_at(i, j + 1));
                let th = disk.theta(j);
                let (c, s) = (th.cos(), th.sin());
                let d = |k: usize| {
                    let tr = w[0] * lo[k] + w[1] * mid[k] + w[2] * hi[k];
                    let tt = (next[k] - prev[k]) / (2.0 * dt);
                    (c * tr - s / r * tt, s * tr + c / r * tt)
                };
                let (d1_11, _) = d(0);
                let (_, d2_12) = d(1);
                let (d1_21, _) = d(2);
                let (_, d2_22) = d(3);
                let row1 = d1_11 + d2_12;
                let row2 = d1_21 + d2_22;
                worst = worst.max(row1.hypot(row2));
            }
            worst
        })
        .collect();
    Ok(rows.into_iter().fold(0.0, f64::max))
}
