//! Diagnostics on computed fields and the degree thresholds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::potential;
use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::symmetry::{winding_number, DEFAULT_MIN_MODULUS};
use crate::Vec2;

/// `f(x) = (x² + 2dx - |x|) / (x² + 2dx + 3|x| + 4d²)`.
pub fn f_of_x(d: i64, x: f64) -> f64 {
    let d = d as f64;
    let den = x * x + 2.0 * d * x + 3.0 * x.abs() + 4.0 * d * d;
    assert!(den > 0.0, "denominator of f vanished at d = {d}, x = {x}");
    (x * x + 2.0 * d * x - x.abs()) / den
}

/// Closed form of `δ_*(d) = f(2(1-d))`.
pub fn delta_star(d: i64) -> f64 {
    let d = d as f64;
    (2.0 - 2.0 * d) / (4.0 * d * d + 10.0 - 10.0 * d)
}

/// `2/√3 - 1`
pub fn delta_cap() -> f64 {
    2.0 / 3f64.sqrt() - 1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub d: i64,
    pub delta0: f64,
    pub delta_star: f64,
    pub argmin_x: i64,
}

fn check_d(d: i64) -> Result<()> {
    if d > -1 {
        return Err(Error::invalid(format!("d must be <= -1, got {d}")));
    }
    Ok(())
}

/// Minimum of `f` over `x = 2(1-d)k`, `0 < |k| ≤ K`, and the minimizing `x`.
///
/// Also checks on a sample that `f` decreases for `x ≤ -2(1-d)` and
/// increases for `x ≥ 2(1-d)`; panics if not.
pub fn delta_star_bruteforce(d: i64, k_max: i64) -> Result<(f64, i64)> {
    check_d(d)?;
    if k_max < 10 {
        return Err(Error::invalid("K must be at least 10"));
    }
    let step = 2 * (1 - d);
    let mut best = (f64::INFINITY, 0);
    for k in (-k_max..=k_max).filter(|&k| k != 0) {
        let x = step * k;
        let v = f_of_x(d, x as f64);
        if v < best.0 {
            best = (v, x);
        }
    }
    let edge = step as f64;
    let h = 1e-4;
    for s in 0..200 {
        let x = edge * (1.0 + 0.25 * s as f64);
        let up = f_of_x(d, x + h) - f_of_x(d, x - h);
        let down = f_of_x(d, -x + h) - f_of_x(d, -x - h);
        assert!(up >= -1e-14, "f' < 0 at x = {x}, d = {d}");
        assert!(down <= 1e-14, "f' > 0 at x = {}, d = {d}", -x);
    }
    Ok(best)
}

pub fn delta0(d: i64) -> Result<ThresholdRecord> {
    check_d(d)?;
    let ds = delta_star(d);
    Ok(ThresholdRecord {
        d,
        delta0: ds.min(delta_cap()),
        delta_star: ds,
        argmin_x: 2 * (1 - d),
    })
}

/// Quantities on one circle `∂D_r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircleDiagnostics {
    pub r: f64,
    /// `r ∮ e(u) ds` with the energy density of `E`.
    pub f: f64,
    /// `r ∮ (1-|u|²)² ds`
    pub g: f64,
    /// `sup |1 - |u||`
    pub sigma: f64,
    pub winding: Option<i64>,
}

/// Traces are taken at the grid columns, linear in `r` between rings.
pub fn circle_diagnostics(field: &PolarField, delta: f64, radii: &[f64]) -> Result<Vec<CircleDiagnostics>> {
    let disk = field.to_disk();
    let g = disk.nodal_gradients();
    let wrap = |v: Vec<Vec2>| PolarField::from_values(Layout::Disk, disk.radii().to_vec(), disk.ntheta(), v);
    let (dx, dy) = (wrap(g.dx)?, wrap(g.dy)?);
    let m = disk.ntheta();
    radii
        .iter()
        .map(|&r| {
            let trace = disk.circle_trace(r)?;
            let ds = r * 2.0 * PI / m as f64;
            let (mut f, mut gg, mut sigma) = (0.0, 0.0, 0.0f64);
            for (j, &u) in trace.samples().iter().enumerate() {
                let a = dx.radial_interp(r, j as i64)?;
                let b = dy.radial_interp(r, j as i64)?;
                let div = a.re + b.im;
                let e = 0.5 * (1.0 - delta) * (a.norm_sqr() + b.norm_sqr()) + delta * div * div + potential(u);
                f += e * ds;
                gg += (1.0 - u.norm_sqr()).powi(2) * ds;
                sigma = sigma.max((1.0 - u.norm()).abs());
            }
            Ok(CircleDiagnostics {
                r,
                f: r * f,
                g: r * gg,
                sigma,
                winding: winding_number(&trace, DEFAULT_MIN_MODULUS).ok(),
            })
        })
        .collect()
}

pub const DEFAULT_FRACTIONS: [f64; 3] = [0.5, 0.75, 0.95];

/// Common winding on the circles `fraction·R`.
pub fn degree_at_infinity(field: &PolarField, fractions: &[f64]) -> Result<i64> {
    if fractions.is_empty() {
        return Err(Error::invalid("need at least one probe circle"));
    }
    let outer = field.outer_radius();
    let windings = fractions
        .iter()
        .map(|f| winding_number(&field.circle_trace(f * outer)?, DEFAULT_MIN_MODULUS))
        .collect::<Result<Vec<_>>>()?;
    if windings.iter().any(|&w| w != windings[0]) {
        return Err(Error::DegreeNotStabilized(windings));
    }
    let w = windings[0];
    if let Some(class) = field.class() {
        let period = 2 * class.n() as i64;
        assert!(
            (w - class.d()).rem_euclid(period) == 0,
            "winding {w} is not congruent to {} mod {period}",
            class.d()
        );
    }
    Ok(w)
}

/// `max |u| - min |u|` on the circle of radius `r`.
pub fn nonradiality(field: &PolarField, r: f64) -> Result<f64> {
    let trace = field.circle_trace(r)?;
    let (lo, hi) = trace
        .samples()
        .iter()
        .map(|v| v.norm())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
    Ok(hi - lo)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub slope: f64,
    pub intercept: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

/// Least-squares line through `(ln R, E)`.
pub fn log_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (r, e)| (a + r.ln(), b + e));
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (r, e) in points {
        sxy += (r.ln() - mx) * (e - my);
        sxx += (r.ln() - mx).powi(2);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Slope of `E(u, D_R)` against `ln R` compared with the band
/// `[(1-δ)π d_∞² (1-0.1), (1+3δ)π(d² + |d_∞-d|)(1+0.1)]`.
pub fn energy_growth_check(points: &[(f64, f64)], d: i64, delta: f64, d_infinity: i64) -> Result<GrowthReport> {
    if points.len() < 3 {
        return Err(Error::invalid("energy growth needs at least 3 radii"));
    }
    if points.iter().any(|(r, e)| !(*r > 0.0) || !e.is_finite()) {
        return Err(Error::invalid("radii must be positive and energies finite"));
    }
    let (slope, intercept) = log_slope(points);
    let lower = 0.9 * (1.0 - delta) * PI * (d_infinity * d_infinity) as f64;
    let upper = 1.1 * (1.0 + 3.0 * delta) * PI * ((d * d) as f64 + (d_infinity - d).abs() as f64);
    Ok(GrowthReport {
        slope,
        intercept,
        lower,
        upper,
        within: slope >= lower && slope <= upper,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::uniform_radii;
    use crate::radial::{radial_field, solve_radial_profile};
    use crate::symmetry::{Sign, SymmetryClass};

    #[test]
    fn f_values() {
        assert!((f_of_x(-1, 4.0) - 1.0 / 6.0).abs() < 1e-15);
        assert!((f_of_x(-1, -4.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn thresholds() {
        let expect = [(-1, 0.154_700_538_379_251_7), (-2, 3.0 / 23.0), (-3, 2.0 / 19.0)];
        for (d, v) in expect {
            assert!((delta0(d).unwrap().delta0 - v).abs() < 1e-12);
        }
        for d in -6..=-1 {
            let (bf, x) = delta_star_bruteforce(d, 50).unwrap();
            assert!((bf - delta_star(d)).abs() < 1e-12);
            assert_eq!(x, 2 * (1 - d));
        }
        assert!(delta0(0).is_err());
        let ds: Vec<f64> = (1..=6).map(|k| delta0(-k).unwrap().delta0).collect();
        assert!(ds.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn constant_field_diagnostics_vanish() {
        let u = PolarField::disk(uniform_radii(4.0, 16), 32, |_, _| Vec2::new(0.6, -0.8));
        for c in circle_diagnostics(&u, 0.2, &[1.0, 2.5, 4.0]).unwrap() {
            assert!(c.f.abs() < 1e-14 && c.g.abs() < 1e-14 && c.sigma < 1e-14);
            assert_eq!(c.winding, Some(0));
        }
        assert!(nonradiality(&u, 2.0).unwrap() < 1e-15);
    }

    #[test]
    fn radial_field_probes() {
        let p = solve_radial_profile(-2, 40.0, 2048, 1e-10).unwrap();
        let class = SymmetryClass::new(-2, Sign::Plus).unwrap();
        let u = radial_field(&p, -2, Vec2::new(1.0, 0.0), 1.0, Layout::Sector(class), uniform_radii(20.0, 80), 16)
            .unwrap();
        assert_eq!(degree_at_infinity(&u, &DEFAULT_FRACTIONS).unwrap(), -2);
        assert!(nonradiality(&u, 1.3).unwrap() < 1e-12);
        let diag = circle_diagnostics(&u, 0.0, &[2.0, 5.0, 10.0, 19.0]).unwrap();
        assert!(diag.windows(2).all(|w| w[1].sigma < w[0].sigma && w[1].g < w[0].g));
    }

    #[test]
    fn growth_band() {
        let pts: Vec<(f64, f64)> = [5.0f64, 10.0, 20.0].iter().map(|r| (*r, PI * r.ln() + 1.3)).collect();
        let rep = energy_growth_check(&pts, -1, 0.0, -1).unwrap();
        assert!((rep.slope - PI).abs() < 1e-12 && rep.within);
        let flat: Vec<(f64, f64)> = pts.iter().map(|(r, _)| (*r, 0.0)).collect();
        assert!(!energy_growth_check(&flat, -1, 0.1, -1).unwrap().within);
        assert!(energy_growth_check(&pts[..2], -1, 0.1, -1).is_err());
    }
}
