//! Explicit multi-vortex comparison maps on `D_{1/2}` and the log-linear
//! annulus interpolation between a circle trace and `α e^{iDθ}`.
//!
//! A comparison map has a vortex of degree `d` at the origin and, for
//! `j = 1..N`, `2n` satellites of degree `+1` at `λ_j e^{ikπ/n}` with
//! `λ_j = j/(4N)`. Away from the vortices it is the phase product
//! `∏ ((z-a)/|z-a|)^{deg a}`; inside `D_ρ(a)` it is
//! `min(r/(ρε), 1) c_a e^{i deg θ}` near `a`, with `c_a` the value of the
//! other factors at `a`, and the two phases are blended on `ρ/2 < r < ρ`.
//! Without satellites the map is `min(2r/ε, 1) e^{idθ}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::energy::{energy_e, potential, EnergyBreakdown};
use crate::error::{Error, Result};
use crate::field::{Layout, PolarField};
use crate::symmetry::{winding_number, CircleTrace, Sign, SymmetryClass, DEFAULT_MIN_MODULUS};
use crate::Vec2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonMapSpec {
    pub d: i64,
    pub n_rings: usize,
    pub epsilon: f64,
    /// Radius of the vortex disks; defaults to `1/(16N(1-d))`.
    pub rho: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vortex {
    pub center: Vec2,
    pub degree: i64,
}

fn arg(z: Vec2) -> f64 {
    z.im.atan2(z.re)
}

/// `∇ arg(z - b)`.
fn grad_angle(z: Vec2, b: Vec2) -> Vec2 {
    let w = z - b;
    Vec2::new(-w.im, w.re) / w.norm_sqr()
}

fn smoothstep(s: f64) -> (f64, f64) {
    if s <= 0.0 {
        (0.0, 0.0)
    } else if s >= 1.0 {
        (1.0, 0.0)
    } else {
        (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s))
    }
}

impl ComparisonMapSpec {
    pub fn new(d: i64, n_rings: usize, epsilon: f64) -> Self {
        ComparisonMapSpec {
            d,
            n_rings,
            epsilon,
            rho: None,
        }
    }

    fn n(&self) -> usize {
        (1 - self.d) as usize
    }

    /// Degree on `∂D_{1/2}`: `d + 2(1-d)N`.
    pub fn total_degree(&self) -> i64 {
        self.d + 2 * (1 - self.d) * self.n_rings as i64
    }

    pub fn rho(&self) -> f64 {
        match (self.rho, self.n_rings) {
            (Some(r), _) => r,
            (None, 0) => 0.5,
            (None, n) => 1.0 / (16.0 * n as f64 * (1 - self.d) as f64),
        }
    }

    /// Radius of the amplitude core around each vortex.
    pub fn core_radius(&self) -> f64 {
        if self.n_rings == 0 {
            0.5 * self.epsilon
        } else {
            self.rho() * self.epsilon
        }
    }

    pub fn vortices(&self) -> Vec<Vortex> {
        let mut out = vec![Vortex {
            center: Vec2::new(0.0, 0.0),
            degree: self.d,
        }];
        let n = self.n();
        for j in 1..=self.n_rings {
            let lambda = j as f64 / (4.0 * self.n_rings as f64);
            for k in 0..2 * n {
                out.push(Vortex {
                    center: Vec2::from_polar(lambda, k as f64 * PI / n as f64),
                    degree: 1,
                });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.d > -1 {
            return Err(Error::invalid(format!("comparison maps need d <= -1, got {}", self.d)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::invalid("epsilon must lie in (0, 1)"));
        }
        if self.n_rings == 0 {
            return Ok(());
        }
        let rho = self.rho();
        if !(rho > 0.0) {
            return Err(Error::invalid("rho must be positive"));
        }
        let vs = self.vortices();
        for (i, a) in vs.iter().enumerate() {
            if a.center.norm() + 2.0 * rho > 0.5 {
                return Err(Error::invalid("vortex disks leave D_1/2"));
            }
            for b in &vs[i + 1..] {
                if (a.center - b.center).norm() <= 4.0 * rho {
                    return Err(Error::invalid("vortex disks D_2rho overlap"));
                }
            }
        }
        Ok(())
    }

    fn phase_product(&self, vs: &[Vortex], z: Vec2, skip: Option<usize>) -> Vec2 {
        let mut p = Vec2::new(1.0, 0.0);
        for (k, v) in vs.iter().enumerate() {
            if Some(k) == skip {
                continue;
            }
            let w = z - v.center;
            p *= (w / w.norm()).powi(v.degree as i32);
        }
        p
    }

    /// Value and Cartesian derivatives `(u, ∂₁u, ∂₂u)` at `z`.
    pub fn evaluate(&self, z: Vec2) -> (Vec2, Vec2, Vec2) {
        let vs = self.vortices();
        self.evaluate_with(&vs, z)
    }

    fn evaluate_with(&self, vs: &[Vortex], z: Vec2) -> (Vec2, Vec2, Vec2) {
        let zero = Vec2::new(0.0, 0.0);
        if self.n_rings == 0 {
            let r = z.norm();
            let core = self.core_radius();
            if r == 0.0 {
                return (zero, zero, zero);
            }
            let (amp, damp) = if r < core { (r / core, 1.0 / core) } else { (1.0, 0.0) };
            let phase = Vec2::from_polar(1.0, self.d as f64 * arg(z));
            let ga = grad_angle(z, zero) * self.d as f64;
            return self.assemble(phase, amp, z / r * damp, ga);
        }
        let rho = self.rho();
        let core = self.core_radius();
        let near = vs.iter().position(|v| (z - v.center).norm() < rho);
        let Some(k) = near else {
            let phase = self.phase_product(vs, z, None);
            let mut g = zero;
            for v in vs {
                g += grad_angle(z, v.center) * v.degree as f64;
            }
            return self.assemble(phase, 1.0, zero, g);
        };
        let a = vs[k];
        let w = z - a.center;
        let r = w.norm();
        if r == 0.0 {
            return (zero, zero, zero);
        }
        let er = w / r;
        let (amp, damp) = if r < core { (r / core, 1.0 / core) } else { (1.0, 0.0) };
        let qa = self.phase_product(vs, a.center, Some(k));
        let qz = self.phase_product(vs, z, Some(k));
        let chi = arg(qz / qa);
        let (t, dt) = smoothstep((r - 0.5 * rho) / (0.5 * rho));
        let phase = qa * er.powi(a.degree as i32) * Vec2::from_polar(1.0, t * chi);
        let mut gchi = zero;
        for (b, v) in vs.iter().enumerate() {
            if b != k {
                gchi += grad_angle(z, v.center) * v.degree as f64;
            }
        }
        let gphi = grad_angle(z, a.center) * a.degree as f64 + er * (dt / (0.5 * rho) * chi) + gchi * t;
        self.assemble(phase, amp, er * damp, gphi)
    }

    /// `u = A e^{iΦ}`, `∂ₖu = e^{iΦ}(∂ₖA + iA∂ₖΦ)`; gradients of the real
    /// scalars `A`, `Φ` are packed as `x + iy`.
    fn assemble(&self, phase: Vec2, amp: f64, grad_amp: Vec2, grad_phase: Vec2) -> (Vec2, Vec2, Vec2) {
        let i = Vec2::new(0.0, 1.0);
        let d1 = phase * (grad_amp.re + i * amp * grad_phase.re);
        let d2 = phase * (grad_amp.im + i * amp * grad_phase.im);
        (phase * amp, d1, d2)
    }
}

/// The comparison map sampled on the sector of the class `(d, +)`.
pub fn construct_comparison(spec: &ComparisonMapSpec, radii: Vec<f64>, ntheta: usize) -> Result<PolarField> {
    spec.validate()?;
    let class = SymmetryClass::new(spec.d, Sign::Plus)?;
    let vs = spec.vortices();
    Ok(PolarField::sector(class, radii, ntheta, |r, t| {
        spec.evaluate_with(&vs, Vec2::from_polar(r, t)).0
    }))
}

/// A comparison map stretched from `D_{1/2}` to `D_R` with cores of unit
/// physical size, multiplied by `α` for the class.
pub fn comparison_init(class: SymmetryClass, n_rings: usize, radius: f64, radii: Vec<f64>, ntheta: usize) -> Result<PolarField> {
    let mut spec = ComparisonMapSpec::new(class.d(), n_rings, 0.5);
    let core_scale = if n_rings == 0 { 0.5 } else { spec.rho() };
    spec.epsilon = (1.0 / (2.0 * radius * core_scale)).min(0.5);
    spec.validate()?;
    let vs = spec.vortices();
    let alpha = class.sign().alpha();
    Ok(PolarField::sector(class, radii, ntheta, |r, t| {
        alpha * spec.evaluate_with(&vs, Vec2::from_polar(r / (2.0 * radius), t)).0
    }))
}

/// Energies of one comparison map on `D_{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEnergy {
    pub epsilon: f64,
    /// `∫ ½|∇u|² + W(u)/ε²`.
    pub isotropic: f64,
    /// `∫ (1-δ)/2 |∇u|² + δ(div u)² + W(u)/ε²`.
    pub anisotropic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyCurve {
    pub points: Vec<ComparisonEnergy>,
    /// Least-squares slopes against `ln(1/ε)`.
    pub isotropic_slope: f64,
    pub anisotropic_slope: f64,
}

/// Quadrature resolution for [`comparison_energy`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveResolution {
    /// Uniform radial intervals across each core `[0, ρε]`.
    pub core_intervals: usize,
    /// Geometric intervals from `ρε` out to `ρ`.
    pub collar_intervals: usize,
    /// Angular points per circle.
    pub angular: usize,
    /// Radial intervals of the background grid on `D_{1/2}`.
    pub background_radial: usize,
}

impl Default for CurveResolution {
    fn default() -> Self {
        CurveResolution {
            core_intervals: 16,
            collar_intervals: 160,
            angular: 128,
            background_radial: 512,
        }
    }
}

const GAUSS4: [(f64, f64); 4] = [
    (0.069_431_844_202_973_71, 0.173_927_422_568_726_93),
    (0.330_009_478_207_571_87, 0.326_072_577_431_273_07),
    (0.669_990_521_792_428_1, 0.326_072_577_431_273_07),
    (0.930_568_155_797_026_3, 0.173_927_422_568_726_93),
];

fn densities(u: Vec2, a: Vec2, b: Vec2, eps: f64, delta: f64) -> (f64, f64) {
    let grad = a.norm_sqr() + b.norm_sqr();
    let div = a.re + b.im;
    let w = potential(u) / (eps * eps);
    (0.5 * grad + w, 0.5 * (1.0 - delta) * grad + delta * div * div + w)
}

/// Both energies of the comparison map on `D_{1/2}`.
pub fn comparison_energy(spec: &ComparisonMapSpec, delta: f64, res: &CurveResolution) -> Result<ComparisonEnergy> {
    spec.validate()?;
    if res.core_intervals < 8 {
        return Err(Error::invalid(format!(
            "unresolved collar: {} radial intervals across the core, need at least 8",
            res.core_intervals
        )));
    }
    let vs = spec.vortices();
    let eps = spec.epsilon;
    let outer = if spec.n_rings == 0 { 0.5 } else { spec.rho() };
    let core = spec.core_radius();
    let m = res.angular;
    let dphi = 2.0 * PI / m as f64;

    // radial breakpoints: uniform across the core, geometric beyond it
    let mut breaks: Vec<f64> = (0..=res.core_intervals)
        .map(|k| core * k as f64 / res.core_intervals as f64)
        .collect();
    let ratio = (outer / core).powf(1.0 / res.collar_intervals as f64);
    for k in 1..=res.collar_intervals {
        breaks.push(if k == res.collar_intervals { outer } else { core * ratio.powi(k as i32) });
    }

    let (mut iso, mut aniso) = (0.0, 0.0);
    for v in &vs {
        for seg in breaks.windows(2) {
            let h = seg[1] - seg[0];
            for &(x, w) in &GAUSS4 {
                let r = seg[0] + x * h;
                for k in 0..m {
                    let z = v.center + Vec2::from_polar(r, (k as f64 + 0.5) * dphi);
                    let (u, a, b) = spec.evaluate_with(&vs, z);
                    let (di, da) = densities(u, a, b, eps, delta);
                    let weight = w * h * r * dphi;
                    iso += di * weight;
                    aniso += da * weight;
                }
            }
        }
    }

    if spec.n_rings > 0 {
        // the rest of D_1/2, where the map does not depend on ε
        let nb = res.background_radial;
        let mb = 8 * nb;
        let h = 0.5 / nb as f64;
        let dpb = 2.0 * PI / mb as f64;
        let rho = spec.rho();
        for i in 0..nb {
            for &(x, w) in &GAUSS4 {
                let r = (i as f64 + x) * h;
                for k in 0..mb {
                    let z = Vec2::from_polar(r, (k as f64 + 0.5) * dpb);
                    if vs.iter().any(|v| (z - v.center).norm() < rho) {
                        continue;
                    }
                    let (u, a, b) = spec.evaluate_with(&vs, z);
                    let (di, da) = densities(u, a, b, eps, delta);
                    let weight = w * h * r * dpb;
                    iso += di * weight;
                    aniso += da * weight;
                }
            }
        }
    }
    Ok(ComparisonEnergy {
        epsilon: eps,
        isotropic: iso,
        anisotropic: aniso,
    })
}

fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Energies over decreasing `epsilons` and their slopes against `ln(1/ε)`.
pub fn comparison_energy_curve(
    d: i64,
    n_rings: usize,
    epsilons: &[f64],
    delta: f64,
    res: &CurveResolution,
) -> Result<EnergyCurve> {
    if epsilons.len() < 2 {
        return Err(Error::invalid("need at least two epsilon values"));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("epsilon values must be strictly decreasing"));
    }
    let points = epsilons
        .iter()
        .map(|&e| comparison_energy(&ComparisonMapSpec::new(d, n_rings, e), delta, res))
        .collect::<Result<Vec<_>>>()?;
    let iso: Vec<(f64, f64)> = points.iter().map(|p| ((1.0 / p.epsilon).ln(), p.isotropic)).collect();
    let aniso: Vec<(f64, f64)> = points.iter().map(|p| ((1.0 / p.epsilon).ln(), p.anisotropic)).collect();
    Ok(EnergyCurve {
        isotropic_slope: ls_slope(&iso),
        anisotropic_slope: ls_slope(&aniso),
        points,
    })
}

#[derive(Clone, Debug)]
pub struct AnnulusInterpolation {
    /// Disk-layout field on rings from `R/2` to `R`.
    pub field: PolarField,
    pub energy: EnergyBreakdown,
}

/// Interpolate between `outer` on `∂D_R` and `α e^{iDθ}` on `∂D_{R/2}`:
/// with `t = ln(2r/R)/ln 2`, modulus `1 + t(ρ(θ) - 1)` and phase
/// `Dθ + tφ(θ)`, where `outer = α ρ e^{i(Dθ + φ)}`.
pub fn annulus_interpolation(
    outer: &CircleTrace,
    inner_degree: i64,
    alpha: Vec2,
    rings: usize,
    delta: f64,
) -> Result<AnnulusInterpolation> {
    let deg = winding_number(outer, DEFAULT_MIN_MODULUS)?;
    if deg != inner_degree {
        return Err(Error::invalid(format!(
            "outer trace winds {deg} times, expected {inner_degree}"
        )));
    }
    if rings < 4 {
        return Err(Error::invalid("need at least 4 radial intervals"));
    }
    let m = outer.len();
    let big_r = outer.radius();
    let mut modulus = Vec::with_capacity(m);
    let mut phi = Vec::with_capacity(m);
    let mut prev = 0.0;
    for (k, &s) in outer.samples().iter().enumerate() {
        let base = alpha * Vec2::from_polar(1.0, inner_degree as f64 * outer.theta(k));
        let rel = s / base;
        let mut a = arg(rel);
        if k > 0 {
            a = prev + (a - prev + PI).rem_euclid(2.0 * PI) - PI;
        }
        prev = a;
        modulus.push(s.norm());
        phi.push(a);
    }
    let radii: Vec<f64> = (0..=rings)
        .map(|i| 0.5 * big_r * (1.0 + i as f64 / rings as f64))
        .collect();
    let mut values = Vec::with_capacity(radii.len() * m);
    for &r in &radii {
        let t = (2.0 * r / big_r).ln() / 2f64.ln();
        for k in 0..m {
            let rho = 1.0 + t * (modulus[k] - 1.0);
            values.push(alpha * Vec2::from_polar(rho, inner_degree as f64 * outer.theta(k) + t * phi[k]));
        }
    }
    let field = PolarField::from_values(Layout::Disk, radii, m, values)?;
    let energy = energy_e(&field, delta)?;
    Ok(AnnulusInterpolation { field, energy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::uniform_radii;
    use crate::symmetry::equivariance_residual;

    #[test]
    fn single_vortex_model() {
        let spec = ComparisonMapSpec::new(-1, 0, 1e-2);
        for &(r, t) in &[(0.001, 0.3), (0.2, 1.0), (0.004, -2.0)] {
            let z = Vec2::from_polar(r, t);
            let expect = Vec2::from_polar((2.0 * r / 1e-2f64).min(1.0), -t);
            assert!((spec.evaluate(z).0 - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn degree_count_and_equivariance() {
        for (n_rings, expect) in [(0usize, -1i64), (1, 3), (2, 7)] {
            let spec = ComparisonMapSpec::new(-1, n_rings, 1e-2);
            assert_eq!(spec.total_degree(), expect);
            let trace = CircleTrace::from_fn(512, 0.5, |t| spec.evaluate(Vec2::from_polar(0.5, t)).0).unwrap();
            assert_eq!(winding_number(&trace, DEFAULT_MIN_MODULUS).unwrap(), expect);
            let class = SymmetryClass::new(-1, Sign::Plus).unwrap();
            let u = construct_comparison(&spec, uniform_radii(0.5, 64), 64).unwrap();
            assert!(equivariance_residual(class, &u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let spec = ComparisonMapSpec::new(-2, 1, 0.05);
        let h = 1e-7;
        let rho = spec.rho();
        let a = Vec2::new(0.25, 0.0);
        for z in [
            Vec2::new(0.1, 0.13),
            a + Vec2::from_polar(0.7 * rho, 0.4),
            a + Vec2::from_polar(0.02 * rho, 2.0),
            Vec2::from_polar(0.6 * rho, 1.1),
        ] {
            let (_, d1, d2) = spec.evaluate(z);
            let f1 = (spec.evaluate(z + h).0 - spec.evaluate(z - h).0) / (2.0 * h);
            let ih = Vec2::new(0.0, h);
            let f2 = (spec.evaluate(z + ih).0 - spec.evaluate(z - ih).0) / (2.0 * h);
            let scale = 1.0 + d1.norm() + d2.norm();
            assert!((d1 - f1).norm() < 1e-5 * scale, "{z} {d1} {f1}");
            assert!((d2 - f2).norm() < 1e-5 * scale, "{z} {d2} {f2}");
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = ComparisonMapSpec::new(-1, 1, 1e-2);
        spec.rho = Some(0.2);
        assert!(spec.validate().is_err());
        assert!(ComparisonMapSpec::new(-1, 1, 2.0).validate().is_err());
        let res = CurveResolution {
            core_intervals: 4,
            ..Default::default()
        };
        assert!(comparison_energy(&ComparisonMapSpec::new(-1, 0, 1e-2), 0.0, &res).is_err());
    }

    #[test]
    fn annulus_of_pure_phase_is_constant_in_r() {
        let trace = CircleTrace::from_fn(64, 20.0, |t| Vec2::from_polar(1.0, -3.0 * t)).unwrap();
        let ann = annulus_interpolation(&trace, -3, Vec2::new(1.0, 0.0), 8, 0.1).unwrap();
        for i in 0..ann.field.nrings() {
            for j in 0..64 {
                assert!((ann.field.node(i, j) - trace.samples()[j]).norm() < 1e-13);
            }
        }
        assert!(annulus_interpolation(&trace, -1, Vec2::new(1.0, 0.0), 8, 0.1).is_err());
    }
}
