//! Explicit multi-vortex comparison maps: degree count, the ln(1/ε) slope of
//! their energy, and the annulus interpolation to a pure phase.
//!
//! cargo run --release --example comparison_maps

use std::f64::consts::PI;

use anisovortex::construction::{annulus_interpolation, comparison_energy_curve, construct_comparison, ComparisonMapSpec, CurveResolution};
use anisovortex::field::uniform_radii;
use anisovortex::symmetry::{equivariance_residual, winding_number, CircleTrace, DEFAULT_MIN_MODULUS};
use anisovortex::{Sign, SymmetryClass, Vec2};

fn main() -> anisovortex::Result<()> {
    let class = SymmetryClass::new(-1, Sign::Plus)?;
    for n in [0usize, 1, 2] {
        let spec = ComparisonMapSpec::new(-1, n, 1e-3);
        let u = construct_comparison(&spec, uniform_radii(0.5, 200), 64)?;
        println!(
            "N = {n}: {} vortices, degree on r = 0.45 is {} (D = {}), equivariance residual {:.1e}",
            spec.vortices().len(),
            winding_number(&u.circle_trace(0.45)?, DEFAULT_MIN_MODULUS)?,
            spec.total_degree(),
            equivariance_residual(class, &u)?
        );
    }

    let eps = [1e-2, 1e-3, 1e-4];
    let res = CurveResolution::default();
    for n in [0usize, 1] {
        let spec = ComparisonMapSpec::new(-1, n, 1e-2);
        let d = spec.d;
        let big_d = spec.total_degree();
        let target = PI * ((d * d) as f64 + (big_d - d).abs() as f64);
        let curve = comparison_energy_curve(-1, n, &eps, 0.1, &res)?;
        println!(
            "N = {n}: isotropic slope {:.4} (pi(d^2 + |D-d|) = {target:.4}), anisotropic slope {:.4} (cap {:.4})",
            curve.isotropic_slope,
            curve.anisotropic_slope,
            1.3 * target
        );
    }

    for big_r in [20.0, 40.0] {
        let trace = CircleTrace::from_fn(64, big_r, |t| Vec2::from_polar(1.0, -t + 0.1 * (4.0 * t).sin()))?;
        let ann = annulus_interpolation(&trace, -1, Vec2::new(1.0, 0.0), 64, 0.1)?;
        println!("annulus R/2 < r < R = {big_r}: energy {:.6}", ann.energy.total);
    }
    Ok(())
}
