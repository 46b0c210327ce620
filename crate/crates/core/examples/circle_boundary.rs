//! The S¹-valued boundary datum: minimize the circle energy in each class and
//! compare the constant C with the value π d² of the pure phase e^{idθ}.
//!
//! cargo run --release --example circle_boundary

use std::f64::consts::PI;

use anisovortex::boundary::{boundary_field, circle_energy, minimize_circle, BoundaryPhase};
use anisovortex::symmetry::{winding_number, DEFAULT_MIN_MODULUS};
use anisovortex::Sign;

fn main() -> anisovortex::Result<()> {
    println!("{:>3} {:>6} {:>6} {:>14} {:>14} {:>10}", "d", "sign", "delta", "C", "pi d^2 - C", "EL res");
    for d in [-1, -2, -3] {
        let m = 64 * (1 - d) as usize;
        for delta in [0.0, 0.05, 0.1, 0.2] {
            for sign in [Sign::Plus, Sign::Minus] {
                let sol = minimize_circle(d, sign, delta, m, 1e-10)?;
                println!(
                    "{d:>3} {sign:>6} {delta:>6} {:>14.10} {:>14.3e} {:>10.1e}",
                    sol.c(),
                    PI * (d * d) as f64 - sol.c(),
                    sol.energy.el_residual
                );
            }
        }
    }

    // the minus class at δ is the plus class at -δ
    let plus = minimize_circle(-1, Sign::Plus, -0.1, 256, 1e-10)?;
    let minus = minimize_circle(-1, Sign::Minus, 0.1, 256, 1e-10)?;
    println!("\nC(+, -0.1) = {:.12}, C(-, 0.1) = {:.12}", plus.c(), minus.c());

    let sol = minimize_circle(-2, Sign::Plus, 0.1, 192, 1e-10)?;
    let trace = boundary_field(&sol.phase);
    println!("winding of the optimal datum for d = -2: {}", winding_number(&trace, DEFAULT_MIN_MODULUS)?);
    let linear = BoundaryPhase::linear(-2, Sign::Plus, 192)?;
    println!("energy of e^(-2i theta) at delta = 0.1: {:.10}", circle_energy(&linear, 0.1)?);
    let peak = sol.phase.correction().iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
    println!("largest phase correction |psi - d theta|: {peak:.4}");
    Ok(())
}
