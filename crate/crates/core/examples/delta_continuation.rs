//! Continuation in δ from the radial δ = 0 minimizer, tracking energy,
//! potential mass and the loss of radial symmetry.
//!
//! cargo run --release --example delta_continuation

use anisovortex::analysis::{degree_at_infinity, nonradiality, DEFAULT_FRACTIONS};
use anisovortex::solver::{continuation_delta, SolveConfig};
use anisovortex::Sign;

fn main() -> anisovortex::Result<()> {
    let deltas = [0.0, 0.05, 0.1, 0.15];
    for sign in [Sign::Plus, Sign::Minus] {
        let base = SolveConfig::new(-1, sign, 0.0, 20.0, 64, 64);
        println!("class (d = -1, {sign})");
        for (delta, r) in deltas.iter().zip(continuation_delta(&base, &deltas)?) {
            println!(
                "  delta = {delta:<5} E = {:.6}  2 int W = {:.6}  C = {:.6}  iters {:>5}  degree {}  nonradiality(1) = {:.2e}",
                r.breakdown.total,
                r.breakdown.potential_mass(),
                r.boundary_c,
                r.iterations,
                degree_at_infinity(&r.field, &DEFAULT_FRACTIONS)?,
                nonradiality(&r.field, 1.0)?
            );
        }
    }
    Ok(())
}
