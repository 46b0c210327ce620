//! Energy of the minimizer on D_R for growing R, and its slope against ln R
//! compared with the lower and upper logarithmic bounds.
//!
//! cargo run --release --example energy_growth

use anisovortex::analysis::{degree_at_infinity, energy_growth_check, DEFAULT_FRACTIONS};
use anisovortex::solver::{minimize_2d, SolveConfig};
use anisovortex::Sign;

fn main() -> anisovortex::Result<()> {
    let delta = 0.1;
    let mut points = Vec::new();
    let mut dinf = -1;
    for big_r in [5.0, 10.0, 20.0] {
        // keep the radial spacing fixed
        let nr = (4.0 * big_r) as usize;
        let res = minimize_2d(&SolveConfig::new(-1, Sign::Plus, delta, big_r, nr, 64))?;
        dinf = degree_at_infinity(&res.field, &DEFAULT_FRACTIONS)?;
        println!("R = {big_r:>4}: E = {:.6}, degree {dinf}", res.breakdown.total);
        points.push((big_r, res.breakdown.total));
    }
    let rep = energy_growth_check(&points, -1, delta, dinf)?;
    println!("slope {:.4} in [{:.4}, {:.4}]: {}", rep.slope, rep.lower, rep.upper, rep.within);
    Ok(())
}
