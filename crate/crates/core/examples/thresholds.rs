//! The degree threshold δ₀(d) and the brute-force minimum of f over the
//! admissible degrees at infinity.
//!
//! cargo run --example thresholds

use anisovortex::analysis::{delta0, delta_star_bruteforce, f_of_x};

fn main() -> anisovortex::Result<()> {
    println!("{:>3} {:>12} {:>12} {:>9} {:>12}", "d", "delta_star", "delta0", "argmin x", "brute force");
    for d in (-8..=-1).rev() {
        let rec = delta0(d)?;
        let (bf, x) = delta_star_bruteforce(d, 50)?;
        println!("{d:>3} {:>12.9} {:>12.9} {x:>9} {bf:>12.9}", rec.delta_star, rec.delta0);
    }
    println!("\nf(x) for d = -1 on the lattice x = 4k:");
    for k in -3..=3i64 {
        if k != 0 {
            println!("  x = {:>3}: {:.6}", 4 * k, f_of_x(-1, 4.0 * k as f64));
        }
    }
    Ok(())
}
