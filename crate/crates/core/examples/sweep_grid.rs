//! A small parameter sweep written to a temporary directory.
//!
//! cargo run --release --example sweep_grid

use anisovortex::sweep::{run_sweep, Grid, SweepSpec};
use anisovortex::Sign;

fn main() -> anisovortex::Result<()> {
    let out = std::env::temp_dir().join("anisovortex_sweep");
    let spec = SweepSpec {
        d_list: vec![-1, -2],
        sign_list: vec![Sign::Plus, Sign::Minus],
        delta_list: vec![0.0, 0.05, 0.1],
        r_list: vec![10.0],
        grid: Grid { nr: 40, ntheta: 32 },
        output_dir: out.clone(),
        tol: None,
        max_iters: None,
    };
    for row in run_sweep(&spec)? {
        let s = row.summary.as_ref();
        println!(
            "d = {:>2} {:<5} delta = {:<4} E = {:>10.5}  degree {:?}  {}",
            row.d,
            row.sign,
            row.delta,
            s.map(|s| s.energies.total).unwrap_or(f64::NAN),
            s.and_then(|s| s.degree_at_infinity),
            row.status
        );
    }
    println!("{}", std::fs::read_to_string(out.join("aggregate.csv"))?);
    Ok(())
}
