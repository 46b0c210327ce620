//! Minimize the energy on D_20 in the class (d = -1, +) at δ = 0.1 and
//! inspect the result: degree on large circles, potential mass against the
//! circle constant, Pohozaev residuals and circle diagnostics.
//!
//! cargo run --release --example solve_vortex [-- <Nr=Ntheta>]

use std::f64::consts::PI;

use anisovortex::analysis::{circle_diagnostics, degree_at_infinity, delta0, nonradiality, DEFAULT_FRACTIONS};
use anisovortex::io::write_field;
use anisovortex::pohozaev::pohozaev;
use anisovortex::solver::{minimize_2d, SolveConfig};
use anisovortex::{Sign, Vec2};

fn main() -> anisovortex::Result<()> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse().expect("grid size")).unwrap_or(96);
    let config = SolveConfig::new(-1, Sign::Plus, 0.1, 20.0, n, n);
    let res = minimize_2d(&config)?;
    let e = res.breakdown;
    println!("converged {} after {} iterations, gradient {:.1e}", res.converged, res.iterations, res.final_gradient_norm);
    println!("E = {:.6} (Dirichlet {:.6}, div {:.6}, potential {:.6})", e.total, e.dirichlet, e.div_term, e.potential);
    println!("2 int W = {:.6}, C = {:.6}, pi d^2 = {:.6}", e.potential_mass(), res.boundary_c, PI);
    println!(
        "delta = {} < delta0(-1) = {:.6}; degree at infinity {}",
        config.delta,
        delta0(-1)?.delta0,
        degree_at_infinity(&res.field, &DEFAULT_FRACTIONS)?
    );
    println!("nonradiality at r = 1: {:.3e}", nonradiality(&res.field, 1.0)?);
    for c in circle_diagnostics(&res.field, config.delta, &[2.0, 5.0, 10.0, 15.0, 19.0])? {
        println!("  r = {:>4}: f = {:.4}  g = {:.2e}  sigma = {:.2e}  winding {:?}", c.r, c.f, c.g, c.sigma, c.winding);
    }
    let rep = pohozaev(&res.field, config.delta, Vec2::new(0.0, 0.0), 10.0, 256)?;
    println!("Pohozaev on D_10: relative residuals {:.2e}, {:.2e}", rep.relative1, rep.relative2);
    let out = std::env::temp_dir().join("anisovortex_solve_vortex.csv");
    write_field(&out, &res.field, -1, Sign::Plus, config.delta)?;
    println!("field written to {}", out.display());
    Ok(())
}
