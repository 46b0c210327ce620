//! Stress-energy tensor and Pohozaev identities on the exact solutions
//! v_1(x/√(1+δ)) and i v_1(x/√(1-δ)), and on a map that is not a solution.
//!
//! cargo run --release --example pohozaev_stress

use anisovortex::field::uniform_radii;
use anisovortex::pohozaev::pohozaev;
use anisovortex::radial::{radial_field, solve_radial_profile};
use anisovortex::stress::{divergence_sup, stress_tensor};
use anisovortex::{Layout, PolarField, Vec2};

fn main() -> anisovortex::Result<()> {
    let delta: f64 = 0.2;
    let p = solve_radial_profile(1, 40.0, 8192, 1e-11)?;
    println!("{:>5} {:>12} {:>12} {:>12} {:>12}", "grid", "div T sup", "rel poz1", "rel poz2*", "trace defect");
    for n in [32usize, 64, 128, 256] {
        let u = radial_field(&p, 1, Vec2::new(1.0, 0.0), (1.0 + delta).sqrt(), Layout::Disk, uniform_radii(8.0, n), n)?;
        let div = divergence_sup(&u, delta, 0.5, 7.5)?;
        let centred = pohozaev(&u, delta, Vec2::new(0.0, 0.0), 4.0, 256)?;
        let shifted = pohozaev(&u, delta, Vec2::new(1.0, 0.5), 2.0, 256)?;
        let (tr, _) = stress_tensor(&u, delta).identity_defects(delta);
        println!("{n:>5} {div:>12.3e} {:>12.3e} {:>12.3e} {tr:>12.1e}", centred.relative1, shifted.relative2);
    }
    println!("* identity 2 on the off-centre disk D_2(1 + 0.5i); on centred disks both sides vanish");

    let minus = radial_field(&p, 1, Vec2::new(0.0, 1.0), (1.0 - delta).sqrt(), Layout::Disk, uniform_radii(8.0, 128), 128)?;
    let rep = pohozaev(&minus, delta, Vec2::new(0.0, 0.0), 4.0, 256)?;
    println!("\ni v_1(x/sqrt(1-delta)): lhs1 = {:.6}, rhs1 = {:.6}", rep.lhs1, rep.rhs1);

    let identity = PolarField::disk(uniform_radii(1.0, 128), 256, Vec2::from_polar);
    let rep = pohozaev(&identity, 0.0, Vec2::new(0.0, 0.0), 0.5, 256)?;
    println!("u(x) = x on D_1/2: residual1 = {:.6} (not a solution)", rep.residual1);
    Ok(())
}
