//! Isotropic radial profiles η_d with Richardson extrapolation, and the
//! radial vortex fields built from them.
//!
//! cargo run --release --example radial_profile

use anisovortex::energy::{el_residual, energy_e};
use anisovortex::field::uniform_radii;
use anisovortex::radial::{radial_field, solve_radial_profile};
use anisovortex::{Layout, Vec2};

fn main() -> anisovortex::Result<()> {
    for d in [-1i64, -2, -3] {
        let r_max = (20 * d.abs()).max(40) as f64;
        let coarse = solve_radial_profile(d, r_max, 4096, 1e-11)?;
        let fine = solve_radial_profile(d, r_max, 8192, 1e-11)?;
        let best = coarse.extrapolate(&fine)?;
        println!(
            "d = {d:>2}: eta(1) = {:.9}  eta(5) = {:.9}  ODE residual {:.1e}  far-field gap {:.1e}",
            best.eval(1.0)?,
            best.eval(5.0)?,
            fine.residual,
            fine.far_field_gap()
        );
    }

    // v_1(x/√(1+δ)) solves the anisotropic system; the discrete residual
    // shrinks with the grid away from the origin
    let delta: f64 = 0.3;
    let p = solve_radial_profile(1, 40.0, 8192, 1e-11)?;
    for n in [32usize, 64, 128] {
        let u = radial_field(&p, 1, Vec2::new(1.0, 0.0), (1.0 + delta).sqrt(), Layout::Disk, uniform_radii(8.0, n), n)?;
        let res = el_residual(&u, delta)?;
        let outer = u.nrings() - 1;
        let mut sup = 0.0f64;
        for i in 0..outer {
            if u.radii()[i] >= 0.5 {
                for j in 0..n {
                    sup = sup.max(res.node(i, j).norm());
                }
            }
        }
        println!("grid {n:>3}^2: sup |EL residual| on r >= 0.5 = {sup:.3e}, E = {:.6}", energy_e(&u, delta)?.total);
    }
    Ok(())
}
