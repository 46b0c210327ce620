mod support;

use anisovortex::radial::solve_radial_profile;

#[test]
fn relaxation_matches_shooting() {
    let coarse = solve_radial_profile(-1, 40.0, 4096, 1e-10).unwrap();
    let fine = solve_radial_profile(-1, 40.0, 8192, 1e-10).unwrap();
    let best = coarse.extrapolate(&fine).unwrap();
    let shot = support::shoot_radial(1, 8.0, 0.125);
    let mut raw = 0.0f64;
    let mut extrap = 0.0f64;
    for &(r, eta) in &shot {
        raw = raw.max((coarse.eval(r).unwrap() - eta).abs());
        extrap = extrap.max((best.eval(r).unwrap() - eta).abs());
    }
    eprintln!("eta(1) = {:.10}, raw gap {raw:.3e}, extrapolated gap {extrap:.3e}", best.eval(1.0).unwrap());
    assert!(raw < 1e-6, "{raw}");
    assert!(extrap < 1e-8, "{extrap}");
    assert!((coarse.eval(1.0).unwrap() - 0.520_051_7).abs() < 1e-6);
}
